#include "doctest.h"

#include <functional>
#include <random>

#include "antic/parser.hpp"
#include "fixtures.hpp"

using namespace antic;
using namespace antic::io;

namespace {

const char* kTiny = R"((define (domain tiny)
  (:types thing)
  (:predicates (p ?x - thing) (q ?x - thing))
  (:action make
    :parameters (?x - thing)
    :precondition (and (p ?x) (not (q ?x)))
    :effect (and (q ?x))
    :cost 2))
)";

std::string first_error(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        REQUIRE_FALSE(e.diagnostics().empty());
        return e.diagnostics().front().format();
    }
    return "";
}

std::string domain_error(const std::string& text) {
    return first_error([&] { parse_domain(text, "d.pddl"); });
}

}  // namespace

TEST_CASE("parses a small domain") {
    const auto d = parse_domain(kTiny);
    CHECK(d.name == "tiny");
    REQUIRE(d.schemas.size() == 1);
    const auto& s = d.schemas[0];
    CHECK(s.cost == 2.0);
    CHECK(s.kind == ActionKind::agent);
    CHECK(s.preconditions.size() == 2);
    CHECK_FALSE(s.preconditions[1].positive);
}

TEST_CASE("event and mitigation blocks set the action kind") {
    const auto c = fixtures::canonical();
    CHECK(c.task.domain.find_schema("wind-capture")->kind == ActionKind::exogenous_event);
    CHECK(c.task.domain.find_schema("wind-capture")->cost == 0.0);
    CHECK(c.task.domain.find_schema("hook-out")->kind == ActionKind::mitigation_candidate);
    CHECK(c.task.domain.find_schema("dig3")->kind == ActionKind::agent);
}

TEST_CASE("cost defaults to one") {
    const auto f = fixtures::load("fixtures/corridor");
    CHECK(f.task.domain.find_schema("walk")->cost == 1.0);
    CHECK(f.task.domain.find_schema("unlock")->cost == 2.0);
}

TEST_CASE("domain diagnostics carry file, line and column") {
    std::string text = kTiny;
    text.replace(text.find("(q ?x))\n    :cost"), 7, "(q ?y))");
    CHECK(domain_error(text) == "d.pddl:7:21: error: undeclared variable ?y");

    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t))\n"
                       "  (:action a :parameters (?a - t) :precondition (and (r ?a)) :effect (and (p ?a))))")
              .find("2:55: error: undeclared predicate 'r'") != std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t))\n"
                       "  (:action a :parameters (?a - t) :precondition (and (p ?a ?a)) :effect (and (p ?a))))")
              .find("expects 1 arguments, got 2") != std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - u)))").find("undeclared type 'u'") !=
          std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t) (p ?b - t)))")
              .find("duplicate predicate 'p'") != std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t))\n"
                       "  (:action a :parameters (?a - t) :precondition (and) :effect (and (p ?a) (not (p ?a)))))")
              .find("contradicts") != std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t))\n"
                       "  (:action a :parameters (?a - t) :effect (and (p ?a))))")
              .find("missing :precondition") != std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t))\n"
                       "  (:action a :parameters (?a - t) :precondition (and) :effect (and) :cost -1))")
              .find("non-negative integer cost") != std::string::npos);
    CHECK(domain_error("(define (domain x) (:types t) (:predicates (p ?a - t))").find("missing ')'") !=
          std::string::npos);
    CHECK(domain_error("(define (domain x)) )").find("unexpected") != std::string::npos);
    CHECK(domain_error("").find("empty input") != std::string::npos);
    CHECK(domain_error("(define (domain x) \x01)").find("unexpected character (byte 0x1)") != std::string::npos);
}

TEST_CASE("deep nesting is rejected with a diagnostic") {
    std::string text(500, '(');
    text += std::string(500, ')');
    CHECK(domain_error(text).find("nested too deeply") != std::string::npos);
}

TEST_CASE("problem diagnostics") {
    const auto d = parse_domain(kTiny);
    auto err = [&](const std::string& text) { return first_error([&] { parse_problem(text, d, "p.pddl"); }); };
    CHECK(err("(define (problem a) (:domain other) (:objects o - thing) (:init) (:goal (and (p o))))")
              .find("not 'tiny'") != std::string::npos);
    CHECK(err("(define (problem a) (:domain tiny) (:objects o - thing) (:init (p z)) (:goal (and (p o))))")
              .find("undeclared object 'z'") != std::string::npos);
    CHECK(err("(define (problem a) (:domain tiny) (:objects o - thing o - thing) (:init) (:goal (and (p o))))")
              .find("duplicate object 'o'") != std::string::npos);
    CHECK(err("(define (problem a) (:domain tiny) (:objects o - thing) (:init) (:goal (and (not (p o)))))")
              .find("negative goal literals") != std::string::npos);
    CHECK(err("(define (problem a) (:domain tiny) (:objects o - thing) (:init))").find("missing (:goal") !=
          std::string::npos);
}

TEST_CASE("plan diagnostics") {
    const auto c = fixtures::canonical();
    auto err = [&](const std::string& text) {
        return first_error([&] { parse_plan(text, c.task.domain, c.task.problem, "plan.txt"); });
    };
    CHECK(err("0: (dig1 agent)\n2: (dig2 agent)\n").find("plan.txt:2:1: error: step index 2 is not contiguous") !=
          std::string::npos);
    CHECK(err("0: (fly agent)\n").find("fly") != std::string::npos);
    CHECK(err("0: (dig1 agent agent)\n").find("plan.txt:1:") != std::string::npos);
    CHECK(err("0: (dig1 c1-1)\n").find("plan.txt:1:") != std::string::npos);
    CHECK(parse_plan("", c.task.domain, c.task.problem).empty());
}

TEST_CASE("round trip on every fixture") {
    for (const char* dir : {"fixtures/corridor", "fixtures/rival", "fixtures/weather", "nbeacons"}) {
        CAPTURE(dir);
        const auto dtext = read_file(fixtures::data(std::string(dir) + "/domain.pddl"));
        const auto ptext = read_file(fixtures::data(std::string(dir) + "/problem.pddl"));
        const auto d = parse_domain(dtext);
        const auto p = parse_problem(ptext, d);
        CHECK(parse_domain(write_domain(d)) == d);
        CHECK(parse_problem(write_problem(p), d) == p);
        CHECK(write_domain(parse_domain(write_domain(d))) == write_domain(d));
        const auto task = GroundedTask::make(d, p);
        const auto plan = load_plan(fixtures::data(std::string(dir) + "/plan.txt"), task);
        CHECK(write_plan(parse_plan(write_plan(plan), d, p)) == write_plan(plan));
    }
}

TEST_CASE("canonical files are already in written form") {
    const auto dtext = read_file(fixtures::data("nbeacons/domain.pddl"));
    const auto ptext = read_file(fixtures::data("nbeacons/problem.pddl"));
    const auto d = parse_domain(dtext);
    CHECK(write_domain(d) == dtext);
    CHECK(write_problem(parse_problem(ptext, d)) == ptext);
}

TEST_CASE("comments and whitespace are ignored") {
    std::string text = std::string("; leading comment\n") + kTiny;
    text.insert(text.find("(:types"), "  ; inline\n\t");
    CHECK(parse_domain(text) == parse_domain(kTiny));
}

TEST_CASE("random bytes never escape as anything but ParseError") {
    std::mt19937_64 rng(12345);
    const std::string alphabet = "()?-:; \n\tabcdefgnotpq1234567890\x01\xff";
    const auto d = parse_domain(kTiny);
    std::size_t diagnosed = 0;
    for (int i = 0; i < 3000; ++i) {
        std::string text(std::uniform_int_distribution<int>(0, 80)(rng), ' ');
        for (auto& ch : text) ch = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
        for (int which = 0; which < 2; ++which) {
            try {
                if (which == 0) parse_domain(text);
                else parse_problem(text, d);
            } catch (const ParseError& e) {
                CHECK_FALSE(e.diagnostics().empty());
                ++diagnosed;
            }
        }
    }
    CHECK(diagnosed > 0);
}
