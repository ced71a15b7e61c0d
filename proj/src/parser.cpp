#include "antic/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace antic::io {

std::string ParseDiagnostic::format() const {
    std::ostringstream out;
    out << span.file << ':' << span.line << ':' << span.column << ": "
        << (severity == Severity::error ? "error" : "warning") << ": " << message;
    return out.str();
}

ParseError::ParseError(std::vector<ParseDiagnostic> diagnostics)
    : Error(diagnostics.empty() ? std::string("parse error") : diagnostics.front().format()),
      diagnostics_(std::move(diagnostics)) {}

namespace {

constexpr std::size_t kMaxDepth = 64;

struct SExpr {
    bool is_list = false;
    std::string text;  // symbol text
    std::vector<SExpr> items;
    SourceSpan span;
};

[[noreturn]] void fail(const SourceSpan& span, std::string message) {
    throw ParseError({ParseDiagnostic{Severity::error, std::move(message), span}});
}

bool is_symbol_char(unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '?' || c == ':';
}

class Lexer {
public:
    Lexer(std::string_view text, std::string_view file) : text_(text), file_(file) {}

    /// Parses every top-level expression in the text.
    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_space();
        while (pos_ < text_.size()) {
            out.push_back(read(0));
            skip_space();
        }
        return out;
    }

    SourceSpan here() const { return {std::string(file_), line_, column_}; }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const auto c = static_cast<unsigned char>(text_[pos_]);
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read(std::size_t depth) {
        if (depth > kMaxDepth) fail(here(), "expression nested too deeply");
        SExpr node;
        node.span = here();
        const auto c = static_cast<unsigned char>(text_[pos_]);
        if (c == '(') {
            node.is_list = true;
            advance();
            skip_space();
            while (pos_ < text_.size() && text_[pos_] != ')') {
                node.items.push_back(read(depth + 1));
                skip_space();
            }
            if (pos_ >= text_.size()) fail(node.span, "unbalanced '(': missing ')'");
            advance();
            return node;
        }
        if (c == ')') fail(node.span, "unexpected ')'");
        if (!is_symbol_char(c)) {
            std::ostringstream msg;
            msg << "unexpected character (byte 0x" << std::hex << static_cast<int>(c) << ")";
            fail(node.span, msg.str());
        }
        while (pos_ < text_.size() && is_symbol_char(static_cast<unsigned char>(text_[pos_]))) {
            node.text += text_[pos_];
            advance();
        }
        if (pos_ < text_.size()) {
            const auto next = static_cast<unsigned char>(text_[pos_]);
            if (!std::isspace(next) && next != '(' && next != ')' && next != ';') {
                std::ostringstream msg;
                msg << "unexpected character (byte 0x" << std::hex << static_cast<int>(next) << ")";
                fail(here(), msg.str());
            }
        }
        return node;
    }

    std::string_view text_;
    std::string_view file_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool is_name(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
        const auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) || c == '-' || c == '_';
    });
}

bool is_var(std::string_view s) { return s.size() > 1 && s.front() == '?' && is_name(s.substr(1)); }

bool is_int(std::string_view s) {
    return !s.empty() && s.size() <= 9 &&
           std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_symbol(const SExpr& e, std::string_view text) { return !e.is_list && e.text == text; }

const SExpr& expect_list(const SExpr& e, std::string_view what) {
    if (!e.is_list) fail(e.span, "expected " + std::string(what) + ", found '" + e.text + "'");
    return e;
}

std::string expect_name(const SExpr& e, std::string_view what) {
    if (e.is_list || !is_name(e.text)) fail(e.span, "expected " + std::string(what));
    return e.text;
}

/// `(head ...)` whose first item is the given symbol.
bool has_head(const SExpr& e, std::string_view head) {
    return e.is_list && !e.items.empty() && is_symbol(e.items.front(), head);
}

/// Parses `x - t y - t ...` starting at items[first]. `var` selects ?variables
/// versus plain object names.
std::vector<std::pair<TypedName, SourceSpan>> parse_typed_list(const SExpr& list, std::size_t first, bool var,
                                                               const DomainModel& domain) {
    std::vector<std::pair<TypedName, SourceSpan>> out;
    const auto& items = list.items;
    for (std::size_t i = first; i < items.size(); i += 3) {
        const auto& n = items[i];
        if (n.is_list || !(var ? is_var(n.text) : is_name(n.text)))
            fail(n.span, var ? "expected a variable such as ?x" : "expected an object name");
        if (i + 1 >= items.size() || !is_symbol(items[i + 1], "-"))
            fail(i + 1 < items.size() ? items[i + 1].span : n.span, "expected '-' and a type after '" + n.text + "'");
        if (i + 2 >= items.size()) fail(items[i + 1].span, "missing type after '-'");
        const auto type = expect_name(items[i + 2], "a type name");
        if (!domain.has_type(type)) fail(items[i + 2].span, "undeclared type '" + type + "'");
        out.push_back({TypedName{n.text, type}, n.span});
    }
    return out;
}

struct Scope {
    const DomainModel& domain;
    const std::vector<TypedName>* variables = nullptr;  // schema scope
    const Problem* problem = nullptr;                    // ground scope
};

Atom parse_atom(const SExpr& e, const Scope& scope) {
    expect_list(e, "an atom");
    if (e.items.empty()) fail(e.span, "empty atom");
    const auto name = expect_name(e.items.front(), "a predicate name");
    const PredicateDecl* decl = scope.domain.find_predicate(name);
    if (!decl) fail(e.items.front().span, "undeclared predicate '" + name + "'");
    if (e.items.size() - 1 != decl->arity()) {
        fail(e.span, "predicate '" + name + "' expects " + std::to_string(decl->arity()) + " arguments, got " +
                         std::to_string(e.items.size() - 1));
    }
    Atom atom{name, {}};
    for (std::size_t i = 1; i < e.items.size(); ++i) {
        const auto& term = e.items[i];
        if (term.is_list) fail(term.span, "expected a term");
        const auto& want = decl->params[i - 1].type;
        std::string type;
        if (scope.variables) {
            if (!is_var(term.text)) fail(term.span, "expected a variable, found '" + term.text + "'");
            auto it = std::find_if(scope.variables->begin(), scope.variables->end(),
                                   [&](const TypedName& v) { return v.name == term.text; });
            if (it == scope.variables->end()) fail(term.span, "undeclared variable " + term.text);
            type = it->type;
        } else {
            if (!is_name(term.text)) fail(term.span, "expected an object name, found '" + term.text + "'");
            const TypedName* obj = scope.problem->find_object(term.text);
            if (!obj) fail(term.span, "undeclared object '" + term.text + "'");
            type = obj->type;
        }
        if (want != kObjectType && type != want)
            fail(term.span, "'" + term.text + "' has type '" + type + "' but '" + name + "' expects '" + want + "'");
        atom.args.push_back(term.text);
    }
    return atom;
}

Literal parse_literal(const SExpr& e, const Scope& scope) {
    if (has_head(e, "not")) {
        if (e.items.size() != 2) fail(e.span, "'not' takes exactly one atom");
        return neg(parse_atom(e.items[1], scope));
    }
    return pos(parse_atom(e, scope));
}

std::vector<Literal> parse_conj(const SExpr& e, const Scope& scope) {
    expect_list(e, "a conjunction or literal");
    std::vector<Literal> out;
    if (has_head(e, "and")) {
        for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(parse_literal(e.items[i], scope));
    } else {
        out.push_back(parse_literal(e, scope));
    }
    return out;
}

const SExpr& single_define(const std::vector<SExpr>& top, std::string_view file) {
    if (top.empty()) fail(SourceSpan{std::string(file), 1, 1}, "empty input: expected '(define ...)'");
    if (top.size() > 1) fail(top[1].span, "unexpected content after '(define ...)'");
    const SExpr& def = top.front();
    if (!has_head(def, "define")) fail(def.span, "expected '(define ...)'");
    return def;
}

std::string header_name(const SExpr& def, std::string_view keyword) {
    if (def.items.size() < 2 || !has_head(def.items[1], keyword))
        fail(def.items.size() < 2 ? def.span : def.items[1].span, "expected '(" + std::string(keyword) + " NAME)'");
    const auto& hdr = def.items[1];
    if (hdr.items.size() != 2) fail(hdr.span, "expected '(" + std::string(keyword) + " NAME)'");
    return expect_name(hdr.items[1], "a name");
}

std::string format_cost(double cost) {
    std::ostringstream out;
    out << static_cast<long long>(cost);
    return out.str();
}

ActionSchema parse_block(const SExpr& block, const DomainModel& domain) {
    ActionSchema schema;
    const auto& head = block.items.front().text;
    schema.kind = head == ":event"        ? ActionKind::exogenous_event
                  : head == ":mitigation" ? ActionKind::mitigation_candidate
                                          : ActionKind::agent;
    if (block.items.size() < 2) fail(block.span, "missing name after '" + head + "'");
    schema.name = expect_name(block.items[1], "an action name");

    const SExpr* params = nullptr;
    const SExpr* pre = nullptr;
    const SExpr* eff = nullptr;
    const SExpr* cost = nullptr;
    for (std::size_t i = 2; i < block.items.size(); i += 2) {
        const auto& key = block.items[i];
        if (key.is_list) fail(key.span, "expected a keyword such as :parameters");
        if (i + 1 >= block.items.size()) fail(key.span, "missing value after '" + key.text + "'");
        const SExpr* value = &block.items[i + 1];
        const SExpr** slot = key.text == ":parameters"     ? &params
                             : key.text == ":precondition" ? &pre
                             : key.text == ":effect"       ? &eff
                             : key.text == ":cost"         ? &cost
                                                           : nullptr;
        if (!slot) fail(key.span, "unknown keyword '" + key.text + "'");
        if (*slot) fail(key.span, "duplicate '" + key.text + "'");
        *slot = value;
    }
    if (!params) fail(block.span, "action '" + schema.name + "' is missing :parameters");
    if (!pre) fail(block.span, "action '" + schema.name + "' is missing :precondition");
    if (!eff) fail(block.span, "action '" + schema.name + "' is missing :effect");

    expect_list(*params, "a parameter list");
    std::set<std::string> seen;
    for (auto& [param, span] : parse_typed_list(*params, 0, true, domain)) {
        if (!seen.insert(param.name).second) fail(span, "duplicate parameter " + param.name);
        schema.parameters.push_back(param);
    }
    Scope scope{domain, &schema.parameters, nullptr};
    schema.preconditions = parse_conj(*pre, scope);
    schema.effects = parse_conj(*eff, scope);
    for (const auto& a : schema.effects) {
        for (const auto& b : schema.effects) {
            if (a.positive && !b.positive && a.atom == b.atom)
                fail(eff->span, "effect " + to_string(a) + " contradicts " + to_string(b));
        }
    }
    if (cost) {
        if (cost->is_list || !is_int(cost->text)) fail(cost->span, "expected a non-negative integer cost");
        schema.cost = static_cast<double>(std::stol(cost->text));
    }
    return schema;
}

}  // namespace

DomainModel parse_domain(std::string_view text, std::string_view file, std::vector<ParseDiagnostic>* warnings) {
    Lexer lexer(text, file);
    const auto top = lexer.read_all();
    const SExpr& def = single_define(top, file);
    DomainModel domain;
    domain.name = header_name(def, "domain");

    std::size_t i = 2;
    if (i < def.items.size() && has_head(def.items[i], ":types")) {
        const auto& types = def.items[i];
        if (types.items.size() < 2) fail(types.span, "(:types) needs at least one type");
        for (std::size_t k = 1; k < types.items.size(); ++k) {
            auto name = expect_name(types.items[k], "a type name");
            if (domain.has_type(name)) fail(types.items[k].span, "duplicate type '" + name + "'");
            domain.types.push_back(std::move(name));
        }
        ++i;
    }
    if (i < def.items.size() && has_head(def.items[i], ":predicates")) {
        const auto& preds = def.items[i];
        if (preds.items.size() < 2) fail(preds.span, "(:predicates) needs at least one predicate");
        for (std::size_t k = 1; k < preds.items.size(); ++k) {
            const auto& proto = expect_list(preds.items[k], "a predicate declaration");
            if (proto.items.empty()) fail(proto.span, "empty predicate declaration");
            PredicateDecl decl{expect_name(proto.items.front(), "a predicate name"), {}};
            if (domain.find_predicate(decl.name)) fail(proto.span, "duplicate predicate '" + decl.name + "'");
            for (auto& [param, span] : parse_typed_list(proto, 1, true, domain)) decl.params.push_back(param);
            domain.predicates.push_back(std::move(decl));
        }
        ++i;
    }
    for (; i < def.items.size(); ++i) {
        const auto& block = def.items[i];
        if (!(has_head(block, ":action") || has_head(block, ":event") || has_head(block, ":mitigation"))) {
            fail(block.span, "expected an (:action ...), (:event ...) or (:mitigation ...) block");
        }
        auto schema = parse_block(block, domain);
        if (domain.find_schema(schema.name)) fail(block.items[1].span, "duplicate action name '" + schema.name + "'");
        domain.schemas.push_back(std::move(schema));
    }

    if (warnings) {
        for (const auto& pred : domain.predicates) {
            bool used = false;
            for (const auto& s : domain.schemas) {
                auto mentions = [&](const Literal& l) { return l.atom.predicate == pred.name; };
                used = used || std::any_of(s.preconditions.begin(), s.preconditions.end(), mentions) ||
                       std::any_of(s.effects.begin(), s.effects.end(), mentions);
            }
            if (!used) {
                warnings->push_back({Severity::warning, "predicate '" + pred.name + "' is never used by an action",
                                     def.span});
            }
        }
    }
    return domain;
}

Problem parse_problem(std::string_view text, const DomainModel& domain, std::string_view file,
                      std::vector<ParseDiagnostic>* warnings) {
    Lexer lexer(text, file);
    const auto top = lexer.read_all();
    const SExpr& def = single_define(top, file);
    Problem problem;
    problem.name = header_name(def, "problem");

    const SExpr* dom = nullptr;
    const SExpr* objects = nullptr;
    const SExpr* init = nullptr;
    const SExpr* goal = nullptr;
    for (std::size_t i = 2; i < def.items.size(); ++i) {
        const auto& sec = def.items[i];
        const SExpr** slot = has_head(sec, ":domain")    ? &dom
                             : has_head(sec, ":objects") ? &objects
                             : has_head(sec, ":init")    ? &init
                             : has_head(sec, ":goal")    ? &goal
                                                         : nullptr;
        if (!slot) fail(sec.span, "expected (:domain), (:objects), (:init) or (:goal)");
        if (*slot) fail(sec.span, "duplicate section");
        *slot = &sec;
    }
    if (!dom) fail(def.span, "missing (:domain NAME)");
    if (dom->items.size() != 2) fail(dom->span, "expected (:domain NAME)");
    problem.domain_name = expect_name(dom->items[1], "a domain name");
    if (problem.domain_name != domain.name)
        fail(dom->items[1].span, "problem is for domain '" + problem.domain_name + "', not '" + domain.name + "'");

    if (objects) {
        for (auto& [obj, span] : parse_typed_list(*objects, 1, false, domain)) {
            if (problem.find_object(obj.name)) fail(span, "duplicate object '" + obj.name + "'");
            problem.objects.push_back(obj);
        }
    }
    Scope scope{domain, nullptr, &problem};
    std::vector<Atom> atoms;
    if (init) {
        for (std::size_t i = 1; i < init->items.size(); ++i) {
            auto atom = parse_atom(init->items[i], scope);
            if (warnings && std::find(atoms.begin(), atoms.end(), atom) != atoms.end())
                warnings->push_back({Severity::warning, "duplicate initial atom " + to_string(atom), init->items[i].span});
            atoms.push_back(std::move(atom));
        }
    }
    problem.init = State(std::move(atoms));
    if (!goal) fail(def.span, "missing (:goal ...)");
    if (goal->items.size() != 2) fail(goal->span, "expected (:goal CONJUNCTION)");
    for (auto& lit : parse_conj(goal->items[1], scope)) {
        if (!lit.positive) fail(goal->items[1].span, "negative goal literals are not supported");
        problem.goal.push_back(std::move(lit.atom));
    }
    return problem;
}

GroundPlan parse_plan(std::string_view text, const DomainModel& domain, const Problem& problem,
                      std::string_view file) {
    GroundPlan plan;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;

        if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
        std::size_t col = 0;
        auto skip = [&] {
            while (col < line.size() && (line[col] == ' ' || line[col] == '\t' || line[col] == '\r')) ++col;
        };
        skip();
        if (col == line.size()) {
            if (end == text.size()) break;
            continue;
        }
        const SourceSpan span{std::string(file), line_no, col + 1};
        const std::size_t digits_begin = col;
        while (col < line.size() && std::isdigit(static_cast<unsigned char>(line[col]))) ++col;
        const auto digits = line.substr(digits_begin, col - digits_begin);
        if (!is_int(digits)) fail(span, "expected a step index");
        if (static_cast<std::size_t>(std::stol(std::string(digits))) != plan.steps.size()) {
            fail(span, "step index " + std::string(digits) + " is not contiguous (expected " +
                           std::to_string(plan.steps.size()) + ")");
        }
        skip();
        if (col >= line.size() || line[col] != ':') fail({std::string(file), line_no, col + 1}, "expected ':'");
        ++col;
        skip();
        Lexer lexer(line.substr(col), file);
        std::vector<SExpr> exprs;
        try {
            exprs = lexer.read_all();
        } catch (const ParseError& e) {
            auto d = e.diagnostics().front();
            d.span.line = line_no;
            d.span.column += col;
            throw ParseError({d});
        }
        const SourceSpan action_span{std::string(file), line_no, col + 1};
        if (exprs.size() != 1 || !exprs.front().is_list || exprs.front().items.empty())
            fail(action_span, "expected '(ACTION OBJ...)'");
        const auto& call = exprs.front();
        const auto name = call.items.front().is_list ? std::string() : call.items.front().text;
        const ActionSchema* schema = domain.find_schema(name);
        if (!schema) fail(action_span, "unknown action '" + name + "'");
        if (call.items.size() - 1 != schema->parameters.size()) {
            fail(action_span, "action '" + name + "' expects " + std::to_string(schema->parameters.size()) +
                                  " arguments, got " + std::to_string(call.items.size() - 1));
        }
        std::vector<std::string> args;
        for (std::size_t i = 1; i < call.items.size(); ++i) {
            if (call.items[i].is_list || !is_name(call.items[i].text)) fail(action_span, "expected an object name");
            args.push_back(call.items[i].text);
        }
        try {
            plan.steps.push_back(instantiate(*schema, problem, args));
        } catch (const GroundingError& e) {
            fail(action_span, e.what());
        }
        if (end == text.size()) break;
    }
    return plan;
}

namespace {

void write_typed(std::ostringstream& out, const std::vector<TypedName>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out << ' ';
        out << names[i].name << " - " << names[i].type;
    }
}

void write_conj(std::ostringstream& out, const std::vector<Literal>& lits) {
    out << "(and";
    for (const auto& l : lits) out << ' ' << to_string(l);
    out << ')';
}

}  // namespace

std::string write_domain(const DomainModel& domain) {
    std::ostringstream out;
    out << "(define (domain " << domain.name << ")\n";
    if (!domain.types.empty()) {
        out << "  (:types";
        for (const auto& t : domain.types) out << ' ' << t;
        out << ")\n";
    }
    if (!domain.predicates.empty()) {
        out << "  (:predicates";
        for (const auto& p : domain.predicates) {
            out << "\n    (" << p.name;
            if (!p.params.empty()) out << ' ';
            write_typed(out, p.params);
            out << ')';
        }
        out << ")\n";
    }
    for (const auto& s : domain.schemas) {
        out << "  (:" << to_string(s.kind) << ' ' << s.name << "\n    :parameters (";
        write_typed(out, s.parameters);
        out << ")\n    :precondition ";
        write_conj(out, s.preconditions);
        out << "\n    :effect ";
        write_conj(out, s.effects);
        out << "\n    :cost " << format_cost(s.cost) << ")\n";
    }
    out << ")\n";
    return out.str();
}

std::string write_problem(const Problem& problem) {
    std::ostringstream out;
    out << "(define (problem " << problem.name << ")\n  (:domain " << problem.domain_name << ")\n  (:objects";
    for (const auto& o : problem.objects) out << "\n    " << o.name << " - " << o.type;
    out << ")\n  (:init";
    for (const auto& a : problem.init.atoms()) out << "\n    " << to_string(a);
    out << ")\n  (:goal (and";
    for (const auto& g : problem.goal) out << ' ' << to_string(g);
    out << ")))\n";
    return out.str();
}

std::string write_plan(const GroundPlan& plan) {
    std::ostringstream out;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) out << i << ": " << plan.steps[i].name() << '\n';
    return out.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << contents;
}

GroundedTask load_task(const std::filesystem::path& domain_path, const std::filesystem::path& problem_path) {
    auto domain = parse_domain(read_file(domain_path), domain_path.string());
    auto problem = parse_problem(read_file(problem_path), domain, problem_path.string());
    return GroundedTask::make(std::move(domain), std::move(problem));
}

GroundPlan load_plan(const std::filesystem::path& path, const GroundedTask& task) {
    return parse_plan(read_file(path), task.domain, task.problem, path.string());
}

}  // namespace antic::io
