#include "antic/nbeacons.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "antic/parser.hpp"

namespace antic::nbeacons {

namespace {

constexpr std::string_view kDomain = R"(
(define (domain nbeacons)
  (:types agent cell beacon)
  (:predicates
    (at ?a - agent ?c - cell)
    (adjacent-n ?from - cell ?to - cell)
    (adjacent-s ?from - cell ?to - cell)
    (adjacent-e ?from - cell ?to - cell)
    (adjacent-w ?from - cell ?to - cell)
    (canMove ?a - agent)
    (sandpit ?c - cell)
    (buried3 ?a - agent)
    (buried2 ?a - agent)
    (buried1 ?a - agent)
    (stuck ?a - agent)
    (bought ?a - agent)
    (packed ?a - agent)
    (departed ?a - agent)
    (beacon-at ?b - beacon ?c - cell)
    (activated ?b - beacon)
    (downwind ?c - cell ?pit - cell))
  (:action move-north
    :parameters (?a - agent ?from - cell ?to - cell)
    :precondition (and (canMove ?a) (at ?a ?from) (adjacent-n ?from ?to) (not (sandpit ?to)))
    :effect (and (not (at ?a ?from)) (at ?a ?to) (departed ?a))
    :cost 1)
  (:action move-south
    :parameters (?a - agent ?from - cell ?to - cell)
    :precondition (and (canMove ?a) (at ?a ?from) (adjacent-s ?from ?to) (not (sandpit ?to)))
    :effect (and (not (at ?a ?from)) (at ?a ?to) (departed ?a))
    :cost 1)
  (:action move-east
    :parameters (?a - agent ?from - cell ?to - cell)
    :precondition (and (canMove ?a) (at ?a ?from) (adjacent-e ?from ?to) (not (sandpit ?to)))
    :effect (and (not (at ?a ?from)) (at ?a ?to) (departed ?a))
    :cost 1)
  (:action move-west
    :parameters (?a - agent ?from - cell ?to - cell)
    :precondition (and (canMove ?a) (at ?a ?from) (adjacent-w ?from ?to) (not (sandpit ?to)))
    :effect (and (not (at ?a ?from)) (at ?a ?to) (departed ?a))
    :cost 1)
  (:action activate
    :parameters (?a - agent ?c - cell ?b - beacon)
    :precondition (and (at ?a ?c) (beacon-at ?b ?c) (not (activated ?b)))
    :effect (and (activated ?b))
    :cost 1)
  (:action dig3
    :parameters (?a - agent)
    :precondition (and (buried3 ?a))
    :effect (and (not (buried3 ?a)) (buried2 ?a))
    :cost 1)
  (:action dig2
    :parameters (?a - agent)
    :precondition (and (buried2 ?a))
    :effect (and (not (buried2 ?a)) (buried1 ?a))
    :cost 1)
  (:action dig1
    :parameters (?a - agent)
    :precondition (and (buried1 ?a))
    :effect (and (not (buried1 ?a)) (not (stuck ?a)) (canMove ?a))
    :cost 1)
  (:mitigation buy-hook
    :parameters (?a - agent)
    :precondition (and (not (departed ?a)) (not (bought ?a)))
    :effect (and (bought ?a))
    :cost 1)
  (:mitigation pack-hook
    :parameters (?a - agent)
    :precondition (and (bought ?a) (not (departed ?a)) (not (packed ?a)))
    :effect (and (packed ?a))
    :cost 1)
  (:mitigation hook-out
    :parameters (?a - agent)
    :precondition (and (packed ?a) (stuck ?a))
    :effect (and (not (stuck ?a)) (not (buried3 ?a)) (not (buried2 ?a)) (not (buried1 ?a)) (canMove ?a))
    :cost 1)
  (:event wind-capture
    :parameters (?a - agent ?c - cell ?pit - cell)
    :precondition (and (at ?a ?c) (canMove ?a) (downwind ?c ?pit))
    :effect (and (not (at ?a ?c)) (at ?a ?pit) (not (canMove ?a)) (buried3 ?a) (stuck ?a))
    :cost 0)
)
)";

bool in_bounds(const GridConfig& c, Cell x) {
    return x.column >= 1 && x.column <= c.width && x.row >= 1 && x.row <= c.height;
}

Cell step(Cell c, Direction d) {
    switch (d) {
        case Direction::north: return {c.column, c.row + 1};
        case Direction::south: return {c.column, c.row - 1};
        case Direction::east: return {c.column + 1, c.row};
        case Direction::west: return {c.column - 1, c.row};
    }
    return c;
}

std::string beacon_name(const GridConfig& config, std::size_t i) {
    return config.beacons.size() == 1 ? std::string("beacon") : "beacon" + std::to_string(i + 1);
}

}  // namespace

std::string cell_name(Cell c) { return "c" + std::to_string(c.column) + "-" + std::to_string(c.row); }

char to_char(Direction d) {
    switch (d) {
        case Direction::north: return 'N';
        case Direction::south: return 'S';
        case Direction::east: return 'E';
        case Direction::west: return 'W';
    }
    return 'W';
}

std::optional<Direction> parse_direction(std::string_view text) {
    if (text == "N" || text == "north") return Direction::north;
    if (text == "S" || text == "south") return Direction::south;
    if (text == "E" || text == "east") return Direction::east;
    if (text == "W" || text == "west") return Direction::west;
    return std::nullopt;
}

void GridConfig::validate() const {
    if (width < 1 || height < 1) throw Error("grid dimensions must be positive");
    if (wind_speed < 1) throw Error("wind speed must be positive");
    if (!(wind_probability >= 0.0 && wind_probability <= 1.0)) throw Error("wind probability must lie in [0,1]");
    std::set<Cell> used;
    auto claim = [&](Cell c, const char* what) {
        if (!in_bounds(*this, c)) throw Error(std::string(what) + " " + cell_name(c) + " is out of bounds");
        if (!used.insert(c).second) throw Error(std::string(what) + " " + cell_name(c) + " overlaps another feature");
    };
    claim(agent_start, "agent start");
    for (auto b : beacons) claim(b, "beacon");
    for (auto s : sandpits) claim(s, "sandpit");
}

std::optional<Cell> downwind_sandpit(const GridConfig& config, Cell from) {
    Cell cur = from;
    for (int k = 0; k < config.wind_speed; ++k) {
        cur = step(cur, config.wind_direction);
        if (!in_bounds(config, cur)) return std::nullopt;
        if (std::find(config.sandpits.begin(), config.sandpits.end(), cur) != config.sandpits.end()) return cur;
    }
    return std::nullopt;
}

GeneratedFiles generate(const GridConfig& config) {
    config.validate();
    const auto domain = io::parse_domain(kDomain, "<nbeacons>");

    std::ostringstream problem;
    problem << "(define (problem nbeacons-" << config.width << "x" << config.height << ")\n"
            << "  (:domain nbeacons)\n  (:objects\n    agent - agent";
    for (std::size_t i = 0; i < config.beacons.size(); ++i) problem << "\n    " << beacon_name(config, i) << " - beacon";
    for (int col = 1; col <= config.width; ++col)
        for (int row = 1; row <= config.height; ++row) problem << "\n    " << cell_name({col, row}) << " - cell";
    problem << ")\n  (:init\n    (at agent " << cell_name(config.agent_start) << ")\n    (canMove agent)";
    for (std::size_t i = 0; i < config.beacons.size(); ++i)
        problem << "\n    (beacon-at " << beacon_name(config, i) << ' ' << cell_name(config.beacons[i]) << ')';
    for (auto pit : config.sandpits) problem << "\n    (sandpit " << cell_name(pit) << ')';
    const std::pair<Direction, const char*> adjacency[] = {
        {Direction::north, "adjacent-n"}, {Direction::south, "adjacent-s"},
        {Direction::east, "adjacent-e"}, {Direction::west, "adjacent-w"}};
    for (int col = 1; col <= config.width; ++col) {
        for (int row = 1; row <= config.height; ++row) {
            const Cell c{col, row};
            for (const auto& [dir, pred] : adjacency) {
                const Cell n = step(c, dir);
                if (in_bounds(config, n)) problem << "\n    (" << pred << ' ' << cell_name(c) << ' ' << cell_name(n) << ')';
            }
            if (auto pit = downwind_sandpit(config, c))
                problem << "\n    (downwind " << cell_name(c) << ' ' << cell_name(*pit) << ')';
        }
    }
    problem << ")\n  (:goal (and";
    for (std::size_t i = 0; i < config.beacons.size(); ++i) problem << " (activated " << beacon_name(config, i) << ')';
    problem << ")))\n";

    // Round through the parser so both files come out in canonical layout.
    const auto parsed = io::parse_problem(problem.str(), domain, "<nbeacons>");
    return {io::write_domain(domain), io::write_problem(parsed)};
}

GridConfig random_config(int width, int height, int sandpits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GridConfig config;
    config.width = width;
    config.height = height;
    const int cells = width * height;
    if (sandpits < 0 || sandpits + 2 > cells) throw Error("too many sandpits for the grid");
    std::vector<int> order(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) order[static_cast<std::size_t>(i)] = i;
    // partial Fisher-Yates
    for (int i = 0; i < sandpits + 2; ++i) {
        std::uniform_int_distribution<int> pick(i, cells - 1);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
    }
    auto cell_at = [&](int k) { return Cell{order[static_cast<std::size_t>(k)] % width + 1, order[static_cast<std::size_t>(k)] / width + 1}; };
    config.agent_start = cell_at(0);
    config.beacons = {cell_at(1)};
    for (int i = 0; i < sandpits; ++i) config.sandpits.push_back(cell_at(i + 2));
    const Direction dirs[] = {Direction::north, Direction::south, Direction::east, Direction::west};
    config.wind_direction = dirs[std::uniform_int_distribution<int>(0, 3)(rng)];
    config.wind_speed = std::uniform_int_distribution<int>(1, 5)(rng);
    return config;
}

GridConfig canonical_config() {
    GridConfig config;
    config.width = 10;
    config.height = 10;
    config.agent_start = {6, 1};
    config.beacons = {{6, 9}};
    config.sandpits = {{2, 2}, {3, 3}, {1, 4}, {4, 5}};
    config.wind_direction = Direction::west;
    config.wind_speed = 5;
    return config;
}

Scenario canonical_scenario() {
    Scenario s;
    s.config = canonical_config();
    s.files = generate(s.config);
    std::ostringstream plan;
    for (int k = 0; k < 8; ++k)
        plan << k << ": (move-north agent " << cell_name({6, 1 + k}) << ' ' << cell_name({6, 2 + k}) << ")\n";
    plan << "8: (activate agent c6-9 beacon)\n";
    s.plan = plan.str();
    return s;
}

}  // namespace antic::nbeacons
