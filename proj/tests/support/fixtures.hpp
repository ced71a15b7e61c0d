#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "antic/nbeacons.hpp"
#include "antic/parser.hpp"
#include "antic/planner.hpp"
#include "antic/strips.hpp"

namespace fixtures {

inline std::filesystem::path data(const std::string& rel) { return std::filesystem::path(ANTIC_DATA_DIR) / rel; }

struct Loaded {
    antic::GroundedTask task;
    antic::GroundPlan plan;
};

/// `dir` under the data directory holding domain.pddl, problem.pddl, plan.txt.
inline Loaded load(const std::string& dir) {
    auto task = antic::io::load_task(data(dir + "/domain.pddl"), data(dir + "/problem.pddl"));
    auto plan = antic::io::load_plan(data(dir + "/plan.txt"), task);
    return {std::move(task), std::move(plan)};
}

inline Loaded canonical() {
    const auto s = antic::nbeacons::canonical_scenario();
    auto domain = antic::io::parse_domain(s.files.domain);
    auto problem = antic::io::parse_problem(s.files.problem, domain);
    auto task = antic::GroundedTask::make(std::move(domain), std::move(problem));
    auto plan = antic::io::parse_plan(s.plan, task.domain, task.problem);
    return {std::move(task), std::move(plan)};
}

inline antic::GroundedTask task_from(const antic::nbeacons::GeneratedFiles& files) {
    auto domain = antic::io::parse_domain(files.domain);
    auto problem = antic::io::parse_problem(files.problem, domain);
    return antic::GroundedTask::make(std::move(domain), std::move(problem));
}

/// Random NBeacons instance (grid <= 8x8, <= 6 sandpits) with a plan of at
/// most 12 steps: either an optimal plan or, for odd variants, a random walk
/// whose end cell becomes the goal.
inline std::optional<Loaded> random_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int w = std::uniform_int_distribution<int>(2, 8)(rng);
    const int h = std::uniform_int_distribution<int>(2, 8)(rng);
    const int pits = std::uniform_int_distribution<int>(0, std::min(6, w * h - 2))(rng);
    auto task = task_from(antic::nbeacons::generate(antic::nbeacons::random_config(w, h, pits, seed)));
    if (seed % 2 == 0) {
        auto r = antic::find_plan(task);
        if (!r.solved() || r.plan.size() > 12) return std::nullopt;
        return Loaded{std::move(task), std::move(r.plan)};
    }
    const auto agent = task.agent_actions();
    antic::GroundPlan plan;
    antic::State s = task.problem.init;
    const int len = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int k = 0; k < len; ++k) {
        std::vector<const antic::GroundAction*> options;
        for (const auto& a : agent)
            if (antic::applicable(s, a)) options.push_back(&a);
        if (options.empty()) break;
        const auto* pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        plan.steps.push_back(*pick);
        s = antic::apply(s, *pick);
    }
    if (plan.empty()) return std::nullopt;
    task.problem.goal.clear();
    for (const auto& a : s.atoms())
        if (a.predicate == "at") task.problem.goal.push_back(a);
    return Loaded{std::move(task), std::move(plan)};
}

}  // namespace fixtures
