#pragma once
// Uniform-cost forward search over grounded states. Used to produce baseline
// plans and as the recovery-cost oracle behind conditioning-event impacts.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>

#include "antic/strips.hpp"

namespace antic {

struct SearchBudget {
    std::size_t max_expansions = 1'000'000;
    std::optional<double> max_cost;
};

enum class SearchStatus { solved, unsolvable, budget_exhausted };

std::string_view to_string(SearchStatus status);

struct SearchResult {
    SearchStatus status = SearchStatus::unsolvable;
    GroundPlan plan;
    double cost = 0.0;
    std::size_t expansions = 0;

    bool solved() const noexcept { return status == SearchStatus::solved; }
};

/// A pool of ground actions compiled once for repeated searches. Successors
/// are generated in lexicographic order of the action name and equal-cost
/// frontier entries pop in insertion order, so results are deterministic.
class StateSpaceSearch {
public:
    explicit StateSpaceSearch(std::span<const GroundAction> pool);
    ~StateSpaceSearch();
    StateSpaceSearch(StateSpaceSearch&&) noexcept;
    StateSpaceSearch& operator=(StateSpaceSearch&&) noexcept;

    /// Minimum-cost plan from `start` to any state satisfying `goal`.
    SearchResult solve(const State& start, std::span<const Literal> goal, const SearchBudget& budget = {}) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Minimum-cost plan for the task using agent actions only.
SearchResult find_plan(const GroundedTask& task, const SearchBudget& budget = {});

struct RecoveryResult {
    /// nullopt when no recovery plan exists within the budget.
    std::optional<double> cost;
    GroundPlan plan;
    bool budget_exhausted = false;

    bool recoverable() const noexcept { return cost.has_value(); }
};

/// Cheapest plan from `state` re-establishing `condition`, over `pool`.
RecoveryResult recovery_cost(const StateSpaceSearch& search, const State& state,
                             std::span<const Literal> condition, const SearchBudget& budget = {});

/// Convenience form using every agent-executable action of the task
/// (agent and mitigation-candidate kinds).
RecoveryResult recovery_cost(const GroundedTask& task, const State& state, std::span<const Literal> condition,
                             const SearchBudget& budget = {});

}  // namespace antic
