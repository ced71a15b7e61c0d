#pragma once
// Partial-order causal-link view of a total-order ground plan, and causal-link
// threat detection against a projected trajectory.
//
// Step ids: 0 is the synthetic start step (its effects are the initial
// state), 1..n are the plan steps, n+1 is the synthetic end step (its
// preconditions are the goal). Trajectory position t is the state after step
// t, so trajectory[0] is the initial state.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "antic/strips.hpp"

namespace antic {

using StepId = std::size_t;

struct CausalLink {
    StepId producer = 0;
    Atom condition;
    StepId consumer = 0;

    auto operator<=>(const CausalLink&) const = default;
    bool operator==(const CausalLink&) const = default;
};

struct PoclStep {
    StepId id = 0;
    std::string label;  // "start", "end" or the action name
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
    std::vector<std::pair<std::string, std::string>> bindings;
    double cost = 0.0;
    /// The ground action for plan steps; empty for start and end.
    std::optional<GroundAction> action;
};

struct PoclPlan {
    std::vector<PoclStep> steps;
    std::vector<std::pair<StepId, StepId>> orderings;
    std::vector<CausalLink> links;

    StepId start() const noexcept { return 0; }
    StepId end() const noexcept { return steps.size() - 1; }
    /// Number of real plan steps.
    std::size_t plan_size() const noexcept { return steps.size() - 2; }
    /// True if `a` must precede `b` (transitive closure of the orderings).
    bool precedes(StepId a, StepId b) const;
    /// Links into `consumer`, in precondition order.
    std::vector<const CausalLink*> links_into(StepId consumer) const;
};

class LiftingError : public Error {
public:
    LiftingError(std::size_t step, const std::string& what)
        : Error("cannot lift plan: step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Each positive precondition is supported by its latest earlier producer.
/// Throws LiftingError if the plan does not execute from `init` or misses the goal.
PoclPlan lift_to_pocl(const GroundPlan& plan, const State& init, std::span<const Atom> goal);

struct Threat {
    CausalLink link;
    GroundAction step;
    /// Trajectory position at which `step` would execute.
    std::size_t position = 0;
    /// True when the threatening step is one of the plan's own steps.
    bool from_plan = false;

    auto operator<=>(const Threat& o) const {
        if (auto c = link <=> o.link; c != 0) return c;
        if (auto c = step.name() <=> o.step.name(); c != 0) return c;
        if (auto c = position <=> o.position; c != 0) return c;
        return from_plan <=> o.from_plan;
    }
    bool operator==(const Threat& o) const { return (*this <=> o) == 0; }
};

/// Every (link, w, t) with not-p among w's effects, producer <= t < consumer,
/// and w applicable in trajectory[t]. Plan steps are also checked at their own
/// positions. Result is sorted.
std::vector<Threat> detect_threats(const PoclPlan& pocl, std::span<const GroundAction> candidates,
                                   std::span<const State> trajectory);

}  // namespace antic
