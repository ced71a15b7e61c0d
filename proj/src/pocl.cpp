#include "antic/pocl.hpp"

#include <algorithm>
#include <map>

namespace antic {

bool PoclPlan::precedes(StepId a, StepId b) const {
    // Orderings always come from a total order, so the closure is id order;
    // verify against the stored pairs for plans built elsewhere.
    if (a >= steps.size() || b >= steps.size() || a == b) return false;
    std::vector<bool> seen(steps.size(), false);
    std::vector<StepId> stack{a};
    while (!stack.empty()) {
        const StepId cur = stack.back();
        stack.pop_back();
        for (const auto& [from, to] : orderings) {
            if (from != cur || seen[to]) continue;
            if (to == b) return true;
            seen[to] = true;
            stack.push_back(to);
        }
    }
    return false;
}

std::vector<const CausalLink*> PoclPlan::links_into(StepId consumer) const {
    std::vector<const CausalLink*> out;
    for (const auto& l : links)
        if (l.consumer == consumer) out.push_back(&l);
    return out;
}

PoclPlan lift_to_pocl(const GroundPlan& plan, const State& init, std::span<const Atom> goal) {
    std::vector<State> trajectory;
    try {
        trajectory = project(plan, init);
    } catch (const ProjectionError& e) {
        throw LiftingError(e.step_index(), e.what());
    }
    for (const auto& g : goal)
        if (!trajectory.back().holds(g)) throw LiftingError(plan.size() + 1, "goal " + to_string(g) + " is not achieved");

    PoclPlan pocl;
    const std::size_t n = plan.size();
    PoclStep start{0, "start", {}, {}, {}, 0.0, std::nullopt};
    for (const auto& atom : init.atoms()) start.effects.push_back(pos(atom));
    pocl.steps.push_back(std::move(start));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = plan.steps[i];
        pocl.steps.push_back({i + 1, a.name(), a.preconditions, a.effects, a.binding, a.cost, a});
    }
    PoclStep end{n + 1, "end", {}, {}, {}, 0.0, std::nullopt};
    for (const auto& atom : goal) end.preconditions.push_back(pos(atom));
    pocl.steps.push_back(std::move(end));

    for (StepId i = 0; i <= n; ++i) pocl.orderings.emplace_back(i, i + 1);
    for (StepId i = 2; i <= n + 1; ++i) pocl.orderings.emplace_back(0, i);
    for (StepId i = 1; i + 1 < n + 1; ++i) pocl.orderings.emplace_back(i, n + 1);

    for (StepId u = 1; u <= n + 1; ++u) {
        for (const auto& pre : pocl.steps[u].preconditions) {
            if (!pre.positive) continue;
            StepId producer = 0;
            bool found = false;
            for (StepId s = u; s-- > 0;) {
                const auto& effs = pocl.steps[s].effects;
                if (std::any_of(effs.begin(), effs.end(), [&](const Literal& e) { return e.positive && e.atom == pre.atom; })) {
                    producer = s;
                    found = true;
                    break;
                }
            }
            if (!found) throw LiftingError(u, "no producer for " + to_string(pre));
            pocl.links.push_back({producer, pre.atom, u});
        }
    }
    return pocl;
}

std::vector<Threat> detect_threats(const PoclPlan& pocl, std::span<const GroundAction> candidates,
                                   std::span<const State> trajectory) {
    if (trajectory.size() != pocl.plan_size() + 1)
        throw ContractViolation("trajectory length does not match the plan");

    std::map<Atom, std::vector<const CausalLink*>> by_condition;
    for (const auto& l : pocl.links) by_condition[l.condition].push_back(&l);

    std::vector<Threat> out;
    for (const auto& w : candidates) {
        std::vector<int> applicable_at(trajectory.size(), -1);  // lazily evaluated
        for (const auto& eff : w.effects) {
            if (eff.positive) continue;
            auto it = by_condition.find(eff.atom);
            if (it == by_condition.end()) continue;
            for (const CausalLink* link : it->second) {
                for (std::size_t t = link->producer; t < link->consumer && t < trajectory.size(); ++t) {
                    if (applicable_at[t] < 0) applicable_at[t] = applicable(trajectory[t], w) ? 1 : 0;
                    if (applicable_at[t]) out.push_back({*link, w, t, false});
                }
            }
        }
    }

    // Plan steps can only execute where they are.
    for (StepId j = 1; j <= pocl.plan_size(); ++j) {
        const auto& step = pocl.steps[j];
        for (const auto& eff : step.effects) {
            if (eff.positive) continue;
            auto it = by_condition.find(eff.atom);
            if (it == by_condition.end()) continue;
            for (const CausalLink* link : it->second) {
                if (link->producer < j && j < link->consumer) {
                    out.push_back({*link, *step.action, j - 1, true});
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace antic
