#include "antic/at_engine.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace antic {

double PrestrengthEntry::score() const noexcept {
    if (establishers == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(uses) / static_cast<double>(establishers);
}

std::vector<PrestrengthEntry> prestrength(const PoclPlan& pocl) {
    std::map<Atom, std::size_t> uses;
    std::map<Atom, StepId> first_use;
    for (StepId u = 1; u <= pocl.plan_size(); ++u) {
        std::set<Atom> seen;
        for (const auto& pre : pocl.steps[u].preconditions) {
            if (!pre.positive || !seen.insert(pre.atom).second) continue;
            ++uses[pre.atom];
            first_use.emplace(pre.atom, u);
        }
    }
    std::vector<PrestrengthEntry> out;
    for (const auto& [atom, count] : uses) {
        PrestrengthEntry entry{atom, count, 0};
        for (StepId s = 0; s < first_use[atom]; ++s) {
            const auto& effs = pocl.steps[s].effects;
            if (std::any_of(effs.begin(), effs.end(), [&](const Literal& e) { return e.positive && e.atom == atom; }))
                ++entry.establishers;
        }
        out.push_back(std::move(entry));
    }
    std::sort(out.begin(), out.end(), [](const PrestrengthEntry& a, const PrestrengthEntry& b) {
        // Compare uses/establishers exactly by cross-multiplication.
        const auto lhs = a.uses * b.establishers;
        const auto rhs = b.uses * a.establishers;
        if (lhs != rhs) return lhs > rhs;
        if (a.uses != b.uses) return a.uses > b.uses;
        return to_string(a.literal) < to_string(b.literal);
    });
    return out;
}

std::string_view to_string(CandidateMode mode) {
    return mode == CandidateMode::events_only ? "events-only" : "adversarial";
}

std::string ConditioningEvent::ref() const { return event.name() + "@" + std::to_string(trigger_index); }

std::vector<GroundAction> threat_candidates(const GroundedTask& task, const GroundPlan& plan, CandidateMode mode) {
    if (mode == CandidateMode::events_only) return task.event_actions();
    std::set<std::string> in_plan;
    for (const auto& s : plan.steps) in_plan.insert(s.name());
    std::vector<GroundAction> out;
    for (const auto& a : task.actions)
        if (!in_plan.count(a.name())) out.push_back(a);
    return out;
}

std::vector<ConditioningEvent> find_conditioning_events(const PoclPlan& pocl, const GroundedTask& task,
                                                        std::span<const State> trajectory,
                                                        const EventSearchConfig& config) {
    GroundPlan plan;
    for (StepId j = 1; j <= pocl.plan_size(); ++j) plan.steps.push_back(*pocl.steps[j].action);
    const auto candidates = threat_candidates(task, plan, config.mode);
    const auto threats = detect_threats(pocl, candidates, trajectory);

    const auto ranking = prestrength(pocl);
    auto rank = [&](const Atom& atom) {
        auto it = std::find_if(ranking.begin(), ranking.end(), [&](const PrestrengthEntry& e) { return e.literal == atom; });
        return static_cast<std::size_t>(it - ranking.begin());
    };

    // (trigger, event name) -> most vulnerable threatened link
    std::map<std::pair<std::size_t, std::string>, std::pair<const Threat*, std::size_t>> chosen;
    for (const auto& threat : threats) {
        if (threat.from_plan) continue;
        const auto key = std::make_pair(threat.position, threat.step.name());
        const std::size_t r = rank(threat.link.condition);
        auto it = chosen.find(key);
        if (it == chosen.end()) {
            chosen.emplace(key, std::make_pair(&threat, r));
            continue;
        }
        const Threat* cur = it->second.first;
        const auto better = std::make_tuple(r, threat.link.consumer, threat.link.producer) <
                            std::make_tuple(it->second.second, cur->link.consumer, cur->link.producer);
        if (better) it->second = {&threat, r};
    }

    const auto pool = task.executable_actions();
    const StateSpaceSearch recovery(pool);
    std::vector<ConditioningEvent> out;
    for (const auto& [key, pick] : chosen) {
        const Threat& threat = *pick.first;
        ConditioningEvent ce{threat.step, threat.link, threat.position, std::nullopt};
        const auto ref = ce.ref();
        if (auto it = config.impact_overrides.find(ref); it != config.impact_overrides.end()) {
            ce.impact = it->second;
        } else if (auto it2 = config.impact_overrides.find(ce.event.name()); it2 != config.impact_overrides.end()) {
            ce.impact = it2->second;
        } else {
            const State after = apply(trajectory[threat.position], threat.step);
            const Literal condition = pos(threat.link.condition);
            ce.impact = recovery_cost(recovery, after, std::span(&condition, 1), config.recovery_budget).cost;
        }
        out.push_back(std::move(ce));
    }
    return out;
}

std::string_view to_string(SavingsAccounting accounting) {
    return accounting == SavingsAccounting::original ? "original" : "net";
}

AtAssessment at_assess(std::size_t identified, std::span<const AntContribution> ant) {
    AtAssessment out;
    out.identified = identified;
    for (const auto& set : ant) {
        out.cost += set.cost;
        out.mitigated += set.mitigated_impacts.size();
        for (double impact : set.mitigated_impacts) out.impact_sum += impact;
    }
    if (out.mitigated > identified) throw ContractViolation("more mitigated events than identified events");
    out.uneconomic = out.cost > out.impact_sum;
    if (identified == 0) {
        out.value = out.cost > 0.0 ? 0.0 : 1.0;
        return out;
    }
    if (out.mitigated == 0) {
        out.value = 0.0;
        return out;
    }
    const double coverage = static_cast<double>(out.mitigated) / static_cast<double>(identified);
    if (out.impact_sum <= 0.0) {
        if (out.cost > 0.0) throw ContractViolation("mitigated events carry no impact but anticipatory actions cost > 0");
        out.value = coverage;
        return out;
    }
    out.value = coverage * (1.0 - out.cost / out.impact_sum);
    return out;
}

std::string_view to_string(Risk risk) { return risk == Risk::low ? "LOW" : "HIGH"; }

std::vector<std::size_t> covered_events(std::span<const AnticipatoryActionSet> ant) {
    std::vector<std::size_t> out;
    for (const auto& set : ant) out.insert(out.end(), set.covered.begin(), set.covered.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RiskLevel classify_risk(std::span<const ConditioningEvent> events, std::span<const AnticipatoryActionSet> ant) {
    const auto covered = covered_events(ant);
    RiskLevel risk;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (std::binary_search(covered.begin(), covered.end(), i)) continue;
        if (!events[i].impact || *events[i].impact > 0.0) risk.justification.push_back(i);
    }
    risk.level = risk.justification.empty() ? Risk::low : Risk::high;
    return risk;
}

AtAssessment assess(std::span<const ConditioningEvent> events, std::span<const AnticipatoryActionSet> ant,
                    SavingsAccounting accounting) {
    std::vector<AntContribution> parts;
    for (const auto& set : ant) {
        AntContribution c{set.added_cost, {}};
        for (std::size_t k = 0; k < set.covered.size(); ++k) {
            const auto& ev = events[set.covered.at(k)];
            if (!ev.impact) throw ContractViolation("event " + ev.ref() + " has no finite impact");
            c.mitigated_impacts.push_back(accounting == SavingsAccounting::original ? *ev.impact
                                                                                    : *ev.impact - set.residuals.at(k));
        }
        parts.push_back(std::move(c));
    }
    return at_assess(events.size(), parts);
}

std::string_view to_string(MitigationStatus status) {
    switch (status) {
        case MitigationStatus::goal_reached: return "goal-reached";
        case MitigationStatus::search_exhausted: return "search-exhausted";
        case MitigationStatus::budget_exhausted: return "budget-exhausted";
    }
    return "goal-reached";
}

GroundPlan apply_edits(const GroundPlan& plan, std::span<const PlanEdit> edits) {
    GroundPlan out = plan;
    for (const auto& e : edits) {
        if (e.kind == EditKind::insert) {
            if (e.position > out.steps.size()) throw ContractViolation("insert position out of range");
            out.steps.insert(out.steps.begin() + static_cast<std::ptrdiff_t>(e.position), e.action);
        } else {
            if (e.position >= out.steps.size()) throw ContractViolation("delete position out of range");
            out.steps.erase(out.steps.begin() + static_cast<std::ptrdiff_t>(e.position));
        }
    }
    return out;
}

std::size_t aligned_position(std::span<const long> origin, std::size_t original_index) {
    for (std::size_t i = 0; i < origin.size(); ++i)
        if (origin[i] >= 0 && static_cast<std::size_t>(origin[i]) >= original_index) return i;
    return origin.size();
}

std::vector<long> embed(const GroundPlan& original, const GroundPlan& modified) {
    std::vector<long> origin(modified.size(), -1);
    std::size_t next = 0;
    for (std::size_t i = 0; i < modified.size() && next < original.size(); ++i) {
        if (modified.steps[i] == original.steps[next]) origin[i] = static_cast<long>(next++);
    }
    if (next != original.size()) throw ContractViolation("the original plan is not a subsequence of the modified plan");
    return origin;
}

std::optional<double> residual_impact(const StateSpaceSearch& recovery, const GroundPlan& modified,
                                      std::span<const long> origin, const State& init, const ConditioningEvent& event,
                                      const SearchBudget& budget) {
    const auto trajectory = project(modified, init);
    const auto at = aligned_position(origin, event.trigger_index);
    if (!applicable(trajectory[at], event.event)) return 0.0;
    const Literal condition = pos(event.link.condition);
    return recovery_cost(recovery, apply(trajectory[at], event.event), std::span(&condition, 1), budget).cost;
}

namespace {

struct Evaluation {
    std::vector<std::optional<double>> residuals;
    std::vector<std::size_t> covered;
    AtAssessment assessment;
    RiskLevel risk;
};

struct SearchNode {
    GroundPlan plan;
    std::vector<long> origin;
    std::vector<PlanEdit> edits;
    double added_cost = 0.0;
    Evaluation eval;
};

std::string signature(const GroundPlan& plan) {
    std::string out;
    for (const auto& s : plan.steps) out += s.name();
    return out;
}

bool executable_and_achieves(const GroundPlan& plan, const GroundedTask& task) {
    State s = task.problem.init;
    for (const auto& step : plan.steps) {
        if (!applicable(s, step)) return false;
        s = apply(s, step);
    }
    return entails(s, task.problem.goal);
}

AnticipatoryActionSet build_set(const SearchNode& node) {
    AnticipatoryActionSet set;
    for (std::size_t i = 0; i < node.plan.size(); ++i)
        if (node.origin[i] < 0) set.actions.push_back({i, node.plan.steps[i]});
    set.added_cost = node.added_cost;
    for (std::size_t idx : node.eval.covered) {
        set.covered.push_back(idx);
        set.residuals.push_back(*node.eval.residuals[idx]);
    }
    return set;
}

}  // namespace

MitigationResult mitigate(const GroundPlan& plan, const GroundedTask& task, std::span<const ConditioningEvent> events,
                          const MitigationConfig& config) {
    const auto recovery_pool = task.executable_actions();
    const StateSpaceSearch recovery(recovery_pool);

    auto candidates = task.mitigation_actions();
    if (candidates.empty()) candidates = task.agent_actions();
    std::sort(candidates.begin(), candidates.end(),
              [](const GroundAction& a, const GroundAction& b) { return a.name() < b.name(); });

    std::vector<long> identity(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) identity[i] = static_cast<long>(i);

    // Recovery cost of each event on the unmodified plan; residuals that do not
    // change keep the event's (possibly overridden) original impact.
    std::vector<std::optional<double>> baseline;
    for (const auto& ev : events)
        baseline.push_back(residual_impact(recovery, plan, identity, task.problem.init, ev, config.recovery_budget));

    auto evaluate = [&](SearchNode& node) {
        Evaluation eval;
        std::vector<AntContribution> parts(1);
        parts[0].cost = node.added_cost;
        for (std::size_t i = 0; i < events.size(); ++i) {
            auto r = residual_impact(recovery, node.plan, node.origin, task.problem.init, events[i], config.recovery_budget);
            if (r == baseline[i]) r = events[i].impact;
            eval.residuals.push_back(r);
            const auto& original = events[i].impact;
            if (original && r && *r < *original) {
                eval.covered.push_back(i);
                parts[0].mitigated_impacts.push_back(config.accounting == SavingsAccounting::original ? *original
                                                                                                      : *original - *r);
            }
        }
        eval.assessment = at_assess(events.size(), parts);
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (std::binary_search(eval.covered.begin(), eval.covered.end(), i)) continue;
            if (!events[i].impact || *events[i].impact > 0.0) eval.risk.justification.push_back(i);
        }
        eval.risk.level = eval.risk.justification.empty() ? Risk::low : Risk::high;
        node.eval = std::move(eval);
    };

    std::vector<SearchNode> nodes;
    nodes.push_back({plan, identity, {}, 0.0, {}});
    evaluate(nodes.front());

    // Higher score first, then cheaper, then fewer edits, then FIFO.
    using Key = std::tuple<double, double, std::size_t, std::size_t>;
    auto key_of = [&](std::size_t id, std::size_t seq) {
        const auto& n = nodes[id];
        return Key{-n.eval.assessment.value, n.added_cost, n.edits.size(), seq};
    };
    std::set<std::pair<Key, std::size_t>> frontier;
    std::set<std::string> seen{signature(plan)};
    std::size_t sequence = 0;
    frontier.insert({key_of(0, sequence++), 0});

    std::size_t best = 0;
    auto better = [&](std::size_t a, std::size_t b) {
        const auto& x = nodes[a];
        const auto& y = nodes[b];
        if (x.eval.assessment.value != y.eval.assessment.value) return x.eval.assessment.value > y.eval.assessment.value;
        if (x.eval.risk.level != y.eval.risk.level) return x.eval.risk.level == Risk::low;
        if (x.added_cost != y.added_cost) return x.added_cost < y.added_cost;
        return x.edits.size() < y.edits.size();
    };

    MitigationResult result;
    std::optional<std::size_t> goal;
    MitigationStatus status = MitigationStatus::search_exhausted;
    while (!frontier.empty()) {
        const std::size_t id = frontier.begin()->second;
        frontier.erase(frontier.begin());
        if (better(id, best)) best = id;
        if (nodes[id].eval.risk.level == Risk::low || nodes[id].eval.assessment.value >= config.tau) {
            goal = id;
            status = MitigationStatus::goal_reached;
            break;
        }
        if (result.expansions >= config.budget) {
            status = MitigationStatus::budget_exhausted;
            break;
        }
        ++result.expansions;
        if (nodes[id].edits.size() >= config.max_edits) continue;

        std::vector<PlanEdit> moves;
        for (const auto& a : candidates)
            for (std::size_t p = 0; p <= nodes[id].plan.size(); ++p) moves.push_back({EditKind::insert, p, a});
        if (config.allow_deletes)
            for (std::size_t p = 0; p < nodes[id].plan.size(); ++p)
                moves.push_back({EditKind::remove, p, nodes[id].plan.steps[p]});

        for (auto& edit : moves) {
            SearchNode child;
            child.plan = apply_edits(nodes[id].plan, std::span(&edit, 1));
            if (!seen.insert(signature(child.plan)).second) continue;
            if (!executable_and_achieves(child.plan, task)) continue;
            child.origin = nodes[id].origin;
            child.added_cost = nodes[id].added_cost;
            if (edit.kind == EditKind::insert) {
                child.origin.insert(child.origin.begin() + static_cast<std::ptrdiff_t>(edit.position), -1);
                child.added_cost += edit.action.cost;
            } else {
                if (child.origin[edit.position] < 0) child.added_cost -= edit.action.cost;
                child.origin.erase(child.origin.begin() + static_cast<std::ptrdiff_t>(edit.position));
            }
            child.edits = nodes[id].edits;
            child.edits.push_back(std::move(edit));
            evaluate(child);
            nodes.push_back(std::move(child));
            frontier.insert({key_of(nodes.size() - 1, sequence++), nodes.size() - 1});
        }
    }

    const SearchNode& chosen = nodes[goal.value_or(best)];
    result.status = status;
    result.plan = chosen.plan;
    result.edits = chosen.edits;
    result.residuals = chosen.eval.residuals;
    result.risk = chosen.eval.risk;
    result.assessment = chosen.eval.assessment;
    if (!chosen.edits.empty()) {
        auto set = build_set(chosen);
        for (std::size_t k = 0; k < set.covered.size(); ++k) {
            const auto idx = set.covered[k];
            result.expectations.push_back({idx, *events[idx].impact - set.residuals[k]});
        }
        result.ant.push_back(std::move(set));
    }
    return result;
}

Analysis analyze(const GroundPlan& plan, const GroundedTask& task, const EventSearchConfig& config) {
    Analysis out;
    out.pocl = lift_to_pocl(plan, task.problem.init, task.problem.goal);
    out.trajectory = project(plan, task.problem.init);
    out.prestrength = prestrength(out.pocl);
    out.events = find_conditioning_events(out.pocl, task, out.trajectory, config);
    out.risk = classify_risk(out.events, {});
    return out;
}

}  // namespace antic
