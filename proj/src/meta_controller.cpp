#include "antic/meta_controller.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "antic/parser.hpp"
#include "antic/pocl.hpp"
#include "antic/report.hpp"

namespace antic {

CognitiveTrace CognitiveTrace::from_task(const GroundedTask& task, GroundPlan plan) {
    return {std::move(plan), task.problem.goal, task.problem.init};
}

std::string_view to_string(MetaGoalStatus status) {
    switch (status) {
        case MetaGoalStatus::pending: return "pending";
        case MetaGoalStatus::committed: return "committed";
        case MetaGoalStatus::achieved: return "achieved";
    }
    return "pending";
}

std::string_view to_string(CycleStatus status) {
    switch (status) {
        case CycleStatus::no_discrepancy: return "no-discrepancy";
        case CycleStatus::achieved: return "achieved";
        case CycleStatus::failed: return "failed";
        case CycleStatus::budget_exhausted: return "budget-exhausted";
    }
    return "failed";
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

/// The task with the trace's initial state and goal.
GroundedTask task_for(const GroundedTask& task, const CognitiveTrace& trace) {
    if (task.problem.init == trace.initial && task.problem.goal == trace.goal) return task;
    GroundedTask copy = task;
    copy.problem.init = trace.initial;
    copy.problem.goal = trace.goal;
    return copy;
}

std::string describe(const CognitiveTrace& trace) {
    std::string out = io::write_plan(trace.plan);
    out += "goal:";
    for (const auto& g : trace.goal) out += " " + to_string(g);
    out += "\ninit:";
    for (const auto& a : trace.initial.atoms()) out += " " + to_string(a);
    return out;
}

std::string describe(std::span<const PlanEdit> edits) {
    std::string out = "[";
    for (std::size_t i = 0; i < edits.size(); ++i) {
        if (i) out += ", ";
        out += edits[i].kind == EditKind::insert ? "insert " : "delete ";
        out += edits[i].action.name() + "@" + std::to_string(edits[i].position);
    }
    return out + "]";
}

}  // namespace

Vulnerabilities explain(const CognitiveTrace& trace, const GroundedTask& task, const EventSearchConfig& config) {
    const auto local = task_for(task, trace);
    auto analysis = analyze(trace.plan, local, config);
    return {std::move(analysis.prestrength), std::move(analysis.events)};
}

MetaController::MetaController(const GroundedTask& task, MetaConfig config) : task_(task), config_(std::move(config)) {}

CycleResult MetaController::run_cycle(const CognitiveTrace& trace) {
    CycleResult out;
    out.trace = trace;
    const auto local = task_for(task_, trace);
    auto log = [&](std::string name, std::string_view in, std::string_view result, std::string detail) {
        out.phases.push_back({std::move(name), fnv1a64(in), fnv1a64(result), std::move(detail)});
    };

    // Monitor
    const std::string snapshot = describe(trace);
    log("Monitor", snapshot, snapshot,
        std::to_string(trace.plan.size()) + " plan steps, " + std::to_string(trace.goal.size()) + " goal atoms");

    // Interpret
    Analysis analysis;
    try {
        analysis = analyze(trace.plan, local, config_.analysis);
    } catch (const Error& e) {
        out.status = CycleStatus::failed;
        out.diagnostic = std::string("plan does not achieve the goal: ") + e.what();
        log("Interpret", snapshot, out.diagnostic, out.diagnostic);
        return out;
    }
    AnticipatoryActionSet remembered;
    for (std::size_t i = 0; i < analysis.events.size(); ++i) {
        const auto& ev = analysis.events[i];
        for (const auto& x : expectations_) {
            if (x.event == ev.event.name() && ev.impact && *ev.impact <= x.residual + 1e-9) {
                remembered.covered.push_back(i);
                remembered.residuals.push_back(*ev.impact);
                break;
            }
        }
    }
    const auto risk = classify_risk(analysis.events, std::span(&remembered, 1));
    const bool discrepancy = risk.level == Risk::high;
    if (discrepancy) goals_.push_back({Risk::low, trace.plan, trace.goal, MetaGoalStatus::pending});
    {
        auto report = io::make_report(analysis);
        report.risk_level = std::string(to_string(risk.level));
        report.justification = risk.justification;
        std::string detail = "risk " + report.risk_level + ": " + std::to_string(analysis.events.size()) +
                             " conditioning events, " + std::to_string(remembered.covered.size()) +
                             " covered by expectations";
        detail += discrepancy ? "; meta-goal formulated" : "; no discrepancy";
        log("Interpret", snapshot, io::write_report(report), detail);
    }

    // Evaluate
    {
        const auto before = goals_.size();
        std::string in;
        for (const auto& g : goals_) in += std::string(to_string(g.status)) + "\n";
        std::erase_if(goals_, [](const MetaGoal& g) { return g.status == MetaGoalStatus::achieved; });
        out.dropped_goals = before - goals_.size();
        std::string result;
        for (const auto& g : goals_) result += std::string(to_string(g.status)) + "\n";
        log("Evaluate", in, result, "dropped " + std::to_string(out.dropped_goals) + " achieved meta-goals");
    }

    // Intend
    MetaGoal* goal = nullptr;
    for (auto& g : goals_)
        if (g.status == MetaGoalStatus::pending) goal = &g;
    if (goal) {
        goal->status = MetaGoalStatus::committed;
        log("Intend", "pending", "committed", "committed to risk LOW and achieves(p', g)");
    } else {
        log("Intend", "", "", "no meta-goal to commit");
    }

    // Plan
    std::optional<MitigationResult> mitigation;
    if (goal) {
        mitigation = mitigate(trace.plan, local, analysis.events, config_.mitigation);
        out.meta_plan.edits = mitigation->edits;
        out.assessment = mitigation->assessment;
        log("Plan", snapshot, describe(out.meta_plan.edits),
            "m_p = " + describe(out.meta_plan.edits) + " (" + std::string(to_string(mitigation->status)) + ")");
    } else {
        log("Plan", "", "", "no committed meta-goal");
    }

    // Control
    if (!goal) {
        log("Control", "", "", "plan unchanged");
        out.status = CycleStatus::no_discrepancy;
        return out;
    }
    CognitiveTrace next = trace;
    std::string failure;
    try {
        next.plan = apply_edits(trace.plan, out.meta_plan.edits);
        const auto states = project(next.plan, trace.initial);
        if (!entails(states.back(), std::span<const Atom>(trace.goal))) failure = "edited plan does not achieve the goal";
        else if (mitigation->risk.level != Risk::low) failure = "risk is still HIGH after the edits";
    } catch (const Error& e) {
        failure = std::string("edited plan is not executable: ") + e.what();
    }
    if (failure.empty()) {
        goal->status = MetaGoalStatus::achieved;
        goal->plan = next.plan;
        for (const auto& set : mitigation->ant)
            for (std::size_t i = 0; i < set.covered.size(); ++i)
                expectations_.push_back({analysis.events[set.covered[i]].event.name(), set.residuals[i]});
        out.trace = next;
        out.status = CycleStatus::achieved;
        log("Control", describe(out.meta_plan.edits), describe(next), "applied " +
            std::to_string(out.meta_plan.edits.size()) + " edits; verified risk LOW and goal achieved");
    } else {
        out.status = mitigation->status == MitigationStatus::budget_exhausted ? CycleStatus::budget_exhausted
                                                                               : CycleStatus::failed;
        out.diagnostic = failure;
        log("Control", describe(out.meta_plan.edits), failure, "verification failed: " + failure);
    }
    out.goal = *goal;
    return out;
}

std::vector<CycleResult> MetaController::run_cycles(const CognitiveTrace& trace, std::size_t cycles) {
    std::vector<CycleResult> out;
    CognitiveTrace current = trace;
    for (std::size_t i = 0; i < cycles; ++i) {
        out.push_back(run_cycle(current));
        current = out.back().trace;
        if (out.back().status == CycleStatus::failed || out.back().status == CycleStatus::budget_exhausted) break;
    }
    return out;
}

namespace {

nlohmann::json cycle_json(const CycleResult& r) {
    auto hex = [](std::uint64_t x) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
        return std::string(buf);
    };
    nlohmann::json phases = nlohmann::json::array();
    for (const auto& p : r.phases)
        phases.push_back({{"name", p.name},
                          {"inputs_digest", hex(p.inputs_digest)},
                          {"outputs_digest", hex(p.outputs_digest)},
                          {"detail", p.detail}});
    nlohmann::json result = {{"status", to_string(r.status)},
                             {"at_assess", r.assessment ? nlohmann::json(r.assessment->value) : nlohmann::json(nullptr)}};
    if (!r.diagnostic.empty()) result["diagnostic"] = r.diagnostic;
    return {{"phases", phases}, {"result", result}};
}

}  // namespace

std::string write_phase_log(const CycleResult& result) { return io::canonical_json(cycle_json(result)) + "\n"; }

std::string write_phase_log(std::span<const CycleResult> results) {
    if (results.size() == 1) return write_phase_log(results.front());
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& r : results) cycles.push_back(cycle_json(r));
    return io::canonical_json({{"cycles", cycles}}) + "\n";
}

}  // namespace antic
