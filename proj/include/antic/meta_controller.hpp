#pragma once
// Metacognitive cycle over a cognitive-level plan and goal.
//
// Each cycle runs Monitor, Interpret, Evaluate, Intend, Plan and Control in
// that order and logs every phase with digests of its inputs and outputs.
// A HIGH-risk interpretation yields the meta-goal {risk LOW and the edited
// plan achieves the goal}; Plan turns it into edits through mitigation and
// Control applies and verifies them. Verified goals are dropped at the next
// cycle's Evaluate. Expectations from achieved goals are remembered so that
// a later cycle treats the events they cover as mitigated.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "antic/at_engine.hpp"
#include "antic/strips.hpp"

namespace antic {

struct CognitiveTrace {
    GroundPlan plan;
    std::vector<Atom> goal;
    State initial;

    static CognitiveTrace from_task(const GroundedTask& task, GroundPlan plan);
};

enum class MetaGoalStatus { pending, committed, achieved };

std::string_view to_string(MetaGoalStatus status);

struct MetaGoal {
    Risk target = Risk::low;
    GroundPlan plan;  // p' once achieved, p before
    std::vector<Atom> goal;
    MetaGoalStatus status = MetaGoalStatus::pending;
};

struct MetaPlan {
    std::vector<PlanEdit> edits;
};

struct PhaseRecord {
    std::string name;
    std::uint64_t inputs_digest = 0;
    std::uint64_t outputs_digest = 0;
    std::string detail;
};

struct Vulnerabilities {
    std::vector<PrestrengthEntry> prestrength;
    std::vector<ConditioningEvent> events;
};

/// Prestrength and conditioning events of the trace's plan.
Vulnerabilities explain(const CognitiveTrace& trace, const GroundedTask& task, const EventSearchConfig& config = {});

struct MetaConfig {
    EventSearchConfig analysis;
    MitigationConfig mitigation;
};

enum class CycleStatus { no_discrepancy, achieved, failed, budget_exhausted };

std::string_view to_string(CycleStatus status);

struct CycleResult {
    CognitiveTrace trace;  // the trace after Control
    std::optional<MetaGoal> goal;
    MetaPlan meta_plan;
    std::vector<PhaseRecord> phases;
    CycleStatus status = CycleStatus::no_discrepancy;
    std::optional<AtAssessment> assessment;  // set when Plan ran
    std::size_t dropped_goals = 0;
    std::string diagnostic;
};

class MetaController {
public:
    MetaController(const GroundedTask& task, MetaConfig config = {});

    CycleResult run_cycle(const CognitiveTrace& trace);

    /// Runs `cycles` cycles, each on the trace the previous one left behind.
    std::vector<CycleResult> run_cycles(const CognitiveTrace& trace, std::size_t cycles);

    const std::vector<MetaGoal>& goals() const noexcept { return goals_; }

private:
    struct Expectation {
        std::string event;  // ground event name
        double residual = 0.0;
    };

    const GroundedTask& task_;
    MetaConfig config_;
    std::vector<MetaGoal> goals_;
    std::vector<Expectation> expectations_;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// `{phases:[{name, inputs_digest, outputs_digest, detail}], result:{status, at_assess}}`
/// Digests are 16-digit lowercase hex strings.
std::string write_phase_log(const CycleResult& result);
std::string write_phase_log(std::span<const CycleResult> results);

}  // namespace antic
