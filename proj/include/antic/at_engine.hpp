#pragma once
// Anticipatory thinking over a solution plan:
//
//   1. goal vulnerabilities   - precondition strength <a, p, e>
//   2. failure anticipation   - conditioning events that threaten causal links
//   3. failure mitigation     - best-first insertion of anticipatory actions
//
// and the coverage x cost-benefit assessment of the result:
//
//   value = (|CE(ANT)| / |CE|) * (1 - C / D)
//
// where C is the total cost of the inserted anticipatory actions and D sums
// the impacts of the mitigated events (original impacts by default, or the
// realized savings under SavingsAccounting::net).

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antic/planner.hpp"
#include "antic/pocl.hpp"
#include "antic/strips.hpp"

namespace antic {

// ---------------------------------------------------------------------------
// Goal vulnerabilities
// ---------------------------------------------------------------------------

struct PrestrengthEntry {
    Atom literal;
    std::size_t uses = 0;          // plan steps using the literal as a precondition
    std::size_t establishers = 0;  // effects (start step included) before the first use

    /// uses / establishers; the higher, the more vulnerable.
    double score() const noexcept;
};

/// Entries ordered by score descending, then uses descending, then literal.
std::vector<PrestrengthEntry> prestrength(const PoclPlan& pocl);

// ---------------------------------------------------------------------------
// Failure anticipation
// ---------------------------------------------------------------------------

enum class CandidateMode { events_only, adversarial };

std::string_view to_string(CandidateMode mode);

struct ConditioningEvent {
    GroundAction event;
    CausalLink link;
    /// Trajectory position at which the event fires.
    std::size_t trigger_index = 0;
    /// Cheapest recovery cost; nullopt when the condition cannot be restored.
    std::optional<double> impact;

    /// `(event args)@trigger_index`
    std::string ref() const;
};

struct EventSearchConfig {
    CandidateMode mode = CandidateMode::events_only;
    SearchBudget recovery_budget;
    /// Impact overrides keyed by event ref (`(name args)@t`) or event name.
    std::map<std::string, double, std::less<>> impact_overrides;
};

/// One event per (candidate, trigger position) that threatens at least one
/// causal link. The threatened link reported is the one whose condition ranks
/// highest in the precondition-strength order (earliest consumer on ties).
/// Ordered by trigger position, then event name.
std::vector<ConditioningEvent> find_conditioning_events(const PoclPlan& pocl, const GroundedTask& task,
                                                        std::span<const State> trajectory,
                                                        const EventSearchConfig& config = {});

/// Candidate pool for the given mode: exogenous events, or every ground
/// action that is not a step of the plan.
std::vector<GroundAction> threat_candidates(const GroundedTask& task, const GroundPlan& plan, CandidateMode mode);

// ---------------------------------------------------------------------------
// Assessment and risk
// ---------------------------------------------------------------------------

enum class SavingsAccounting { original, net };

std::string_view to_string(SavingsAccounting accounting);

struct AtAssessment {
    std::size_t identified = 0;
    std::size_t mitigated = 0;
    double cost = 0.0;        // C
    double impact_sum = 0.0;  // D
    double value = 0.0;
    bool uneconomic = false;  // C > D
};

/// One anticipatory action set as seen by the assessment.
struct AntContribution {
    double cost = 0.0;
    std::vector<double> mitigated_impacts;
};

/// Conventions: no identified events and C = 0 gives 1; no identified events
/// and C > 0 gives 0 (uneconomic); nothing mitigated gives 0; C > D keeps the
/// raw, possibly negative, value and sets the uneconomic flag.
AtAssessment at_assess(std::size_t identified, std::span<const AntContribution> ant);

enum class Risk { low, high };

std::string_view to_string(Risk risk);

struct RiskLevel {
    Risk level = Risk::low;
    /// Indices of unmitigated events with positive (or infinite) impact.
    std::vector<std::size_t> justification;
};

// ---------------------------------------------------------------------------
// Failure mitigation
// ---------------------------------------------------------------------------

enum class EditKind { insert, remove };

struct PlanEdit {
    EditKind kind = EditKind::insert;
    std::size_t position = 0;  // index in the plan the edit is applied to
    GroundAction action;
};

/// Applies edits in order. Throws ContractViolation on an out-of-range edit.
GroundPlan apply_edits(const GroundPlan& plan, std::span<const PlanEdit> edits);

struct InsertedAction {
    std::size_t position = 0;  // step index in the modified plan
    GroundAction action;
};

struct AnticipatoryActionSet {
    std::vector<InsertedAction> actions;
    std::vector<std::size_t> covered;  // indices into the event list
    double added_cost = 0.0;
    /// Residual impact of each covered event, parallel to `covered`.
    std::vector<double> residuals;
};

struct AnticipatoryExpectation {
    std::size_t event = 0;  // index into the event list
    double saving = 0.0;
};

/// Events covered by any set (sorted, unique).
std::vector<std::size_t> covered_events(std::span<const AnticipatoryActionSet> ant);

/// HIGH iff an uncovered event has impact > 0 (unrecoverable counts as > 0).
RiskLevel classify_risk(std::span<const ConditioningEvent> events, std::span<const AnticipatoryActionSet> ant);

/// Assessment of a set of anticipatory actions against the identified events.
AtAssessment assess(std::span<const ConditioningEvent> events, std::span<const AnticipatoryActionSet> ant,
                    SavingsAccounting accounting = SavingsAccounting::original);

struct MitigationConfig {
    double tau = 0.5;
    std::size_t budget = 10'000;  // node expansions
    std::size_t max_edits = 4;    // edits along any search path
    bool allow_deletes = false;
    SavingsAccounting accounting = SavingsAccounting::original;
    SearchBudget recovery_budget;
};

enum class MitigationStatus { goal_reached, search_exhausted, budget_exhausted };

std::string_view to_string(MitigationStatus status);

struct MitigationResult {
    GroundPlan plan;  // the modified plan
    std::vector<PlanEdit> edits;
    std::vector<AnticipatoryActionSet> ant;
    std::vector<AnticipatoryExpectation> expectations;
    /// Residual impact of every event under the modified plan.
    std::vector<std::optional<double>> residuals;
    AtAssessment assessment;
    RiskLevel risk;
    MitigationStatus status = MitigationStatus::goal_reached;
    std::size_t expansions = 0;
};

/// Best-first search over modified plans. A node is a plan; a successor
/// inserts one candidate action (mitigation candidates, or agent actions when
/// the domain has none) at a position that keeps the plan executable and the
/// goal achieved. Nodes are scored by the assessment with freshly computed
/// residual impacts; the search stops at the first node with LOW risk or a
/// score of at least tau, and otherwise returns the best node seen.
MitigationResult mitigate(const GroundPlan& plan, const GroundedTask& task, std::span<const ConditioningEvent> events,
                          const MitigationConfig& config = {});

/// Residual impact of `event` when it fires just before original step
/// `trigger_index + 1` of `modified` (whose steps map back to the original
/// plan through `origin`, -1 for inserted steps). Zero when the event can no
/// longer fire there.
std::optional<double> residual_impact(const StateSpaceSearch& recovery, const GroundPlan& modified,
                                      std::span<const long> origin, const State& init, const ConditioningEvent& event,
                                      const SearchBudget& budget = {});

/// Position of original step `original_index` within `modified`, or the plan
/// length when it has no surviving successor.
std::size_t aligned_position(std::span<const long> origin, std::size_t original_index);

/// Greedy embedding of `original` into `modified` (only insertions assumed);
/// -1 marks inserted steps. Throws ContractViolation when no embedding exists.
std::vector<long> embed(const GroundPlan& original, const GroundPlan& modified);

// ---------------------------------------------------------------------------
// Whole pipeline
// ---------------------------------------------------------------------------

struct Analysis {
    PoclPlan pocl;
    std::vector<State> trajectory;
    std::vector<PrestrengthEntry> prestrength;
    std::vector<ConditioningEvent> events;
    RiskLevel risk;
};

Analysis analyze(const GroundPlan& plan, const GroundedTask& task, const EventSearchConfig& config = {});

}  // namespace antic
