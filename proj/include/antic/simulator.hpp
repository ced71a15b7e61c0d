#pragma once
// Plan execution with injected exogenous events.
//
// Wind opportunities are indexed by steps of a reference plan: opportunity k
// (k >= 1) comes after reference step k, and fires just before reference step
// k+1 of the executed plan (after any anticipatory actions inserted ahead of
// it). When the executed plan is the reference plan this is simply "after
// step k". Pairing two plans through the same reference keeps their wind
// draws aligned.
//
// After an event fires, the most vulnerable deleted condition that the rest
// of the plan still needs is restored by the cheapest recovery plan; the agent
// then replans to rejoin the plan at the next step (or to the goal when the
// plan cannot be rejoined).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "antic/planner.hpp"
#include "antic/strips.hpp"

namespace antic::sim {

struct ScheduledEvent {
    std::size_t after_step = 0;
    std::string name;
    std::vector<std::string> args;
    /// Optional impact annotation used by the analysis, not by execution.
    std::optional<double> impact;
};

struct EventSchedule {
    enum class Mode { scripted, stochastic };

    Mode mode = Mode::scripted;
    std::vector<ScheduledEvent> entries;  // scripted
    double probability = 0.0;             // stochastic
    std::uint64_t seed = 0;
    /// Wind may only blow after reference steps 1..window.
    std::optional<std::size_t> window;
};

/// Scenario script JSON:
///   {"schedule":[{"after_step":1,"event":{"name":"wind-capture","args":[...]},"impact":3}]}
///   {"stochastic":{"q":0.5,"seed":7,"window":4}}
/// Throws Error on malformed input.
EventSchedule parse_schedule(std::string_view json);
std::string write_schedule(const EventSchedule& schedule);

struct ExecutedStep {
    std::string action;
    double cost = 0.0;
};

struct InjectedEvent {
    std::size_t after_step = 0;  // reference step count
    std::string event;
    bool fired = false;          // false when the event was not applicable
};

struct Segment {
    std::string trigger;  // event name (recovery) or reason (replan)
    std::vector<std::string> actions;
    double cost = 0.0;
};

struct ExecutionTrace {
    enum class Status { completed, failed };

    Status status = Status::completed;
    std::string failure;
    std::vector<ExecutedStep> executed;
    std::vector<InjectedEvent> events;
    std::vector<Segment> recoveries;
    std::vector<Segment> replans;
    double base_cost = 0.0;
    double recovery_cost = 0.0;
    double replan_cost = 0.0;
    State final_state;

    double total_cost() const noexcept { return base_cost + recovery_cost + replan_cost; }
    std::size_t events_fired() const;
};

struct SimulationOptions {
    /// Alignment of the executed plan to the reference plan (see embed());
    /// identity when empty.
    std::vector<long> origin;
    SearchBudget budget;
};

ExecutionTrace simulate(const GroundedTask& task, const GroundPlan& plan, const EventSchedule& schedule,
                        const SimulationOptions& options = {});

/// Same as simulate() but with explicit per-opportunity wind draws
/// (draws[k-1] for opportunity k); the wind blows when draw < probability.
ExecutionTrace simulate_with_draws(const GroundedTask& task, const GroundPlan& plan, double probability,
                                   std::span<const double> draws, std::optional<std::size_t> window,
                                   const SimulationOptions& options = {});

std::string write_trace(const ExecutionTrace& trace);

struct TrialRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string plan;  // "pi" or "pi_prime"
    double base_cost = 0.0;
    double recovery_cost = 0.0;
    double replan_cost = 0.0;
    double total_cost = 0.0;
    std::size_t events_fired = 0;
    bool failed = false;
};

struct MonteCarloSummary {
    std::size_t trials = 0;
    double mean_total_pi = 0.0;
    double var_total_pi = 0.0;
    double mean_total_prime = 0.0;
    double var_total_prime = 0.0;
    /// Mean of total(pi) - total(pi_prime).
    double mean_net_saving = 0.0;
    double var_net_saving = 0.0;
    /// Mean of recovery(pi) - recovery(pi_prime).
    double mean_recovery_saving = 0.0;
    std::size_t failures = 0;
    std::vector<TrialRow> rows;
};

/// Derived per-trial seed (splitmix64 of master seed and trial index).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// Paired runs of `pi` and `pi_prime` sharing each trial's wind draws. Trials
/// are independent and may run on `threads` workers; rows are in trial order.
MonteCarloSummary monte_carlo(const GroundedTask& task, const GroundPlan& pi, const GroundPlan& pi_prime,
                              double probability, std::size_t trials, std::uint64_t seed,
                              std::optional<std::size_t> window = std::nullopt, unsigned threads = 1);

/// `trial,seed,plan,base_cost,recovery_cost,replan_cost,total_cost,events_fired`
std::string to_csv(std::span<const TrialRow> rows);

/// Rows for a scripted run of both plans, trial 0.
std::vector<TrialRow> scripted_rows(const ExecutionTrace& pi, const ExecutionTrace* pi_prime, std::uint64_t seed);

std::string write_summary(const MonteCarloSummary& summary);

}  // namespace antic::sim
