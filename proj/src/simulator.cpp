#include "antic/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "antic/at_engine.hpp"
#include "antic/pocl.hpp"
#include "antic/report.hpp"

namespace antic::sim {

using nlohmann::json;

EventSchedule parse_schedule(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed scenario script: ") + e.what());
    }
    EventSchedule out;
    try {
        if (doc.contains("stochastic")) {
            const auto& s = doc.at("stochastic");
            out.mode = EventSchedule::Mode::stochastic;
            out.probability = s.at("q").get<double>();
            out.seed = s.value("seed", std::uint64_t{0});
            if (s.contains("window")) out.window = s.at("window").get<std::size_t>();
            if (!(out.probability >= 0.0 && out.probability <= 1.0)) throw Error("scenario script: q must lie in [0,1]");
        } else if (doc.contains("schedule")) {
            for (const auto& entry : doc.at("schedule")) {
                ScheduledEvent ev;
                ev.after_step = entry.at("after_step").get<std::size_t>();
                ev.name = entry.at("event").at("name").get<std::string>();
                ev.args = entry.at("event").value("args", std::vector<std::string>{});
                if (entry.contains("impact")) ev.impact = entry.at("impact").get<double>();
                out.entries.push_back(std::move(ev));
            }
        } else {
            throw Error("scenario script needs a \"schedule\" or \"stochastic\" key");
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed scenario script: ") + e.what());
    }
    return out;
}

std::string write_schedule(const EventSchedule& schedule) {
    json doc = json::object();
    if (schedule.mode == EventSchedule::Mode::stochastic) {
        json s = {{"q", schedule.probability}, {"seed", schedule.seed}};
        if (schedule.window) s["window"] = *schedule.window;
        doc["stochastic"] = s;
    } else {
        json entries = json::array();
        for (const auto& e : schedule.entries) {
            json row = {{"after_step", e.after_step}, {"event", {{"name", e.name}, {"args", e.args}}}};
            if (e.impact) row["impact"] = *e.impact;
            entries.push_back(row);
        }
        doc["schedule"] = entries;
    }
    return io::canonical_json(doc) + "\n";
}

std::size_t ExecutionTrace::events_fired() const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const InjectedEvent& e) { return e.fired; }));
}

namespace {

/// Events to inject at one opportunity.
using EventSource = std::function<std::vector<GroundAction>(std::size_t opportunity, const State& state,
                                                            std::vector<InjectedEvent>& log)>;

std::vector<Literal> positive_preconditions(const GroundAction& a) {
    std::vector<Literal> out;
    for (const auto& p : a.preconditions) out.push_back(p);
    return out;
}

class Executor {
public:
    Executor(const GroundedTask& task, const GroundPlan& plan, const SimulationOptions& options)
        : task_(task), plan_(plan), options_(options), pool_(task.executable_actions()), search_(pool_) {
        origin_ = options.origin;
        if (origin_.empty()) {
            origin_.resize(plan.size());
            for (std::size_t i = 0; i < plan.size(); ++i) origin_[i] = static_cast<long>(i);
        }
        if (origin_.size() != plan.size()) throw ContractViolation("plan alignment has the wrong length");
        reference_size_ = 0;
        for (long o : origin_)
            if (o >= 0) reference_size_ = std::max(reference_size_, static_cast<std::size_t>(o) + 1);
        try {
            ranking_ = prestrength(lift_to_pocl(plan, task.problem.init, task.problem.goal));
        } catch (const LiftingError&) {
            // Unexecutable plans still run; the failure shows up in the trace.
        }
    }

    ExecutionTrace run(const EventSource& source) {
        ExecutionTrace trace;
        State state = task_.problem.init;
        std::size_t pos = 0;
        bool abandoned = false;
        while (true) {
            for (std::size_t k = 0; k <= reference_size_; ++k) {
                if (aligned_position(origin_, k) != pos) continue;
                for (const auto& event : source(k, state, trace.events)) {
                    state = apply(state, event);
                    if (!handle_event(event, state, pos, trace)) return finish(std::move(trace), state);
                    if (abandoned_) {
                        abandoned = true;
                        break;
                    }
                }
                if (abandoned) break;
            }
            if (abandoned || pos == plan_.size()) break;
            const auto& step = plan_.steps[pos];
            if (!applicable(state, step)) {
                trace.status = ExecutionTrace::Status::failed;
                trace.failure = "step " + std::to_string(pos) + " " + step.name() + " is not applicable";
                return finish(std::move(trace), state);
            }
            state = apply(state, step);
            trace.executed.push_back({step.name(), step.cost});
            trace.base_cost += step.cost;
            ++pos;
        }
        if (!entails(state, task_.problem.goal) && trace.status == ExecutionTrace::Status::completed) {
            trace.status = ExecutionTrace::Status::failed;
            trace.failure = "goal not achieved";
        }
        return finish(std::move(trace), state);
    }

private:
    ExecutionTrace finish(ExecutionTrace trace, const State& state) {
        trace.final_state = state;
        return trace;
    }

    std::size_t rank(const Atom& atom) const {
        auto it = std::find_if(ranking_.begin(), ranking_.end(), [&](const PrestrengthEntry& e) { return e.literal == atom; });
        return static_cast<std::size_t>(it - ranking_.begin());
    }

    /// Recovers from `event` (already applied to `state`) and rejoins the plan
    /// at `pos`. Returns false when execution has to stop.
    bool handle_event(const GroundAction& event, State& state, std::size_t pos, ExecutionTrace& trace) {
        // Conditions the remainder of the plan still needs, with the earliest user.
        std::map<Atom, std::size_t> needed;
        for (std::size_t j = pos; j < plan_.size(); ++j)
            for (const auto& p : plan_.steps[j].preconditions)
                if (p.positive) needed.emplace(p.atom, j);
        for (const auto& g : task_.problem.goal) needed.emplace(g, plan_.size());

        std::optional<std::tuple<std::size_t, std::size_t, std::string, Atom>> pick;
        for (const auto& eff : event.effects) {
            if (eff.positive || state.holds(eff.atom)) continue;
            auto it = needed.find(eff.atom);
            if (it == needed.end()) continue;
            auto cand = std::make_tuple(rank(eff.atom), it->second, to_string(eff.atom), eff.atom);
            if (!pick || cand < *pick) pick = cand;
        }
        if (pick) {
            const Literal condition = pos_literal(std::get<3>(*pick));
            auto rec = recovery_cost(search_, state, std::span(&condition, 1), options_.budget);
            if (!rec.recoverable()) {
                trace.status = ExecutionTrace::Status::failed;
                trace.failure = "unrecoverable after " + event.name();
                return false;
            }
            record(rec.plan, event.name(), state, trace.recoveries, trace.recovery_cost);
        }

        // Rejoin the plan at the next step, or replan to the goal.
        std::vector<Literal> target;
        if (pos < plan_.size()) target = positive_preconditions(plan_.steps[pos]);
        else for (const auto& g : task_.problem.goal) target.push_back(pos_literal(g));
        if (entails(state, std::span<const Literal>(target))) return true;
        auto rejoin = search_.solve(state, target, options_.budget);
        if (rejoin.solved()) {
            record(rejoin.plan, "rejoin before step " + std::to_string(pos), state, trace.replans, trace.replan_cost);
            return true;
        }
        std::vector<Literal> goal;
        for (const auto& g : task_.problem.goal) goal.push_back(pos_literal(g));
        auto replan = search_.solve(state, goal, options_.budget);
        if (!replan.solved()) {
            trace.status = ExecutionTrace::Status::failed;
            trace.failure = "no plan to the goal after " + event.name();
            return false;
        }
        record(replan.plan, "replan to goal", state, trace.replans, trace.replan_cost);
        abandoned_ = true;
        return true;
    }

    static Literal pos_literal(const Atom& a) { return antic::pos(a); }

    static void record(const GroundPlan& plan, std::string trigger, State& state, std::vector<Segment>& out,
                       double& total) {
        Segment seg{std::move(trigger), {}, 0.0};
        for (const auto& a : plan.steps) {
            state = apply(state, a);
            seg.actions.push_back(a.name());
            seg.cost += a.cost;
        }
        total += seg.cost;
        out.push_back(std::move(seg));
    }

    const GroundedTask& task_;
    const GroundPlan& plan_;
    const SimulationOptions& options_;
    std::vector<GroundAction> pool_;
    StateSpaceSearch search_;
    std::vector<long> origin_;
    std::size_t reference_size_ = 0;
    std::vector<PrestrengthEntry> ranking_;
    bool abandoned_ = false;
};

std::vector<GroundAction> sorted_events(const GroundedTask& task) {
    auto events = task.event_actions();
    std::sort(events.begin(), events.end(), [](const GroundAction& a, const GroundAction& b) { return a.name() < b.name(); });
    return events;
}

}  // namespace

ExecutionTrace simulate(const GroundedTask& task, const GroundPlan& plan, const EventSchedule& schedule,
                        const SimulationOptions& options) {
    if (schedule.mode == EventSchedule::Mode::stochastic) {
        std::size_t reference = options.origin.empty() ? plan.size() : 0;
        for (long o : options.origin)
            if (o >= 0) reference = std::max(reference, static_cast<std::size_t>(o) + 1);
        std::mt19937_64 rng(schedule.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> draws(reference);
        for (auto& d : draws) d = unit(rng);
        return simulate_with_draws(task, plan, schedule.probability, draws, schedule.window, options);
    }

    for (const auto& e : schedule.entries) {
        if (!task.find(e.name, e.args))
            throw Error("scheduled event (" + e.name + " ...) after step " + std::to_string(e.after_step) +
                        " is not a ground action of the task");
    }
    Executor exec(task, plan, options);
    return exec.run([&](std::size_t k, const State& state, std::vector<InjectedEvent>& log) {
        std::vector<GroundAction> out;
        for (const auto& e : schedule.entries) {
            if (e.after_step != k) continue;
            const GroundAction& ev = *task.find(e.name, e.args);
            const bool fire = applicable(state, ev) && out.empty();
            log.push_back({k, ev.name(), fire});
            if (fire) out.push_back(ev);
        }
        return out;
    });
}

ExecutionTrace simulate_with_draws(const GroundedTask& task, const GroundPlan& plan, double probability,
                                   std::span<const double> draws, std::optional<std::size_t> window,
                                   const SimulationOptions& options) {
    const auto events = sorted_events(task);
    Executor exec(task, plan, options);
    return exec.run([&](std::size_t k, const State& state, std::vector<InjectedEvent>& log) {
        std::vector<GroundAction> out;
        if (k == 0 || k > draws.size() || (window && k > *window)) return out;
        if (!(draws[k - 1] < probability)) return out;
        for (const auto& ev : events) {
            if (applicable(state, ev)) {
                log.push_back({k, ev.name(), true});
                out.push_back(ev);
                break;
            }
        }
        return out;
    });
}

std::string write_trace(const ExecutionTrace& trace) {
    json doc;
    doc["status"] = trace.status == ExecutionTrace::Status::completed ? "completed" : "failed";
    if (!trace.failure.empty()) doc["failure"] = trace.failure;
    json executed = json::array();
    for (const auto& s : trace.executed) executed.push_back({{"action", s.action}, {"cost", s.cost}});
    doc["executed"] = executed;
    json events = json::array();
    for (const auto& e : trace.events) events.push_back({{"after_step", e.after_step}, {"event", e.event}, {"fired", e.fired}});
    doc["events"] = events;
    auto segments = [](const std::vector<Segment>& segs) {
        json arr = json::array();
        for (const auto& s : segs) arr.push_back({{"trigger", s.trigger}, {"actions", s.actions}, {"cost", s.cost}});
        return arr;
    };
    doc["recoveries"] = segments(trace.recoveries);
    doc["replans"] = segments(trace.replans);
    doc["totals"] = {{"base_cost", trace.base_cost},
                     {"recovery_cost", trace.recovery_cost},
                     {"replan_cost", trace.replan_cost},
                     {"total_cost", trace.total_cost()},
                     {"events_fired", trace.events_fired()}};
    return io::canonical_json(doc) + "\n";
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(trial) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

TrialRow make_row(std::size_t trial, std::uint64_t seed, std::string plan, const ExecutionTrace& t) {
    return {trial, seed, std::move(plan), t.base_cost, t.recovery_cost, t.replan_cost, t.total_cost(), t.events_fired(),
            t.status == ExecutionTrace::Status::failed};
}

void mean_var(const std::vector<double>& xs, double& mean, double& var) {
    mean = 0.0;
    var = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
}

}  // namespace

MonteCarloSummary monte_carlo(const GroundedTask& task, const GroundPlan& pi, const GroundPlan& pi_prime,
                              double probability, std::size_t trials, std::uint64_t seed,
                              std::optional<std::size_t> window, unsigned threads) {
    if (trials == 0) throw ContractViolation("monte carlo needs at least one trial");
    SimulationOptions base_opts;
    SimulationOptions prime_opts;
    prime_opts.origin = embed(pi, pi_prime);

    auto run_trial = [&](std::size_t t) {
        const auto s = trial_seed(seed, t);
        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> draws(pi.size());
        for (auto& d : draws) d = unit(rng);
        auto a = simulate_with_draws(task, pi, probability, draws, window, base_opts);
        auto b = simulate_with_draws(task, pi_prime, probability, draws, window, prime_opts);
        return std::make_pair(make_row(t, s, "pi", a), make_row(t, s, "pi_prime", b));
    };

    std::vector<std::pair<TrialRow, TrialRow>> results(trials);
    threads = std::max(1u, threads);
    if (threads == 1) {
        for (std::size_t t = 0; t < trials; ++t) results[t] = run_trial(t);
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t t = w; t < trials; t += threads) results[t] = run_trial(t);
            }));
        }
        for (auto& f : workers) f.get();
    }

    MonteCarloSummary out;
    out.trials = trials;
    std::vector<double> tot_pi, tot_prime, net, rec;
    for (const auto& [a, b] : results) {
        out.rows.push_back(a);
        out.rows.push_back(b);
        tot_pi.push_back(a.total_cost);
        tot_prime.push_back(b.total_cost);
        net.push_back(a.total_cost - b.total_cost);
        if (a.failed || b.failed) ++out.failures;
        rec.push_back(a.recovery_cost - b.recovery_cost);
    }
    double unused = 0.0;
    mean_var(tot_pi, out.mean_total_pi, out.var_total_pi);
    mean_var(tot_prime, out.mean_total_prime, out.var_total_prime);
    mean_var(net, out.mean_net_saving, out.var_net_saving);
    mean_var(rec, out.mean_recovery_saving, unused);
    return out;
}

std::string to_csv(std::span<const TrialRow> rows) {
    std::ostringstream out;
    out << "trial,seed,plan,base_cost,recovery_cost,replan_cost,total_cost,events_fired\n";
    for (const auto& r : rows) {
        out << r.trial << ',' << r.seed << ',' << r.plan << ',' << io::format_fixed(r.base_cost) << ','
            << io::format_fixed(r.recovery_cost) << ',' << io::format_fixed(r.replan_cost) << ','
            << io::format_fixed(r.total_cost) << ',' << r.events_fired << '\n';
    }
    return out.str();
}

std::vector<TrialRow> scripted_rows(const ExecutionTrace& pi, const ExecutionTrace* pi_prime, std::uint64_t seed) {
    std::vector<TrialRow> rows{make_row(0, seed, "pi", pi)};
    if (pi_prime) rows.push_back(make_row(0, seed, "pi_prime", *pi_prime));
    return rows;
}

std::string write_summary(const MonteCarloSummary& s) {
    json doc = {{"trials", s.trials},
                {"mean_total_pi", s.mean_total_pi},
                {"var_total_pi", s.var_total_pi},
                {"mean_total_pi_prime", s.mean_total_prime},
                {"var_total_pi_prime", s.var_total_prime},
                {"mean_net_saving", s.mean_net_saving},
                {"var_net_saving", s.var_net_saving},
                {"mean_recovery_saving", s.mean_recovery_saving}};
    return io::canonical_json(doc) + "\n";
}

}  // namespace antic::sim
