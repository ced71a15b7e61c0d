#include "antic/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "antic/at_engine.hpp"
#include "antic/meta_controller.hpp"
#include "antic/nbeacons.hpp"
#include "antic/parser.hpp"
#include "antic/planner.hpp"
#include "antic/report.hpp"
#include "antic/simulator.hpp"

namespace antic::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string domain;
    std::string problem;
    std::string plan;
    std::string plan_prime;
    std::string plan_out;
    std::string out;
    std::string script;
    std::string report;
    std::string mode = "events-only";
    std::string accounting = "original";
    double tau = 0.5;
    std::optional<std::size_t> budget;
    std::optional<double> wind_prob;
    std::optional<std::size_t> wind_window;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t cycles = 1;
    bool allow_deletes = false;
    bool csv = false;
    bool canonical = false;
    int width = 10;
    int height = 10;
    int sandpits = 4;
};

class Command {
public:
    Command(const Options& o, std::ostream& out) : o_(o), out_(out) {}

    void emit(const std::string& text) const {
        if (o_.out.empty()) out_ << text;
        else io::write_file(o_.out, text);
    }

    GroundedTask task() const { return io::load_task(o_.domain, o_.problem); }

    GroundPlan plan(const GroundedTask& task, const std::string& path) const {
        if (path.empty()) throw Error("a plan file is required (--plan)");
        return io::load_plan(path, task);
    }

    EventSearchConfig analysis_config() const {
        EventSearchConfig c;
        c.mode = o_.mode == "adversarial" ? CandidateMode::adversarial : CandidateMode::events_only;
        return c;
    }

    SavingsAccounting accounting() const {
        return o_.accounting == "net" ? SavingsAccounting::net : SavingsAccounting::original;
    }

    MitigationConfig mitigation_config() const {
        MitigationConfig c;
        c.tau = o_.tau;
        if (o_.budget) c.budget = *o_.budget;
        c.allow_deletes = o_.allow_deletes;
        c.accounting = accounting();
        return c;
    }

    int validate() const {
        const auto t = task();
        nlohmann::json doc = {{"valid", true},
                              {"objects", t.problem.objects.size()},
                              {"ground_actions", t.agent_actions().size()},
                              {"ground_events", t.event_actions().size()},
                              {"ground_mitigations", t.mitigation_actions().size()}};
        if (!o_.plan.empty()) {
            const auto p = plan(t, o_.plan);
            const auto states = project(p, t.problem.init);
            if (!entails(states.back(), std::span<const Atom>(t.problem.goal)))
                throw Error("plan '" + o_.plan + "' does not achieve the goal");
            doc["plan_steps"] = p.size();
            doc["plan_cost"] = p.total_cost();
        }
        emit(io::canonical_json(doc) + "\n");
        return kExitOk;
    }

    int make_plan() const {
        const auto t = task();
        SearchBudget budget;
        if (o_.budget) budget.max_expansions = *o_.budget;
        const auto result = find_plan(t, budget);
        if (result.status == SearchStatus::budget_exhausted) throw BudgetExhausted("planner budget exhausted");
        if (!result.solved()) throw Error("no plan reaches the goal");
        emit(io::write_plan(result.plan));
        return kExitOk;
    }

    int analyze_plan() const {
        const auto t = task();
        const auto a = analyze(plan(t, o_.plan), t, analysis_config());
        emit(io::write_report(io::make_report(a)));
        return kExitOk;
    }

    int mitigate_plan() const {
        const auto t = task();
        const auto p = plan(t, o_.plan);
        const auto a = analyze(p, t, analysis_config());
        const auto result = mitigate(p, t, a.events, mitigation_config());
        emit(io::write_report(io::make_report(result, a.events, accounting())));
        if (!o_.plan_out.empty()) io::write_file(o_.plan_out, io::write_plan(result.plan));
        return result.status == MitigationStatus::budget_exhausted ? kExitBudget : kExitOk;
    }

    int assess_report() const {
        if (o_.report.empty()) throw Error("a report file is required");
        const auto a = io::assess_report(io::read_report(io::read_file(o_.report)));
        nlohmann::json doc = {{"at_assess", a.value},     {"cost", a.cost},           {"identified", a.identified},
                              {"impact_sum", a.impact_sum}, {"mitigated", a.mitigated}, {"uneconomic", a.uneconomic}};
        emit(io::canonical_json(doc) + "\n");
        return kExitOk;
    }

    int simulate_plan() const {
        const auto t = task();
        const auto pi = plan(t, o_.plan);
        std::optional<GroundPlan> prime;
        if (!o_.plan_prime.empty()) prime = plan(t, o_.plan_prime);

        sim::EventSchedule schedule;
        if (!o_.script.empty()) {
            schedule = sim::parse_schedule(io::read_file(o_.script));
        } else if (o_.wind_prob) {
            schedule.mode = sim::EventSchedule::Mode::stochastic;
            schedule.probability = *o_.wind_prob;
            schedule.seed = o_.seed;
            schedule.window = o_.wind_window;
        }

        if (schedule.mode == sim::EventSchedule::Mode::stochastic && prime) {
            const unsigned threads = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
            const auto summary = sim::monte_carlo(t, pi, *prime, schedule.probability, o_.trials, schedule.seed,
                                                  schedule.window, threads);
            emit(o_.csv ? sim::to_csv(summary.rows) : sim::write_summary(summary));
            return kExitOk;
        }

        const auto a = sim::simulate(t, pi, schedule);
        std::optional<sim::ExecutionTrace> b;
        if (prime) {
            sim::SimulationOptions opts;
            opts.origin = embed(pi, *prime);
            b = sim::simulate(t, *prime, schedule, opts);
        }
        if (o_.csv) {
            emit(sim::to_csv(sim::scripted_rows(a, b ? &*b : nullptr, schedule.seed)));
        } else if (b) {
            const nlohmann::json doc = {{"pi", nlohmann::json::parse(sim::write_trace(a))},
                                        {"pi_prime", nlohmann::json::parse(sim::write_trace(*b))}};
            emit(io::canonical_json(doc) + "\n");
        } else {
            emit(sim::write_trace(a));
        }
        return kExitOk;
    }

    int meta() const {
        const auto t = task();
        MetaConfig config{analysis_config(), mitigation_config()};
        MetaController controller(t, config);
        const auto results = controller.run_cycles(CognitiveTrace::from_task(t, plan(t, o_.plan)), o_.cycles);
        emit(write_phase_log(results));
        if (!o_.plan_out.empty()) io::write_file(o_.plan_out, io::write_plan(results.back().trace.plan));
        switch (results.back().status) {
            case CycleStatus::budget_exhausted: return kExitBudget;
            case CycleStatus::failed: return kExitDiagnostics;
            default: return kExitOk;
        }
    }

    int gen_nbeacons() const {
        if (o_.out.empty()) throw Error("gen-nbeacons needs an output directory (-o)");
        const fs::path dir(o_.out);
        fs::create_directories(dir);
        if (o_.canonical) {
            const auto s = nbeacons::canonical_scenario();
            io::write_file(dir / "domain.pddl", s.files.domain);
            io::write_file(dir / "problem.pddl", s.files.problem);
            io::write_file(dir / "plan.txt", s.plan);
            return kExitOk;
        }
        auto config = nbeacons::random_config(o_.width, o_.height, o_.sandpits, o_.seed);
        if (o_.wind_prob) config.wind_probability = *o_.wind_prob;
        const auto files = nbeacons::generate(config);
        io::write_file(dir / "domain.pddl", files.domain);
        io::write_file(dir / "problem.pddl", files.problem);
        auto domain = io::parse_domain(files.domain);
        auto problem = io::parse_problem(files.problem, domain);
        const auto t = GroundedTask::make(std::move(domain), std::move(problem));
        SearchBudget budget;
        if (o_.budget) budget.max_expansions = *o_.budget;
        const auto result = find_plan(t, budget);
        if (result.solved()) io::write_file(dir / "plan.txt", io::write_plan(result.plan));
        return kExitOk;
    }

    struct BudgetExhausted : Error {
        using Error::Error;
    };

private:
    const Options& o_;
    std::ostream& out_;
};

void add_task(CLI::App* sub, Options& o, bool plan_required) {
    sub->add_option("-d,--domain", o.domain, "domain file")->required()->check(CLI::ExistingFile);
    sub->add_option("-p,--problem", o.problem, "problem file")->required()->check(CLI::ExistingFile);
    auto* plan = sub->add_option("--plan", o.plan, "plan file")->check(CLI::ExistingFile);
    if (plan_required) plan->required();
}

void add_analysis(CLI::App* sub, Options& o) {
    sub->add_option("--mode", o.mode, "threat candidates")->check(CLI::IsMember({"events-only", "adversarial"}));
}

void add_mitigation(CLI::App* sub, Options& o) {
    sub->add_option("--savings-accounting", o.accounting, "impact credited to a mitigated event")
        ->check(CLI::IsMember({"original", "net"}));
    sub->add_option("--tau", o.tau, "assessment threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--budget", o.budget, "node expansion budget");
    sub->add_flag("--allow-deletes", o.allow_deletes, "allow removing plan steps");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Anticipatory thinking over STRIPS plans", "antic"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto* validate = app.add_subcommand("validate", "parse and check a domain, problem and optional plan");
    add_task(validate, o, false);

    auto* plan = app.add_subcommand("plan", "find a minimum-cost plan");
    add_task(plan, o, false);
    plan->add_option("--budget", o.budget, "node expansion budget");

    auto* analyze = app.add_subcommand("analyze", "precondition strength, conditioning events and risk");
    add_task(analyze, o, true);
    add_analysis(analyze, o);

    auto* mitigate = app.add_subcommand("mitigate", "insert anticipatory actions into a plan");
    add_task(mitigate, o, true);
    add_analysis(mitigate, o);
    add_mitigation(mitigate, o);
    mitigate->add_option("--plan-out", o.plan_out, "write the modified plan here");

    auto* assess = app.add_subcommand("assess", "recompute the assessment of a report");
    assess->add_option("report", o.report, "analysis or mitigation report")->required()->check(CLI::ExistingFile);

    auto* simulate = app.add_subcommand("simulate", "execute plans with injected wind");
    add_task(simulate, o, true);
    simulate->add_option("--plan-prime", o.plan_prime, "second plan for paired runs")->check(CLI::ExistingFile);
    simulate->add_option("--script", o.script, "scenario script")->check(CLI::ExistingFile);
    simulate->add_option("--wind-prob", o.wind_prob, "wind probability per step")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--wind-window", o.wind_window, "wind only after the first N reference steps");
    simulate->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", o.seed, "master seed");
    simulate->add_flag("--csv", o.csv, "CSV rows instead of JSON");

    auto* meta = app.add_subcommand("meta", "run metacognitive cycles");
    add_task(meta, o, true);
    add_analysis(meta, o);
    add_mitigation(meta, o);
    meta->add_option("--cycles", o.cycles, "number of cycles")->check(CLI::PositiveNumber);
    meta->add_option("--plan-out", o.plan_out, "write the final plan here");

    auto* gen = app.add_subcommand("gen-nbeacons", "write an NBeacons domain, problem and plan");
    gen->add_flag("--canonical", o.canonical, "the fixed 10x10 scenario");
    gen->add_option("--seed", o.seed, "seed for a random grid");
    gen->add_option("--width", o.width, "grid width")->check(CLI::PositiveNumber);
    gen->add_option("--height", o.height, "grid height")->check(CLI::PositiveNumber);
    gen->add_option("--sandpits", o.sandpits, "number of sandpits")->check(CLI::NonNegativeNumber);
    gen->add_option("--wind-prob", o.wind_prob, "wind probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--budget", o.budget, "planner expansion budget");

    for (auto* sub : {validate, plan, analyze, mitigate, assess, simulate, meta, gen})
        sub->add_option("-o,--out", o.out, "output path (standard output when absent)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitDiagnostics;
    }

    const Command cmd(o, out);
    try {
        if (validate->parsed()) return cmd.validate();
        if (plan->parsed()) return cmd.make_plan();
        if (analyze->parsed()) return cmd.analyze_plan();
        if (mitigate->parsed()) return cmd.mitigate_plan();
        if (assess->parsed()) return cmd.assess_report();
        if (simulate->parsed()) return cmd.simulate_plan();
        if (meta->parsed()) return cmd.meta();
        if (gen->parsed()) return cmd.gen_nbeacons();
    } catch (const io::ParseError& e) {
        for (const auto& d : e.diagnostics()) err << d.format() << '\n';
        return kExitDiagnostics;
    } catch (const Command::BudgetExhausted& e) {
        err << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const ContractViolation& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitContract;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiagnostics;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiagnostics;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitContract;
    }
    return kExitDiagnostics;
}

}  // namespace antic::cli
