#include "antic/strips.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace antic {

std::string to_string(const Atom& atom) {
    std::string out = "(" + atom.predicate;
    for (const auto& arg : atom.args) {
        out += ' ';
        out += arg;
    }
    out += ')';
    return out;
}

std::string to_string(const Literal& lit) {
    return lit.positive ? to_string(lit.atom) : "(not " + to_string(lit.atom) + ")";
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::agent: return "action";
        case ActionKind::exogenous_event: return "event";
        case ActionKind::mitigation_candidate: return "mitigation";
    }
    return "action";
}

const PredicateDecl* DomainModel::find_predicate(std::string_view name) const {
    auto it = std::find_if(predicates.begin(), predicates.end(),
                           [&](const PredicateDecl& p) { return p.name == name; });
    return it == predicates.end() ? nullptr : &*it;
}

const ActionSchema* DomainModel::find_schema(std::string_view name) const {
    auto it = std::find_if(schemas.begin(), schemas.end(),
                           [&](const ActionSchema& s) { return s.name == name; });
    return it == schemas.end() ? nullptr : &*it;
}

bool DomainModel::has_type(std::string_view type) const {
    return type == kObjectType || std::find(types.begin(), types.end(), type) != types.end();
}

State::State(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool State::holds(const Atom& atom) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

State State::with(std::span<const Atom> removed, std::span<const Atom> added) const {
    std::vector<Atom> del(removed.begin(), removed.end());
    std::sort(del.begin(), del.end());
    std::vector<Atom> kept;
    kept.reserve(atoms_.size() + added.size());
    std::set_difference(atoms_.begin(), atoms_.end(), del.begin(), del.end(), std::back_inserter(kept));
    kept.insert(kept.end(), added.begin(), added.end());
    return State(std::move(kept));
}

const TypedName* Problem::find_object(std::string_view name) const {
    auto it = std::find_if(objects.begin(), objects.end(),
                           [&](const TypedName& o) { return o.name == name; });
    return it == objects.end() ? nullptr : &*it;
}

std::string GroundAction::name() const {
    std::string out = "(" + schema;
    for (const auto& arg : args) {
        out += ' ';
        out += arg;
    }
    out += ')';
    return out;
}

bool GroundAction::deletes(const Atom& atom) const {
    return std::any_of(effects.begin(), effects.end(),
                       [&](const Literal& l) { return !l.positive && l.atom == atom; });
}

bool GroundAction::adds(const Atom& atom) const {
    return std::any_of(effects.begin(), effects.end(),
                       [&](const Literal& l) { return l.positive && l.atom == atom; });
}

double GroundPlan::total_cost() const {
    return std::accumulate(steps.begin(), steps.end(), 0.0,
                           [](double acc, const GroundAction& a) { return acc + a.cost; });
}

namespace {

bool is_variable(std::string_view term) { return !term.empty() && term.front() == '?'; }

bool type_matches(std::string_view declared, std::string_view wanted) {
    return wanted == kObjectType || declared == wanted;
}

Atom substitute(const Atom& atom, const std::map<std::string, std::string, std::less<>>& binding) {
    Atom out{atom.predicate, {}};
    out.args.reserve(atom.args.size());
    for (const auto& term : atom.args) {
        if (is_variable(term)) {
            auto it = binding.find(term);
            out.args.push_back(it == binding.end() ? term : it->second);
        } else {
            out.args.push_back(term);
        }
    }
    return out;
}

}  // namespace

GroundAction instantiate(const ActionSchema& schema, const Problem& problem,
                         std::span<const std::string> args) {
    if (args.size() != schema.parameters.size()) {
        throw GroundingError(schema.name, "expected " + std::to_string(schema.parameters.size()) +
                                              " arguments, got " + std::to_string(args.size()));
    }
    GroundAction out;
    out.schema = schema.name;
    out.kind = schema.kind;
    out.cost = schema.cost;
    out.args.assign(args.begin(), args.end());
    std::map<std::string, std::string, std::less<>> binding;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto* obj = problem.find_object(args[i]);
        if (!obj) throw GroundingError(schema.name, "undeclared object '" + args[i] + "'");
        if (!type_matches(obj->type, schema.parameters[i].type)) {
            throw GroundingError(schema.name, "object '" + args[i] + "' is not of type '" +
                                                  schema.parameters[i].type + "'");
        }
        binding[schema.parameters[i].name] = args[i];
        out.binding.emplace_back(schema.parameters[i].name, args[i]);
    }
    for (const auto& lit : schema.preconditions) out.preconditions.push_back({substitute(lit.atom, binding), lit.positive});
    for (const auto& lit : schema.effects) out.effects.push_back({substitute(lit.atom, binding), lit.positive});
    return out;
}

std::vector<std::string> static_predicates(const DomainModel& domain) {
    std::set<std::string> changed;
    for (const auto& schema : domain.schemas)
        for (const auto& eff : schema.effects) changed.insert(eff.atom.predicate);
    std::vector<std::string> out;
    for (const auto& pred : domain.predicates)
        if (!changed.count(pred.name)) out.push_back(pred.name);
    return out;
}

std::vector<GroundAction> ground(const DomainModel& domain, const Problem& problem,
                                 GroundingOptions options) {
    const auto statics = static_predicates(domain);
    auto is_static = [&](const std::string& pred) {
        return std::find(statics.begin(), statics.end(), pred) != statics.end();
    };

    std::vector<const ActionSchema*> schemas;
    for (const auto& s : domain.schemas) schemas.push_back(&s);
    std::sort(schemas.begin(), schemas.end(),
              [](const ActionSchema* a, const ActionSchema* b) { return a->name < b->name; });

    std::vector<GroundAction> out;
    for (const ActionSchema* schema : schemas) {
        const auto& params = schema->parameters;
        std::vector<std::vector<std::string>> domains(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!domain.has_type(params[i].type))
                throw GroundingError(schema->name, "undeclared type '" + params[i].type + "'");
            for (const auto& obj : problem.objects)
                if (type_matches(obj.type, params[i].type)) domains[i].push_back(obj.name);
            std::sort(domains[i].begin(), domains[i].end());
        }

        // Static preconditions are checked as soon as their last variable is bound.
        std::vector<std::vector<const Literal*>> checks(params.size() + 1);
        if (options.prune_static) {
            for (const auto& lit : schema->preconditions) {
                if (!is_static(lit.atom.predicate)) continue;
                std::size_t last = 0;
                for (const auto& term : lit.atom.args) {
                    if (!is_variable(term)) continue;
                    auto it = std::find_if(params.begin(), params.end(),
                                           [&](const TypedName& p) { return p.name == term; });
                    if (it == params.end())
                        throw GroundingError(schema->name, "undeclared variable '" + term + "'");
                    last = std::max<std::size_t>(last, static_cast<std::size_t>(it - params.begin()) + 1);
                }
                checks[last].push_back(&lit);
            }
        }

        std::map<std::string, std::string, std::less<>> binding;
        std::vector<std::string> args(params.size());
        auto passes = [&](std::size_t level) {
            for (const Literal* lit : checks[level]) {
                if (problem.init.holds(substitute(lit->atom, binding)) != lit->positive) return false;
            }
            return true;
        };
        auto recurse = [&](auto&& self, std::size_t i) -> void {
            if (i == params.size()) {
                out.push_back(instantiate(*schema, problem, args));
                return;
            }
            for (const auto& obj : domains[i]) {
                args[i] = obj;
                binding[params[i].name] = obj;
                if (passes(i + 1)) self(self, i + 1);
            }
            binding.erase(params[i].name);
        };
        if (passes(0)) recurse(recurse, 0);
    }
    return out;
}

bool applicable(const State& state, const GroundAction& action) {
    return std::all_of(action.preconditions.begin(), action.preconditions.end(),
                       [&](const Literal& l) { return state.holds(l); });
}

State apply(const State& state, const GroundAction& action) {
    if (!applicable(state, action))
        throw ContractViolation("action " + action.name() + " is not applicable");
    std::vector<Atom> removed;
    std::vector<Atom> added;
    for (const auto& eff : action.effects) (eff.positive ? added : removed).push_back(eff.atom);
    return state.with(removed, added);
}

bool entails(const State& state, std::span<const Atom> goal) {
    return std::all_of(goal.begin(), goal.end(), [&](const Atom& a) { return state.holds(a); });
}

bool entails(const State& state, std::span<const Literal> goal) {
    return std::all_of(goal.begin(), goal.end(), [&](const Literal& l) { return state.holds(l); });
}

ProjectionError::ProjectionError(std::size_t step_index, Literal missing, const std::string& action)
    : Error("step " + std::to_string(step_index) + " " + action + " is not applicable: missing " +
            to_string(missing)),
      step_index_(step_index),
      missing_(std::move(missing)) {}

std::vector<State> project(const GroundPlan& plan, const State& init) {
    std::vector<State> states;
    states.reserve(plan.size() + 1);
    states.push_back(init);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& step = plan.steps[i];
        for (const auto& pre : step.preconditions) {
            if (!states.back().holds(pre)) throw ProjectionError(i + 1, pre, step.name());
        }
        states.push_back(apply(states.back(), step));
    }
    return states;
}

std::vector<GroundAction> filter_kind(std::span<const GroundAction> pool,
                                      std::initializer_list<ActionKind> kinds) {
    std::vector<GroundAction> out;
    for (const auto& a : pool)
        if (std::find(kinds.begin(), kinds.end(), a.kind) != kinds.end()) out.push_back(a);
    return out;
}

GroundedTask GroundedTask::make(DomainModel domain, Problem problem, GroundingOptions options) {
    GroundedTask task{std::move(domain), std::move(problem), {}};
    task.actions = ground(task.domain, task.problem, options);
    return task;
}

std::vector<GroundAction> GroundedTask::agent_actions() const {
    return filter_kind(actions, {ActionKind::agent});
}

std::vector<GroundAction> GroundedTask::event_actions() const {
    return filter_kind(actions, {ActionKind::exogenous_event});
}

std::vector<GroundAction> GroundedTask::mitigation_actions() const {
    return filter_kind(actions, {ActionKind::mitigation_candidate});
}

std::vector<GroundAction> GroundedTask::executable_actions() const {
    return filter_kind(actions, {ActionKind::agent, ActionKind::mitigation_candidate});
}

const GroundAction* GroundedTask::find(std::string_view schema, std::span<const std::string> args) const {
    auto it = std::find_if(actions.begin(), actions.end(), [&](const GroundAction& a) {
        return a.schema == schema && std::equal(a.args.begin(), a.args.end(), args.begin(), args.end());
    });
    return it == actions.end() ? nullptr : &*it;
}

}  // namespace antic
