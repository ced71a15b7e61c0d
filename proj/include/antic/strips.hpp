#pragma once
// Grounded STRIPS model: atoms, literals, action schemas, grounding, state
// transition and plan projection. Closed-world states; negative preconditions
// are allowed; effects apply delete-before-add.

#include <compare>
#include <initializer_list>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace antic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of the API was violated by the caller (e.g. applying an
/// inapplicable action).
class ContractViolation : public Error {
public:
    using Error::Error;
};

class GroundingError : public Error {
public:
    GroundingError(std::string schema, const std::string& what)
        : Error("grounding error in schema '" + schema + "': " + what), schema_(std::move(schema)) {}
    const std::string& schema() const noexcept { return schema_; }

private:
    std::string schema_;
};

// ---------------------------------------------------------------------------
// Atoms and literals
// ---------------------------------------------------------------------------

/// A predicate applied to terms. Terms are object names once ground, or
/// `?variables` inside schemas.
struct Atom {
    std::string predicate;
    std::vector<std::string> args;

    auto operator<=>(const Atom&) const = default;
    bool operator==(const Atom&) const = default;
};

/// `(pred a b)` form.
std::string to_string(const Atom& atom);

struct Literal {
    Atom atom;
    bool positive = true;

    auto operator<=>(const Literal&) const = default;
    bool operator==(const Literal&) const = default;
};

/// `(pred a b)` or `(not (pred a b))`.
std::string to_string(const Literal& lit);

inline Literal pos(Atom a) { return {std::move(a), true}; }
inline Literal neg(Atom a) { return {std::move(a), false}; }

// ---------------------------------------------------------------------------
// Domain model
// ---------------------------------------------------------------------------

struct TypedName {
    std::string name;
    std::string type;

    bool operator==(const TypedName&) const = default;
};

struct PredicateDecl {
    std::string name;
    std::vector<TypedName> params;

    std::size_t arity() const noexcept { return params.size(); }
    bool operator==(const PredicateDecl&) const = default;
};

enum class ActionKind { agent, exogenous_event, mitigation_candidate };

std::string_view to_string(ActionKind kind);

struct ActionSchema {
    std::string name;
    std::vector<TypedName> parameters;
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
    double cost = 1.0;
    ActionKind kind = ActionKind::agent;

    bool operator==(const ActionSchema&) const = default;
};

struct DomainModel {
    std::string name;
    std::vector<std::string> types;
    std::vector<PredicateDecl> predicates;
    std::vector<ActionSchema> schemas;

    const PredicateDecl* find_predicate(std::string_view name) const;
    const ActionSchema* find_schema(std::string_view name) const;
    bool has_type(std::string_view type) const;
    bool operator==(const DomainModel&) const = default;
};

/// Built-in supertype matching every declared type.
inline constexpr std::string_view kObjectType = "object";

// ---------------------------------------------------------------------------
// States and problems
// ---------------------------------------------------------------------------

/// Set of true ground atoms; everything else is false.
class State {
public:
    State() = default;
    explicit State(std::vector<Atom> atoms);

    bool holds(const Atom& atom) const;
    bool holds(const Literal& lit) const { return holds(lit.atom) == lit.positive; }

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    State with(std::span<const Atom> removed, std::span<const Atom> added) const;

    bool operator==(const State&) const = default;
    auto operator<=>(const State&) const = default;

private:
    std::vector<Atom> atoms_;  // sorted, unique
};

struct Problem {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    State init;
    std::vector<Atom> goal;  // positive conjunction

    const TypedName* find_object(std::string_view name) const;
    bool operator==(const Problem&) const = default;
};

// ---------------------------------------------------------------------------
// Ground actions and plans
// ---------------------------------------------------------------------------

struct GroundAction {
    std::string schema;
    ActionKind kind = ActionKind::agent;
    std::vector<std::string> args;
    /// Variable -> object record, in parameter order.
    std::vector<std::pair<std::string, std::string>> binding;
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
    double cost = 1.0;

    /// `(schema arg1 arg2)`, used for ordering and as a stable identity.
    std::string name() const;

    bool deletes(const Atom& atom) const;
    bool adds(const Atom& atom) const;

    bool operator==(const GroundAction& o) const { return schema == o.schema && args == o.args; }
};

struct GroundPlan {
    std::vector<GroundAction> steps;

    double total_cost() const;
    std::size_t size() const noexcept { return steps.size(); }
    bool empty() const noexcept { return steps.empty(); }
};

/// Instantiate `schema` with `args` (in parameter order). Throws
/// GroundingError when the argument count or an object type does not match.
GroundAction instantiate(const ActionSchema& schema, const Problem& problem,
                         std::span<const std::string> args);

struct GroundingOptions {
    /// Drop bindings whose static preconditions (predicates no schema ever
    /// changes) are false in the initial state.
    bool prune_static = true;
};

/// Every type-consistent binding of every schema, ordered by schema name and
/// then lexicographically by argument tuple.
std::vector<GroundAction> ground(const DomainModel& domain, const Problem& problem,
                                 GroundingOptions options = {});

/// Predicates that appear in no schema effect.
std::vector<std::string> static_predicates(const DomainModel& domain);

bool applicable(const State& state, const GroundAction& action);

/// Throws ContractViolation if the action is not applicable.
State apply(const State& state, const GroundAction& action);

bool entails(const State& state, std::span<const Atom> goal);
bool entails(const State& state, std::span<const Literal> goal);

class ProjectionError : public Error {
public:
    ProjectionError(std::size_t step_index, Literal missing, const std::string& action);
    std::size_t step_index() const noexcept { return step_index_; }
    const Literal& missing() const noexcept { return missing_; }

private:
    std::size_t step_index_;
    Literal missing_;
};

/// n+1 states for an n-step plan, starting with `init`. Throws ProjectionError
/// at the first inapplicable step (1-based step index).
std::vector<State> project(const GroundPlan& plan, const State& init);

/// Ground actions of `pool` whose kind is in `kinds`.
std::vector<GroundAction> filter_kind(std::span<const GroundAction> pool,
                                      std::initializer_list<ActionKind> kinds);

/// A parsed domain/problem pair together with its grounding.
struct GroundedTask {
    DomainModel domain;
    Problem problem;
    std::vector<GroundAction> actions;

    static GroundedTask make(DomainModel domain, Problem problem, GroundingOptions options = {});

    std::vector<GroundAction> agent_actions() const;
    std::vector<GroundAction> event_actions() const;
    std::vector<GroundAction> mitigation_actions() const;
    /// Agent and mitigation-candidate actions (everything the agent may execute).
    std::vector<GroundAction> executable_actions() const;
    const GroundAction* find(std::string_view schema, std::span<const std::string> args) const;
};

}  // namespace antic
