#include "antic/planner.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace antic {

std::string_view to_string(SearchStatus status) {
    switch (status) {
        case SearchStatus::solved: return "solved";
        case SearchStatus::unsolvable: return "unsolvable";
        case SearchStatus::budget_exhausted: return "budget-exhausted";
    }
    return "unsolvable";
}

namespace {

using AtomId = std::uint32_t;
using FluentSet = std::vector<AtomId>;  // sorted

struct FluentSetHash {
    std::size_t operator()(const FluentSet& s) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (AtomId id : s) {
            h ^= id + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

struct CompiledAction {
    std::size_t source = 0;  // index into the pool
    std::vector<AtomId> pre_pos, pre_neg;
    std::vector<AtomId> static_pos, static_neg;
    std::vector<AtomId> add, del;
    double cost = 1.0;
};

bool contains(const FluentSet& s, AtomId id) { return std::binary_search(s.begin(), s.end(), id); }

}  // namespace

struct StateSpaceSearch::Impl {
    std::vector<GroundAction> pool;
    std::unordered_map<std::string, AtomId> ids;
    std::vector<bool> fluent;
    std::vector<CompiledAction> actions;  // sorted by action name

    AtomId intern(const Atom& atom) {
        auto [it, inserted] = ids.emplace(to_string(atom), static_cast<AtomId>(fluent.size()));
        if (inserted) fluent.push_back(false);
        return it->second;
    }

    std::optional<AtomId> lookup(const Atom& atom) const {
        auto it = ids.find(to_string(atom));
        if (it == ids.end()) return std::nullopt;
        return it->second;
    }
};

StateSpaceSearch::StateSpaceSearch(std::span<const GroundAction> pool) : impl_(std::make_unique<Impl>()) {
    auto& im = *impl_;
    im.pool.assign(pool.begin(), pool.end());
    for (const auto& a : im.pool)
        for (const auto& e : a.effects) im.fluent[im.intern(e.atom)] = true;

    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < im.pool.size(); ++i) order.emplace_back(im.pool[i].name(), i);
    std::sort(order.begin(), order.end());

    for (const auto& [name, i] : order) {
        const auto& a = im.pool[i];
        CompiledAction c;
        c.source = i;
        c.cost = a.cost;
        for (const auto& p : a.preconditions) {
            const AtomId id = im.intern(p.atom);
            if (im.fluent[id]) (p.positive ? c.pre_pos : c.pre_neg).push_back(id);
            else (p.positive ? c.static_pos : c.static_neg).push_back(id);
        }
        for (const auto& e : a.effects) (e.positive ? c.add : c.del).push_back(im.intern(e.atom));
        std::sort(c.add.begin(), c.add.end());
        std::sort(c.del.begin(), c.del.end());
        im.actions.push_back(std::move(c));
    }
}

StateSpaceSearch::~StateSpaceSearch() = default;
StateSpaceSearch::StateSpaceSearch(StateSpaceSearch&&) noexcept = default;
StateSpaceSearch& StateSpaceSearch::operator=(StateSpaceSearch&&) noexcept = default;

SearchResult StateSpaceSearch::solve(const State& start, std::span<const Literal> goal,
                                     const SearchBudget& budget) const {
    const auto& im = *impl_;
    SearchResult result;

    FluentSet initial;
    std::vector<bool> static_true(im.fluent.size(), false);
    for (const auto& atom : start.atoms()) {
        if (auto id = im.lookup(atom)) {
            if (im.fluent[*id]) initial.push_back(*id);
            else static_true[*id] = true;
        }
    }
    std::sort(initial.begin(), initial.end());

    // Goal literals over atoms no action changes are decided by the start state.
    std::vector<AtomId> goal_pos, goal_neg;
    for (const auto& lit : goal) {
        auto id = im.lookup(lit.atom);
        if (!id || !im.fluent[*id]) {
            if (start.holds(lit)) continue;
            return result;  // unsolvable
        }
        (lit.positive ? goal_pos : goal_neg).push_back(*id);
    }

    std::vector<const CompiledAction*> active;
    for (const auto& c : im.actions) {
        const bool ok = std::all_of(c.static_pos.begin(), c.static_pos.end(), [&](AtomId id) { return static_true[id]; }) &&
                        std::none_of(c.static_neg.begin(), c.static_neg.end(), [&](AtomId id) { return static_true[id]; });
        if (ok) active.push_back(&c);
    }

    struct Node {
        FluentSet state;
        double g;
        std::size_t parent;
        const CompiledAction* via;
    };
    std::vector<Node> nodes;
    std::unordered_map<FluentSet, std::size_t, FluentSetHash> index;
    using Entry = std::tuple<double, std::size_t, std::size_t>;  // g, sequence, node
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    std::size_t sequence = 0;

    nodes.push_back({initial, 0.0, 0, nullptr});
    index.emplace(initial, 0);
    frontier.emplace(0.0, sequence++, 0);
    std::vector<bool> closed;

    auto is_goal = [&](const FluentSet& s) {
        return std::all_of(goal_pos.begin(), goal_pos.end(), [&](AtomId id) { return contains(s, id); }) &&
               std::none_of(goal_neg.begin(), goal_neg.end(), [&](AtomId id) { return contains(s, id); });
    };

    while (!frontier.empty()) {
        auto [g, seq, id] = frontier.top();
        frontier.pop();
        if (closed.size() <= id) closed.resize(nodes.size(), false);
        if (closed[id] || g > nodes[id].g) continue;
        closed[id] = true;

        if (is_goal(nodes[id].state)) {
            result.status = SearchStatus::solved;
            result.cost = g;
            std::vector<std::size_t> chain;
            for (std::size_t n = id; nodes[n].via; n = nodes[n].parent) chain.push_back(n);
            for (auto it = chain.rbegin(); it != chain.rend(); ++it)
                result.plan.steps.push_back(im.pool[nodes[*it].via->source]);
            return result;
        }
        if (result.expansions >= budget.max_expansions) {
            result.status = SearchStatus::budget_exhausted;
            return result;
        }
        ++result.expansions;

        const FluentSet current = nodes[id].state;
        for (const CompiledAction* a : active) {
            const bool app = std::all_of(a->pre_pos.begin(), a->pre_pos.end(), [&](AtomId x) { return contains(current, x); }) &&
                             std::none_of(a->pre_neg.begin(), a->pre_neg.end(), [&](AtomId x) { return contains(current, x); });
            if (!app) continue;
            const double ng = g + a->cost;
            if (budget.max_cost && ng > *budget.max_cost) continue;
            FluentSet next;
            next.reserve(current.size() + a->add.size());
            std::set_difference(current.begin(), current.end(), a->del.begin(), a->del.end(), std::back_inserter(next));
            FluentSet merged;
            merged.reserve(next.size() + a->add.size());
            std::set_union(next.begin(), next.end(), a->add.begin(), a->add.end(), std::back_inserter(merged));

            auto it = index.find(merged);
            if (it == index.end()) {
                nodes.push_back({merged, ng, id, a});
                index.emplace(std::move(merged), nodes.size() - 1);
                frontier.emplace(ng, sequence++, nodes.size() - 1);
            } else if (ng < nodes[it->second].g) {
                nodes[it->second].g = ng;
                nodes[it->second].parent = id;
                nodes[it->second].via = a;
                frontier.emplace(ng, sequence++, it->second);
            }
        }
    }
    return result;  // frontier exhausted: unsolvable
}

SearchResult find_plan(const GroundedTask& task, const SearchBudget& budget) {
    const auto pool = task.agent_actions();
    std::vector<Literal> goal;
    for (const auto& a : task.problem.goal) goal.push_back(pos(a));
    return StateSpaceSearch(pool).solve(task.problem.init, goal, budget);
}

RecoveryResult recovery_cost(const StateSpaceSearch& search, const State& state, std::span<const Literal> condition,
                             const SearchBudget& budget) {
    RecoveryResult out;
    auto r = search.solve(state, condition, budget);
    if (r.solved()) {
        out.cost = r.cost;
        out.plan = std::move(r.plan);
    }
    out.budget_exhausted = r.status == SearchStatus::budget_exhausted;
    return out;
}

RecoveryResult recovery_cost(const GroundedTask& task, const State& state, std::span<const Literal> condition,
                             const SearchBudget& budget) {
    const auto pool = task.executable_actions();
    return recovery_cost(StateSpaceSearch(pool), state, condition, budget);
}

}  // namespace antic
