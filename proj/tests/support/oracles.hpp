#pragma once
// Brute-force reference implementations used by the tests. They favour
// obviously-correct enumeration over speed and share no code with the
// library beyond the basic STRIPS types.

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "antic/at_engine.hpp"
#include "antic/pocl.hpp"
#include "antic/strips.hpp"

namespace oracle {

using namespace antic;

inline bool holds_all(const State& s, const std::vector<Literal>& lits) {
    for (const auto& l : lits)
        if (s.holds(l.atom) != l.positive) return false;
    return true;
}

inline State step(const State& s, const GroundAction& a) {
    std::set<Atom> atoms(s.atoms().begin(), s.atoms().end());
    for (const auto& e : a.effects)
        if (!e.positive) atoms.erase(e.atom);
    for (const auto& e : a.effects)
        if (e.positive) atoms.insert(e.atom);
    return State(std::vector<Atom>(atoms.begin(), atoms.end()));
}

/// Every state reachable from `start` with `pool`, then Bellman-Ford over the
/// explicit graph. nullopt when no reachable state satisfies `goal`.
inline std::optional<double> min_cost(const std::vector<GroundAction>& pool, const State& start,
                                      const std::vector<Literal>& goal, std::size_t max_states = 200000) {
    std::map<State, std::size_t> index{{start, 0}};
    std::vector<State> states{start};
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states.size() > max_states) throw std::runtime_error("oracle state space too large");
        for (const auto& a : pool) {
            if (!holds_all(states[i], a.preconditions)) continue;
            State next = step(states[i], a);
            auto [it, fresh] = index.emplace(next, states.size());
            if (fresh) states.push_back(std::move(next));
            edges.emplace_back(i, it->second, a.cost);
        }
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(states.size(), inf);
    dist[0] = 0.0;
    for (std::size_t round = 0; round + 1 < states.size() || round == 0; ++round) {
        bool changed = false;
        for (const auto& [u, v, w] : edges) {
            if (dist[u] + w < dist[v]) {
                dist[v] = dist[u] + w;
                changed = true;
            }
        }
        if (!changed) break;
    }
    double best = inf;
    for (std::size_t i = 0; i < states.size(); ++i)
        if (holds_all(states[i], goal)) best = std::min(best, dist[i]);
    if (best == inf) return std::nullopt;
    return best;
}

/// Names of all well-typed groundings whose static preconditions hold in the
/// initial state.
inline std::set<std::string> groundings(const DomainModel& domain, const Problem& problem) {
    std::set<std::string> dynamic;
    for (const auto& s : domain.schemas)
        for (const auto& e : s.effects) dynamic.insert(e.atom.predicate);
    std::set<std::string> out;
    for (const auto& s : domain.schemas) {
        std::vector<std::vector<std::string>> choices;
        for (const auto& p : s.parameters) {
            std::vector<std::string> objs;
            for (const auto& o : problem.objects)
                if (p.type == "object" || o.type == p.type) objs.push_back(o.name);
            choices.push_back(objs);
        }
        std::vector<std::size_t> idx(choices.size(), 0);
        bool empty = std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); });
        while (!empty) {
            std::map<std::string, std::string> bind;
            for (std::size_t k = 0; k < idx.size(); ++k) bind[s.parameters[k].name] = choices[k][idx[k]];
            bool ok = true;
            for (const auto& pre : s.preconditions) {
                if (dynamic.count(pre.atom.predicate)) continue;
                Atom a{pre.atom.predicate, {}};
                for (const auto& arg : pre.atom.args) a.args.push_back(bind.count(arg) ? bind[arg] : arg);
                if (problem.init.holds(a) != pre.positive) ok = false;
            }
            if (ok) {
                std::string name = "(" + s.name;
                for (std::size_t k = 0; k < idx.size(); ++k) name += " " + choices[k][idx[k]];
                out.insert(name + ")");
            }
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    return out;
}

struct Triple {
    CausalLink link;
    std::string step;
    std::size_t position;
    bool from_plan;
    auto operator<=>(const Triple&) const = default;
};

/// All (link, w, t): w deletes the link condition, producer <= t < consumer,
/// w applicable at trajectory[t]. A plan step j only runs at t = j - 1 and
/// must sit strictly between producer and consumer.
inline std::set<Triple> threats(const PoclPlan& pocl, const std::vector<GroundAction>& candidates,
                                const std::vector<State>& trajectory) {
    std::set<Triple> out;
    for (const auto& link : pocl.links) {
        for (const auto& w : candidates)
            for (std::size_t t = 0; t < trajectory.size(); ++t)
                if (w.deletes(link.condition) && link.producer <= t && t < link.consumer &&
                    holds_all(trajectory[t], w.preconditions))
                    out.insert({link, w.name(), t, false});
        for (std::size_t j = 1; j + 1 < pocl.steps.size(); ++j) {
            const auto& w = *pocl.steps[j].action;
            if (w.deletes(link.condition) && link.producer < j && j < link.consumer)
                out.insert({link, w.name(), j - 1, true});
        }
    }
    return out;
}

struct Strength {
    std::string literal;
    std::size_t p = 0;
    std::size_t e = 0;
};

/// Precondition strength straight from the plan: p counts the steps using
/// the literal, e counts the initial state and the steps adding it before
/// its first use. Sorted by p/e descending, p descending, literal.
inline std::vector<Strength> strengths(const GroundPlan& plan, const State& init) {
    std::map<Atom, Strength> table;
    std::map<Atom, std::size_t> first;
    for (std::size_t j = 0; j < plan.size(); ++j)
        for (const auto& pre : plan.steps[j].preconditions) {
            if (!pre.positive) continue;
            auto& s = table[pre.atom];
            s.literal = to_string(pre.atom);
            ++s.p;
            first.emplace(pre.atom, j);
        }
    for (auto& [atom, s] : table) {
        s.e = init.holds(atom) ? 1 : 0;
        for (std::size_t j = 0; j < first[atom]; ++j)
            if (plan.steps[j].adds(atom)) ++s.e;
    }
    std::vector<Strength> out;
    for (auto& [atom, s] : table) out.push_back(s);
    std::sort(out.begin(), out.end(), [](const Strength& a, const Strength& b) {
        const auto l = a.p * b.e, r = b.p * a.e;
        if (l != r) return l > r;
        if (a.p != b.p) return a.p > b.p;
        return a.literal < b.literal;
    });
    return out;
}

struct Event {
    std::string event;
    std::size_t trigger;
    CausalLink link;
    std::optional<double> impact;
    auto operator<=>(const Event&) const = default;
};

/// One event per (candidate, t) threatening any link; the reported link has
/// the most vulnerable condition, then the earliest consumer, then producer.
/// Impact by exhaustive search over `recovery_pool`.
inline std::vector<Event> conditioning_events(const GroundPlan& plan, const PoclPlan& pocl, const State& init,
                                              const std::vector<GroundAction>& candidates,
                                              const std::vector<GroundAction>& recovery_pool,
                                              const std::vector<State>& trajectory) {
    const auto ranking = strengths(plan, init);
    auto rank = [&](const Atom& a) {
        const auto text = to_string(a);
        for (std::size_t i = 0; i < ranking.size(); ++i)
            if (ranking[i].literal == text) return i;
        return ranking.size();
    };
    std::vector<Event> out;
    for (const auto& w : candidates) {
        for (std::size_t t = 0; t < trajectory.size(); ++t) {
            if (!holds_all(trajectory[t], w.preconditions)) continue;
            std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> best;
            CausalLink chosen;
            for (const auto& link : pocl.links) {
                if (!(w.deletes(link.condition) && link.producer <= t && t < link.consumer)) continue;
                auto key = std::make_tuple(rank(link.condition), link.consumer, link.producer);
                if (!best || key < *best) {
                    best = key;
                    chosen = link;
                }
            }
            if (!best) continue;
            const auto after = step(trajectory[t], w);
            out.push_back({w.name(), t, chosen, min_cost(recovery_pool, after, {pos(chosen.condition)})});
        }
    }
    std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
        return std::tie(a.trigger, a.event) < std::tie(b.trigger, b.event);
    });
    return out;
}

}  // namespace oracle
