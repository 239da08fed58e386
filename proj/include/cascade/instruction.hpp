#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cascade/objects.hpp"
#include "cascade/rng.hpp"

namespace cascade {

// A structured goal: make the target collision happen, optionally forced
// through a bottleneck collision and/or with a required chain length from
// the pivot's first collision to the target.
struct Instruction {
    ObjectId pivot;
    std::pair<ObjectId, ObjectId> target;  // normalized a < b
    std::optional<std::pair<ObjectId, ObjectId>> bottleneck;
    std::optional<int> count;

    int constraint_count() const {
        return (bottleneck ? 1 : 0) + (count ? 1 : 0);
    }
    bool operator==(const Instruction&) const = default;
};

inline std::pair<ObjectId, ObjectId> normalized_pair(ObjectId a, ObjectId b) {
    return a < b ? std::pair(a, b) : std::pair(b, a);
}

inline bool event_matches(const SemanticEvent& e, std::pair<ObjectId, ObjectId> pair) {
    return e.a == pair.first && e.b == pair.second;
}

// DAG over a sequence of events: one node per event, and for each object of
// an event an edge from that object's most recent earlier event, labeled with
// the shared object. Edges point forward in time, so acyclicity holds by
// construction.
struct DagEdge {
    int from = -1;
    int to = -1;
    ObjectId shared;
};

struct EventDAG {
    int n = 0;
    std::vector<DagEdge> edges;

    std::vector<std::vector<int>> forward_adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const DagEdge& e : edges) {
            auto& row = adj[static_cast<std::size_t>(e.from)];
            if (std::find(row.begin(), row.end(), e.to) == row.end()) row.push_back(e.to);
        }
        return adj;
    }

    std::vector<std::vector<int>> backward_adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const DagEdge& e : edges) {
            auto& row = adj[static_cast<std::size_t>(e.to)];
            if (std::find(row.begin(), row.end(), e.from) == row.end()) row.push_back(e.from);
        }
        return adj;
    }
};

inline EventDAG build_dag(std::span<const SemanticEvent> seq) {
    EventDAG dag;
    dag.n = static_cast<int>(seq.size());
    std::array<int, kNumObjectKinds> last_event;
    last_event.fill(-1);
    for (int i = 0; i < dag.n; ++i) {
        const SemanticEvent& e = seq[static_cast<std::size_t>(i)];
        for (ObjectId obj : {e.a, e.b}) {
            const int prev = last_event[static_cast<std::size_t>(obj.index)];
            if (prev >= 0) dag.edges.push_back({prev, i, obj});
        }
        last_event[static_cast<std::size_t>(e.a.index)] = i;
        last_event[static_cast<std::size_t>(e.b.index)] = i;
    }
    return dag;
}

namespace detail {

inline std::vector<bool> reachable_from(const std::vector<std::vector<int>>& adj, int src) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<int> stack{src};
    seen[static_cast<std::size_t>(src)] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

}  // namespace detail

// Number of distinct events on the union of simple paths from the pivot's
// first event to the target occurrence, both endpoints included. nullopt if
// the pivot never collides or no path reaches the target.
inline std::optional<int> chain_count(std::span<const SemanticEvent> seq,
                                      const EventDAG& dag, ObjectId pivot,
                                      int target_index) {
    int pivot_first = -1;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i].involves(pivot)) {
            pivot_first = static_cast<int>(i);
            break;
        }
    }
    if (pivot_first < 0) return std::nullopt;
    if (pivot_first == target_index) return 1;
    if (pivot_first > target_index) return std::nullopt;

    // In a DAG, v lies on some simple path src -> dst iff src reaches v and
    // v reaches dst.
    const auto fwd = dag.forward_adjacency();
    const auto from_src = detail::reachable_from(fwd, pivot_first);
    if (!from_src[static_cast<std::size_t>(target_index)]) return std::nullopt;
    const auto bwd = dag.backward_adjacency();
    const auto to_dst = detail::reachable_from(bwd, target_index);

    int count = 0;
    for (int v = 0; v < dag.n; ++v)
        if (from_src[static_cast<std::size_t>(v)] && to_dst[static_cast<std::size_t>(v)])
            ++count;
    return count;
}

// True iff some occurrence of the target collision meets every declared
// constraint: the bottleneck collision is one of its DAG ancestors, and the
// pivot-to-target chain count equals the requested value.
inline bool satisfies(std::span<const SemanticEvent> seq, const Instruction& g) {
    std::vector<int> target_occurrences;
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (event_matches(seq[i], g.target)) target_occurrences.push_back(static_cast<int>(i));
    if (target_occurrences.empty()) return false;
    if (!g.bottleneck && !g.count) return true;

    const EventDAG dag = build_dag(seq);
    const auto bwd = dag.backward_adjacency();
    for (int t : target_occurrences) {
        if (g.bottleneck) {
            const auto ancestors = detail::reachable_from(bwd, t);
            bool found = false;
            for (std::size_t i = 0; i < seq.size(); ++i) {
                if (static_cast<int>(i) != t && ancestors[i] &&
                    event_matches(seq[i], *g.bottleneck)) {
                    found = true;
                    break;
                }
            }
            if (!found) continue;
        }
        if (g.count) {
            const auto c = chain_count(seq, dag, g.pivot, t);
            if (!c || *c != *g.count) continue;
        }
        return true;
    }
    return false;
}

// Fixed-layout structured representation of an instruction: five object
// one-hots (target pair, pivot, bottleneck pair) followed by the bottleneck
// indicator, the count value and the count indicator.
inline constexpr int kInstructionDim = 5 * kNumObjectKinds + 3;

inline Eigen::VectorXd embed(const Instruction& g) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(kInstructionDim);
    auto one_hot = [&](int block, ObjectId id) {
        v[block * kNumObjectKinds + id.index] = 1.0;
    };
    one_hot(0, g.target.first);
    one_hot(1, g.target.second);
    one_hot(2, g.pivot);
    if (g.bottleneck) {
        one_hot(3, g.bottleneck->first);
        one_hot(4, g.bottleneck->second);
        v[5 * kNumObjectKinds + 0] = 1.0;
    }
    if (g.count) {
        v[5 * kNumObjectKinds + 1] = static_cast<double>(*g.count);
        v[5 * kNumObjectKinds + 2] = 1.0;
    }
    return v;
}

// Up to max_k unique instructions satisfied by the solution sequence and not
// by the observed one. Targets are drawn from the solution's events; the
// bottleneck from the target's DAG ancestors; the count from the realized
// chain, so satisfaction on the solution holds by construction (re-checked).
inline std::vector<Instruction> sample_instructions(
    std::span<const SemanticEvent> solution, std::span<const SemanticEvent> observed,
    ObjectId pivot, int max_k, std::uint64_t seed) {
    std::vector<Instruction> out;
    if (solution.empty() || max_k <= 0) return out;

    RandomStream rng(seed);
    const EventDAG dag = build_dag(solution);
    const auto bwd = dag.backward_adjacency();

    using Key = std::tuple<int, int, int, int, int>;
    std::set<Key> seen;
    const int attempts = 12 * max_k;
    for (int attempt = 0; attempt < attempts && static_cast<int>(out.size()) < max_k;
         ++attempt) {
        const int t = static_cast<int>(rng.below(solution.size()));
        Instruction g;
        g.pivot = pivot;
        g.target = {solution[static_cast<std::size_t>(t)].a,
                    solution[static_cast<std::size_t>(t)].b};

        const int n_constraints = static_cast<int>(rng.below(3));
        bool want_bottleneck = n_constraints == 2;
        bool want_count = n_constraints == 2;
        if (n_constraints == 1) {
            if (rng.below(2) == 0) want_bottleneck = true; else want_count = true;
        }

        if (want_bottleneck) {
            const auto ancestors = detail::reachable_from(bwd, t);
            std::vector<int> pool;
            for (int i = 0; i < t; ++i)
                if (ancestors[static_cast<std::size_t>(i)]) pool.push_back(i);
            if (!pool.empty()) {
                const int b = pool[static_cast<std::size_t>(rng.below(pool.size()))];
                g.bottleneck = {solution[static_cast<std::size_t>(b)].a,
                                solution[static_cast<std::size_t>(b)].b};
            }
        }
        if (want_count) {
            if (auto c = chain_count(solution, dag, pivot, t)) g.count = *c;
        }

        const Key key{g.target.first.index, g.target.second.index,
                      g.bottleneck ? g.bottleneck->first.index * kNumObjectKinds +
                                         g.bottleneck->second.index
                                   : -1,
                      g.count ? *g.count : -1, 0};
        if (!seen.insert(key).second) continue;
        if (!satisfies(solution, g)) continue;
        if (satisfies(observed, g)) continue;
        out.push_back(g);
    }
    return out;
}

}  // namespace cascade
