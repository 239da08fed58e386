#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cascade/dynamics.hpp"
#include "cascade/objects.hpp"
#include "cascade/rng.hpp"

namespace cascade {

// The pivot's initial velocity, chosen at t = 0.
struct Intervention {
    Vec2 velocity;
};

// Intervention sampling distribution: uniform angle, uniform speed. The
// same range drives dataset perturbations.
inline constexpr double kSpeedMin = 0.5;
inline constexpr double kSpeedMax = 3.0;

inline Vec2 sample_intervention_velocity(RandomStream& rng) {
    const double angle = rng.angle();
    const double speed = rng.uniform(kSpeedMin, kSpeedMax);
    return from_polar(angle, speed);
}

inline constexpr int kDefaultMaxTreeDepth = 30;

// One cell of the intervention-space tessellation: all sampled interventions
// whose rollouts share the node's event prefix. A null child collects the
// samples with no further event before the horizon.
struct TreeNode {
    int id = -1;
    int parent = -1;
    int depth = 0;
    bool is_null_child = false;
    bool expanded = false;
    std::optional<SemanticEvent> event;  // empty for the root and null children
    std::vector<std::uint32_t> samples;  // indices into EventTree::interventions()
    std::vector<WorldState> states;      // parallel to samples; freed on expansion
    std::vector<int> children;
    std::optional<double> predicted_score;
    std::optional<double> label_score;
    std::optional<double> corrected_score;
};

class EventTree {
public:
    EventTree(Scene scene, int max_depth, double horizon)
        : scene_(std::move(scene)), max_depth_(max_depth), horizon_(horizon) {}

    const Scene& scene() const { return scene_; }
    int max_depth() const { return max_depth_; }
    double horizon() const { return horizon_; }
    int root() const { return 0; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int sample_count() const { return static_cast<int>(interventions_.size()); }
    TreeNode& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
    const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<Vec2>& interventions() const { return interventions_; }

    std::vector<SemanticEvent> prefix(int id) const {
        std::vector<SemanticEvent> out;
        for (int cur = id; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent) {
            const TreeNode& n = nodes_[static_cast<std::size_t>(cur)];
            if (n.event) out.push_back(*n.event);
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    bool is_ancestor_or_equal(int anc, int node_id) const {
        for (int cur = node_id; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent)
            if (cur == anc) return true;
        return false;
    }

    friend EventTree init_root(const Scene&, int, std::uint64_t, int, double);
    friend std::vector<int> expand_node(EventTree&, int);

private:
    int add_node(TreeNode n) {
        n.id = static_cast<int>(nodes_.size());
        nodes_.push_back(std::move(n));
        return nodes_.back().id;
    }

    Scene scene_;
    int max_depth_;
    double horizon_;
    std::vector<Vec2> interventions_;
    std::vector<TreeNode> nodes_;
};

// Root holds sample_count interventions paired with the scene's initial
// state, pivot velocity replaced by the intervention.
inline EventTree init_root(const Scene& scene, int sample_count, std::uint64_t seed,
                           int max_depth = kDefaultMaxTreeDepth,
                           double horizon = kDefaultHorizon) {
    if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    const int pivot_slot = scene.slot_of(scene.pivot);
    if (pivot_slot < 0) throw std::invalid_argument("scene has no pivot object");

    EventTree tree(scene, max_depth, horizon);
    RandomStream rng(seed);
    const WorldState base = initial_world_state(scene);

    TreeNode root;
    root.parent = -1;
    root.depth = 0;
    tree.interventions_.reserve(static_cast<std::size_t>(sample_count));
    root.samples.reserve(static_cast<std::size_t>(sample_count));
    root.states.reserve(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i) {
        const Vec2 v = sample_intervention_velocity(rng);
        tree.interventions_.push_back(v);
        WorldState w = base;
        w.bodies[static_cast<std::size_t>(pivot_slot)].velocity = v;
        root.samples.push_back(static_cast<std::uint32_t>(i));
        root.states.push_back(w);
    }
    tree.add_node(std::move(root));
    return tree;
}

// Splits a node's samples by their next semantic event: one child per
// distinct event pair (ordered lexicographically), plus a trailing null
// child for samples with no further event before the horizon. Children
// partition the parent's samples exactly; the parent's states are released.
inline std::vector<int> expand_node(EventTree& tree, int node_id) {
    TreeNode& parent = tree.node(node_id);
    if (parent.expanded) throw std::logic_error("node already expanded");
    if (parent.is_null_child) throw std::logic_error("null children are terminal");
    if (parent.depth >= tree.max_depth()) throw std::logic_error("node at depth limit");

    std::vector<double> horizons(parent.states.size());
    for (std::size_t i = 0; i < parent.states.size(); ++i)
        horizons[i] = tree.horizon() - parent.states[i].time;
    const auto stepped = batched_next_event_window(tree.scene(), parent.states, horizons);

    std::map<std::pair<int, int>, TreeNode> by_event;
    TreeNode null_child;
    for (std::size_t i = 0; i < stepped.size(); ++i) {
        if (stepped[i]) {
            const auto& [event, state] = *stepped[i];
            TreeNode& child = by_event[{event.a.index, event.b.index}];
            if (child.samples.empty()) child.event = event;
            child.samples.push_back(parent.samples[i]);
            child.states.push_back(state);
        } else {
            null_child.samples.push_back(parent.samples[i]);
        }
    }

    std::vector<int> created;
    const int parent_depth = parent.depth;
    for (auto& [key, child] : by_event) {
        child.parent = node_id;
        child.depth = parent_depth + 1;
        created.push_back(tree.add_node(std::move(child)));
    }
    if (!null_child.samples.empty()) {
        null_child.parent = node_id;
        null_child.depth = parent_depth + 1;
        null_child.is_null_child = true;
        created.push_back(tree.add_node(std::move(null_child)));
    }

    TreeNode& p = tree.node(node_id);  // re-fetch: add_node may reallocate
    p.children = created;
    p.expanded = true;
    p.states.clear();
    p.states.shrink_to_fit();
    return created;
}

// Expands along seq as far as sample support and the depth limit allow.
// Returns the deepest node whose prefix is a prefix of seq; nullopt if the
// first event is already unsupported. Counts expansions performed.
inline std::optional<int> locate_sequence(EventTree& tree, std::span<const SemanticEvent> seq,
                                          int* expansions = nullptr) {
    int cur = tree.root();
    for (const SemanticEvent& want : seq) {
        TreeNode& n = tree.node(cur);
        if (n.samples.empty()) break;
        if (!n.expanded) {
            if (n.depth >= tree.max_depth()) break;
            expand_node(tree, cur);
            if (expansions) ++*expansions;
        }
        int next = -1;
        for (int child : tree.node(cur).children) {
            const TreeNode& c = tree.node(child);
            if (!c.is_null_child && c.event->same_pair(want)) {
                next = child;
                break;
            }
        }
        if (next < 0) break;
        cur = next;
    }
    if (cur == tree.root() && !seq.empty()) return std::nullopt;
    return cur;
}

// Uniform random member of the node's intervention subset.
inline Intervention select_intervention(const EventTree& tree, int node_id,
                                        std::uint64_t seed) {
    const TreeNode& n = tree.node(node_id);
    if (n.samples.empty()) throw std::logic_error("cannot select from an empty node");
    RandomStream rng(seed);
    const std::uint32_t pick =
        n.samples[static_cast<std::size_t>(rng.below(n.samples.size()))];
    return {tree.interventions()[pick]};
}

}  // namespace cascade
