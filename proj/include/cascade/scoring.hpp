#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cascade/event_tree.hpp"
#include "cascade/rng.hpp"

namespace cascade {

enum class LabelKind { probabilistic, linear, step, all_or_none, negative };

inline std::string_view label_kind_name(LabelKind k) {
    switch (k) {
        case LabelKind::probabilistic: return "probabilistic";
        case LabelKind::linear: return "linear";
        case LabelKind::step: return "step";
        case LabelKind::all_or_none: return "all_or_none";
        case LabelKind::negative: return "negative";
    }
    return "unknown";
}

struct ScoreLabel {
    int node = -1;
    double value = 0.0;
    LabelKind kind = LabelKind::negative;
};

struct LabelingOutcome {
    bool dropped = false;  // tree lost sample support before the full solution
    int target_node = -1;  // u*, valid when not dropped
    std::vector<ScoreLabel> labels;
};

// Sample-fraction score: the share of u's interventions that reach u_obs's
// cell. Children partition their parent exactly, so two nodes either nest or
// are disjoint; the ratio follows from ancestry and sample counts.
inline double fr_estimate(const EventTree& tree, int u_obs, int u) {
    const std::size_t denom = tree.node(u).samples.size();
    if (denom == 0) throw std::logic_error("fr_estimate on an empty node");
    if (tree.is_ancestor_or_equal(u, u_obs))
        return static_cast<double>(tree.node(u_obs).samples.size()) /
               static_cast<double>(denom);
    if (tree.is_ancestor_or_equal(u_obs, u)) return 1.0;
    return 0.0;
}

// Bayesian correction of a node score by the observed failed cascade:
// V(u | S_obs unsatisfied) = V(u) - V(u_obs) * fr(u_obs, u). The raw value
// can dip below zero with model-predicted inputs; clamp only for priorities.
inline double counterfactual_update(double v_u, double v_obs, double fr) {
    return v_u - v_obs * fr;
}

inline double clamped_priority(double corrected) {
    return corrected < 0.0 ? 0.0 : (corrected > 1.0 ? 1.0 : corrected);
}

namespace detail {

// Negatives: every sibling diverging from the solution path, plus all nodes
// on one random path of the same length. Null children are excluded (their
// prefix equals the parent's, which carries a positive label). Scores of
// random-path nodes already labeled positive are left untouched.
inline void emit_negatives(EventTree& tree, std::span<const int> path_nodes,
                           std::uint64_t seed, std::vector<ScoreLabel>& labels) {
    std::set<int> positives(path_nodes.begin(), path_nodes.end());
    std::set<int> emitted;

    auto emit = [&](int node_id) {
        if (positives.count(node_id) || !emitted.insert(node_id).second) return;
        labels.push_back({node_id, 0.0, LabelKind::negative});
        tree.node(node_id).label_score = 0.0;
    };

    for (int path_node : path_nodes) {
        const int parent = tree.node(path_node).parent;
        if (parent < 0) continue;
        for (int sibling : tree.node(parent).children) {
            if (sibling == path_node || tree.node(sibling).is_null_child) continue;
            emit(sibling);
        }
    }

    RandomStream rng(seed);
    int cur = tree.root();
    for (std::size_t depth = 0; depth < path_nodes.size(); ++depth) {
        TreeNode& n = tree.node(cur);
        if (n.samples.empty() || n.is_null_child) break;
        if (!n.expanded) {
            if (n.depth >= tree.max_depth()) break;
            expand_node(tree, cur);
        }
        std::vector<int> options;
        for (int child : tree.node(cur).children)
            if (!tree.node(child).is_null_child) options.push_back(child);
        if (options.empty()) break;
        cur = options[static_cast<std::size_t>(rng.below(options.size()))];
        emit(cur);
    }
}

inline LabelingOutcome label_path(EventTree& tree, std::span<const SemanticEvent> solution,
                                  LabelKind kind, std::uint64_t seed) {
    LabelingOutcome out;
    const auto located = locate_sequence(tree, solution);
    if (!located ||
        tree.node(*located).depth != static_cast<int>(solution.size())) {
        out.dropped = true;
        return out;
    }
    out.target_node = *located;

    std::vector<int> path;  // u* up to (excluding) the root
    for (int cur = *located; cur != tree.root(); cur = tree.node(cur).parent)
        path.push_back(cur);
    std::reverse(path.begin(), path.end());

    const double target_samples =
        static_cast<double>(tree.node(*located).samples.size());
    const double target_depth = static_cast<double>(tree.node(*located).depth);
    for (int node_id : path) {
        TreeNode& n = tree.node(node_id);
        double value = 0.0;
        switch (kind) {
            case LabelKind::probabilistic:
                value = target_samples / static_cast<double>(n.samples.size());
                break;
            case LabelKind::linear:
                value = static_cast<double>(n.depth) / target_depth;
                break;
            case LabelKind::step:
                value = 0.5 + (node_id == *located ? 0.5 : 0.0);
                break;
            case LabelKind::all_or_none:
                value = node_id == *located ? 1.0 : 0.0;
                break;
            case LabelKind::negative:
                throw std::invalid_argument("negative is not a path labeler");
        }
        out.labels.push_back({node_id, value, kind});
        n.label_score = value;
    }

    emit_negatives(tree, path, seed, out.labels);
    return out;
}

}  // namespace detail

// Expands the tree along the solution sequence and emits Eq.-style sample
// fraction labels for every node on the path, 1 at u* itself; diverging
// siblings and one random equal-length path get zeros. Signals drop when the
// sampled tree cannot reproduce the full sequence.
inline LabelingOutcome label_solution_path(EventTree& tree,
                                           std::span<const SemanticEvent> solution,
                                           std::uint64_t seed) {
    return detail::label_path(tree, solution, LabelKind::probabilistic, seed);
}

inline LabelingOutcome label_ablation(LabelKind kind, EventTree& tree,
                                      std::span<const SemanticEvent> solution,
                                      std::uint64_t seed) {
    if (kind == LabelKind::negative || kind == LabelKind::probabilistic)
        throw std::invalid_argument("ablation labeler must be linear, step or all_or_none");
    return detail::label_path(tree, solution, kind, seed);
}

}  // namespace cascade
