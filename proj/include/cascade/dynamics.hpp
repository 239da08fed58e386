#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/objects.hpp"

namespace cascade {

inline constexpr double kContactTolerance = 1e-7;
inline constexpr double kGrazingSpeed = 1e-3;
inline constexpr double kSimultaneityWindow = 1e-9;
inline constexpr double kDefaultHorizon = 60.0;

// Two spheres resting on the plane touch when their planar center distance
// equals 2*sqrt(ra*rb) (the vertical offset of the centers eats the rest of
// the radii sum).
inline double contact_distance(double ra, double rb) {
    return 2.0 * std::sqrt(ra * rb);
}

// Earliest t in (0, horizon] at which two ballistic bodies reach contact
// distance, from the smaller root of |dr + dv t|^2 = d^2. Touches with
// vanishing closing speed are not events (nothing changes at them).
inline std::optional<double> pair_collision_time(const ObjectState& a,
                                                 const ObjectState& b,
                                                 double horizon) {
    const Vec2 dr = b.position - a.position;
    const Vec2 dv = b.velocity - a.velocity;
    const double d = contact_distance(a.radius, b.radius);

    const double qa = dv.norm2();
    if (qa == 0.0) return std::nullopt;
    const double qb = 2.0 * dr.dot(dv);
    const double qc = dr.norm2() - d * d;

    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);

    // Stable smaller root; cancellation-free for the approaching case qb < 0.
    double t;
    if (qb <= 0.0) {
        const double q = 0.5 * (sq - qb);
        t = qc / q;
    } else {
        t = (-qb - sq) / (2.0 * qa);
    }
    if (!(t > 0.0) || t > horizon) return std::nullopt;

    // Normal closing speed at the root is sq / (2 d).
    if (sq <= 2.0 * d * 1e-12) return std::nullopt;
    return t;
}

// Elastic collision of two spheres in contact. Immobile participants are
// treated as infinite mass (pure reflection for the mobile side).
inline std::pair<Vec2, Vec2> resolve_disc_collision(const ObjectState& a,
                                                    const ObjectState& b) {
    const Vec2 dr = a.position - b.position;
    const double dist2 = dr.norm2();
    const double d = contact_distance(a.radius, b.radius);
    if (dist2 <= (d - 1e-6) * (d - 1e-6))
        throw degenerate_contact_error("colliding centers overlap beyond contact floor");

    const double s = (a.velocity - b.velocity).dot(dr) / dist2;
    if (a.mobile && b.mobile) {
        const double total = a.mass + b.mass;
        return {a.velocity - dr * (2.0 * b.mass / total * s),
                b.velocity + dr * (2.0 * a.mass / total * s)};
    }
    if (a.mobile) return {a.velocity - dr * (2.0 * s), b.velocity};
    if (b.mobile) return {a.velocity, b.velocity + dr * (2.0 * s)};
    return {a.velocity, b.velocity};
}

// Earliest time the disc surface reaches a wall plane, with the reflected
// velocity (orthogonal component flipped, parallel kept).
inline std::optional<std::pair<double, Vec2>> wall_collision(const ObjectState& o,
                                                             ObjectId wall,
                                                             const Rect& walls,
                                                             double horizon) {
    if (!o.mobile || !wall.is_wall()) return std::nullopt;
    double t = -1.0;
    Vec2 v = o.velocity;
    switch (wall.index) {
        case 8:
            if (o.velocity.x >= 0.0) return std::nullopt;
            t = (walls.x_min + o.radius - o.position.x) / o.velocity.x;
            v.x = -v.x;
            break;
        case 9:
            if (o.velocity.x <= 0.0) return std::nullopt;
            t = (walls.x_max - o.radius - o.position.x) / o.velocity.x;
            v.x = -v.x;
            break;
        case 10:
            if (o.velocity.y >= 0.0) return std::nullopt;
            t = (walls.y_min + o.radius - o.position.y) / o.velocity.y;
            v.y = -v.y;
            break;
        case 11:
            if (o.velocity.y <= 0.0) return std::nullopt;
            t = (walls.y_max - o.radius - o.position.y) / o.velocity.y;
            v.y = -v.y;
            break;
        default:
            return std::nullopt;
    }
    if (!(t > 0.0) || t > horizon) return std::nullopt;
    return std::make_pair(t, v);
}

namespace detail {

struct Candidate {
    double t = -1.0;
    ObjectId a;  // a < b
    ObjectId b;
    bool found = false;
};

// Earlier wins; near-simultaneous candidates (within the tie window) go to
// the lexicographically smaller pair.
inline bool candidate_beats(double t, ObjectId a, ObjectId b, const Candidate& best) {
    if (!best.found) return true;
    if (t < best.t - kSimultaneityWindow) return true;
    if (t > best.t + kSimultaneityWindow) return false;
    return std::pair(a, b) < std::pair(best.a, best.b);
}

// Candidate-pair metadata shared across every state of a batch.
struct PairTable {
    struct DiscPair {
        int slot_a, slot_b;
        ObjectId id_a, id_b;
    };
    struct WallEntry {
        int slot;
        ObjectId body;
        ObjectId wall;
    };
    std::vector<DiscPair> disc_pairs;
    std::vector<WallEntry> wall_entries;
};

inline PairTable build_pair_table(const Scene& scene) {
    PairTable table;
    const int n = static_cast<int>(scene.objects.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!scene.objects[static_cast<std::size_t>(i)].mobile &&
                !scene.objects[static_cast<std::size_t>(j)].mobile)
                continue;
            ObjectId ia = scene.objects[static_cast<std::size_t>(i)].id;
            ObjectId ib = scene.objects[static_cast<std::size_t>(j)].id;
            if (ib < ia) {
                table.disc_pairs.push_back({j, i, ib, ia});
            } else {
                table.disc_pairs.push_back({i, j, ia, ib});
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!scene.objects[static_cast<std::size_t>(i)].mobile) continue;
        for (int w = kFirstWallId; w < kNumObjectKinds; ++w)
            table.wall_entries.push_back(
                {i, scene.objects[static_cast<std::size_t>(i)].id, ObjectId{w}});
    }
    return table;
}

inline Candidate best_candidate(const Scene& scene, const WorldState& w,
                                const PairTable& table, double horizon) {
    Candidate best;
    for (const auto& p : table.disc_pairs) {
        const ObjectState a = object_state(scene, w, p.slot_a);
        const ObjectState b = object_state(scene, w, p.slot_b);
        if (auto t = pair_collision_time(a, b, horizon)) {
            if (candidate_beats(*t, p.id_a, p.id_b, best))
                best = {*t, p.id_a, p.id_b, true};
        }
    }
    for (const auto& e : table.wall_entries) {
        const ObjectState o = object_state(scene, w, e.slot);
        if (auto hit = wall_collision(o, e.wall, scene.walls, horizon)) {
            ObjectId a = e.body, b = e.wall;
            if (candidate_beats(hit->first, a, b, best)) best = {hit->first, a, b, true};
        }
    }
    return best;
}

// Advances to the candidate time and applies the collision response.
inline WorldState apply_event(const Scene& scene, const WorldState& w,
                              const Candidate& c) {
    WorldState out = advanced(w, c.t);
    if (c.b.is_wall()) {
        const int slot = scene.slot_of(c.a);
        Vec2& v = out.bodies[static_cast<std::size_t>(slot)].velocity;
        if (c.b.index < 10) v.x = -v.x; else v.y = -v.y;
    } else {
        const int slot_a = scene.slot_of(c.a);
        const int slot_b = scene.slot_of(c.b);
        auto [va, vb] = resolve_disc_collision(object_state(scene, out, slot_a),
                                               object_state(scene, out, slot_b));
        out.bodies[static_cast<std::size_t>(slot_a)].velocity = va;
        out.bodies[static_cast<std::size_t>(slot_b)].velocity = vb;
    }
    return out;
}

}  // namespace detail

// Event-driven forward model f(w): the next semantic event and the state
// immediately after it, or nothing if no event occurs within the horizon.
inline std::optional<std::pair<SemanticEvent, WorldState>> next_event(
    const Scene& scene, const WorldState& w, double horizon) {
    if (horizon <= 0.0) return std::nullopt;
    const detail::PairTable table = detail::build_pair_table(scene);
    const detail::Candidate c = detail::best_candidate(scene, w, table, horizon);
    if (!c.found) return std::nullopt;
    WorldState out = detail::apply_event(scene, w, c);
    return std::make_pair(SemanticEvent(c.a, c.b, out.time), out);
}

struct EventDiag {
    SemanticEvent event;
    double closing_speed = 0.0;  // normal closing speed just before contact
};

namespace detail {

inline double closing_speed_at_event(const Scene& scene, const WorldState& pre,
                                     const Candidate& c) {
    if (c.b.is_wall()) {
        const ObjectState o = object_state(scene, pre, scene.slot_of(c.a));
        switch (c.b.index) {
            case 8: case 9: return std::abs(o.velocity.x);
            default: return std::abs(o.velocity.y);
        }
    }
    const ObjectState a = object_state(scene, pre, scene.slot_of(c.a));
    const ObjectState b = object_state(scene, pre, scene.slot_of(c.b));
    const Vec2 dr = (b.position + b.velocity * c.t) - (a.position + a.velocity * c.t);
    const double dist = dr.norm();
    if (dist == 0.0) return 0.0;
    return std::abs((b.velocity - a.velocity).dot(dr)) / dist;
}

}  // namespace detail

// Q(y): repeated application of the forward model from w0, stopping at the
// depth limit, the horizon, or quiescence.
inline std::vector<EventDiag> rollout_diagnostics(const Scene& scene, WorldState w,
                                                  int max_depth, double horizon) {
    std::vector<EventDiag> out;
    const detail::PairTable table = detail::build_pair_table(scene);
    const double end_time = w.time + horizon;
    for (int depth = 0; depth < max_depth; ++depth) {
        const double remaining = end_time - w.time;
        if (remaining <= 0.0) break;
        const detail::Candidate c = detail::best_candidate(scene, w, table, remaining);
        if (!c.found) break;
        const double speed = detail::closing_speed_at_event(scene, w, c);
        w = detail::apply_event(scene, w, c);
        out.push_back({SemanticEvent(c.a, c.b, w.time), speed});
    }
    return out;
}

inline std::vector<SemanticEvent> rollout_events(const Scene& scene, const WorldState& w0,
                                                 int max_depth, double horizon) {
    std::vector<SemanticEvent> out;
    for (const EventDiag& d : rollout_diagnostics(scene, w0, max_depth, horizon))
        out.push_back(d.event);
    return out;
}

// Batched forward model with a per-state time window: semantically identical
// to mapping next_event over the batch, organized pair-major so per-pair
// setup is shared.
inline std::vector<std::optional<std::pair<SemanticEvent, WorldState>>>
batched_next_event_window(const Scene& scene, std::span<const WorldState> states,
                          std::span<const double> horizons) {
    const detail::PairTable table = detail::build_pair_table(scene);
    std::vector<detail::Candidate> best(states.size());

    for (const auto& p : table.disc_pairs) {
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (horizons[s] <= 0.0) continue;
            const ObjectState a = object_state(scene, states[s], p.slot_a);
            const ObjectState b = object_state(scene, states[s], p.slot_b);
            if (auto t = pair_collision_time(a, b, horizons[s])) {
                if (detail::candidate_beats(*t, p.id_a, p.id_b, best[s]))
                    best[s] = {*t, p.id_a, p.id_b, true};
            }
        }
    }
    for (const auto& e : table.wall_entries) {
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (horizons[s] <= 0.0) continue;
            const ObjectState o = object_state(scene, states[s], e.slot);
            if (auto hit = wall_collision(o, e.wall, scene.walls, horizons[s])) {
                if (detail::candidate_beats(hit->first, e.body, e.wall, best[s]))
                    best[s] = {hit->first, e.body, e.wall, true};
            }
        }
    }

    std::vector<std::optional<std::pair<SemanticEvent, WorldState>>> out(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        if (!best[s].found) continue;
        WorldState next = detail::apply_event(scene, states[s], best[s]);
        out[s] = std::make_pair(SemanticEvent(best[s].a, best[s].b, next.time), next);
    }
    return out;
}

inline std::vector<std::optional<std::pair<SemanticEvent, WorldState>>> batched_next_event(
    const Scene& scene, std::span<const WorldState> states, double horizon) {
    std::vector<double> horizons(states.size(), horizon);
    return batched_next_event_window(scene, states, horizons);
}

inline double kinetic_energy(const Scene& scene, const WorldState& w) {
    double e = 0.0;
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        e += 0.5 * scene.objects[i].mass * w.bodies[i].velocity.norm2();
    return e;
}

inline Vec2 total_momentum(const Scene& scene, const WorldState& w) {
    Vec2 p;
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        p += w.bodies[i].velocity * scene.objects[i].mass;
    return p;
}

}  // namespace cascade
