#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/objects.hpp"

namespace cascade {

// Fixed-timestep reference integrator. It advances ballistically and finds
// contact times by bisection on a plain overlap predicate, so its event
// timing shares no code path with the analytic collision solver it is used
// to cross-check. Collision response reuses resolve_disc_collision.

namespace detail {

inline constexpr double kPenetrationSlack = 1e-9;

struct Violation {
    bool any = false;
    double worst_depth = 0.0;
};

inline Violation find_violation(const Scene& scene, const WorldState& w) {
    Violation v;
    const int n = static_cast<int>(scene.objects.size());
    for (int i = 0; i < n; ++i) {
        const auto& oi = scene.objects[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            const auto& oj = scene.objects[static_cast<std::size_t>(j)];
            if (!oi.mobile && !oj.mobile) continue;
            const double d = contact_distance(oi.radius, oj.radius);
            const double dist =
                (w.bodies[static_cast<std::size_t>(i)].position -
                 w.bodies[static_cast<std::size_t>(j)].position).norm();
            const double depth = d - dist;
            if (depth > kPenetrationSlack) {
                v.any = true;
                v.worst_depth = std::max(v.worst_depth, depth);
            }
        }
        if (oi.mobile) {
            const Vec2 p = w.bodies[static_cast<std::size_t>(i)].position;
            const double r = oi.radius;
            const double depth = std::max(
                std::max(scene.walls.x_min + r - p.x, p.x - (scene.walls.x_max - r)),
                std::max(scene.walls.y_min + r - p.y, p.y - (scene.walls.y_max - r)));
            if (depth > kPenetrationSlack) {
                v.any = true;
                v.worst_depth = std::max(v.worst_depth, depth);
            }
        }
    }
    return v;
}

// Smallest gap over all candidate contacts at state w; used to pick which
// contact to resolve once bisection has located the onset time.
struct ContactPick {
    bool is_wall = false;
    int slot_a = -1, slot_b = -1;
    ObjectId id_a, id_b;
    double gap = std::numeric_limits<double>::infinity();
    double closing_speed = 0.0;
};

inline ContactPick pick_contact(const Scene& scene, const WorldState& w) {
    ContactPick best;
    const int n = static_cast<int>(scene.objects.size());
    for (int i = 0; i < n; ++i) {
        const auto& oi = scene.objects[static_cast<std::size_t>(i)];
        const BodyState& bi = w.bodies[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            const auto& oj = scene.objects[static_cast<std::size_t>(j)];
            if (!oi.mobile && !oj.mobile) continue;
            const BodyState& bj = w.bodies[static_cast<std::size_t>(j)];
            const double d = contact_distance(oi.radius, oj.radius);
            const Vec2 dr = bj.position - bi.position;
            const double dist = dr.norm();
            const double gap = dist - d;
            const Vec2 dv = bj.velocity - bi.velocity;
            const bool approaching = dr.dot(dv) < 0.0;
            if (approaching && gap < best.gap) {
                best = {false, i, j, oi.id, oj.id, gap,
                        dist > 0.0 ? std::abs(dv.dot(dr)) / dist : 0.0};
            }
        }
        if (oi.mobile) {
            const double r = oi.radius;
            const struct { double gap; double vel; ObjectId wall; } sides[4] = {
                {bi.position.x - (scene.walls.x_min + r), -bi.velocity.x, kWallLeft},
                {(scene.walls.x_max - r) - bi.position.x, bi.velocity.x, kWallRight},
                {bi.position.y - (scene.walls.y_min + r), -bi.velocity.y, kWallBottom},
                {(scene.walls.y_max - r) - bi.position.y, bi.velocity.y, kWallTop}};
            for (const auto& side : sides) {
                if (side.vel > 0.0 && side.gap < best.gap)
                    best = {true, i, -1, oi.id, side.wall, side.gap, side.vel};
            }
        }
    }
    return best;
}

inline void resolve_pick(const Scene& scene, WorldState& w, const ContactPick& c) {
    if (c.is_wall) {
        Vec2& v = w.bodies[static_cast<std::size_t>(c.slot_a)].velocity;
        if (c.id_b.index < 10) v.x = -v.x; else v.y = -v.y;
    } else {
        auto [va, vb] = resolve_disc_collision(object_state(scene, w, c.slot_a),
                                               object_state(scene, w, c.slot_b));
        w.bodies[static_cast<std::size_t>(c.slot_a)].velocity = va;
        w.bodies[static_cast<std::size_t>(c.slot_b)].velocity = vb;
    }
}

inline WorldState step_with_events(const Scene& scene, const WorldState& w, double dt,
                                   std::vector<EventDiag>* events) {
    WorldState state = w;
    double remaining = dt;
    const double min_radius = [&] {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& o : scene.objects) r = std::min(r, o.radius);
        return r;
    }();

    for (int guard = 0; remaining > 0.0; ++guard) {
        if (guard > 64)
            throw instability_error("more than 64 contacts within a single step");
        WorldState trial = advanced(state, remaining);
        const Violation v = find_violation(scene, trial);
        if (!v.any) return trial;
        if (v.worst_depth > min_radius)
            throw instability_error("penetration depth exceeds body radius; dt too large");

        // Bisect the contact onset inside (0, remaining].
        double lo = 0.0, hi = remaining;
        for (int it = 0; it < 80 && hi - lo > 1e-15 * dt; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (find_violation(scene, advanced(state, mid)).any) hi = mid; else lo = mid;
        }
        WorldState at_contact = advanced(state, lo);
        const ContactPick pick = pick_contact(scene, at_contact);
        if (pick.slot_a < 0)
            throw instability_error("violation without an identifiable contact");
        resolve_pick(scene, at_contact, pick);
        if (events)
            events->push_back(
                {SemanticEvent(pick.id_a, pick.id_b, at_contact.time), pick.closing_speed});
        remaining -= lo;
        state = at_contact;
    }
    return state;
}

}  // namespace detail

inline WorldState step_simulator(const Scene& scene, const WorldState& w, double dt) {
    if (!(dt > 0.0)) throw instability_error("dt must be positive");
    return detail::step_with_events(scene, w, dt, nullptr);
}

struct IntegratorTrace {
    std::vector<EventDiag> events;
    WorldState final_state;
};

// Contact sequence of the fixed-timestep rollout, up to max_events or the
// time horizon, whichever comes first.
inline IntegratorTrace simulate_contacts(const Scene& scene, WorldState w, double dt,
                                         int max_events, double horizon) {
    IntegratorTrace trace;
    const double end_time = w.time + horizon;
    while (w.time < end_time && static_cast<int>(trace.events.size()) < max_events) {
        const double step = std::min(dt, end_time - w.time);
        std::vector<EventDiag> step_events;
        w = detail::step_with_events(scene, w, step, &step_events);
        for (const auto& e : step_events) {
            if (static_cast<int>(trace.events.size()) < max_events)
                trace.events.push_back(e);
        }
    }
    trace.final_state = w;
    return trace;
}

}  // namespace cascade
