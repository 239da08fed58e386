#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include "cascade/vec2.hpp"

namespace cascade {

// The environment has 12 unique object kinds: 6 colored balls, 2 static
// pins and 4 walls. Ids are global across scenes so instructions and
// one-hot features can refer to objects a scene does not contain.
inline constexpr int kNumObjectKinds = 12;
inline constexpr int kFirstPinId = 6;
inline constexpr int kFirstWallId = 8;

struct ObjectId {
    int index = -1;

    constexpr bool valid() const { return index >= 0 && index < kNumObjectKinds; }
    constexpr bool is_ball() const { return index >= 0 && index < kFirstPinId; }
    constexpr bool is_pin() const { return index >= kFirstPinId && index < kFirstWallId; }
    constexpr bool is_wall() const { return index >= kFirstWallId && index < kNumObjectKinds; }

    constexpr auto operator<=>(const ObjectId&) const = default;
};

inline constexpr ObjectId kWallLeft{8};
inline constexpr ObjectId kWallRight{9};
inline constexpr ObjectId kWallBottom{10};
inline constexpr ObjectId kWallTop{11};

inline constexpr const char* object_name(ObjectId id) {
    constexpr const char* names[kNumObjectKinds] = {
        "red",  "green",  "blue",        "yellow",   "purple", "cyan",
        "pin1", "pin2",   "left_wall",   "right_wall", "bottom_wall", "top_wall"};
    return id.valid() ? names[id.index] : "invalid";
}

// Full kinematic + static description of one body, the unit the low-level
// collision routines operate on.
struct ObjectState {
    Vec2 position;
    Vec2 velocity;
    double radius = 0.0;
    double mass = 0.0;
    bool mobile = true;
};

// A collision between two objects; the pair is unordered and normalized to
// a < b. At most one participant is a wall.
struct SemanticEvent {
    ObjectId a;
    ObjectId b;
    double time = 0.0;

    SemanticEvent() = default;
    SemanticEvent(ObjectId x, ObjectId y, double t)
        : a(x < y ? x : y), b(x < y ? y : x), time(t) {}

    bool same_pair(const SemanticEvent& o) const { return a == o.a && b == o.b; }
    bool involves(ObjectId id) const { return a == id || b == id; }
};

inline bool same_pair_sequence(const std::vector<SemanticEvent>& lhs,
                               const std::vector<SemanticEvent>& rhs) {
    if (lhs.size() != rhs.size()) return false;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (!lhs[i].same_pair(rhs[i])) return false;
    return true;
}

struct Rect {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
};

// Static description of one episode: positioned bodies (balls first, then
// pins), the wall rectangle and the pivot identity. Initial kinematics of
// the bodies double as the world state at t = 0.
struct SceneObject {
    ObjectId id;
    Vec2 position;
    Vec2 velocity;
    double radius = 0.0;
    double mass = 0.0;
    bool mobile = true;
};

struct Scene {
    std::vector<SceneObject> objects;
    Rect walls;
    ObjectId pivot;

    int slot_of(ObjectId id) const {
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (objects[i].id == id) return static_cast<int>(i);
        return -1;
    }
};

// Kinematics of every positioned body plus time. Static properties (radius,
// mass, mobility) live in the Scene; a fixed-capacity array keeps tree
// expansion allocation-free.
inline constexpr int kMaxBodies = 8;

struct BodyState {
    Vec2 position;
    Vec2 velocity;
};

struct WorldState {
    std::array<BodyState, kMaxBodies> bodies{};
    std::uint8_t count = 0;
    double time = 0.0;
};

inline WorldState initial_world_state(const Scene& scene) {
    WorldState w;
    w.count = static_cast<std::uint8_t>(scene.objects.size());
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        w.bodies[i] = {scene.objects[i].position, scene.objects[i].velocity};
    return w;
}

inline ObjectState object_state(const Scene& scene, const WorldState& w, int slot) {
    const SceneObject& o = scene.objects[static_cast<std::size_t>(slot)];
    const BodyState& b = w.bodies[static_cast<std::size_t>(slot)];
    return {b.position, b.velocity, o.radius, o.mass, o.mobile};
}

inline WorldState advanced(const WorldState& w, double dt) {
    WorldState out = w;
    for (int i = 0; i < out.count; ++i)
        out.bodies[static_cast<std::size_t>(i)].position +=
            out.bodies[static_cast<std::size_t>(i)].velocity * dt;
    out.time += dt;
    return out;
}

}  // namespace cascade
