#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colfield/pipeline.hpp"

namespace colfield {

// The box the detector watches. The camera's near plane is the rear face;
// everything is projected onto it along `view`.
struct DetectionVolume {
    OrthoCamera camera;
    int width = 0;
    int height = 0;

    bool is_valid() const { return width >= 1 && height >= 1 && camera.is_valid(); }
};

enum class FieldKind { ObjectFront, ObjectBack, Environment };

struct HeightField {
    RenderTargets targets;
    DetectionVolume volume;
    FieldKind kind = FieldKind::Environment;
};

struct CollisionConfig {
    double contact_tolerance = 0.0;  // world units along the view axis
    bool use_stencil = false;
    std::size_t max_contacts_reported = 64;
};

struct Contact {
    int texel_x = 0;
    int texel_y = 0;
    Point3 world_point;
    double depth_object = 0.0;
    double depth_environment = 0.0;
    bool has_normal = false;
    Vec3 environment_normal;
    std::uint32_t environment_id = 0;
};

struct CollisionReport {
    bool collided = false;
    std::size_t contact_count = 0;
    std::vector<Contact> contacts;  // at most max_contacts_reported entries
};

// Exterior surface facing the environment: inverted culling keeps the faces
// pointing away from the camera, inverted depth test keeps the farthest one.
HeightField build_object_field(const Mesh &object, const DetectionVolume &volume);

// Rear boundary for the two-boundary comparison: regular settings.
HeightField build_object_back_field(const Mesh &object, const DetectionVolume &volume);

HeightField build_environment_field(std::span<const Mesh> environment, const DetectionVolume &volume,
                                    bool emit_normals = true, bool emit_ids = true,
                                    std::span<const std::uint8_t> stencil = {});

// Contact at a texel iff both fields cover it and the environment depth is at
// or in front of the object surface: d_e <= d_o + tolerance/L.
CollisionReport compare(const HeightField &object_front, const HeightField &environment,
                        const CollisionConfig &config);

// Contact iff the environment surface lies between the object's back and
// front boundaries at the texel.
CollisionReport compare_two_boundary(const HeightField &object_front, const HeightField &object_back,
                                     const HeightField &environment, const CollisionConfig &config);

// Full single-volume pipeline. Pass a previously built field to skip the
// object pass (valid while the object is rigid relative to the volume).
CollisionReport detect(const Mesh &object, std::span<const Mesh> environment,
                       const DetectionVolume &volume, const CollisionConfig &config,
                       const HeightField *reuse_object_field = nullptr);

struct Part {
    Mesh mesh;
    DetectionVolume volume;
};

// One independent detection per part; overall verdict is any part colliding.
std::vector<CollisionReport> detect_multi(std::span<const Part> parts,
                                          std::span<const Mesh> environment,
                                          const CollisionConfig &config);

// World position of a texel center at normalized depth d. Inverse of
// project_vertex restricted to the grid.
Point3 texel_world_point(const DetectionVolume &volume, int i, int j, double d);

}  // namespace colfield
