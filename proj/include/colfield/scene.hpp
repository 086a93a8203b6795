#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "colfield/detector.hpp"

namespace colfield {

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

Quat quat_from_axis_angle(const Vec3 &axis, double degrees);
Quat slerp(const Quat &a, const Quat &b, double u);
Mat3 quat_to_mat3(const Quat &q);

struct Keyframe {
    int frame = 0;
    Vec3 translation;
    Quat rotation;
};

// Piecewise pose over integer frames. Sampling at a stored keyframe returns
// that keyframe's pose exactly; between keyframes translation interpolates
// linearly and rotation spherically. Outside the keyed range the nearest
// endpoint holds.
class Track {
  public:
    void add(const Keyframe &k);
    RigidTransform sample(int frame) const;
    bool is_static() const;  // at most one distinct pose over all frames
    bool empty() const { return keys_.empty(); }

  private:
    std::vector<Keyframe> keys_;  // sorted by frame, unique frames
};

// Detection box attached to an object, in that object's frame. `center` is
// the box center; the camera's near plane ends up at center - view*depth/2.
struct VolumeSpec {
    Vec3 center{0, 0, 0};
    Vec3 view{0, 0, 1};
    Vec3 up{0, 1, 0};
    double half_width = 1.0;
    double half_height = 1.0;
    double depth = 2.0;
    int width = 128;
    int height = 128;
};

struct SceneObject {
    std::string name;  // "object" for the main body, the part name otherwise
    std::string mesh_path;
    Mesh mesh;
    std::uint32_t id = 1;
    Track track;
    VolumeSpec volume;
};

struct SceneEnvironment {
    std::uint32_t id = 0;
    std::string mesh_path;
    Mesh mesh;
    Track track;
};

struct DetectionSpec {
    double tolerance = 0.0;  // world units
    bool two_boundary = false;
    bool stencil = false;
    std::size_t max_contacts = 64;
};

enum class ParticleFieldKind { Single, Cube };

struct ParticleSpec {
    int count = 0;      // total particles to emit
    double rate = 0.0;  // emitted per step; 0 means all at step 0
    Point3 source;
    Vec3 direction{0, 0, 1};
    double speed = 1.0;
    double spread = 0.0;  // jitter half-width applied across the direction
    std::uint64_t seed = 0;
    double restitution = 1.0;
    Vec3 acceleration{0, 0, 0};
    ParticleFieldKind field_kind = ParticleFieldKind::Single;
    double field_half_width = 1.0;   // single-direction footprint
    double field_half_height = 1.0;
    double field_half_extent = 1.0;  // cube variant
    double field_depth = 2.0;
    int field_width = 128;
    int field_height = 128;
};

struct SceneDescription {
    int frame_count = 1;
    double dt = 1.0 / 60.0;
    std::vector<SceneObject> parts;  // entry 0 is the main object when present
    std::vector<SceneEnvironment> environment;
    DetectionSpec detection;
    std::optional<ParticleSpec> particles;
};

// Flat key/value text, one setting per line, mesh paths resolved against
// base_dir. Errors carry the offending line number.
SceneDescription parse_scene(std::istream &in, const std::string &base_dir);
SceneDescription parse_scene_file(const std::string &path);

// World-space camera of a part's detection box under the given pose.
DetectionVolume volume_at(const VolumeSpec &spec, const RigidTransform &pose);

}  // namespace colfield
