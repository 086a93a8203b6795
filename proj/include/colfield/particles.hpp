#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "colfield/detector.hpp"

namespace colfield {

struct Particle {
    Point3 position;
    Vec3 velocity;
    double age = 0.0;
    bool alive = true;
};

// Environment field all particles share for one step. Normals are always
// emitted; the bounce needs them.
struct ParticleField {
    HeightField field;
};

// Six outward-looking fields around a centroid, one per axis direction.
struct CubeField {
    std::array<ParticleField, 6> faces;  // +x, -x, +y, -y, +z, -z
    Point3 centroid;
    static const std::array<Vec3, 6> directions;
};

ParticleField build_particle_field(std::span<const Mesh> environment, const Point3 &source,
                                   const Vec3 &direction, double half_width, double half_height,
                                   double depth_range, int width, int height);

CubeField build_cube_field(std::span<const Mesh> environment, const Point3 &centroid,
                           double half_extent, double depth_range, int resolution);

// How many environment fields have been built since process start. Steps never
// build fields themselves, so the delta across a step run stays at whatever
// the caller built up front.
std::uint64_t field_build_count();

struct StepResult {
    std::uint64_t bounces = 0;
};

// Integrates p' = p + v dt + a dt^2/2 then v' = v + a dt. A particle bounces
// when its depth at its own texel passes the environment surface during the
// step; it is moved back to the crossing and reflected off the stored normal.
StepResult step_particles(std::span<Particle> particles, const ParticleField &field, double dt,
                          const Vec3 &acceleration, double restitution);

// Same, but each particle tests the cube face its velocity points into most.
StepResult step_particles(std::span<Particle> particles, const CubeField &field, double dt,
                          const Vec3 &acceleration, double restitution);

}  // namespace colfield
