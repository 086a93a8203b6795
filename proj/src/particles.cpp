#include "colfield/particles.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace colfield {

const std::array<Vec3, 6> CubeField::directions = {{{1, 0, 0},
                                                    {-1, 0, 0},
                                                    {0, 1, 0},
                                                    {0, -1, 0},
                                                    {0, 0, 1},
                                                    {0, 0, -1}}};

namespace {

std::atomic<std::uint64_t> g_field_builds{0};

Vec3 up_hint_for(const Vec3 &direction) {
    // any axis not nearly parallel to the view works as a hint
    return std::abs(direction.y) > 0.9 * norm(direction) ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
}

struct TexelRef {
    std::size_t idx;
    bool valid;
};

TexelRef texel_of(const HeightField &field, const ProjectedVertex &v) {
    const int w = field.volume.width, h = field.volume.height;
    const double sx = (v.ndc_x + 1.0) * (0.5 * w);
    const double sy = (1.0 - v.ndc_y) * (0.5 * h);
    const int i = static_cast<int>(std::floor(sx));
    const int j = static_cast<int>(std::floor(sy));
    if (i < 0 || i >= w || j < 0 || j >= h) return {0, false};
    return {field.targets.index(i, j), true};
}

// integrate one particle and resolve at most one surface crossing
bool advance(Particle &particle, const HeightField &field, double dt, const Vec3 &acceleration,
             double restitution) {
    const Point3 p0 = particle.position;
    const Vec3 v0 = particle.velocity;
    Point3 p1 = p0 + v0 * dt + acceleration * (0.5 * dt * dt);
    Vec3 v1 = v0 + acceleration * dt;
    bool bounced = false;

    const OrthoCamera &cam = field.volume.camera;
    const ProjectedVertex end = project_vertex(p1, cam);
    const TexelRef texel = texel_of(field, end);
    if (texel.valid && field.targets.coverage[texel.idx]) {
        const double d_e = field.targets.depth[texel.idx];
        const double d0 = project_vertex(p0, cam).depth;
        const double d1 = end.depth;
        if (d0 < d_e && d1 >= d_e) {  // passed through the surface this step
            const double u = (d_e - d0) / (d1 - d0);
            p1 = p0 + (p1 - p0) * u;
            const Vec3 n = field.targets.normal[texel.idx];
            const double vn = dot(v1, n);
            if (vn < 0) {
                v1 = v1 - n * ((1.0 + restitution) * vn);
                bounced = true;
            }
        }
    }

    particle.position = p1;
    particle.velocity = v1;
    particle.age += dt;
    return bounced;
}

}  // namespace

ParticleField build_particle_field(std::span<const Mesh> environment, const Point3 &source,
                                   const Vec3 &direction, double half_width, double half_height,
                                   double depth_range, int width, int height) {
    const OrthoCamera cam = OrthoCamera::look_along(source, direction, up_hint_for(direction),
                                                    half_width, half_height, depth_range);
    const DetectionVolume volume{cam, width, height};
    ParticleField out{build_environment_field(environment, volume, true, true)};
    g_field_builds.fetch_add(1, std::memory_order_relaxed);
    return out;
}

CubeField build_cube_field(std::span<const Mesh> environment, const Point3 &centroid,
                           double half_extent, double depth_range, int resolution) {
    if (!(half_extent > 0) || !(depth_range > 0))
        throw std::invalid_argument("build_cube_field: extents must be positive");
    CubeField cube;
    cube.centroid = centroid;
    for (std::size_t f = 0; f < 6; ++f)
        cube.faces[f] = build_particle_field(environment, centroid, CubeField::directions[f],
                                             half_extent, half_extent, depth_range, resolution,
                                             resolution);
    return cube;
}

std::uint64_t field_build_count() { return g_field_builds.load(std::memory_order_relaxed); }

StepResult step_particles(std::span<Particle> particles, const ParticleField &field, double dt,
                          const Vec3 &acceleration, double restitution) {
    if (!(dt > 0)) throw std::invalid_argument("step_particles: dt must be positive");
    StepResult result;
    for (Particle &p : particles) {
        if (!p.alive) continue;
        if (advance(p, field.field, dt, acceleration, restitution)) ++result.bounces;
    }
    return result;
}

StepResult step_particles(std::span<Particle> particles, const CubeField &field, double dt,
                          const Vec3 &acceleration, double restitution) {
    if (!(dt > 0)) throw std::invalid_argument("step_particles: dt must be positive");
    StepResult result;
    for (Particle &p : particles) {
        if (!p.alive) continue;
        // test against the face the particle is heading into
        std::size_t best_face = 0;
        double best_align = -std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < 6; ++f) {
            const double align = dot(p.velocity, CubeField::directions[f]);
            if (align > best_align) {
                best_align = align;
                best_face = f;
            }
        }
        if (advance(p, field.faces[best_face].field, dt, acceleration, restitution))
            ++result.bounces;
    }
    return result;
}

}  // namespace colfield
