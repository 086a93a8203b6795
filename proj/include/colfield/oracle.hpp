#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "colfield/geometry.hpp"

namespace colfield {

struct Ray {
    Point3 origin;
    Vec3 direction;  // unit
};

struct OracleVerdict {
    bool collided = false;
    // triangle indices into A and B of one intersecting pair
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    // minimum pair distance seen when not collided; absent if the scan was
    // capped before measuring every pair
    std::optional<double> min_separation_estimate;
};

using Triangle = std::array<Point3, 3>;

// True iff the closed triangles share at least one point. Coplanar pairs go
// through 2D segment/containment tests. Throws on degenerate input.
bool tri_tri_intersect(const Triangle &ta, const Triangle &tb);

// All-pairs triangle scan with an AABB prefilter. epsilon > 0 widens the test
// to pairs within that distance. Degenerate triangles are skipped. The
// prefilter only skips work; verdicts are identical with it off.
OracleVerdict mesh_collide(const Mesh &a, const Mesh &b, double epsilon = 0.0,
                           bool use_prefilter = true);

enum class RayFacing { FrontFacing, BackFacing, Any };
enum class RaySelect { Nearest, Farthest };

struct RayHit {
    double t = 0.0;
    Vec3 normal;
    std::uint32_t object_id = 0;
};

// Scans every triangle, keeps hits with t in [0, range] whose facing matches
// (FrontFacing wants normal.direction < 0), returns the selected extremum.
std::optional<RayHit> raycast_surface(const Mesh &mesh, const Ray &ray, RayFacing facing,
                                      RaySelect select, double range);

// Ray-parity containment. Assumes the mesh is closed; redraws the ray
// direction when a hit grazes a vertex or edge.
bool point_inside_closed_mesh(const Point3 &p, const Mesh &mesh);

// Closest distance between two triangles (0 when they intersect).
double tri_tri_distance(const Triangle &ta, const Triangle &tb);

}  // namespace colfield
