#pragma once

#include <random>
#include <string>

#include "colfield/geometry.hpp"
#include "colfield/oracle.hpp"

namespace support {

using colfield::Mesh;
using colfield::Point3;
using colfield::Triangle;
using colfield::Vec3;

// Axis-aligned box, CCW winding, normals outward.
Mesh make_box(const Point3 &center, const Vec3 &half_extents, std::uint32_t id = 1);

// Rectangle spanned by center +- u +- v; front face normal along cross(u, v).
Mesh make_quad(const Point3 &center, const Vec3 &u, const Vec3 &v, std::uint32_t id = 1);

// Subdivided icosahedron projected onto a sphere, normals outward.
// subdivisions = 3 gives 1280 triangles.
Mesh make_icosphere(const Point3 &center, double radius, int subdivisions, std::uint32_t id = 1);

// Linear image of an icosphere: still convex and closed.
Mesh make_ellipsoid(const Point3 &center, const Vec3 &radii, int subdivisions, std::uint32_t id = 1);

std::string serialize_obj(const Mesh &mesh);

// Separating-axis triangle intersection: face normals, all edge pairs, and
// the in-plane edge normals for coplanar pairs. Written independently of the
// interval-overlap routine to cross-check it.
bool sat_tri_tri_intersect(const Triangle &ta, const Triangle &tb);

// Deterministic helpers; all randomness in the tests flows through this.
struct TestRng {
    std::mt19937_64 rng;

    explicit TestRng(std::uint64_t seed) : rng(seed) {}
    double uniform01() { return (rng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    int uniform_int(int a, int b) {  // inclusive
        return a + static_cast<int>(rng() % static_cast<std::uint64_t>(b - a + 1));
    }
    Vec3 unit();
    Triangle triangle(double extent);  // non-degenerate, inside [-extent, extent]^3
};

std::string make_temp_dir(const std::string &tag);
void write_file(const std::string &path, const std::string &content);
std::string read_file(const std::string &path);

}  // namespace support
