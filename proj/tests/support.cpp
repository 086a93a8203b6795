#include "support.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace support {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace

Mesh make_box(const Point3 &center, const Vec3 &half_extents, std::uint32_t id) {
    const Vec3 &h = half_extents;
    Mesh m;
    m.object_id = id;
    m.vertices = {
        center + Vec3{-h.x, -h.y, -h.z}, center + Vec3{h.x, -h.y, -h.z},
        center + Vec3{h.x, h.y, -h.z},   center + Vec3{-h.x, h.y, -h.z},
        center + Vec3{-h.x, -h.y, h.z},  center + Vec3{h.x, -h.y, h.z},
        center + Vec3{h.x, h.y, h.z},    center + Vec3{-h.x, h.y, h.z},
    };
    m.triangles = {{0, 3, 2}, {0, 2, 1}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                   {3, 7, 6}, {3, 6, 2}, {0, 4, 7}, {0, 7, 3}, {1, 2, 6}, {1, 6, 5}};
    return m;
}

Mesh make_quad(const Point3 &center, const Vec3 &u, const Vec3 &v, std::uint32_t id) {
    Mesh m;
    m.object_id = id;
    m.vertices = {center - u - v, center + u - v, center + u + v, center - u + v};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

Mesh make_icosphere(const Point3 &center, double radius, int subdivisions, std::uint32_t id) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Point3> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    std::vector<std::array<std::uint32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
    };

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const auto idx = static_cast<std::uint32_t>(verts.size());
            verts.push_back((verts[a] + verts[b]) * 0.5);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto &f : faces) {
            const std::uint32_t ab = mid(f[0], f[1]);
            const std::uint32_t bc = mid(f[1], f[2]);
            const std::uint32_t ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    Mesh m;
    m.object_id = id;
    m.vertices.reserve(verts.size());
    for (const Point3 &v : verts) m.vertices.push_back(center + colfield::normalized(v) * radius);
    m.triangles = std::move(faces);
    return m;
}

Mesh make_ellipsoid(const Point3 &center, const Vec3 &radii, int subdivisions, std::uint32_t id) {
    Mesh m = make_icosphere({0, 0, 0}, 1.0, subdivisions, id);
    for (Point3 &v : m.vertices) v = center + Vec3{v.x * radii.x, v.y * radii.y, v.z * radii.z};
    return m;
}

std::string serialize_obj(const Mesh &mesh) {
    std::ostringstream out;
    for (const Point3 &v : mesh.vertices)
        out << "v " << fmt(v.x) << " " << fmt(v.y) << " " << fmt(v.z) << "\n";
    for (const auto &t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    for (const auto &l : mesh.lines) out << "l " << l[0] + 1 << " " << l[1] + 1 << "\n";
    for (const auto p : mesh.points) out << "p " << p + 1 << "\n";
    return out.str();
}

namespace {

struct Interval {
    double lo, hi;
};

Interval project_onto(const Triangle &t, const Vec3 &axis) {
    const double a = dot(t[0], axis), b = dot(t[1], axis), c = dot(t[2], axis);
    return {std::min({a, b, c}), std::max({a, b, c})};
}

// true when the axis strictly separates the projections (touching is overlap)
bool separates(const Triangle &ta, const Triangle &tb, const Vec3 &axis) {
    if (colfield::norm_sq(axis) < 1e-20) return false;  // degenerate axis says nothing
    const Interval ia = project_onto(ta, axis);
    const Interval ib = project_onto(tb, axis);
    return ia.hi < ib.lo || ib.hi < ia.lo;
}

}  // namespace

bool sat_tri_tri_intersect(const Triangle &ta, const Triangle &tb) {
    const Vec3 na = cross(ta[1] - ta[0], ta[2] - ta[0]);
    const Vec3 nb = cross(tb[1] - tb[0], tb[2] - tb[0]);
    if (separates(ta, tb, na)) return false;
    if (separates(ta, tb, nb)) return false;

    const Vec3 edges_a[3] = {ta[1] - ta[0], ta[2] - ta[1], ta[0] - ta[2]};
    const Vec3 edges_b[3] = {tb[1] - tb[0], tb[2] - tb[1], tb[0] - tb[2]};
    for (const Vec3 &ea : edges_a)
        for (const Vec3 &eb : edges_b)
            if (separates(ta, tb, cross(ea, eb))) return false;

    // coplanar pairs: all cross products above vanish, the in-plane edge
    // normals finish the job
    for (const Vec3 &ea : edges_a)
        if (separates(ta, tb, cross(na, ea))) return false;
    for (const Vec3 &eb : edges_b)
        if (separates(ta, tb, cross(nb, eb))) return false;
    return true;
}

Vec3 TestRng::unit() {
    for (;;) {
        const Vec3 v{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
        const double n2 = colfield::norm_sq(v);
        if (n2 > 1e-4 && n2 <= 1.0) return v / std::sqrt(n2);
    }
}

Triangle TestRng::triangle(double extent) {
    for (;;) {
        const Triangle t{Point3{uniform(-extent, extent), uniform(-extent, extent),
                                uniform(-extent, extent)},
                         Point3{uniform(-extent, extent), uniform(-extent, extent),
                                uniform(-extent, extent)},
                         Point3{uniform(-extent, extent), uniform(-extent, extent),
                                uniform(-extent, extent)}};
        if (colfield::norm(cross(t[1] - t[0], t[2] - t[0])) > 1e-6) return t;
    }
}

std::string make_temp_dir(const std::string &tag) {
    std::string tmpl = "/tmp/colfield_" + tag + "_XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    return std::string(buf.data());
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << content;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace support
