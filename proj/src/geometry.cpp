#include "colfield/geometry.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace colfield {

double norm_sq(const Vec3 &v) { return dot(v, v); }
double norm(const Vec3 &v) { return std::sqrt(norm_sq(v)); }

Vec3 normalized(const Vec3 &v) {
    const double n = norm(v);
    if (n <= 1e-300) throw std::invalid_argument("normalized: zero-length vector");
    return v / n;
}

bool is_finite(const Vec3 &v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
}

double Mat3::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 operator*(const Mat3 &a, const Mat3 &b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

bool operator==(const Mat3 &a, const Mat3 &b) { return a.m == b.m; }

RigidTransform RigidTransform::inverse() const {
    const Mat3 rt = rotation.transposed();
    return {rt, -rt.apply(translation)};
}

bool RigidTransform::is_valid(double eps) const {
    const Mat3 rtr = rotation.transposed() * rotation;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const double want = (r == c) ? 1.0 : 0.0;
            if (std::abs(rtr(r, c) - want) > eps) return false;
        }
    return rotation.determinant() > 0.0 && is_finite(translation);
}

RigidTransform RigidTransform::rotate_about_axis(const Vec3 &axis, double radians) {
    const Vec3 u = normalized(axis);
    const double c = std::cos(radians), s = std::sin(radians), t = 1.0 - c;
    Mat3 r;
    r(0, 0) = c + u.x * u.x * t;
    r(0, 1) = u.x * u.y * t - u.z * s;
    r(0, 2) = u.x * u.z * t + u.y * s;
    r(1, 0) = u.y * u.x * t + u.z * s;
    r(1, 1) = c + u.y * u.y * t;
    r(1, 2) = u.y * u.z * t - u.x * s;
    r(2, 0) = u.z * u.x * t - u.y * s;
    r(2, 1) = u.z * u.y * t + u.x * s;
    r(2, 2) = c + u.z * u.z * t;
    return {r, Vec3{}};
}

RigidTransform operator*(const RigidTransform &a, const RigidTransform &b) {
    return {a.rotation * b.rotation, a.rotation.apply(b.translation) + a.translation};
}

bool Mesh::indices_in_range() const {
    const auto n = static_cast<std::uint32_t>(vertices.size());
    for (const auto &t : triangles)
        if (t[0] >= n || t[1] >= n || t[2] >= n) return false;
    for (const auto &l : lines)
        if (l[0] >= n || l[1] >= n) return false;
    for (const auto p : points)
        if (p >= n) return false;
    return true;
}

Aabb Aabb::of_points(const Point3 &a, const Point3 &b, const Point3 &c) {
    Aabb box{a, a};
    for (const Point3 &p : {b, c}) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.min.z = std::min(box.min.z, p.z);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
        box.max.z = std::max(box.max.z, p.z);
    }
    return box;
}

Aabb Aabb::of_mesh(const Mesh &m) {
    if (m.vertices.empty()) return {Point3{}, Point3{}};
    Aabb box{m.vertices[0], m.vertices[0]};
    for (const Point3 &p : m.vertices) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.min.z = std::min(box.min.z, p.z);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
        box.max.z = std::max(box.max.z, p.z);
    }
    return box;
}

double aabb_distance(const Aabb &a, const Aabb &b) {
    const double dx = std::max({0.0, b.min.x - a.max.x, a.min.x - b.max.x});
    const double dy = std::max({0.0, b.min.y - a.max.y, a.min.y - b.max.y});
    const double dz = std::max({0.0, b.min.z - a.max.z, a.min.z - b.max.z});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

parse_error::parse_error(int line, const std::string &what_arg)
    : std::runtime_error("line " + std::to_string(line) + ": " + what_arg), line_(line) {}

namespace {

double parse_coord(const std::string &tok, int line) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception &) {
        throw parse_error(line, "non-numeric coordinate '" + tok + "'");
    }
    if (used != tok.size()) throw parse_error(line, "non-numeric coordinate '" + tok + "'");
    return v;
}

// OBJ vertex references look like "i", "i/t", "i//n", "i/t/n"; only i matters here.
// Negative indices count back from the vertices defined so far.
std::int64_t parse_index(const std::string &tok, std::int64_t verts_so_far, int line) {
    const std::string head = tok.substr(0, tok.find('/'));
    std::int64_t idx = 0;
    size_t used = 0;
    try {
        idx = std::stoll(head, &used);
    } catch (const std::exception &) {
        throw parse_error(line, "bad vertex index '" + tok + "'");
    }
    if (used != head.size()) throw parse_error(line, "bad vertex index '" + tok + "'");
    if (idx == 0) throw parse_error(line, "vertex index 0 is not valid in OBJ");
    if (idx < 0) {
        idx = verts_so_far + idx;  // relative reference, resolved immediately
        if (idx < 0) throw parse_error(line, "relative vertex index out of range");
        return idx;
    }
    return idx - 1;
}

}  // namespace

Mesh load_obj(std::istream &in) {
    Mesh mesh;
    // Forward references are legal for positive indices, so range-check after EOF.
    struct Pending {
        std::int64_t index;
        int line;
    };
    std::vector<Pending> used_indices;

    std::string line_text;
    int line_no = 0;
    while (std::getline(in, line_text)) {
        ++line_no;
        if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
        std::istringstream ls(line_text);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;

        if (tag == "v") {
            std::string sx, sy, sz;
            if (!(ls >> sx >> sy >> sz)) throw parse_error(line_no, "vertex needs 3 coordinates");
            mesh.vertices.push_back(
                {parse_coord(sx, line_no), parse_coord(sy, line_no), parse_coord(sz, line_no)});
        } else if (tag == "f") {
            std::vector<std::int64_t> face;
            std::string tok;
            while (ls >> tok)
                face.push_back(parse_index(tok, static_cast<std::int64_t>(mesh.vertices.size()), line_no));
            if (face.size() < 3) throw parse_error(line_no, "face needs at least 3 vertices");
            for (size_t i = 1; i + 1 < face.size(); ++i) {  // fan, preserves winding
                mesh.triangles.push_back({static_cast<std::uint32_t>(face[0]),
                                          static_cast<std::uint32_t>(face[i]),
                                          static_cast<std::uint32_t>(face[i + 1])});
                used_indices.push_back({face[0], line_no});
                used_indices.push_back({face[i], line_no});
                used_indices.push_back({face[i + 1], line_no});
            }
        } else if (tag == "l") {
            std::vector<std::int64_t> poly;
            std::string tok;
            while (ls >> tok)
                poly.push_back(parse_index(tok, static_cast<std::int64_t>(mesh.vertices.size()), line_no));
            if (poly.size() < 2) throw parse_error(line_no, "line record needs at least 2 vertices");
            for (size_t i = 0; i + 1 < poly.size(); ++i) {
                mesh.lines.push_back(
                    {static_cast<std::uint32_t>(poly[i]), static_cast<std::uint32_t>(poly[i + 1])});
                used_indices.push_back({poly[i], line_no});
                used_indices.push_back({poly[i + 1], line_no});
            }
        } else if (tag == "p") {
            std::string tok;
            bool any = false;
            while (ls >> tok) {
                const auto idx = parse_index(tok, static_cast<std::int64_t>(mesh.vertices.size()), line_no);
                mesh.points.push_back(static_cast<std::uint32_t>(idx));
                used_indices.push_back({idx, line_no});
                any = true;
            }
            if (!any) throw parse_error(line_no, "point record needs at least 1 vertex");
        }
        // anything else: ignored subset
    }

    const auto vert_count = static_cast<std::int64_t>(mesh.vertices.size());
    for (const auto &u : used_indices)
        if (u.index >= vert_count)
            throw parse_error(u.line, "vertex index " + std::to_string(u.index + 1) + " out of range (" +
                                          std::to_string(vert_count) + " vertices)");
    return mesh;
}

Mesh load_obj_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open OBJ file: " + path);
    return load_obj(in);
}

Mesh apply_transform(const Mesh &mesh, const RigidTransform &t) {
    Mesh out = mesh;
    for (Point3 &p : out.vertices) p = t.apply(p);
    return out;
}

std::optional<Vec3> triangle_normal(const Point3 &a, const Point3 &b, const Point3 &c) {
    const Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len <= 1e-12) return std::nullopt;
    return n / len;
}

}  // namespace colfield
