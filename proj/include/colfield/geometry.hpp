#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace colfield {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 &operator+=(const Vec3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 &operator-=(const Vec3 &o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3 &operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

// A position and a direction share the representation; the name documents intent.
using Point3 = Vec3;

inline Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
inline bool operator==(const Vec3 &a, const Vec3 &b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
inline bool operator!=(const Vec3 &a, const Vec3 &b) { return !(a == b); }

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const Vec3 &v);
double norm_sq(const Vec3 &v);
Vec3 normalized(const Vec3 &v);  // throws std::invalid_argument on (near-)zero input
bool is_finite(const Vec3 &v);

// Row-major 3x3 matrix; just enough for rigid motion.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[static_cast<size_t>(r) * 3 + static_cast<size_t>(c)]; }
    double &operator()(int r, int c) { return m[static_cast<size_t>(r) * 3 + static_cast<size_t>(c)]; }

    Vec3 apply(const Vec3 &v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 transposed() const;
    double determinant() const;
    static Mat3 identity() { return {}; }
};

Mat3 operator*(const Mat3 &a, const Mat3 &b);
bool operator==(const Mat3 &a, const Mat3 &b);

struct RigidTransform {
    Mat3 rotation;
    Vec3 translation;

    Point3 apply(const Point3 &p) const { return rotation.apply(p) + translation; }
    Vec3 rotate(const Vec3 &v) const { return rotation.apply(v); }
    RigidTransform inverse() const;

    // RtR = I within eps and det = +1.
    bool is_valid(double eps = 1e-9) const;

    static RigidTransform identity() { return {}; }
    static RigidTransform translate(const Vec3 &t) { return {Mat3::identity(), t}; }
    static RigidTransform rotate_about_axis(const Vec3 &axis, double radians);
};

// Applies b first, then a.
RigidTransform operator*(const RigidTransform &a, const RigidTransform &b);

// Indexed geometry. Counter-clockwise triangle winding defines the front face:
// the face normal (b-a)x(c-a) points away from the back face.
struct Mesh {
    std::vector<Point3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<std::array<std::uint32_t, 2>> lines;
    std::vector<std::uint32_t> points;
    std::uint32_t object_id = 1;  // 0 is the reserved "no object" sentinel

    bool indices_in_range() const;
};

struct Aabb {
    Point3 min;
    Point3 max;

    bool overlaps(const Aabb &o) const {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y &&
               min.z <= o.max.z && o.min.z <= max.z;
    }
    Aabb inflated(double r) const { return {min - Vec3{r, r, r}, max + Vec3{r, r, r}}; }

    static Aabb of_points(const Point3 &a, const Point3 &b, const Point3 &c);
    static Aabb of_mesh(const Mesh &m);
};

// Lower bound on the distance between any two points of the boxes (0 when overlapping).
double aabb_distance(const Aabb &a, const Aabb &b);

// Parse failure carrying the 1-based source line.
class parse_error : public std::runtime_error {
  public:
    parse_error(int line, const std::string &what_arg);
    int line() const { return line_; }

  private:
    int line_;
};

// Wavefront OBJ subset: v, f (fan-triangulated), l (polylines split into segments), p.
// Other record types are ignored. Indices become 0-based; negative indices resolve
// relative to the vertices seen so far.
Mesh load_obj(std::istream &in);
Mesh load_obj_file(const std::string &path);

Mesh apply_transform(const Mesh &mesh, const RigidTransform &t);

// Unit front-face normal, or nullopt when the cross product norm is <= 1e-12
// (caller skips the primitive).
std::optional<Vec3> triangle_normal(const Point3 &a, const Point3 &b, const Point3 &c);

}  // namespace colfield
