#include "colfield/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace colfield {

namespace {

struct V2 {
    double x, y;
};

double orient2(const V2 &a, const V2 &b, const V2 &c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// p assumed collinear with a-b
bool on_segment(const V2 &a, const V2 &b, const V2 &p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

// closed segments: touching endpoints count
bool segments_intersect(const V2 &p1, const V2 &q1, const V2 &p2, const V2 &q2) {
    const double o1 = orient2(p1, q1, p2);
    const double o2 = orient2(p1, q1, q2);
    const double o3 = orient2(p2, q2, p1);
    const double o4 = orient2(p2, q2, q1);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return true;
    if (o1 == 0 && on_segment(p1, q1, p2)) return true;
    if (o2 == 0 && on_segment(p1, q1, q2)) return true;
    if (o3 == 0 && on_segment(p2, q2, p1)) return true;
    if (o4 == 0 && on_segment(p2, q2, q1)) return true;
    return false;
}

// closed triangle, either winding
bool point_in_tri_2d(const V2 &p, const V2 &a, const V2 &b, const V2 &c) {
    const double d1 = orient2(a, b, p);
    const double d2 = orient2(b, c, p);
    const double d3 = orient2(c, a, p);
    const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(has_neg && has_pos);
}

int dominant_axis(const Vec3 &n) {
    const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
    if (ax >= ay && ax >= az) return 0;
    if (ay >= az) return 1;
    return 2;
}

V2 drop_axis(const Point3 &p, int axis) {
    switch (axis) {
        case 0: return {p.y, p.z};
        case 1: return {p.x, p.z};
        default: return {p.x, p.y};
    }
}

bool coplanar_tri_tri(const Vec3 &n, const Triangle &ta, const Triangle &tb) {
    const int axis = dominant_axis(n);
    V2 a[3], b[3];
    for (int i = 0; i < 3; ++i) {
        a[i] = drop_axis(ta[i], axis);
        b[i] = drop_axis(tb[i], axis);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (segments_intersect(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3])) return true;
    // no edge crossings: one triangle may still contain the other
    if (point_in_tri_2d(a[0], b[0], b[1], b[2])) return true;
    if (point_in_tri_2d(b[0], a[0], a[1], a[2])) return true;
    return false;
}

// Interval of the intersection line covered by a triangle, scaled to avoid
// divisions. Handles vertices lying exactly on the other plane. Returns false
// when the triangle is coplanar with the other plane.
bool compute_interval(double vv0, double vv1, double vv2, double d0, double d1, double d2,
                      double d0d1, double d0d2, double &a, double &b, double &c, double &x0,
                      double &x1) {
    if (d0d1 > 0) {
        a = vv2; b = (vv0 - vv2) * d2; c = (vv1 - vv2) * d2; x0 = d2 - d0; x1 = d2 - d1;
    } else if (d0d2 > 0) {
        a = vv1; b = (vv0 - vv1) * d1; c = (vv2 - vv1) * d1; x0 = d1 - d0; x1 = d1 - d2;
    } else if (d1 * d2 > 0 || d0 != 0) {
        a = vv0; b = (vv1 - vv0) * d0; c = (vv2 - vv0) * d0; x0 = d0 - d1; x1 = d0 - d2;
    } else if (d1 != 0) {
        a = vv1; b = (vv0 - vv1) * d1; c = (vv2 - vv1) * d1; x0 = d1 - d0; x1 = d1 - d2;
    } else if (d2 != 0) {
        a = vv2; b = (vv0 - vv2) * d2; c = (vv1 - vv2) * d2; x0 = d2 - d0; x1 = d2 - d1;
    } else {
        return false;
    }
    return true;
}

double component(const Point3 &p, int axis) { return axis == 0 ? p.x : axis == 1 ? p.y : p.z; }

Vec3 tri_raw_normal(const Triangle &t) { return cross(t[1] - t[0], t[2] - t[0]); }

void require_nondegenerate(const Triangle &t, const char *which) {
    if (norm(tri_raw_normal(t)) <= 1e-12)
        throw std::invalid_argument(std::string("tri_tri_intersect: degenerate triangle ") + which);
}

Point3 closest_point_on_triangle(const Point3 &p, const Point3 &a, const Point3 &b, const Point3 &c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double segment_segment_distance(const Point3 &p1, const Point3 &q1, const Point3 &p2,
                                const Point3 &q2) {
    const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    constexpr double tiny = 1e-30;
    double s = 0, t = 0;
    if (a <= tiny && e <= tiny) {
        return norm(p1 - p2);
    }
    if (a <= tiny) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= tiny) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            if (denom != 0) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return norm((p1 + d1 * s) - (p2 + d2 * t));
}

// feature-based distance; valid when the triangles are known not to intersect
double tri_tri_feature_distance(const Triangle &ta, const Triangle &tb) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            best = std::min(best, segment_segment_distance(ta[i], ta[(i + 1) % 3], tb[j],
                                                           tb[(j + 1) % 3]));
    for (int i = 0; i < 3; ++i) {
        best = std::min(best, norm(ta[i] - closest_point_on_triangle(ta[i], tb[0], tb[1], tb[2])));
        best = std::min(best, norm(tb[i] - closest_point_on_triangle(tb[i], ta[0], ta[1], ta[2])));
    }
    return best;
}

struct ScanTriangle {
    Triangle tri;
    Aabb box;
    std::size_t index;
};

std::vector<ScanTriangle> collect_triangles(const Mesh &mesh) {
    std::vector<ScanTriangle> out;
    out.reserve(mesh.triangles.size());
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto &t = mesh.triangles[i];
        Triangle tri{mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
        if (norm(tri_raw_normal(tri)) <= 1e-12) continue;  // slivers carry no area
        out.push_back({tri, Aabb::of_points(tri[0], tri[1], tri[2]), i});
    }
    return out;
}

Vec3 random_unit(std::mt19937_64 &rng) {
    for (;;) {
        auto next = [&] { return (rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
        const Vec3 v{next(), next(), next()};
        const double n2 = norm_sq(v);
        if (n2 > 1e-4 && n2 <= 1.0) return v / std::sqrt(n2);
    }
}

}  // namespace

bool tri_tri_intersect(const Triangle &ta, const Triangle &tb) {
    require_nondegenerate(ta, "A");
    require_nondegenerate(tb, "B");

    // signed distances of B's vertices against A's plane
    const Vec3 n1 = tri_raw_normal(ta);
    const double off1 = -dot(n1, ta[0]);
    const double du0 = dot(n1, tb[0]) + off1;
    const double du1 = dot(n1, tb[1]) + off1;
    const double du2 = dot(n1, tb[2]) + off1;
    const double du0du1 = du0 * du1, du0du2 = du0 * du2;
    if (du0du1 > 0 && du0du2 > 0) return false;  // all on one side

    const Vec3 n2 = tri_raw_normal(tb);
    const double off2 = -dot(n2, tb[0]);
    const double dv0 = dot(n2, ta[0]) + off2;
    const double dv1 = dot(n2, ta[1]) + off2;
    const double dv2 = dot(n2, ta[2]) + off2;
    const double dv0dv1 = dv0 * dv1, dv0dv2 = dv0 * dv2;
    if (dv0dv1 > 0 && dv0dv2 > 0) return false;

    // project onto the axis where the intersection line is longest
    const Vec3 line_dir = cross(n1, n2);
    const int axis = dominant_axis(line_dir);
    const double vp0 = component(ta[0], axis), vp1 = component(ta[1], axis),
                 vp2 = component(ta[2], axis);
    const double up0 = component(tb[0], axis), up1 = component(tb[1], axis),
                 up2 = component(tb[2], axis);

    double a, b, c, x0, x1;
    if (!compute_interval(vp0, vp1, vp2, dv0, dv1, dv2, dv0dv1, dv0dv2, a, b, c, x0, x1))
        return coplanar_tri_tri(n1, ta, tb);
    double d, e, f, y0, y1;
    if (!compute_interval(up0, up1, up2, du0, du1, du2, du0du1, du0du2, d, e, f, y0, y1))
        return coplanar_tri_tri(n1, ta, tb);

    const double xx = x0 * x1, yy = y0 * y1, xxyy = xx * yy;
    double isect1[2], isect2[2];
    double tmp = a * xxyy;
    isect1[0] = tmp + b * x1 * yy;
    isect1[1] = tmp + c * x0 * yy;
    tmp = d * xxyy;
    isect2[0] = tmp + e * y1 * xx;
    isect2[1] = tmp + f * y0 * xx;
    if (isect1[0] > isect1[1]) std::swap(isect1[0], isect1[1]);
    if (isect2[0] > isect2[1]) std::swap(isect2[0], isect2[1]);
    return !(isect1[1] < isect2[0] || isect2[1] < isect1[0]);
}

double tri_tri_distance(const Triangle &ta, const Triangle &tb) {
    if (tri_tri_intersect(ta, tb)) return 0.0;
    return tri_tri_feature_distance(ta, tb);
}

OracleVerdict mesh_collide(const Mesh &a, const Mesh &b, double epsilon, bool use_prefilter) {
    OracleVerdict verdict;
    const auto tris_a = collect_triangles(a);
    const auto tris_b = collect_triangles(b);
    if (tris_a.empty() || tris_b.empty()) {
        return verdict;  // nothing to separate, estimate undefined
    }

    // exact-intersection scan first; boxes that do not touch cannot intersect
    for (const auto &ta : tris_a) {
        for (const auto &tb : tris_b) {
            if (use_prefilter && aabb_distance(ta.box, tb.box) > 0) continue;
            if (tri_tri_intersect(ta.tri, tb.tri)) {
                verdict.collided = true;
                verdict.witness = {ta.index, tb.index};
                return verdict;
            }
        }
    }

    // no pair intersects; measure the closest approach, pruned by box distance
    constexpr std::size_t eval_cap = 4'000'000;
    std::size_t evals = 0;
    bool capped = false;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_pair{0, 0};
    for (const auto &ta : tris_a) {
        for (const auto &tb : tris_b) {
            if (use_prefilter) {
                const double lower = aabb_distance(ta.box, tb.box);
                if (lower >= best && lower > epsilon) continue;
                if (capped && lower > epsilon) continue;  // budget spent: verdict-relevant pairs only
            } else if (capped && aabb_distance(ta.box, tb.box) > epsilon) {
                continue;
            }
            if (++evals > eval_cap) capped = true;
            const double dist = tri_tri_feature_distance(ta.tri, tb.tri);
            if (dist < best) {
                best = dist;
                best_pair = {ta.index, tb.index};
            }
        }
    }

    if (epsilon > 0 && best <= epsilon) {
        verdict.collided = true;
        verdict.witness = best_pair;
        return verdict;
    }
    if (!capped && std::isfinite(best)) verdict.min_separation_estimate = best;
    return verdict;
}

std::optional<RayHit> raycast_surface(const Mesh &mesh, const Ray &ray, RayFacing facing,
                                      RaySelect select, double range) {
    std::optional<RayHit> best;
    for (const auto &t : mesh.triangles) {
        const Point3 &a = mesh.vertices[t[0]];
        const Point3 &b = mesh.vertices[t[1]];
        const Point3 &c = mesh.vertices[t[2]];
        const Vec3 e1 = b - a, e2 = c - a;
        const Vec3 n = cross(e1, e2);
        const double nn = norm(n);
        if (nn <= 1e-12) continue;

        const Vec3 pvec = cross(ray.direction, e2);
        const double det = dot(e1, pvec);  // equals -(n . direction)
        const double facing_eps = 1e-12 * nn;
        if (facing == RayFacing::FrontFacing && det <= facing_eps) continue;
        if (facing == RayFacing::BackFacing && det >= -facing_eps) continue;
        if (std::abs(det) <= facing_eps) continue;  // edge-on

        const double inv_det = 1.0 / det;
        const Vec3 tvec = ray.origin - a;
        const double u = dot(tvec, pvec) * inv_det;
        if (u < 0 || u > 1) continue;
        const Vec3 qvec = cross(tvec, e1);
        const double v = dot(ray.direction, qvec) * inv_det;
        if (v < 0 || u + v > 1) continue;
        const double hit_t = dot(e2, qvec) * inv_det;
        if (hit_t < 0 || hit_t > range) continue;

        const bool better = !best || (select == RaySelect::Nearest ? hit_t < best->t : hit_t > best->t);
        if (better) best = RayHit{hit_t, n / nn, mesh.object_id};
    }
    return best;
}

bool point_inside_closed_mesh(const Point3 &p, const Mesh &mesh) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    bool parity = false;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const Vec3 dir = random_unit(rng);
        bool grazed = false;
        int crossings = 0;
        for (const auto &t : mesh.triangles) {
            const Point3 &a = mesh.vertices[t[0]];
            const Point3 &b = mesh.vertices[t[1]];
            const Point3 &c = mesh.vertices[t[2]];
            const Vec3 e1 = b - a, e2 = c - a;
            const Vec3 n = cross(e1, e2);
            const double nn = norm(n);
            if (nn <= 1e-12) continue;

            const Vec3 pvec = cross(dir, e2);
            const double det = dot(e1, pvec);
            if (std::abs(det) <= 1e-12 * nn) {
                grazed = true;  // near edge-on: cannot classify this face safely
                break;
            }
            const double inv_det = 1.0 / det;
            const Vec3 tvec = p - a;
            const double u = dot(tvec, pvec) * inv_det;
            const Vec3 qvec = cross(tvec, e1);
            const double v = dot(dir, qvec) * inv_det;
            const double w = 1.0 - u - v;
            if (u < -1e-9 || v < -1e-9 || w < -1e-9) continue;  // clean miss
            const double hit_t = dot(e2, qvec) * inv_det;
            if (hit_t <= 0) continue;
            if (u < 1e-9 || v < 1e-9 || w < 1e-9) {
                grazed = true;  // skims a vertex or edge: parity unreliable
                break;
            }
            ++crossings;
        }
        if (!grazed) return (crossings % 2) == 1;
        parity = (crossings % 2) == 1;
    }
    return parity;  // every direction grazed; best effort
}

}  // namespace colfield
