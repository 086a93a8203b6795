#include "colfield/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace colfield {

bool OrthoCamera::is_valid(double eps) const {
    if (!(half_width > 0) || !(half_height > 0) || !(depth_range > 0)) return false;
    if (!is_finite(origin) || !is_finite(view) || !is_finite(up) || !is_finite(right)) return false;
    if (std::abs(norm(view) - 1.0) > eps) return false;
    if (std::abs(norm(up) - 1.0) > eps) return false;
    if (std::abs(norm(right) - 1.0) > eps) return false;
    if (std::abs(dot(view, up)) > eps || std::abs(dot(view, right)) > eps ||
        std::abs(dot(up, right)) > eps)
        return false;
    const Vec3 rxu = cross(right, up);  // must equal view: the basis never mirrors
    return norm(rxu - view) <= eps;
}

OrthoCamera OrthoCamera::look_along(const Point3 &origin, const Vec3 &view_dir, const Vec3 &up_hint,
                                    double half_width, double half_height, double depth_range) {
    OrthoCamera cam;
    cam.origin = origin;
    cam.view = normalized(view_dir);
    cam.right = normalized(cross(up_hint, cam.view));
    cam.up = cross(cam.view, cam.right);
    cam.half_width = half_width;
    cam.half_height = half_height;
    cam.depth_range = depth_range;
    return cam;
}

ProjectedVertex project_vertex(const Point3 &p, const OrthoCamera &camera) {
    const Vec3 rel = p - camera.origin;
    return {dot(rel, camera.right) / camera.half_width, dot(rel, camera.up) / camera.half_height,
            dot(rel, camera.view) / camera.depth_range};
}

namespace {

struct ScreenVertex {
    double x, y, depth;
};

double orient(const ScreenVertex &a, const ScreenVertex &b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Shared-edge ownership for y-down screen coordinates and positive
// orientation: an edge owns its texels when it runs upward on screen, or
// rightward when horizontal.
bool is_top_left(const ScreenVertex &a, const ScreenVertex &b) {
    const double dy = b.y - a.y;
    if (dy < 0) return true;
    return dy == 0 && (b.x - a.x) > 0;
}

bool edge_admits(double w, bool top_left) { return w > 0 || (w == 0 && top_left); }

struct Framebuffer {
    RenderTargets *t;
    const RenderConfig *cfg;
    std::span<const std::uint8_t> stencil;
    std::vector<std::uint64_t> keys;

    void submit(int x, int y, double d, const Vec3 &n, std::uint32_t id, std::uint64_t key) {
        if (d < 0 || d > 1) return;  // outside the box along the axis
        const std::size_t idx = t->index(x, y);
        if (!stencil.empty() && stencil[idx] == 0) return;
        bool write = false;
        bool attrs_only = false;
        if (!t->coverage[idx]) {
            write = true;  // first real sample beats the clear value
        } else if (cfg->depth_test == DepthTest::KeepLess ? d < t->depth[idx]
                                                          : d > t->depth[idx]) {
            write = true;
        } else if (d == t->depth[idx] && key < keys[idx]) {
            attrs_only = true;  // equal depth: earliest primitive owns the texel
        }
        if (!write && !attrs_only) return;
        t->depth[idx] = d;
        t->coverage[idx] = 1;
        keys[idx] = key;
        if (cfg->emit_normals) t->normal[idx] = n;
        if (cfg->emit_ids) t->id[idx] = id;
    }
};

ScreenVertex to_screen(const ProjectedVertex &v, int width, int height) {
    return {(v.ndc_x + 1.0) * (0.5 * width), (1.0 - v.ndc_y) * (0.5 * height), v.depth};
}

bool finite_screen(const ScreenVertex &v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.depth);
}

void raster_triangle(Framebuffer &fb, ScreenVertex s0, ScreenVertex s1, ScreenVertex s2,
                     const Vec3 &flat_normal, std::uint32_t id, std::uint64_t key,
                     const RenderConfig &cfg) {
    if (!finite_screen(s0) || !finite_screen(s1) || !finite_screen(s2)) {
        ++fb.t->degenerate_skipped;
        return;
    }
    double sigma = (s1.x - s0.x) * (s2.y - s0.y) - (s1.y - s0.y) * (s2.x - s0.x);
    if (sigma == 0) {
        ++fb.t->degenerate_skipped;  // edge-on: no reliable surface sample
        return;
    }
    const bool front = sigma > 0;
    if (cfg.cull == CullMode::CullBack && !front) return;
    if (cfg.cull == CullMode::CullFront && front) return;
    if (!front) {
        std::swap(s1, s2);  // canonical positive orientation for the fill rule
        sigma = -sigma;
    }

    const int w = fb.t->width, h = fb.t->height;
    const double min_x = std::min({s0.x, s1.x, s2.x});
    const double max_x = std::max({s0.x, s1.x, s2.x});
    const double min_y = std::min({s0.y, s1.y, s2.y});
    const double max_y = std::max({s0.y, s1.y, s2.y});
    const int ix0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
    const int ix1 = std::min(w - 1, static_cast<int>(std::floor(max_x - 0.5)));
    const int iy0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
    const int iy1 = std::min(h - 1, static_cast<int>(std::floor(max_y - 0.5)));
    if (ix0 > ix1 || iy0 > iy1) return;

    const bool tl12 = is_top_left(s1, s2);
    const bool tl20 = is_top_left(s2, s0);
    const bool tl01 = is_top_left(s0, s1);
    const bool flat = s0.depth == s1.depth && s1.depth == s2.depth;
    const double inv_sigma = 1.0 / sigma;

    for (int j = iy0; j <= iy1; ++j) {
        const double py = j + 0.5;
        for (int i = ix0; i <= ix1; ++i) {
            const double px = i + 0.5;
            const double w0 = orient(s1, s2, px, py);
            if (!edge_admits(w0, tl12)) continue;
            const double w1 = orient(s2, s0, px, py);
            if (!edge_admits(w1, tl20)) continue;
            const double w2 = orient(s0, s1, px, py);
            if (!edge_admits(w2, tl01)) continue;
            const double d =
                flat ? s0.depth : (w0 * s0.depth + w1 * s1.depth + w2 * s2.depth) * inv_sigma;
            fb.submit(i, j, d, flat_normal, id, key);
        }
    }
}

void raster_line(Framebuffer &fb, ScreenVertex s0, ScreenVertex s1, const Vec3 &n,
                 std::uint32_t id, std::uint64_t key) {
    if (!finite_screen(s0) || !finite_screen(s1)) {
        ++fb.t->degenerate_skipped;
        return;
    }
    const int w = fb.t->width, h = fb.t->height;
    auto plot = [&](double x, double y, double d) {
        const int i = static_cast<int>(std::floor(x));
        const int j = static_cast<int>(std::floor(y));
        if (i < 0 || i >= w || j < 0 || j >= h) return;
        fb.submit(i, j, d, n, id, key);
    };

    const double dx = s1.x - s0.x, dy = s1.y - s0.y;
    if (dx == 0 && dy == 0) {
        plot(s0.x, s0.y, std::min(s0.depth, s1.depth));
        return;
    }
    if (std::abs(dx) >= std::abs(dy)) {
        if (s0.x > s1.x) std::swap(s0, s1);
        const int i0 = std::max(0, static_cast<int>(std::ceil(s0.x - 0.5)));
        const int i1 = std::min(w - 1, static_cast<int>(std::floor(s1.x - 0.5)));
        for (int i = i0; i <= i1; ++i) {
            const double t = (i + 0.5 - s0.x) / (s1.x - s0.x);
            plot(i + 0.5, s0.y + t * (s1.y - s0.y), s0.depth + t * (s1.depth - s0.depth));
        }
    } else {
        if (s0.y > s1.y) std::swap(s0, s1);
        const int j0 = std::max(0, static_cast<int>(std::ceil(s0.y - 0.5)));
        const int j1 = std::min(h - 1, static_cast<int>(std::floor(s1.y - 0.5)));
        for (int j = j0; j <= j1; ++j) {
            const double t = (j + 0.5 - s0.y) / (s1.y - s0.y);
            plot(s0.x + t * (s1.x - s0.x), j + 0.5, s0.depth + t * (s1.depth - s0.depth));
        }
    }
}

}  // namespace

RenderTargets rasterize(std::span<const Mesh> meshes, const OrthoCamera &camera,
                        const RenderConfig &config, std::span<const std::uint8_t> stencil) {
    if (config.width < 1 || config.height < 1)
        throw std::invalid_argument("rasterize: resolution must be at least 1x1");
    if (!camera.is_valid()) throw std::invalid_argument("rasterize: camera basis is not orthonormal");
    if (config.clear_depth < 0 || config.clear_depth > 1)
        throw std::invalid_argument("rasterize: clear_depth outside [0,1]");
    const std::size_t texels = static_cast<std::size_t>(config.width) * config.height;
    if (!stencil.empty() && stencil.size() != texels)
        throw std::invalid_argument("rasterize: stencil size does not match resolution");

    RenderTargets targets;
    targets.width = config.width;
    targets.height = config.height;
    targets.clear_depth = config.clear_depth;
    targets.depth.assign(texels, config.clear_depth);
    targets.coverage.assign(texels, 0);
    if (config.emit_normals) targets.normal.assign(texels, Vec3{});
    if (config.emit_ids) targets.id.assign(texels, 0);

    Framebuffer fb{&targets, &config, stencil, std::vector<std::uint64_t>(texels, ~0ull)};
    const Vec3 facing_camera = -camera.view;  // stand-in normal for lines and points

    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
        const Mesh &mesh = meshes[mi];
        std::uint64_t ordinal = 0;
        auto key_of = [&] { return (static_cast<std::uint64_t>(mi) << 32) | ordinal; };

        for (const auto &tri : mesh.triangles) {
            const Point3 &a = mesh.vertices[tri[0]];
            const Point3 &b = mesh.vertices[tri[1]];
            const Point3 &c = mesh.vertices[tri[2]];
            Vec3 n{};
            if (config.emit_normals) n = triangle_normal(a, b, c).value_or(facing_camera);
            raster_triangle(fb, to_screen(project_vertex(a, camera), config.width, config.height),
                            to_screen(project_vertex(b, camera), config.width, config.height),
                            to_screen(project_vertex(c, camera), config.width, config.height), n,
                            mesh.object_id, key_of(), config);
            ++ordinal;
        }
        for (const auto &line : mesh.lines) {
            raster_line(fb, to_screen(project_vertex(mesh.vertices[line[0]], camera), config.width,
                                      config.height),
                        to_screen(project_vertex(mesh.vertices[line[1]], camera), config.width,
                                  config.height),
                        facing_camera, mesh.object_id, key_of());
            ++ordinal;
        }
        for (const auto pt : mesh.points) {
            const ScreenVertex s = to_screen(project_vertex(mesh.vertices[pt], camera),
                                             config.width, config.height);
            if (!finite_screen(s)) {
                ++targets.degenerate_skipped;
                ++ordinal;
                continue;
            }
            const int i = static_cast<int>(std::floor(s.x));
            const int j = static_cast<int>(std::floor(s.y));
            if (i >= 0 && i < config.width && j >= 0 && j < config.height)
                fb.submit(i, j, s.depth, facing_camera, mesh.object_id, key_of());
            ++ordinal;
        }
    }
    return targets;
}

}  // namespace colfield
