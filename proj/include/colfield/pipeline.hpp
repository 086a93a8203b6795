#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colfield/geometry.hpp"

namespace colfield {

// Orthographic view box. Rays travel along `view`; depth 0 sits at `origin`
// and depth 1 at origin + view * depth_range. The basis must be orthonormal
// with right x up == view, so the camera never mirrors the scene.
struct OrthoCamera {
    Point3 origin;
    Vec3 view{0, 0, 1};
    Vec3 up{0, 1, 0};
    Vec3 right{1, 0, 0};
    double half_width = 1.0;
    double half_height = 1.0;
    double depth_range = 1.0;

    bool is_valid(double eps = 1e-9) const;

    // Builds the basis from a view direction and an up hint.
    static OrthoCamera look_along(const Point3 &origin, const Vec3 &view_dir, const Vec3 &up_hint,
                                  double half_width, double half_height, double depth_range);
};

enum class CullMode { CullBack, CullFront, CullNone };
enum class DepthTest { KeepLess, KeepGreater };

struct RenderConfig {
    int width = 0;
    int height = 0;
    CullMode cull = CullMode::CullBack;
    DepthTest depth_test = DepthTest::KeepLess;
    double clear_depth = 1.0;
    bool emit_normals = false;
    bool emit_ids = false;
};

struct ProjectedVertex {
    double ndc_x = 0.0;
    double ndc_y = 0.0;
    double depth = 0.0;
};

// One depth value per texel plus optional per-texel attributes. `coverage`
// tells written texels apart from ones still holding the clear value, which
// matters when clear_depth is a reachable depth.
struct RenderTargets {
    int width = 0;
    int height = 0;
    double clear_depth = 1.0;
    std::vector<double> depth;
    std::vector<std::uint8_t> coverage;
    std::vector<Vec3> normal;       // empty unless emit_normals
    std::vector<std::uint32_t> id;  // empty unless emit_ids
    std::uint64_t degenerate_skipped = 0;

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool covered(int x, int y) const { return coverage[index(x, y)] != 0; }
};

ProjectedVertex project_vertex(const Point3 &p, const OrthoCamera &camera);

// Rasterizes every mesh into a fresh target. Meshes are taken in world space.
// `stencil` (if non-empty) must hold width*height bytes; texels with stencil 0
// are skipped entirely. The result is independent of how the meshes are split
// across the span: ties at equal depth resolve by (mesh index, primitive
// ordinal) so batching never changes the output.
RenderTargets rasterize(std::span<const Mesh> meshes, const OrthoCamera &camera,
                        const RenderConfig &config, std::span<const std::uint8_t> stencil = {});

}  // namespace colfield
