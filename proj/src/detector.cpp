#include "colfield/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace colfield {

namespace {

bool same_camera(const OrthoCamera &a, const OrthoCamera &b) {
    return a.origin == b.origin && a.view == b.view && a.up == b.up && a.right == b.right &&
           a.half_width == b.half_width && a.half_height == b.half_height &&
           a.depth_range == b.depth_range;
}

bool same_volume(const DetectionVolume &a, const DetectionVolume &b) {
    return a.width == b.width && a.height == b.height && same_camera(a.camera, b.camera);
}

void require_same_volume(const DetectionVolume &a, const DetectionVolume &b, const char *op) {
    if (!same_volume(a, b))
        throw std::invalid_argument(std::string(op) + ": height fields use different volumes");
}

void require_kind(const HeightField &field, FieldKind kind, const char *op) {
    if (field.kind != kind)
        throw std::invalid_argument(std::string(op) + ": height field has the wrong role");
}

RenderConfig field_config(const DetectionVolume &volume, FieldKind kind, bool emit_normals,
                          bool emit_ids) {
    RenderConfig cfg;
    cfg.width = volume.width;
    cfg.height = volume.height;
    cfg.emit_normals = emit_normals;
    cfg.emit_ids = emit_ids;
    switch (kind) {
        case FieldKind::ObjectFront:
            // keep the surface facing away from the camera, farthest sample wins
            cfg.cull = CullMode::CullFront;
            cfg.depth_test = DepthTest::KeepGreater;
            cfg.clear_depth = 0.0;
            break;
        case FieldKind::ObjectBack:
        case FieldKind::Environment:
            cfg.cull = CullMode::CullBack;
            cfg.depth_test = DepthTest::KeepLess;
            cfg.clear_depth = 1.0;
            break;
    }
    return cfg;
}

void append_contact(CollisionReport &report, const HeightField &environment,
                    const DetectionVolume &volume, const CollisionConfig &config, int i, int j,
                    double d_o, double d_e) {
    ++report.contact_count;
    if (report.contacts.size() >= config.max_contacts_reported) return;
    Contact c;
    c.texel_x = i;
    c.texel_y = j;
    c.depth_object = d_o;
    c.depth_environment = d_e;
    c.world_point = texel_world_point(volume, i, j, d_e);
    const std::size_t idx = environment.targets.index(i, j);
    if (!environment.targets.normal.empty()) {
        c.has_normal = true;
        c.environment_normal = environment.targets.normal[idx];
    }
    if (!environment.targets.id.empty()) c.environment_id = environment.targets.id[idx];
    report.contacts.push_back(c);
}

}  // namespace

HeightField build_object_field(const Mesh &object, const DetectionVolume &volume) {
    if (!volume.is_valid()) throw std::invalid_argument("build_object_field: invalid volume");
    const Mesh *one = &object;
    return {rasterize(std::span<const Mesh>(one, 1), volume.camera,
                      field_config(volume, FieldKind::ObjectFront, false, false)),
            volume, FieldKind::ObjectFront};
}

HeightField build_object_back_field(const Mesh &object, const DetectionVolume &volume) {
    if (!volume.is_valid()) throw std::invalid_argument("build_object_back_field: invalid volume");
    const Mesh *one = &object;
    return {rasterize(std::span<const Mesh>(one, 1), volume.camera,
                      field_config(volume, FieldKind::ObjectBack, false, false)),
            volume, FieldKind::ObjectBack};
}

HeightField build_environment_field(std::span<const Mesh> environment, const DetectionVolume &volume,
                                    bool emit_normals, bool emit_ids,
                                    std::span<const std::uint8_t> stencil) {
    if (!volume.is_valid()) throw std::invalid_argument("build_environment_field: invalid volume");
    return {rasterize(environment, volume.camera,
                      field_config(volume, FieldKind::Environment, emit_normals, emit_ids), stencil),
            volume, FieldKind::Environment};
}

CollisionReport compare(const HeightField &object_front, const HeightField &environment,
                        const CollisionConfig &config) {
    require_same_volume(object_front.volume, environment.volume, "compare");
    require_kind(object_front, FieldKind::ObjectFront, "compare");
    require_kind(environment, FieldKind::Environment, "compare");
    const DetectionVolume &vol = object_front.volume;
    const double tol = config.contact_tolerance / vol.camera.depth_range;

    CollisionReport report;
    for (int j = 0; j < vol.height; ++j) {
        for (int i = 0; i < vol.width; ++i) {
            const std::size_t idx = object_front.targets.index(i, j);
            if (!object_front.targets.coverage[idx] || !environment.targets.coverage[idx]) continue;
            const double d_o = object_front.targets.depth[idx];
            const double d_e = environment.targets.depth[idx];
            if (d_e <= d_o + tol)  // environment surface at or in front of the object surface
                append_contact(report, environment, vol, config, i, j, d_o, d_e);
        }
    }
    report.collided = report.contact_count > 0;
    return report;
}

CollisionReport compare_two_boundary(const HeightField &object_front, const HeightField &object_back,
                                     const HeightField &environment, const CollisionConfig &config) {
    require_same_volume(object_front.volume, object_back.volume, "compare_two_boundary");
    require_same_volume(object_front.volume, environment.volume, "compare_two_boundary");
    require_kind(object_front, FieldKind::ObjectFront, "compare_two_boundary");
    require_kind(object_back, FieldKind::ObjectBack, "compare_two_boundary");
    require_kind(environment, FieldKind::Environment, "compare_two_boundary");
    const DetectionVolume &vol = object_front.volume;
    const double tol = config.contact_tolerance / vol.camera.depth_range;

    CollisionReport report;
    for (int j = 0; j < vol.height; ++j) {
        for (int i = 0; i < vol.width; ++i) {
            const std::size_t idx = object_front.targets.index(i, j);
            if (!object_front.targets.coverage[idx] || !object_back.targets.coverage[idx] ||
                !environment.targets.coverage[idx])
                continue;
            const double d_front = object_front.targets.depth[idx];
            const double d_back = object_back.targets.depth[idx];
            const double d_e = environment.targets.depth[idx];
            if (d_back - tol <= d_e && d_e <= d_front + tol)
                append_contact(report, environment, vol, config, i, j, d_front, d_e);
        }
    }
    report.collided = report.contact_count > 0;
    return report;
}

CollisionReport detect(const Mesh &object, std::span<const Mesh> environment,
                       const DetectionVolume &volume, const CollisionConfig &config,
                       const HeightField *reuse_object_field) {
    HeightField own;
    const HeightField *object_field = reuse_object_field;
    if (object_field) {
        if (object_field->kind != FieldKind::ObjectFront)
            throw std::invalid_argument("detect: reused field is not an object front field");
        require_same_volume(object_field->volume, volume, "detect");
    } else {
        own = build_object_field(object, volume);
        object_field = &own;
    }

    std::span<const std::uint8_t> stencil;
    if (config.use_stencil) stencil = object_field->targets.coverage;
    const HeightField env = build_environment_field(environment, volume, true, true, stencil);
    return compare(*object_field, env, config);
}

std::vector<CollisionReport> detect_multi(std::span<const Part> parts,
                                          std::span<const Mesh> environment,
                                          const CollisionConfig &config) {
    std::vector<CollisionReport> reports;
    reports.reserve(parts.size());
    for (const Part &part : parts)
        reports.push_back(detect(part.mesh, environment, part.volume, config));
    return reports;
}

Point3 texel_world_point(const DetectionVolume &volume, int i, int j, double d) {
    if (i < 0 || i >= volume.width || j < 0 || j >= volume.height)
        throw std::out_of_range("texel_world_point: texel outside the field");
    const OrthoCamera &cam = volume.camera;
    const double ndc_x = (i + 0.5) * 2.0 / volume.width - 1.0;
    const double ndc_y = 1.0 - (j + 0.5) * 2.0 / volume.height;
    return cam.origin + cam.right * (ndc_x * cam.half_width) + cam.up * (ndc_y * cam.half_height) +
           cam.view * (d * cam.depth_range);
}

}  // namespace colfield
