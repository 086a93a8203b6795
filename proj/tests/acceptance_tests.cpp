// Acceptance gate for the collision engine. Each criterion prints one
// PASS/FAIL line; the process exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "colfield/oracle.hpp"
#include "colfield/pgm.hpp"
#include "colfield/runner.hpp"
#include "colfield/scene.hpp"
#include "support.hpp"

using namespace colfield;
using namespace support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the first failure; later checks are skipped once one fires.
struct Gate {
    std::string failure;
    void demand(bool ok, const std::string &what) {
        if (!ok && failure.empty()) failure = what;
    }
    bool intact() const { return failure.empty(); }
};

Mesh translated(const Mesh &mesh, const Vec3 &t) {
    RigidTransform pose;
    pose.translation = t;
    return apply_transform(mesh, pose);
}

Mesh scaled_toward(const Mesh &mesh, const Point3 &center, double factor) {
    Mesh out = mesh;
    for (auto &v : out.vertices) v = center + (v - center) * factor;
    return out;
}

DetectionVolume centered_volume(const Point3 &center, int res) {
    DetectionVolume vol;
    vol.camera = OrthoCamera::look_along(center - Vec3{0, 0, 1}, {0, 0, 1}, {0, 1, 0}, 1, 1, 2);
    vol.width = res;
    vol.height = res;
    return vol;
}

// ---------------------------------------------------------------------------
// 1. A full-footprint wall advances toward a unit cube by exactly one texel
//    worth of depth per frame; the verdict must flip at the frame where the
//    wall depth first reaches the cube's far surface, with zero tolerance.

std::string run_first_contact() {
    Gate gate;
    const auto t0 = Clock::now();

    SceneDescription scene;
    scene.frame_count = 100;
    SceneObject obj;
    obj.name = "object";
    obj.id = 1;
    obj.mesh = make_box({0, 0, 0}, {0.5, 0.5, 0.5}, 1);
    scene.parts.push_back(obj);

    // One texel of the 128-wide, 2-unit-wide footprint is 1/64 world units.
    SceneEnvironment wall;
    wall.id = 2;
    wall.mesh = make_quad({0, 0, 0}, {0, 2, 0}, {2, 0, 0}, 2);
    for (int k = 0; k < 100; ++k) {
        Keyframe key;
        key.frame = k;
        key.translation = {0, 0, (63.0 - k) / 64.0};
        wall.track.add(key);
    }
    scene.environment.push_back(wall);

    // First frame where the wall depth (z+1)/2 reaches the cube face at 0.75.
    int analytic = -1;
    for (int k = 0; k < 100 && analytic < 0; ++k)
        if (((63.0 - k) / 64.0 + 1.0) * 0.5 <= 0.75) analytic = k;
    gate.demand(analytic == 31, "analytic contact frame should be 31");

    const SequenceOutput out = run_sequence(scene, RunOptions{});
    gate.demand(out.frames.size() == 100, "expected 100 frames");
    for (int k = 0; k < 100 && gate.intact(); ++k)
        gate.demand(out.frames[k].any_collided() == (k >= analytic),
                    "frame " + std::to_string(k) + " verdict is off: flip must land on frame " +
                        std::to_string(analytic));

    const double elapsed = seconds_since(t0);
    gate.demand(elapsed < 5.0, "run took " + std::to_string(elapsed) + " s, budget is 5 s");
    return gate.failure;
}

// ---------------------------------------------------------------------------
// 2. An icosphere slides along the view axis into a wall of boxes. Outside a
//    one-texel-diagonal band the detector must agree with the exact oracle:
//    clear when every box is farther than the band, colliding when some box
//    is penetrated deeper than the band.

std::string run_oracle_agreement() {
    Gate gate;
    const auto t0 = Clock::now();

    const int res = 256;
    const double diag = std::sqrt(2.0) * (2.0 / res);
    const double radius = 0.5;
    const Mesh sphere = make_icosphere({0, 0, 0}, radius, 3, 1);
    gate.demand(sphere.triangles.size() == 1280, "icosphere should have 1280 triangles");
    // Shrinking the sphere by one texel diagonal turns "still intersecting"
    // into a penetration witness deeper than the image can blur.
    const Mesh sphere_core = scaled_toward(sphere, {0, 0, 0}, (radius - diag) / radius);

    // Boxes begin behind the sphere along +z and are thick enough that the
    // sphere never pokes out of their far side within the run. Off-path boxes
    // never share shadow texels with the sphere.
    TestRng rng(902);
    std::vector<Mesh> boxes;
    for (int i = 0; i < 10; ++i) {
        const double near_z = (i % 2 == 0) ? 0.5 : 0.9;
        const double thick = rng.uniform(1.3, 1.6);
        Vec3 center{0, 0, near_z + thick * 0.5};
        Vec3 half{rng.uniform(0.15, 0.35), rng.uniform(0.15, 0.35), thick * 0.5};
        if (i >= 6) {
            center.x = (i % 2 ? 1.0 : -1.0) * rng.uniform(0.85, 1.2);
            half.x = rng.uniform(0.05, 0.1);
        } else {
            center.x = rng.uniform(-0.15, 0.15);
            center.y = rng.uniform(-0.15, 0.15);
        }
        boxes.push_back(make_box(center, half, static_cast<std::uint32_t>(2 + i)));
    }

    VolumeSpec spec;
    spec.width = res;
    spec.height = res;

    int deep = 0, clear = 0, band = 0;
    for (int k = 0; k < 200 && gate.intact(); ++k) {
        const double z = -1.6 + 3.0 * k / 199.0;
        const Mesh posed = translated(sphere, {0, 0, z});

        bool any_hit = false, certified_deep = false;
        double min_sep = std::numeric_limits<double>::infinity();
        bool sep_known = true;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            const OracleVerdict v = mesh_collide(posed, boxes[b]);
            if (v.collided) {
                any_hit = true;
                if (!certified_deep)
                    certified_deep =
                        mesh_collide(translated(sphere_core, {0, 0, z}), boxes[b]).collided;
            } else if (v.min_separation_estimate) {
                min_sep = std::min(min_sep, *v.min_separation_estimate);
            } else {
                sep_known = false;
            }
        }

        RigidTransform pose;
        pose.translation = {0, 0, z};
        const bool detected =
            detect(posed, boxes, volume_at(spec, pose), CollisionConfig{}).collided;

        if (any_hit && certified_deep) {
            ++deep;
            gate.demand(detected, "frame " + std::to_string(k) +
                                      ": deep penetration missed by the detector");
        } else if (!any_hit && sep_known && min_sep > diag) {
            ++clear;
            gate.demand(!detected, "frame " + std::to_string(k) +
                                       ": separated scene flagged as colliding");
        } else {
            ++band;
        }
    }

    gate.demand(band <= 20, "band frames exceed 10%: " + std::to_string(band));
    gate.demand(deep >= 20, "too few certified-deep frames: " + std::to_string(deep));
    gate.demand(clear >= 80, "too few certified-clear frames: " + std::to_string(clear));

    const double elapsed = seconds_since(t0);
    gate.demand(elapsed < 60.0, "run took " + std::to_string(elapsed) + " s, budget is 60 s");
    return gate.failure;
}

// ---------------------------------------------------------------------------
// 3. Inclusion semantics: interpenetration and an environment body inside the
//    object both count as collisions; an object enclosed by a room-like shell
//    whose visible wall lies beyond the object's far surface does not.

std::string run_inclusion_semantics() {
    Gate gate;
    const Mesh sphere = make_icosphere({0, 0, 0}, 0.5, 2, 1);
    const DetectionVolume vol = centered_volume({0, 0, 0}, 128);
    const CollisionConfig config;

    // (a) genuinely interpenetrating surfaces
    {
        const Mesh box = make_box({0.4, 0, 0.3}, {0.3, 0.3, 0.3}, 2);
        gate.demand(mesh_collide(sphere, box).collided, "(a) oracle should see the overlap");
        const std::vector<Mesh> envs{box};
        gate.demand(detect(sphere, envs, vol, config).collided,
                    "(a) interpenetrating bodies must collide");
    }

    // (b) a closed box fully inside the object, between the rear plane and
    //     the object's far surface
    {
        const Mesh inner = make_box({0, 0, 0.1}, {0.1, 0.1, 0.1}, 2);
        for (const Point3 &v : inner.vertices)
            gate.demand(point_inside_closed_mesh(v, sphere),
                        "(b) every vertex of the small box must sit inside the object");
        gate.demand(!mesh_collide(sphere, inner).collided,
                    "(b) the surfaces themselves must not touch");
        const std::vector<Mesh> envs{inner};
        gate.demand(detect(sphere, envs, vol, config).collided,
                    "(b) an environment body inside the object must collide");
    }

    // (c) object fully inside a shell whose walls face the enclosed space;
    //     the wall the camera sees sits behind the object's far surface
    {
        Mesh shell = make_box({0, 0, 0}, {0.8, 0.8, 0.8}, 2);
        for (auto &t : shell.triangles) std::swap(t[1], t[2]);
        for (const Point3 &v : sphere.vertices)
            gate.demand(point_inside_closed_mesh(v, shell),
                        "(c) the object must sit strictly inside the shell");
        gate.demand(!mesh_collide(sphere, shell).collided,
                    "(c) the surfaces themselves must not touch");
        const std::vector<Mesh> envs{shell};
        gate.demand(!detect(sphere, envs, vol, config).collided,
                    "(c) full inclusion inside a shell must NOT collide");
    }

    return gate.failure;
}

// ---------------------------------------------------------------------------
// 4. An obstacle between the camera and the whole object trips the
//    single-boundary comparison even though nothing touches; the two-boundary
//    comparison clears it.

std::string run_front_false_positive() {
    Gate gate;
    const Mesh cube = make_box({0, 0, 0}, {0.5, 0.5, 0.5}, 1);
    const Mesh obstacle = make_box({0, 0, -0.75}, {0.1, 0.1, 0.05}, 2);
    const DetectionVolume vol = centered_volume({0, 0, 0}, 128);

    gate.demand(!mesh_collide(cube, obstacle).collided, "the bodies must not actually touch");

    const std::vector<Mesh> envs{obstacle};
    const HeightField front = build_object_field(cube, vol);
    const HeightField back = build_object_back_field(cube, vol);
    const HeightField env = build_environment_field(envs, vol);
    const CollisionConfig config;

    gate.demand(compare(front, env, config).collided,
                "single-boundary comparison must flag the front obstacle");
    gate.demand(!compare_two_boundary(front, back, env, config).collided,
                "two-boundary comparison must clear the front obstacle");
    return gate.failure;
}

// ---------------------------------------------------------------------------
// 5. Away from silhouettes, every covered texel's depth must match an exact
//    ray cast against the same mesh to 1e-6 of the depth range, for both the
//    object-front and environment field variants.

std::string run_field_raycast_equivalence() {
    Gate gate;
    TestRng rng(905);
    const int res = 128;
    const double range = 2.0;

    std::size_t checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20 && gate.intact(); ++trial) {
        const Point3 center{rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15),
                            1.0 + rng.uniform(-0.15, 0.15)};
        const Vec3 radii{rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8)};
        const Mesh mesh = make_ellipsoid(center, radii, 2, 5);

        DetectionVolume vol;
        vol.camera = OrthoCamera::look_along({0, 0, 0}, {0, 0, 1}, {0, 1, 0}, 1, 1, range);
        vol.width = res;
        vol.height = res;

        const HeightField object_front = build_object_field(mesh, vol);
        const std::vector<Mesh> envs{mesh};
        const HeightField environment = build_environment_field(envs, vol);

        struct Variant {
            const HeightField *field;
            RayFacing facing;
            RaySelect select;
        };
        const Variant variants[] = {{&object_front, RayFacing::BackFacing, RaySelect::Farthest},
                                    {&environment, RayFacing::FrontFacing, RaySelect::Nearest}};

        for (const Variant &variant : variants) {
            const RenderTargets &rt = variant.field->targets;
            for (int j = 1; j < res - 1 && gate.intact(); ++j) {
                for (int i = 1; i < res - 1; ++i) {
                    bool interior = true;
                    for (int dj = -1; dj <= 1 && interior; ++dj)
                        for (int di = -1; di <= 1; ++di)
                            if (!rt.covered(i + di, j + dj)) {
                                interior = false;
                                break;
                            }
                    if (!interior) continue;

                    const Ray ray{texel_world_point(vol, i, j, 0.0), {0, 0, 1}};
                    const auto hit =
                        raycast_surface(mesh, ray, variant.facing, variant.select, range);
                    if (!hit) {
                        gate.demand(false, "interior texel without a ray hit");
                        break;
                    }
                    const double err =
                        std::abs(rt.depth[rt.index(i, j)] - hit->t / range);
                    worst = std::max(worst, err);
                    ++checked;
                }
            }
        }
    }

    gate.demand(checked > 20000, "too few off-silhouette texels: " + std::to_string(checked));
    gate.demand(worst <= 1e-6,
                "field and ray cast disagree by " + std::to_string(worst) + " of the range");
    return gate.failure;
}

// ---------------------------------------------------------------------------
// 6. The stencil is a pure optimization and every run is deterministic: same
//    scene, same bytes, for reports and PGM dumps alike.

SceneDescription random_small_scene(TestRng &rng) {
    SceneDescription scene;
    scene.frame_count = rng.uniform_int(1, 2);

    SceneObject obj;
    obj.name = "object";
    obj.id = 1;
    const Vec3 size{rng.uniform(0.2, 0.45), rng.uniform(0.2, 0.45), rng.uniform(0.2, 0.45)};
    if (rng.uniform01() < 0.5)
        obj.mesh = make_box({0, 0, 0}, size, 1);
    else
        obj.mesh = make_ellipsoid({0, 0, 0}, size, 2, 1);
    Keyframe start;
    start.frame = 0;
    start.translation = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    obj.track.add(start);
    scene.parts.push_back(obj);

    const int env_count = rng.uniform_int(1, 3);
    for (int e = 0; e < env_count; ++e) {
        SceneEnvironment env;
        env.id = static_cast<std::uint32_t>(2 + e);
        env.mesh = make_box({rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.7, 0.8)},
                            {rng.uniform(0.1, 0.35), rng.uniform(0.1, 0.35), rng.uniform(0.1, 0.35)},
                            env.id);
        if (scene.frame_count > 1) {
            Keyframe a, b;
            a.frame = 0;
            b.frame = 1;
            b.translation = {rng.uniform(-0.1, 0.1), 0, rng.uniform(-0.1, 0.1)};
            env.track.add(a);
            env.track.add(b);
        }
        scene.environment.push_back(env);
    }

    scene.detection.tolerance = rng.uniform01() < 0.5 ? 0.0 : 0.05;
    scene.detection.two_boundary = rng.uniform01() < 0.5;
    return scene;
}

std::string run_stencil_and_determinism() {
    Gate gate;
    TestRng rng(906);
    const std::string root = make_temp_dir("accept");
    int scenes_with_contacts = 0;

    for (int s = 0; s < 50 && gate.intact(); ++s) {
        SceneDescription scene = random_small_scene(rng);
        const std::string tag = "scene " + std::to_string(s);

        RunOptions plain;
        plain.emit_maps_dir = root + "/a" + std::to_string(s);
        RunOptions again;
        again.emit_maps_dir = root + "/b" + std::to_string(s);

        scene.detection.stencil = false;
        const SequenceOutput first = run_sequence(scene, plain);
        std::ostringstream report_first;
        write_report(first, scene, report_first);

        scene.detection.stencil = true;
        std::ostringstream report_masked;
        write_report(run_sequence(scene, RunOptions{}), scene, report_masked);
        gate.demand(report_masked.str() == report_first.str(),
                    tag + ": stencil changed the report");

        scene.detection.stencil = false;
        std::ostringstream report_again;
        write_report(run_sequence(scene, again), scene, report_again);
        gate.demand(report_again.str() == report_first.str(), tag + ": rerun changed the report");

        std::size_t maps = 0;
        for (const auto &entry : std::filesystem::directory_iterator(plain.emit_maps_dir)) {
            const std::string name = entry.path().filename().string();
            gate.demand(read_file(plain.emit_maps_dir + "/" + name) ==
                            read_file(again.emit_maps_dir + "/" + name),
                        tag + ": rerun changed map " + name);
            ++maps;
        }
        const std::size_t fields = scene.detection.two_boundary ? 3 : 2;
        gate.demand(maps == fields * static_cast<std::size_t>(scene.frame_count),
                    tag + ": unexpected map count");

        for (const auto &fr : first.frames)
            if (fr.contact_count > 0) {
                ++scenes_with_contacts;
                break;
            }
    }

    gate.demand(scenes_with_contacts >= 10,
                "construction too timid: only " + std::to_string(scenes_with_contacts) +
                    " scenes produced contacts");
    std::filesystem::remove_all(root);
    return gate.failure;
}

// ---------------------------------------------------------------------------
// 7. Ten thousand particles rain on a full-footprint plane with elastic
//    bounces for 500 steps. None may end beyond the plane by more than one
//    step of travel, every bounce preserves speed, and stepping builds
//    exactly one field per step (six for the cube variant).

SceneDescription particle_rain_scene(int count) {
    SceneDescription scene;
    scene.frame_count = 1;
    scene.dt = 0.01;

    SceneEnvironment plane;
    plane.id = 2;
    plane.mesh = make_quad({0, 0, 0}, {3, 0, 0}, {0, 3, 0}, 2);  // normal +z, toward the rain
    scene.environment.push_back(plane);

    ParticleSpec ps;
    ps.count = count;
    ps.source = {0, 0, 1};
    ps.direction = {0, 0, -1};
    ps.speed = 1.0;
    ps.spread = 0.25;
    ps.seed = 11;
    ps.restitution = 1.0;
    ps.field_half_width = 2.0;
    ps.field_half_height = 2.0;
    ps.field_depth = 2.0;
    ps.field_width = 256;
    ps.field_height = 256;
    scene.particles = ps;
    return scene;
}

std::string run_particle_suite() {
    Gate gate;
    const auto t0 = Clock::now();

    const SceneDescription scene = particle_rain_scene(10000);
    const ParticleRunResult result = run_particles(scene, 500);

    gate.demand(result.spawned == 10000, "all particles must spawn on step 0");
    gate.demand(result.alive == 10000, "no particle should die");
    gate.demand(result.fields_built == 500, "exactly one field build per step, got " +
                                                std::to_string(result.fields_built));
    gate.demand(result.bounces == 10000, "each particle must bounce exactly once, got " +
                                             std::to_string(result.bounces));

    const double step_travel = scene.particles->speed * scene.dt;
    for (const Particle &p : result.particles) {
        if (p.position.z < -step_travel - 1e-12) {
            gate.demand(false, "a particle ended beyond the plane at z = " +
                                   std::to_string(p.position.z));
            break;
        }
        const double speed = norm(p.velocity);
        if (std::abs(speed - 1.0) > 1e-9) {
            gate.demand(false, "a bounce changed the speed to " + std::to_string(speed));
            break;
        }
    }

    // Builds per step do not depend on the particle count.
    const ParticleRunResult sparse = run_particles(particle_rain_scene(17), 500);
    gate.demand(sparse.fields_built == 500, "build count must not depend on particle count");

    SceneDescription cubed = particle_rain_scene(10000);
    cubed.particles->field_kind = ParticleFieldKind::Cube;
    cubed.particles->field_half_extent = 2.0;
    const ParticleRunResult cube_run = run_particles(cubed, 50);
    gate.demand(cube_run.fields_built == 300, "cube variant must build six fields per step");

    const double elapsed = seconds_since(t0);
    gate.demand(elapsed < 30.0, "run took " + std::to_string(elapsed) + " s, budget is 30 s");
    return gate.failure;
}

// ---------------------------------------------------------------------------
// 8. Translating object, environment, and volume together by whole texels
//    must not change any report bit. All coordinates live on a dyadic
//    lattice so the shifted arithmetic is exact.

struct LatticeScene {
    Vec3 obj_half;
    Vec3 obj_t0, obj_t1;
    int env_count = 0;
    Vec3 env_half[2];
    Vec3 env_t[2];
    double tolerance = 0.0;
    bool two_boundary = false;
};

SceneDescription build_lattice_scene(const LatticeScene &ls, const Vec3 &shift) {
    SceneDescription scene;
    scene.frame_count = 2;
    scene.detection.tolerance = ls.tolerance;
    scene.detection.two_boundary = ls.two_boundary;

    SceneObject obj;
    obj.name = "object";
    obj.id = 1;
    obj.mesh = make_box({0, 0, 0}, ls.obj_half, 1);
    Keyframe k0, k1;
    k0.frame = 0;
    k0.translation = ls.obj_t0 + shift;
    k1.frame = 1;
    k1.translation = ls.obj_t1 + shift;
    obj.track.add(k0);
    obj.track.add(k1);
    scene.parts.push_back(obj);

    for (int e = 0; e < ls.env_count; ++e) {
        SceneEnvironment env;
        env.id = static_cast<std::uint32_t>(2 + e);
        env.mesh = make_box({0, 0, 0}, ls.env_half[e], env.id);
        Keyframe k;
        k.frame = 0;
        k.translation = ls.env_t[e] + shift;
        env.track.add(k);
        scene.environment.push_back(env);
    }
    return scene;
}

std::string run_translation_invariance() {
    Gate gate;
    TestRng rng(908);
    const double texel = 2.0 / 128.0;
    auto snap = [](double v) { return std::round(v * 1024.0) / 1024.0; };

    int scenes_with_contacts = 0;
    for (int s = 0; s < 20 && gate.intact(); ++s) {
        LatticeScene ls;
        ls.obj_half = {snap(rng.uniform(0.2, 0.45)), snap(rng.uniform(0.2, 0.45)),
                       snap(rng.uniform(0.2, 0.45))};
        ls.obj_t0 = {snap(rng.uniform(-0.2, 0.2)), snap(rng.uniform(-0.2, 0.2)),
                     snap(rng.uniform(-0.2, 0.2))};
        ls.obj_t1 = {snap(rng.uniform(-0.2, 0.2)), snap(rng.uniform(-0.2, 0.2)),
                     snap(rng.uniform(-0.2, 0.2))};
        ls.env_count = rng.uniform_int(1, 2);
        for (int e = 0; e < ls.env_count; ++e) {
            ls.env_half[e] = {snap(rng.uniform(0.1, 0.4)), snap(rng.uniform(0.1, 0.4)),
                              snap(rng.uniform(0.1, 0.4))};
            ls.env_t[e] = {snap(rng.uniform(-0.5, 0.5)), snap(rng.uniform(-0.5, 0.5)),
                           snap(rng.uniform(-0.4, 0.8))};
        }
        ls.tolerance = rng.uniform01() < 0.5 ? 0.0 : 0.03125;
        ls.two_boundary = rng.uniform01() < 0.5;

        const Vec3 shift{rng.uniform_int(-16, 16) * texel, rng.uniform_int(-16, 16) * texel,
                         rng.uniform_int(-16, 16) * texel};

        const SceneDescription base = build_lattice_scene(ls, {0, 0, 0});
        const SceneDescription moved = build_lattice_scene(ls, shift);
        const SequenceOutput out_base = run_sequence(base, RunOptions{});
        SequenceOutput out_moved = run_sequence(moved, RunOptions{});

        const std::string tag = "scene " + std::to_string(s);
        gate.demand(out_base.frames.size() == out_moved.frames.size(), tag + ": frame counts");
        for (std::size_t f = 0; f < out_base.frames.size() && gate.intact(); ++f) {
            const auto &ra = out_base.reports[f][0];
            auto &rb = out_moved.reports[f][0];
            gate.demand(ra.collided == rb.collided, tag + ": verdict moved");
            gate.demand(ra.contact_count == rb.contact_count, tag + ": contact count moved");
            gate.demand(ra.contacts.size() == rb.contacts.size(), tag + ": contact list moved");
            for (std::size_t c = 0; c < ra.contacts.size() && gate.intact(); ++c) {
                const Contact &ca = ra.contacts[c];
                Contact &cb = rb.contacts[c];
                gate.demand(ca.texel_x == cb.texel_x && ca.texel_y == cb.texel_y,
                            tag + ": contact texel moved");
                gate.demand(ca.depth_object == cb.depth_object &&
                                ca.depth_environment == cb.depth_environment,
                            tag + ": contact depths moved");
                gate.demand(ca.environment_id == cb.environment_id, tag + ": contact id moved");
                gate.demand(ca.has_normal == cb.has_normal &&
                                ca.environment_normal == cb.environment_normal,
                            tag + ": contact normal moved");
                // The shift is dyadic and in range, so removing it is exact.
                cb.world_point = cb.world_point - shift;
                gate.demand(ca.world_point == cb.world_point, tag + ": world point moved");
            }
            if (ra.contact_count > 0 && f == 0) ++scenes_with_contacts;
        }

        // With world points de-shifted the whole report must match bytewise.
        std::ostringstream text_base, text_moved;
        write_report(out_base, base, text_base);
        write_report(out_moved, moved, text_moved);
        gate.demand(text_base.str() == text_moved.str(), tag + ": report bytes moved");
    }

    gate.demand(scenes_with_contacts >= 5,
                "construction too timid: only " + std::to_string(scenes_with_contacts) +
                    " scenes produced contacts");
    return gate.failure;
}

}  // namespace

int main() {
    struct Criterion {
        const char *id;
        const char *title;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria{
        {"A1", "analytic first-contact frame", run_first_contact},
        {"A2", "oracle agreement outside the band", run_oracle_agreement},
        {"A3", "inclusion semantics", run_inclusion_semantics},
        {"A4", "front obstacle false positive", run_front_false_positive},
        {"A5", "field matches ray casts off silhouettes", run_field_raycast_equivalence},
        {"A6", "stencil neutrality and determinism", run_stencil_and_determinism},
        {"A7", "particle plane bounces", run_particle_suite},
        {"A8", "texel-aligned translation invariance", run_translation_invariance},
    };

    int failures = 0;
    for (const Criterion &criterion : criteria) {
        const auto t0 = Clock::now();
        std::string failure;
        try {
            failure = criterion.run();
        } catch (const std::exception &e) {
            failure = std::string("exception: ") + e.what();
        }
        const double elapsed = seconds_since(t0);
        if (failure.empty()) {
            std::printf("PASS %s %s (%.2f s)\n", criterion.id, criterion.title, elapsed);
        } else {
            std::printf("FAIL %s %s: %s (%.2f s)\n", criterion.id, criterion.title,
                        failure.c_str(), elapsed);
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
