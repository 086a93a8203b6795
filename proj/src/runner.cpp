#include "colfield/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "colfield/oracle.hpp"
#include "colfield/pgm.hpp"

namespace colfield {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::vector<Mesh> environment_at(const SceneDescription &scene, int frame) {
    std::vector<Mesh> out;
    out.reserve(scene.environment.size());
    for (const auto &env : scene.environment) {
        if (env.track.empty())
            out.push_back(env.mesh);
        else
            out.push_back(apply_transform(env.mesh, env.track.sample(frame)));
    }
    return out;
}

std::string map_path(const std::string &dir, int frame, std::size_t part, const char *which) {
    std::ostringstream name;
    name << "frame";
    name.fill('0');
    name.width(4);
    name << frame;
    name << "_part" << part << "_" << which << ".pgm";
    return (std::filesystem::path(dir) / name.str()).string();
}

// Per-part object fields, built once and carried across frames. The part is
// rigid and its volume rides along with it, so the field contents never
// change; only the world-space camera does.
struct PartFields {
    bool built = false;
    HeightField front;
    HeightField back;  // two-boundary runs only
};

}  // namespace

bool FrameResult::any_collided() const {
    for (const auto c : part_collided)
        if (c) return true;
    return false;
}

SequenceOutput run_sequence(const SceneDescription &scene, const RunOptions &options) {
    if (scene.parts.empty()) throw std::invalid_argument("run_sequence: scene has no object");
    const bool emit_maps = !options.emit_maps_dir.empty();
    if (emit_maps) std::filesystem::create_directories(options.emit_maps_dir);

    CollisionConfig config;
    config.contact_tolerance = scene.detection.tolerance;
    config.use_stencil = scene.detection.stencil;
    config.max_contacts_reported = scene.detection.max_contacts;

    SequenceOutput out;
    std::vector<PartFields> cache(scene.parts.size());

    for (int frame = 0; frame < scene.frame_count; ++frame) {
        FrameResult fr;
        fr.frame = frame;
        std::vector<CollisionReport> frame_reports;
        const std::vector<Mesh> envs = environment_at(scene, frame);

        for (std::size_t pi = 0; pi < scene.parts.size(); ++pi) {
            const SceneObject &part = scene.parts[pi];
            const RigidTransform pose = part.track.sample(frame);
            const DetectionVolume vol = volume_at(part.volume, pose);
            PartFields &fields = cache[pi];

            const auto t0 = Clock::now();
            if (!fields.built) {
                const Mesh posed = apply_transform(part.mesh, pose);
                fields.front = build_object_field(posed, vol);
                if (scene.detection.two_boundary) fields.back = build_object_back_field(posed, vol);
                fields.built = true;
            } else {
                fields.front.volume = vol;  // same contents, this frame's camera
                if (scene.detection.two_boundary) fields.back.volume = vol;
            }

            std::span<const std::uint8_t> stencil;
            if (config.use_stencil) stencil = fields.front.targets.coverage;
            const HeightField env_field = build_environment_field(envs, vol, true, true, stencil);
            CollisionReport report =
                scene.detection.two_boundary
                    ? compare_two_boundary(fields.front, fields.back, env_field, config)
                    : compare(fields.front, env_field, config);
            fr.detect_ns += ns_since(t0);

            if (emit_maps) {
                dump_height_field(fields.front, map_path(options.emit_maps_dir, frame, pi, "object"));
                if (scene.detection.two_boundary)
                    dump_height_field(fields.back,
                                      map_path(options.emit_maps_dir, frame, pi, "object_back"));
                dump_height_field(env_field, map_path(options.emit_maps_dir, frame, pi, "env"));
            }

            fr.part_collided.push_back(report.collided ? 1 : 0);
            fr.contact_count += report.contact_count;
            frame_reports.push_back(std::move(report));
        }

        if (options.with_oracle) {
            fr.oracle_ran = true;
            for (std::size_t pi = 0; pi < scene.parts.size() && !fr.oracle_collided; ++pi) {
                const Mesh posed =
                    apply_transform(scene.parts[pi].mesh, scene.parts[pi].track.sample(frame));
                for (const Mesh &env : envs) {
                    if (mesh_collide(posed, env).collided) {
                        fr.oracle_collided = true;
                        break;
                    }
                }
            }
            fr.oracle_agreed = fr.oracle_collided == fr.any_collided();
        }

        out.frames.push_back(std::move(fr));
        out.reports.push_back(std::move(frame_reports));
    }

    SequenceSummary &s = out.summary;
    s.frames = scene.frame_count;
    double total = 0, total_hit = 0, total_clear = 0;
    for (const FrameResult &fr : out.frames) {
        total += static_cast<double>(fr.detect_ns);
        if (fr.any_collided()) {
            ++s.colliding_frames;
            total_hit += static_cast<double>(fr.detect_ns);
        } else {
            total_clear += static_cast<double>(fr.detect_ns);
        }
        if (fr.oracle_ran) {
            ++s.oracle_checked;
            if (fr.oracle_agreed) ++s.oracle_agreed;
        }
    }
    if (s.frames > 0) s.mean_ns_all = total / s.frames;
    if (s.colliding_frames > 0) s.mean_ns_colliding = total_hit / s.colliding_frames;
    if (s.frames - s.colliding_frames > 0)
        s.mean_ns_clear = total_clear / (s.frames - s.colliding_frames);
    return out;
}

void write_report(const SequenceOutput &out, const SceneDescription &scene, std::ostream &os) {
    os << "frames " << out.frames.size() << "\n";
    for (std::size_t f = 0; f < out.frames.size(); ++f) {
        const FrameResult &fr = out.frames[f];
        os << "frame " << fr.frame << " collided " << (fr.any_collided() ? 1 : 0) << " contacts "
           << fr.contact_count;
        if (fr.oracle_ran)
            os << " oracle " << (fr.oracle_collided ? 1 : 0) << " agreement "
               << (fr.oracle_agreed ? 1 : 0);
        os << "\n";
        for (std::size_t pi = 0; pi < out.reports[f].size(); ++pi) {
            const CollisionReport &report = out.reports[f][pi];
            os << "part " << pi << " " << scene.parts[pi].name << " collided "
               << (report.collided ? 1 : 0) << " contacts " << report.contact_count << "\n";
            for (const Contact &c : report.contacts) {
                os << "contact " << c.texel_x << " " << c.texel_y << " d_o "
                   << fmt(c.depth_object) << " d_e " << fmt(c.depth_environment) << " id "
                   << c.environment_id;
                if (c.has_normal)
                    os << " normal " << fmt(c.environment_normal.x) << " "
                       << fmt(c.environment_normal.y) << " " << fmt(c.environment_normal.z);
                else
                    os << " normal none";
                os << " point " << fmt(c.world_point.x) << " " << fmt(c.world_point.y) << " "
                   << fmt(c.world_point.z) << "\n";
            }
        }
    }
    int colliding = 0;
    for (const FrameResult &fr : out.frames)
        if (fr.any_collided()) ++colliding;
    os << "summary frames " << out.frames.size() << " colliding " << colliding << "\n";
}

ParticleRunResult run_particles(const SceneDescription &scene, int steps) {
    if (!scene.particles) throw std::invalid_argument("run_particles: scene has no particles section");
    const ParticleSpec &spec = *scene.particles;
    const std::vector<Mesh> envs = environment_at(scene, 0);

    const Vec3 dir = normalized(spec.direction);
    const Vec3 hint = std::abs(dir.y) > 0.9 ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
    const OrthoCamera emit_basis = OrthoCamera::look_along(spec.source, dir, hint, 1, 1, 1);

    std::mt19937_64 rng(spec.seed);
    auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };

    ParticleRunResult result;
    result.steps = steps;
    std::vector<Particle> particles;
    particles.reserve(static_cast<std::size_t>(std::max(spec.count, 0)));
    double acc = 0.0;
    const std::uint64_t builds_before = field_build_count();

    auto emit_one = [&] {
        Particle p;
        p.position = spec.source;
        Vec3 v = dir;
        if (spec.spread > 0) {
            const double jx = (2.0 * uniform() - 1.0) * spec.spread;
            const double jy = (2.0 * uniform() - 1.0) * spec.spread;
            const Vec3 jittered = dir + emit_basis.right * jx + emit_basis.up * jy;
            if (norm(jittered) > 1e-9) v = normalized(jittered);
        }
        p.velocity = v * spec.speed;
        particles.push_back(p);
        ++result.spawned;
    };

    for (int step = 0; step < steps; ++step) {
        if (spec.rate == 0) {
            if (step == 0)
                while (result.spawned < static_cast<std::uint64_t>(std::max(spec.count, 0)))
                    emit_one();
        } else {
            acc += spec.rate;
            while (acc >= 1.0 && result.spawned < static_cast<std::uint64_t>(std::max(spec.count, 0))) {
                emit_one();
                acc -= 1.0;
            }
        }

        StepResult sr;
        if (spec.field_kind == ParticleFieldKind::Single) {
            const ParticleField field =
                build_particle_field(envs, spec.source, dir, spec.field_half_width,
                                     spec.field_half_height, spec.field_depth, spec.field_width,
                                     spec.field_height);
            sr = step_particles(particles, field, scene.dt, spec.acceleration, spec.restitution);
        } else {
            Point3 centroid = spec.source;
            std::size_t alive = 0;
            Vec3 sum{};
            for (const Particle &p : particles)
                if (p.alive) {
                    sum += p.position;
                    ++alive;
                }
            if (alive > 0) centroid = sum / static_cast<double>(alive);
            const CubeField field = build_cube_field(envs, centroid, spec.field_half_extent,
                                                     spec.field_depth, spec.field_width);
            sr = step_particles(particles, field, scene.dt, spec.acceleration, spec.restitution);
        }
        result.bounces += sr.bounces;
    }

    result.fields_built = field_build_count() - builds_before;
    for (const Particle &p : particles)
        if (p.alive) ++result.alive;
    result.particles = std::move(particles);
    return result;
}

std::vector<BenchRow> bench(const SceneDescription &scene, int repetitions, bool with_oracle) {
    if (repetitions < 1) throw std::invalid_argument("bench: repetitions must be at least 1");
    if (scene.parts.empty()) throw std::invalid_argument("bench: scene has no object");

    CollisionConfig config;
    config.contact_tolerance = scene.detection.tolerance;
    config.use_stencil = scene.detection.stencil;
    config.max_contacts_reported = scene.detection.max_contacts;

    struct Cell {
        std::vector<double> samples;
    };
    // phase order fixed for output: object / object_back / environment / compare / oracle
    std::vector<std::string> phases{"object_field"};
    if (scene.detection.two_boundary) phases.push_back("object_back_field");
    phases.push_back("environment_field");
    phases.push_back("compare");
    if (with_oracle) phases.push_back("oracle");

    const std::size_t nparts = scene.parts.size();
    std::vector<Cell> cells(static_cast<std::size_t>(scene.frame_count) * nparts * phases.size());
    auto cell = [&](int frame, std::size_t part, std::size_t phase) -> Cell & {
        return cells[(static_cast<std::size_t>(frame) * nparts + part) * phases.size() + phase];
    };

    for (int rep = 0; rep < repetitions; ++rep) {
        for (int frame = 0; frame < scene.frame_count; ++frame) {
            const std::vector<Mesh> envs = environment_at(scene, frame);
            for (std::size_t pi = 0; pi < nparts; ++pi) {
                const SceneObject &part = scene.parts[pi];
                const RigidTransform pose = part.track.sample(frame);
                const DetectionVolume vol = volume_at(part.volume, pose);
                const Mesh posed = apply_transform(part.mesh, pose);
                std::size_t phase = 0;

                auto t0 = Clock::now();
                const HeightField front = build_object_field(posed, vol);
                cell(frame, pi, phase++).samples.push_back(static_cast<double>(ns_since(t0)));

                HeightField back;
                if (scene.detection.two_boundary) {
                    t0 = Clock::now();
                    back = build_object_back_field(posed, vol);
                    cell(frame, pi, phase++).samples.push_back(static_cast<double>(ns_since(t0)));
                }

                std::span<const std::uint8_t> stencil;
                if (config.use_stencil) stencil = front.targets.coverage;
                t0 = Clock::now();
                const HeightField env_field = build_environment_field(envs, vol, true, true, stencil);
                cell(frame, pi, phase++).samples.push_back(static_cast<double>(ns_since(t0)));

                t0 = Clock::now();
                if (scene.detection.two_boundary)
                    compare_two_boundary(front, back, env_field, config);
                else
                    compare(front, env_field, config);
                cell(frame, pi, phase++).samples.push_back(static_cast<double>(ns_since(t0)));

                if (with_oracle) {
                    t0 = Clock::now();
                    for (const Mesh &env : envs)
                        if (mesh_collide(posed, env).collided) break;
                    cell(frame, pi, phase++).samples.push_back(static_cast<double>(ns_since(t0)));
                }
            }
        }
    }

    std::vector<BenchRow> rows;
    rows.reserve(cells.size());
    for (int frame = 0; frame < scene.frame_count; ++frame) {
        for (std::size_t pi = 0; pi < nparts; ++pi) {
            for (std::size_t ph = 0; ph < phases.size(); ++ph) {
                const auto &samples = cell(frame, pi, ph).samples;
                BenchRow row;
                row.frame = frame;
                row.part = scene.parts[pi].name;
                row.phase = phases[ph];
                row.samples = static_cast<int>(samples.size());
                double mean = 0;
                for (const double s : samples) mean += s;
                if (!samples.empty()) mean /= static_cast<double>(samples.size());
                row.mean_ns = mean;
                if (samples.size() > 1) {
                    double var = 0;
                    for (const double s : samples) var += (s - mean) * (s - mean);
                    row.stddev_ns = std::sqrt(var / static_cast<double>(samples.size() - 1));
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_bench_csv(const std::vector<BenchRow> &rows, std::ostream &os) {
    os << "frame,part,phase,samples,mean_ns,stddev_ns\n";
    for (const BenchRow &r : rows)
        os << r.frame << "," << r.part << "," << r.phase << "," << r.samples << ","
           << fmt(r.mean_ns) << "," << fmt(r.stddev_ns) << "\n";
}

void write_bench_table(const std::vector<BenchRow> &rows, std::ostream &os) {
    os << "frame  part            phase               samples  mean_ns      stddev_ns\n";
    for (const BenchRow &r : rows) {
        std::ostringstream line;
        line << r.frame;
        std::string s = line.str();
        s.resize(7, ' ');
        std::string part = r.part;
        part.resize(16, ' ');
        std::string phase = r.phase;
        phase.resize(20, ' ');
        std::string samples = std::to_string(r.samples);
        samples.resize(9, ' ');
        std::string mean = fmt(r.mean_ns);
        mean.resize(13, ' ');
        os << s << part << phase << samples << mean << fmt(r.stddev_ns) << "\n";
    }
}

}  // namespace colfield
