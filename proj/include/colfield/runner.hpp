#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "colfield/particles.hpp"
#include "colfield/scene.hpp"

namespace colfield {

struct RunOptions {
    bool with_oracle = false;
    std::string emit_maps_dir;  // empty: no map dumps
};

struct FrameResult {
    int frame = 0;
    std::vector<std::uint8_t> part_collided;
    std::size_t contact_count = 0;
    std::int64_t detect_ns = 0;
    bool oracle_ran = false;
    bool oracle_collided = false;
    bool oracle_agreed = false;

    bool any_collided() const;
};

struct SequenceSummary {
    int frames = 0;
    int colliding_frames = 0;
    double mean_ns_all = 0.0;
    double mean_ns_colliding = 0.0;   // 0 when no colliding frame
    double mean_ns_clear = 0.0;       // 0 when every frame collided
    int oracle_checked = 0;
    int oracle_agreed = 0;
};

struct SequenceOutput {
    std::vector<FrameResult> frames;
    std::vector<std::vector<CollisionReport>> reports;  // [frame][part]
    SequenceSummary summary;
};

SequenceOutput run_sequence(const SceneDescription &scene, const RunOptions &options);

// Textual report of verdicts and contacts. Contains no timings, so two runs
// of the same scene produce identical bytes.
void write_report(const SequenceOutput &out, const SceneDescription &scene, std::ostream &os);

struct ParticleRunResult {
    int steps = 0;
    std::uint64_t spawned = 0;
    std::uint64_t bounces = 0;
    std::uint64_t alive = 0;
    std::uint64_t fields_built = 0;
    std::vector<Particle> particles;
};

ParticleRunResult run_particles(const SceneDescription &scene, int steps);

struct BenchRow {
    int frame = 0;
    std::string part;
    std::string phase;  // object_field, environment_field, compare, oracle
    int samples = 0;
    double mean_ns = 0.0;
    double stddev_ns = 0.0;
};

std::vector<BenchRow> bench(const SceneDescription &scene, int repetitions, bool with_oracle);
void write_bench_csv(const std::vector<BenchRow> &rows, std::ostream &os);
void write_bench_table(const std::vector<BenchRow> &rows, std::ostream &os);

}  // namespace colfield
