#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "colfield/pgm.hpp"
#include "colfield/runner.hpp"

namespace {

struct Overrides {
    double tolerance = -1.0;  // negative: keep the scene's value
    bool two_boundary = false;
    bool stencil = false;
    std::string resolution;
};

void add_override_flags(CLI::App *cmd, Overrides &ov) {
    cmd->add_option("--tolerance", ov.tolerance, "contact tolerance in world units");
    cmd->add_flag("--two-boundary", ov.two_boundary, "require the environment between both object surfaces");
    cmd->add_flag("--stencil", ov.stencil, "restrict the environment pass to object-covered texels");
    cmd->add_option("--resolution", ov.resolution, "field resolution override, WxH");
}

void apply_overrides(colfield::SceneDescription &scene, const Overrides &ov) {
    if (ov.tolerance >= 0) scene.detection.tolerance = ov.tolerance;
    if (ov.two_boundary) scene.detection.two_boundary = true;
    if (ov.stencil) scene.detection.stencil = true;
    if (!ov.resolution.empty()) {
        const auto x = ov.resolution.find('x');
        if (x == std::string::npos)
            throw std::runtime_error("--resolution expects WxH, e.g. 256x256");
        const int w = std::stoi(ov.resolution.substr(0, x));
        const int h = std::stoi(ov.resolution.substr(x + 1));
        if (w < 1 || w > 8192 || h < 1 || h > 8192)
            throw std::runtime_error("--resolution outside 1..8192");
        for (auto &part : scene.parts) {
            part.volume.width = w;
            part.volume.height = h;
        }
    }
}

int exit_code_for(const colfield::SequenceOutput &out) {
    for (const auto &fr : out.frames)
        if (fr.any_collided()) return 1;
    return 0;
}

void emit_report(const colfield::SequenceOutput &out, const colfield::SceneDescription &scene,
                 const std::string &report_path) {
    std::ostringstream text;
    colfield::write_report(out, scene, text);
    std::cout << text.str();
    if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open report file: " + report_path);
        f << text.str();
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"height-field collision detector"};
    app.require_subcommand(1);

    std::string scene_path, report_path, emit_maps_dir, csv_path, out_path, field_name = "object";
    Overrides ov;
    bool with_oracle = false;
    int steps = -1, reps = 3, frame = 0;

    CLI::App *cmd_detect = app.add_subcommand("detect", "single-shot detection at frame 0");
    cmd_detect->add_option("scene", scene_path)->required();
    cmd_detect->add_flag("--oracle", with_oracle, "also run the exact oracle and report agreement");
    cmd_detect->add_option("--report", report_path, "also write the report to this file");
    add_override_flags(cmd_detect, ov);

    CLI::App *cmd_sequence = app.add_subcommand("sequence", "run every frame of the scene");
    cmd_sequence->add_option("scene", scene_path)->required();
    cmd_sequence->add_flag("--oracle", with_oracle);
    cmd_sequence->add_option("--emit-maps", emit_maps_dir, "dump height fields per frame into this directory");
    cmd_sequence->add_option("--report", report_path);
    add_override_flags(cmd_sequence, ov);

    CLI::App *cmd_particles = app.add_subcommand("particles", "run the particle simulation");
    cmd_particles->add_option("scene", scene_path)->required();
    cmd_particles->add_option("--steps", steps, "number of steps (default: the scene's frame count)");

    CLI::App *cmd_bench = app.add_subcommand("bench", "time each detection phase");
    cmd_bench->add_option("scene", scene_path)->required();
    cmd_bench->add_option("--reps", reps, "repetitions per measurement");
    cmd_bench->add_flag("--oracle", with_oracle);
    cmd_bench->add_option("--csv", csv_path, "write the per-phase table as CSV");
    add_override_flags(cmd_bench, ov);

    CLI::App *cmd_dump = app.add_subcommand("dump", "write one height field as a 16-bit PGM");
    cmd_dump->add_option("scene", scene_path)->required();
    cmd_dump->add_option("--frame", frame, "frame to pose the scene at");
    cmd_dump->add_option("--field", field_name, "object, object-back, or env");
    cmd_dump->add_option("--out", out_path, "output path (default field.pgm)");
    add_override_flags(cmd_dump, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        // --help lands here with a zero "exit code"; real usage errors become 2.
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        colfield::SceneDescription scene = colfield::parse_scene_file(scene_path);
        apply_overrides(scene, ov);

        if (cmd_detect->parsed()) {
            scene.frame_count = 1;
            colfield::RunOptions options;
            options.with_oracle = with_oracle;
            const auto out = colfield::run_sequence(scene, options);
            emit_report(out, scene, report_path);
            return exit_code_for(out);
        }

        if (cmd_sequence->parsed()) {
            colfield::RunOptions options;
            options.with_oracle = with_oracle;
            options.emit_maps_dir = emit_maps_dir;
            const auto out = colfield::run_sequence(scene, options);
            emit_report(out, scene, report_path);
            std::cerr << "mean detection ns: all " << out.summary.mean_ns_all << ", colliding "
                      << out.summary.mean_ns_colliding << ", clear " << out.summary.mean_ns_clear
                      << "\n";
            return exit_code_for(out);
        }

        if (cmd_particles->parsed()) {
            const int n = steps >= 0 ? steps : scene.frame_count;
            const auto result = colfield::run_particles(scene, n);
            std::cout << "steps " << result.steps << "\nspawned " << result.spawned << "\nbounces "
                      << result.bounces << "\nalive " << result.alive << "\nfields_built "
                      << result.fields_built << "\n";
            return 0;
        }

        if (cmd_bench->parsed()) {
            const auto rows = colfield::bench(scene, reps, with_oracle);
            colfield::write_bench_table(rows, std::cout);
            if (!csv_path.empty()) {
                std::ofstream f(csv_path, std::ios::binary);
                if (!f) throw std::runtime_error("cannot open CSV file: " + csv_path);
                colfield::write_bench_csv(rows, f);
            }
            return 0;
        }

        if (cmd_dump->parsed()) {
            if (scene.parts.empty()) throw std::runtime_error("scene has no object to dump");
            const auto &part = scene.parts.front();
            const colfield::RigidTransform pose = part.track.sample(frame);
            const colfield::DetectionVolume vol = colfield::volume_at(part.volume, pose);
            colfield::HeightField field;
            if (field_name == "object") {
                field = colfield::build_object_field(colfield::apply_transform(part.mesh, pose), vol);
            } else if (field_name == "object-back") {
                field = colfield::build_object_back_field(colfield::apply_transform(part.mesh, pose),
                                                          vol);
            } else if (field_name == "env") {
                std::vector<colfield::Mesh> envs;
                for (const auto &env : scene.environment)
                    envs.push_back(env.track.empty()
                                       ? env.mesh
                                       : colfield::apply_transform(env.mesh, env.track.sample(frame)));
                field = colfield::build_environment_field(envs, vol);
            } else {
                throw std::runtime_error("--field must be object, object-back, or env");
            }
            colfield::dump_height_field(field, out_path.empty() ? "field.pgm" : out_path);
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
