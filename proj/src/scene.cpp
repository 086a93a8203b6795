#include "colfield/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace colfield {

Quat quat_from_axis_angle(const Vec3 &axis, double degrees) {
    const Vec3 u = normalized(axis);
    const double half = degrees * (3.14159265358979323846 / 180.0) * 0.5;
    const double s = std::sin(half);
    return {std::cos(half), u.x * s, u.y * s, u.z * s};
}

Quat slerp(const Quat &a, const Quat &b, double u) {
    Quat q = b;
    double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    if (d < 0) {  // take the short arc
        q = {-b.w, -b.x, -b.y, -b.z};
        d = -d;
    }
    double wa, wb;
    if (d > 1.0 - 1e-10) {
        wa = 1.0 - u;  // nearly identical: fall back to a straight blend
        wb = u;
    } else {
        const double theta = std::acos(std::clamp(d, -1.0, 1.0));
        const double s = std::sin(theta);
        wa = std::sin((1.0 - u) * theta) / s;
        wb = std::sin(u * theta) / s;
    }
    Quat out{wa * a.w + wb * q.w, wa * a.x + wb * q.x, wa * a.y + wb * q.y, wa * a.z + wb * q.z};
    const double n = std::sqrt(out.w * out.w + out.x * out.x + out.y * out.y + out.z * out.z);
    return {out.w / n, out.x / n, out.y / n, out.z / n};
}

Mat3 quat_to_mat3(const Quat &q) {
    const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    const double w = q.w / n, x = q.x / n, y = q.y / n, z = q.z / n;
    Mat3 m;
    m(0, 0) = 1 - 2 * (y * y + z * z);
    m(0, 1) = 2 * (x * y - w * z);
    m(0, 2) = 2 * (x * z + w * y);
    m(1, 0) = 2 * (x * y + w * z);
    m(1, 1) = 1 - 2 * (x * x + z * z);
    m(1, 2) = 2 * (y * z - w * x);
    m(2, 0) = 2 * (x * z - w * y);
    m(2, 1) = 2 * (y * z + w * x);
    m(2, 2) = 1 - 2 * (x * x + y * y);
    return m;
}

void Track::add(const Keyframe &k) {
    const auto pos = std::lower_bound(keys_.begin(), keys_.end(), k.frame,
                                      [](const Keyframe &a, int f) { return a.frame < f; });
    if (pos != keys_.end() && pos->frame == k.frame)
        throw std::invalid_argument("duplicate keyframe at frame " + std::to_string(k.frame));
    keys_.insert(pos, k);
}

namespace {

RigidTransform pose_of(const Keyframe &k) { return {quat_to_mat3(k.rotation), k.translation}; }

}  // namespace

RigidTransform Track::sample(int frame) const {
    if (keys_.empty()) return RigidTransform::identity();
    if (frame <= keys_.front().frame) return pose_of(keys_.front());
    if (frame >= keys_.back().frame) return pose_of(keys_.back());
    const auto after = std::lower_bound(keys_.begin(), keys_.end(), frame,
                                        [](const Keyframe &a, int f) { return a.frame < f; });
    if (after->frame == frame) return pose_of(*after);  // exact hit: no interpolation error
    const Keyframe &k0 = *(after - 1);
    const Keyframe &k1 = *after;
    const double u = static_cast<double>(frame - k0.frame) / (k1.frame - k0.frame);
    return {quat_to_mat3(slerp(k0.rotation, k1.rotation, u)),
            k0.translation + (k1.translation - k0.translation) * u};
}

bool Track::is_static() const {
    if (keys_.size() <= 1) return true;
    const Mat3 first_rot = quat_to_mat3(keys_.front().rotation);
    for (std::size_t i = 1; i < keys_.size(); ++i) {
        if (!(keys_[i].translation == keys_.front().translation)) return false;
        if (!(quat_to_mat3(keys_[i].rotation) == first_rot)) return false;
    }
    return true;
}

DetectionVolume volume_at(const VolumeSpec &spec, const RigidTransform &pose) {
    const Point3 center = pose.apply(spec.center);
    const Vec3 view = pose.rotate(spec.view);
    const Vec3 up = pose.rotate(spec.up);
    const Point3 origin = center - view * (spec.depth * 0.5);  // near plane is the rear face
    return {OrthoCamera::look_along(origin, view, up, spec.half_width, spec.half_height, spec.depth),
            spec.width, spec.height};
}

namespace {

std::vector<std::string> tokenize(const std::string &line) {
    std::vector<std::string> out;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string &tok, int line) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw parse_error(line, "expected a number, got '" + tok + "'");
    return v;
}

long long parse_int(const std::string &tok, int line) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw parse_error(line, "expected an integer, got '" + tok + "'");
    return v;
}

bool parse_flag(const std::string &tok, int line) {
    if (tok == "on" || tok == "true" || tok == "1") return true;
    if (tok == "off" || tok == "false" || tok == "0") return false;
    throw parse_error(line, "expected on/off, got '" + tok + "'");
}

struct LineView {
    const std::vector<std::string> *tokens;
    std::size_t next;
    int line;

    const std::string &take(const char *what) {
        if (next >= tokens->size())
            throw parse_error(line, std::string("missing ") + what);
        return (*tokens)[next++];
    }
    double number(const char *what) { return parse_double(take(what), line); }
    long long integer(const char *what) { return parse_int(take(what), line); }
    Vec3 vec3(const char *what) {
        const double x = number(what), y = number(what), z = number(what);
        return {x, y, z};
    }
    bool flag(const char *what) { return parse_flag(take(what), line); }
    void done() {
        if (next < tokens->size())
            throw parse_error(line, "unexpected trailing token '" + (*tokens)[next] + "'");
    }
    bool exhausted() const { return next >= tokens->size(); }
};

Keyframe parse_keyframe(LineView &args) {
    Keyframe k;
    k.frame = static_cast<int>(args.integer("keyframe frame"));
    const Vec3 t = args.vec3("keyframe position");
    k.translation = t;
    if (!args.exhausted()) {
        if (args.take("axis") != "axis") throw parse_error(args.line, "expected 'axis'");
        const Vec3 axis = args.vec3("rotation axis");
        if (args.take("angle") != "angle") throw parse_error(args.line, "expected 'angle'");
        const double angle = args.number("rotation angle");
        if (norm(axis) <= 1e-12) throw parse_error(args.line, "rotation axis is zero");
        k.rotation = quat_from_axis_angle(axis, angle);
    }
    args.done();
    return k;
}

struct Parser {
    SceneDescription scene;
    std::string base_dir;
    std::unordered_map<std::string, int> part_mesh_line;    // part name -> line of its mesh entry
    std::unordered_map<std::uint32_t, int> env_mesh_line;   // env id -> line of its mesh entry
    bool saw_frames = false;

    SceneObject &ensure_part(const std::string &name) {
        for (auto &p : scene.parts)
            if (p.name == name) return p;
        SceneObject part;
        part.name = name;
        if (name == "object") {
            scene.parts.insert(scene.parts.begin(), part);  // the main body leads
            return scene.parts.front();
        }
        scene.parts.push_back(part);
        return scene.parts.back();
    }

    SceneEnvironment &ensure_env(std::uint32_t id) {
        for (auto &e : scene.environment)
            if (e.id == id) return e;
        SceneEnvironment env;
        env.id = id;
        scene.environment.push_back(env);
        return scene.environment.back();
    }

    ParticleSpec &ensure_particles() {
        if (!scene.particles) scene.particles.emplace();
        return *scene.particles;
    }

    std::string resolve(const std::string &path) const {
        std::filesystem::path p(path);
        if (p.is_absolute() || base_dir.empty()) return path;
        return (std::filesystem::path(base_dir) / p).string();
    }

    void part_statement(SceneObject &part, const std::string &sub, LineView &args) {
        if (sub == "mesh") {
            if (!part.mesh_path.empty())
                throw parse_error(args.line, "part '" + part.name + "' already has a mesh");
            part.mesh_path = resolve(args.take("mesh path"));
            part_mesh_line[part.name] = args.line;
            args.done();
        } else if (sub == "id") {
            part.id = static_cast<std::uint32_t>(args.integer("id"));
            args.done();
        } else if (sub == "key") {
            try {
                part.track.add(parse_keyframe(args));
            } catch (const std::invalid_argument &e) {
                throw parse_error(args.line, e.what());
            }
        } else if (sub == "volume") {
            volume_statement(part.volume, args.take("volume setting"), args);
        } else {
            throw parse_error(args.line, "unknown setting '" + sub + "'");
        }
    }

    void volume_statement(VolumeSpec &vol, const std::string &sub, LineView &args) {
        if (sub == "center") {
            vol.center = args.vec3("center");
        } else if (sub == "view") {
            vol.view = args.vec3("view direction");
        } else if (sub == "up") {
            vol.up = args.vec3("up direction");
        } else if (sub == "half_width") {
            vol.half_width = args.number("half width");
        } else if (sub == "half_height") {
            vol.half_height = args.number("half height");
        } else if (sub == "depth") {
            vol.depth = args.number("depth length");
        } else if (sub == "resolution") {
            vol.width = static_cast<int>(args.integer("width"));
            vol.height = static_cast<int>(args.integer("height"));
        } else {
            throw parse_error(args.line, "unknown volume setting '" + sub + "'");
        }
        args.done();
    }

    void env_statement(SceneEnvironment &env, const std::string &sub, LineView &args) {
        if (sub == "mesh") {
            if (!env.mesh_path.empty())
                throw parse_error(args.line, "duplicate environment id " + std::to_string(env.id));
            env.mesh_path = resolve(args.take("mesh path"));
            env_mesh_line[env.id] = args.line;
            args.done();
        } else if (sub == "key") {
            try {
                env.track.add(parse_keyframe(args));
            } catch (const std::invalid_argument &e) {
                throw parse_error(args.line, e.what());
            }
        } else {
            throw parse_error(args.line, "unknown setting '" + sub + "'");
        }
    }

    void detection_statement(const std::string &sub, LineView &args) {
        if (sub == "tolerance") {
            scene.detection.tolerance = args.number("tolerance");
        } else if (sub == "two_boundary") {
            scene.detection.two_boundary = args.flag("two_boundary");
        } else if (sub == "stencil") {
            scene.detection.stencil = args.flag("stencil");
        } else if (sub == "max_contacts") {
            scene.detection.max_contacts = static_cast<std::size_t>(args.integer("max contacts"));
        } else {
            throw parse_error(args.line, "unknown detection setting '" + sub + "'");
        }
        args.done();
    }

    void particles_statement(const std::string &sub, LineView &args) {
        ParticleSpec &ps = ensure_particles();
        if (sub == "count") {
            ps.count = static_cast<int>(args.integer("count"));
        } else if (sub == "rate") {
            ps.rate = args.number("rate");
        } else if (sub == "source") {
            ps.source = args.vec3("source");
        } else if (sub == "direction") {
            ps.direction = args.vec3("direction");
        } else if (sub == "speed") {
            ps.speed = args.number("speed");
        } else if (sub == "spread") {
            ps.spread = args.number("spread");
        } else if (sub == "seed") {
            ps.seed = static_cast<std::uint64_t>(args.integer("seed"));
        } else if (sub == "restitution") {
            ps.restitution = args.number("restitution");
        } else if (sub == "acceleration") {
            ps.acceleration = args.vec3("acceleration");
        } else if (sub == "field") {
            const std::string &kind = args.take("field kind");
            if (kind == "single")
                ps.field_kind = ParticleFieldKind::Single;
            else if (kind == "cube")
                ps.field_kind = ParticleFieldKind::Cube;
            else
                throw parse_error(args.line, "field kind must be single or cube");
        } else if (sub == "field_half_width") {
            ps.field_half_width = args.number("field half width");
        } else if (sub == "field_half_height") {
            ps.field_half_height = args.number("field half height");
        } else if (sub == "field_half_extent") {
            ps.field_half_extent = args.number("field half extent");
        } else if (sub == "field_depth") {
            ps.field_depth = args.number("field depth");
        } else if (sub == "field_resolution") {
            ps.field_width = static_cast<int>(args.integer("width"));
            ps.field_height = static_cast<int>(args.integer("height"));
        } else {
            throw parse_error(args.line, "unknown particles setting '" + sub + "'");
        }
        args.done();
    }

    void statement(const std::vector<std::string> &tokens, int line) {
        LineView args{&tokens, 1, line};
        const std::string &head = tokens[0];
        if (head == "frames") {
            scene.frame_count = static_cast<int>(args.integer("frame count"));
            saw_frames = true;
            args.done();
        } else if (head == "dt") {
            scene.dt = args.number("dt");
            args.done();
        } else if (head == "object") {
            const std::string sub = args.take("setting");
            part_statement(ensure_part("object"), sub, args);
        } else if (head == "part") {
            const std::string name = args.take("part name");
            const std::string sub = args.take("setting");
            part_statement(ensure_part(name), sub, args);
        } else if (head == "volume") {
            volume_statement(ensure_part("object").volume, args.take("volume setting"), args);
        } else if (head == "env") {
            const long long id = args.integer("environment id");
            if (id < 1) throw parse_error(line, "environment id must be at least 1");
            env_statement(ensure_env(static_cast<std::uint32_t>(id)), args.take("setting"), args);
        } else if (head == "detection") {
            detection_statement(args.take("detection setting"), args);
        } else if (head == "particles") {
            particles_statement(args.take("particles setting"), args);
        } else {
            throw parse_error(line, "unknown key '" + head + "'");
        }
    }

    void validate_volume(const VolumeSpec &vol, const std::string &owner) {
        auto fail = [&](const std::string &msg) {
            throw parse_error(0, "volume of " + owner + ": " + msg);
        };
        if (!(vol.half_width > 0) || !(vol.half_height > 0) || !(vol.depth > 0))
            fail("extents must be positive");
        if (vol.width < 1 || vol.width > 8192 || vol.height < 1 || vol.height > 8192)
            fail("resolution outside 1..8192");
        if (norm(vol.view) <= 1e-12 || norm(vol.up) <= 1e-12) fail("axes must be non-zero");
        const Vec3 v = normalized(vol.view), u = normalized(vol.up);
        if (std::abs(dot(v, u)) > 1e-9) fail("view and up are not perpendicular");
    }

    void finish() {
        if (scene.frame_count < 0) throw parse_error(0, "frames must be non-negative");
        if (!(scene.dt > 0)) throw parse_error(0, "dt must be positive");

        std::unordered_map<std::uint32_t, std::string> ids;
        auto claim_id = [&](std::uint32_t id, const std::string &owner) {
            if (id < 1) throw parse_error(0, owner + ": id must be at least 1");
            const auto [it, inserted] = ids.try_emplace(id, owner);
            if (!inserted)
                throw parse_error(0, "duplicate id " + std::to_string(id) + " used by " + owner +
                                         " and " + it->second);
        };

        for (auto &part : scene.parts) {
            if (part.mesh_path.empty())
                throw parse_error(0, "part '" + part.name + "' has no mesh");
            claim_id(part.id, "part '" + part.name + "'");
            validate_volume(part.volume, "part '" + part.name + "'");
            try {
                part.mesh = load_obj_file(part.mesh_path);
            } catch (const std::exception &e) {
                throw parse_error(part_mesh_line[part.name], e.what());
            }
            part.mesh.object_id = part.id;
        }
        for (auto &env : scene.environment) {
            if (env.mesh_path.empty())
                throw parse_error(0, "environment " + std::to_string(env.id) + " has no mesh");
            claim_id(env.id, "environment " + std::to_string(env.id));
            try {
                env.mesh = load_obj_file(env.mesh_path);
            } catch (const std::exception &e) {
                throw parse_error(env_mesh_line[env.id], e.what());
            }
            env.mesh.object_id = env.id;
        }
        if (scene.particles) {
            const ParticleSpec &ps = *scene.particles;
            if (ps.count < 0) throw parse_error(0, "particles count must be non-negative");
            if (ps.rate < 0) throw parse_error(0, "particles rate must be non-negative");
            if (!(ps.speed >= 0)) throw parse_error(0, "particles speed must be non-negative");
            if (ps.restitution < 0 || ps.restitution > 1)
                throw parse_error(0, "restitution must lie in [0,1]");
            if (norm(ps.direction) <= 1e-12) throw parse_error(0, "particles direction is zero");
            if (ps.field_width < 1 || ps.field_width > 8192 || ps.field_height < 1 ||
                ps.field_height > 8192)
                throw parse_error(0, "particles field resolution outside 1..8192");
            if (!(ps.field_half_width > 0) || !(ps.field_half_height > 0) ||
                !(ps.field_half_extent > 0) || !(ps.field_depth > 0))
                throw parse_error(0, "particles field extents must be positive");
        }
    }
};

}  // namespace

SceneDescription parse_scene(std::istream &in, const std::string &base_dir) {
    Parser parser;
    parser.base_dir = base_dir;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        parser.statement(tokens, line_no);
    }
    parser.finish();
    return parser.scene;
}

SceneDescription parse_scene_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scene file: " + path);
    return parse_scene(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace colfield
