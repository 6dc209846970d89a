#include "crossview/simulator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "crossview/consistency.hpp"
#include "crossview/random.hpp"
#include "crossview/text.hpp"

namespace crossview {

namespace {

constexpr double kContactTol = 1e-9;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Viewing axis in world coordinates is the third row of the rotation.
double axis_angle_to_plane_normal(const CameraModel& cam) {
    const double dot = std::abs(cam.rotation[8]);
    return std::acos(std::clamp(dot, 0.0, 1.0));
}

void validate_oblique(const SimCamera& sc, const char* name) {
    validate_camera(sc.cam);
    if (sc.width < 1 || sc.height < 1) {
        throw Error(std::string(name) + ": image bounds must be positive");
    }
    const double angle = axis_angle_to_plane_normal(sc.cam);
    if (angle <= 5.0 * kDegToRad || angle >= 85.0 * kDegToRad) {
        throw Error(std::string(name) +
                    ": camera must view the plane obliquely (axis 5-85 degrees off the normal)");
    }
}

// Projection of the z=0 plane: p ~ K [r_col0 r_col1 t] (x, y, 1)^T.
Eigen::Matrix3d plane_projection(const CameraModel& cam) {
    Eigen::Matrix3d k;
    k << cam.fx, 0, cam.cx, 0, cam.fy, cam.cy, 0, 0, 1;
    Eigen::Matrix3d g;
    g << cam.rotation[0], cam.rotation[1], cam.translation[0],
         cam.rotation[3], cam.rotation[4], cam.translation[1],
         cam.rotation[6], cam.rotation[7], cam.translation[2];
    return k * g;
}

bool project_visible(const SimCamera& sc, const Point3& x, Point2* out) {
    const Point3 c = world_to_camera(sc.cam, x);
    if (c.z <= 1e-9) return false;
    const Point2 p{sc.cam.fx * c.x / c.z + sc.cam.cx, sc.cam.fy * c.y / c.z + sc.cam.cy};
    if (p.x < 0 || p.y < 0 || p.x >= sc.width || p.y >= sc.height) return false;
    *out = p;
    return true;
}

}  // namespace

void validate_scene(const SceneConfig& cfg) {
    if (cfg.frames < 1) throw Error("scene: frames must be >= 1");
    if (cfg.noise_sigma < 0) throw Error("scene: noise sigma must be >= 0");
    validate_oblique(cfg.cam1, "camera1");
    validate_oblique(cfg.cam2, "camera2");
    for (size_t i = 0; i < cfg.objects.size(); ++i) {
        if (static_cast<long long>(cfg.objects[i].size()) != cfg.frames) {
            throw Error("scene: object " + std::to_string(i) + " trajectory has " +
                        std::to_string(cfg.objects[i].size()) + " positions, expected " +
                        std::to_string(cfg.frames));
        }
        for (const auto& p : cfg.objects[i]) {
            if (!is_finite(p)) throw Error("scene: non-finite trajectory position");
        }
    }
}

std::vector<long long> GroundTruth::contact_frames(bool require_both_visible) const {
    std::vector<long long> frames;
    for (const auto& e : entries) {
        if (!e.contact) continue;
        if (require_both_visible && !(e.visible1 && e.visible2)) continue;
        if (frames.empty() || frames.back() != e.frame) frames.push_back(e.frame);
    }
    return frames;
}

Homography plane_induced_homography(const CameraModel& cam1, const CameraModel& cam2) {
    validate_camera(cam1);
    validate_camera(cam2);
    const Eigen::Matrix3d g1 = plane_projection(cam1);
    const Eigen::Matrix3d g2 = plane_projection(cam2);
    if (std::abs(g1.determinant()) <= 1e-12 || std::abs(g2.determinant()) <= 1e-12) {
        throw Error("plane_induced_homography: degenerate view of the z=0 plane");
    }
    const Eigen::Matrix3d h = g1 * g2.inverse();
    return canonical_homography({h(0, 0), h(0, 1), h(0, 2), h(1, 0), h(1, 1), h(1, 2), h(2, 0),
                                 h(2, 1), h(2, 2)});
}

SimulationResult simulate(const SceneConfig& cfg) {
    validate_scene(cfg);
    Rng rng(cfg.seed);
    std::vector<Detection> det1, det2;
    GroundTruth truth;
    truth.entries.reserve(static_cast<size_t>(cfg.frames) * cfg.objects.size());

    for (long long frame = 0; frame < cfg.frames; ++frame) {
        for (size_t obj = 0; obj < cfg.objects.size(); ++obj) {
            const Point3& pos = cfg.objects[obj][static_cast<size_t>(frame)];
            GroundTruthEntry gt;
            gt.frame = frame;
            gt.object = static_cast<int>(obj);
            gt.position = pos;
            gt.height = pos.z;
            gt.contact = std::abs(pos.z) <= kContactTol;
            const std::string label = "obj" + std::to_string(obj);

            Point2 p;
            if (project_visible(cfg.cam1, pos, &p)) {
                gt.visible1 = true;
                if (cfg.noise_sigma > 0) {
                    p.x += rng.gaussian(0.0, cfg.noise_sigma);
                    p.y += rng.gaussian(0.0, cfg.noise_sigma);
                }
                det1.push_back({frame, 1, label, p});
            }
            if (project_visible(cfg.cam2, pos, &p)) {
                gt.visible2 = true;
                if (cfg.noise_sigma > 0) {
                    p.x += rng.gaussian(0.0, cfg.noise_sigma);
                    p.y += rng.gaussian(0.0, cfg.noise_sigma);
                }
                det2.push_back({frame, 2, label, p});
            }
            truth.entries.push_back(gt);
        }
    }

    SimulationResult result;
    result.cam1 = make_stream(det1);
    result.cam2 = make_stream(det2);
    result.truth = std::move(truth);
    return result;
}

std::vector<std::pair<double, double>> lift_profile(const SceneConfig& cfg, Metric metric) {
    if (cfg.objects.size() != 1) throw Error("lift_profile: exactly one object required");
    if (cfg.noise_sigma != 0) throw Error("lift_profile: noise must be disabled");
    validate_scene(cfg);
    const Homography h = plane_induced_homography(cfg.cam1.cam, cfg.cam2.cam);
    std::vector<std::pair<double, double>> profile;
    profile.reserve(static_cast<size_t>(cfg.frames));
    for (const auto& pos : cfg.objects[0]) {
        const Point2 p1 = project_point(cfg.cam1.cam, pos);
        const Point2 p2 = project_point(cfg.cam2.cam, pos);
        profile.emplace_back(pos.z, distance(p1, apply_homography(h, p2), metric));
    }
    return profile;
}

AmbiguityResult ambiguity_experiment(const AmbiguityConfig& cfg, int trials) {
    if (trials < 1) throw Error("ambiguity_experiment: trials must be >= 1");
    if (!(cfg.d > 0)) throw Error("ambiguity_experiment: d must be > 0");
    AmbiguityResult result;
    result.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(cfg.seed + static_cast<uint64_t>(trial));
        SceneConfig scene;
        scene.cam1 = cfg.cam1;
        scene.cam2 = cfg.cam2;
        scene.frames = cfg.frames;
        scene.noise_sigma = 0.0;
        scene.seed = cfg.seed + static_cast<uint64_t>(trial);
        scene.objects.resize(2);
        for (int obj = 0; obj < 2; ++obj) {
            const Box3& box = obj == 0 ? cfg.box1 : cfg.box2;
            Trajectory traj(static_cast<size_t>(cfg.frames));
            for (auto& p : traj) {
                p = {rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1),
                     rng.uniform(box.z0, box.z1)};
            }
            scene.objects[obj] = std::move(traj);
        }

        const SimulationResult sim = simulate(scene);
        const Homography h = plane_induced_homography(cfg.cam1.cam, cfg.cam2.cam);
        const ContactSet q =
            detect_contacts(sim.cam1, sim.cam2, h, ThresholdSpec::global(cfg.d));

        std::map<long long, bool> true_contact;
        for (const auto& e : sim.truth.entries) {
            if (e.contact) true_contact[e.frame] = true;
        }
        result.total_frames += cfg.frames;
        result.reported_frames += static_cast<long long>(q.by_frame.size());
        for (const auto& [frame, pts] : q.by_frame) {
            if (!true_contact.count(frame)) ++result.false_positive_frames;
        }
    }
    result.rate = result.total_frames == 0
                      ? 0.0
                      : static_cast<double>(result.reported_frames) /
                            static_cast<double>(result.total_frames);
    return result;
}

Trajectory static_trajectory(const Point3& pos, long long frames) {
    return Trajectory(static_cast<size_t>(frames), pos);
}

Trajectory linear_trajectory(const Point3& from, const Point3& to, long long frames) {
    Trajectory traj(static_cast<size_t>(frames));
    for (long long f = 0; f < frames; ++f) {
        const double t = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0;
        traj[static_cast<size_t>(f)] = {from.x + t * (to.x - from.x), from.y + t * (to.y - from.y),
                                        from.z + t * (to.z - from.z)};
    }
    return traj;
}

Trajectory lift_trajectory(const Point2& base, double max_height, long long frames) {
    return linear_trajectory({base.x, base.y, 0.0}, {base.x, base.y, max_height}, frames);
}

Trajectory square_wave_trajectory(const Point2& base, const Point2& to, double height,
                                  long long rest, long long air, long long frames) {
    if (rest < 1 || air < 1) throw Error("square_wave_trajectory: rest and air must be >= 1");
    Trajectory traj(static_cast<size_t>(frames));
    const long long period = rest + air;
    for (long long f = 0; f < frames; ++f) {
        const double t = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0;
        const double z = (f % period) < rest ? 0.0 : height;
        traj[static_cast<size_t>(f)] = {base.x + t * (to.x - base.x), base.y + t * (to.y - base.y),
                                        z};
    }
    return traj;
}

namespace {

using Section = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_numbers(const std::string& value, size_t expected,
                                  const std::string& ctx) {
    const auto fields = split_fields(value);
    if (fields.size() != expected) {
        throw Error(ctx + ": expected " + std::to_string(expected) + " comma-separated numbers");
    }
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& f : fields) out.push_back(parse_double(trim(std::string(f)), ctx));
    return out;
}

const std::string& require(const Section& section, const std::string& key,
                           const std::string& ctx) {
    const auto it = section.find(key);
    if (it == section.end()) throw Error(ctx + ": missing key '" + key + "'");
    return it->second;
}

SimCamera parse_camera(const Section& section, const std::string& ctx) {
    SimCamera sc;
    sc.cam.fx = parse_double(require(section, "fx", ctx), ctx);
    sc.cam.fy = parse_double(require(section, "fy", ctx), ctx);
    sc.cam.cx = parse_double(require(section, "cx", ctx), ctx);
    sc.cam.cy = parse_double(require(section, "cy", ctx), ctx);
    if (section.count("width")) {
        sc.width = static_cast<int>(parse_int(require(section, "width", ctx), ctx));
    }
    if (section.count("height")) {
        sc.height = static_cast<int>(parse_int(require(section, "height", ctx), ctx));
    }
    if (section.count("pos") && section.count("look_at")) {
        const auto pos = parse_numbers(require(section, "pos", ctx), 3, ctx);
        const auto target = parse_numbers(require(section, "look_at", ctx), 3, ctx);
        Point3 up{0, 0, 1};
        if (section.count("up")) {
            const auto u = parse_numbers(require(section, "up", ctx), 3, ctx);
            up = {u[0], u[1], u[2]};
        }
        const CameraModel cam =
            make_look_at_camera(sc.cam.fx, sc.cam.fy, sc.cam.cx, sc.cam.cy,
                                {pos[0], pos[1], pos[2]}, {target[0], target[1], target[2]}, up);
        sc.cam = cam;
    } else if (section.count("rotation") && section.count("translation")) {
        const auto r = parse_numbers(require(section, "rotation", ctx), 9, ctx);
        const auto t = parse_numbers(require(section, "translation", ctx), 3, ctx);
        std::copy(r.begin(), r.end(), sc.cam.rotation.begin());
        std::copy(t.begin(), t.end(), sc.cam.translation.begin());
        validate_camera(sc.cam);
    } else {
        throw Error(ctx + ": need pos+look_at or rotation+translation");
    }
    return sc;
}

Trajectory parse_object(const Section& section, long long frames, const std::string& ctx) {
    const std::string type = require(section, "type", ctx);
    if (type == "static") {
        const auto pos = parse_numbers(require(section, "pos", ctx), 3, ctx);
        if (section.count("to")) {
            const auto to = parse_numbers(require(section, "to", ctx), 3, ctx);
            return linear_trajectory({pos[0], pos[1], pos[2]}, {to[0], to[1], to[2]}, frames);
        }
        return static_trajectory({pos[0], pos[1], pos[2]}, frames);
    }
    if (type == "lift") {
        const auto base = parse_numbers(require(section, "base", ctx), 2, ctx);
        const double height = parse_double(require(section, "height", ctx), ctx);
        return lift_trajectory({base[0], base[1]}, height, frames);
    }
    if (type == "sweep") {
        const auto from = parse_numbers(require(section, "from", ctx), 2, ctx);
        const auto to = parse_numbers(require(section, "to", ctx), 2, ctx);
        return linear_trajectory({from[0], from[1], 0.0}, {to[0], to[1], 0.0}, frames);
    }
    if (type == "square") {
        const auto base = parse_numbers(require(section, "base", ctx), 2, ctx);
        auto to = base;
        if (section.count("to")) to = parse_numbers(require(section, "to", ctx), 2, ctx);
        const double height = parse_double(require(section, "height", ctx), ctx);
        const long long rest = parse_int(require(section, "rest", ctx), ctx);
        const long long air = parse_int(require(section, "air", ctx), ctx);
        return square_wave_trajectory({base[0], base[1]}, {to[0], to[1]}, height, rest, air,
                                      frames);
    }
    throw Error(ctx + ": unknown trajectory type '" + type + "'");
}

}  // namespace

SceneConfig parse_scene_config(std::istream& in) {
    std::map<std::string, Section> sections;
    std::string line, current;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[' && text.back() == ']') {
            current = trim(text.substr(1, text.size() - 2));
            if (current.empty()) {
                throw Error("scene config line " + std::to_string(line_no) + ": empty section");
            }
            sections[current];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos || current.empty()) {
            throw Error("scene config line " + std::to_string(line_no) +
                        ": expected key=value inside a section");
        }
        sections[current][trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
    }

    if (!sections.count("run")) throw Error("scene config: missing [run] section");
    SceneConfig cfg;
    const Section& run = sections["run"];
    cfg.frames = parse_int(require(run, "frames", "[run]"), "[run]");
    if (run.count("seed")) {
        cfg.seed = static_cast<uint64_t>(parse_int(require(run, "seed", "[run]"), "[run]"));
    }
    if (sections.count("noise") && sections["noise"].count("sigma")) {
        cfg.noise_sigma = parse_double(sections["noise"]["sigma"], "[noise]");
    }
    if (!sections.count("camera1") || !sections.count("camera2")) {
        throw Error("scene config: missing [camera1] or [camera2] section");
    }
    cfg.cam1 = parse_camera(sections["camera1"], "[camera1]");
    cfg.cam2 = parse_camera(sections["camera2"], "[camera2]");

    std::map<long long, Trajectory> objects;  // numeric order, not lexicographic
    for (const auto& [name, section] : sections) {
        if (name.rfind("object.", 0) != 0) continue;
        const long long index = parse_int(name.substr(7), "[" + name + "]");
        objects[index] = parse_object(section, cfg.frames, "[" + name + "]");
    }
    for (auto& [index, traj] : objects) cfg.objects.push_back(std::move(traj));
    validate_scene(cfg);
    return cfg;
}

SceneConfig load_scene_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scene config: " + path);
    return parse_scene_config(in);
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    for (const auto& e : truth.entries) {
        out << e.frame << ',' << e.object << ',' << format_double(e.position.x) << ','
            << format_double(e.position.y) << ',' << format_double(e.position.z) << ','
            << (e.contact ? 1 : 0) << '\n';
    }
}

void save_ground_truth(const std::string& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write ground truth file: " + path);
    write_ground_truth(out, truth);
}

}  // namespace crossview
