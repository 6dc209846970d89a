#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crossview/geometry.hpp"
#include "crossview/streams.hpp"

namespace crossview {

/// Camera plus its image bounds; detections are emitted only when the
/// noise-free projection lands inside [0,width) x [0,height).
struct SimCamera {
    CameraModel cam;
    int width = 1920;
    int height = 1080;
};

/// One world position per frame.
using Trajectory = std::vector<Point3>;

/// Synthetic scene over the canonical z=0 surface plane.
struct SceneConfig {
    SimCamera cam1;
    SimCamera cam2;
    std::vector<Trajectory> objects;
    double noise_sigma = 0.0;  // pixels, per axis
    uint64_t seed = 1;
    long long frames = 0;
};

/// Throws unless cameras are valid and oblique (viewing axis between 5 and
/// 85 degrees off the plane normal), trajectories span all frames, and
/// noise_sigma >= 0.
void validate_scene(const SceneConfig& cfg);

struct GroundTruthEntry {
    long long frame = 0;
    int object = 0;
    Point3 position;
    double height = 0.0;  // above the z=0 plane
    bool contact = false;
    bool visible1 = false;
    bool visible2 = false;
};

struct GroundTruth {
    std::vector<GroundTruthEntry> entries;  // frame-major, object-minor

    /// Frames where at least one object touches the plane.
    std::vector<long long> contact_frames(bool require_both_visible = false) const;
};

struct SimulationResult {
    DetectionStream cam1;
    DetectionStream cam2;
    GroundTruth truth;
};

/// Homography mapping camera-2 pixels of the z=0 plane to camera-1 pixels.
Homography plane_induced_homography(const CameraModel& cam1, const CameraModel& cam2);

/// One detection per visible object per camera per frame: noise-free
/// projection plus independent per-axis Gaussian noise N(0, sigma^2).
/// Draw order is frame, object, camera 1 (x then y), camera 2, so a given
/// seed reproduces the streams exactly.
SimulationResult simulate(const SceneConfig& cfg);

/// (height, min cross-view distance) per frame for a single noise-free
/// object; used to verify that the distance vanishes exactly at contact.
std::vector<std::pair<double, double>> lift_profile(const SceneConfig& cfg,
                                                    Metric metric = Metric::manhattan);

struct Box3 {
    double x0 = 0, x1 = 0;
    double y0 = 0, y1 = 0;
    double z0 = 0, z1 = 0;
};

struct AmbiguityConfig {
    SimCamera cam1;
    SimCamera cam2;
    long long frames = 1000;
    uint64_t seed = 1;
    double d = 1.0;      // threshold from a calibrated single-object run
    Box3 box1;           // sampling volume for object 0
    Box3 box2;           // sampling volume for object 1
};

struct AmbiguityResult {
    long long trials = 0;
    long long total_frames = 0;
    long long reported_frames = 0;        // frames with >= 1 reported contact
    long long false_positive_frames = 0;  // reported frames with no true contact
    double rate = 0.0;                    // reported_frames / total_frames
};

/// Two freely moving point objects sampled uniformly per frame from their
/// boxes (noise-free); per-trial seed is seed + trial index.
AmbiguityResult ambiguity_experiment(const AmbiguityConfig& cfg, int trials);

// Trajectory builders for config-driven scenes.
Trajectory static_trajectory(const Point3& pos, long long frames);
Trajectory linear_trajectory(const Point3& from, const Point3& to, long long frames);
Trajectory lift_trajectory(const Point2& base, double max_height, long long frames);
/// Alternates `rest` frames on the plane with `air` frames at `height`.
Trajectory square_wave_trajectory(const Point2& base, const Point2& to, double height,
                                  long long rest, long long air, long long frames);

// Scene config file: key=value sections [camera1], [camera2], [object.N],
// [noise], [run].
SceneConfig parse_scene_config(std::istream& in);
SceneConfig load_scene_config(const std::string& path);

// Ground-truth CSV: `frame,object,x,y,z,contact(0|1)`.
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
void save_ground_truth(const std::string& path, const GroundTruth& truth);

}  // namespace crossview
