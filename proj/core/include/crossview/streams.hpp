#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "crossview/geometry.hpp"

namespace crossview {

/// Frame indices count temporal units of `kDefaultFramePeriod` seconds.
inline constexpr double kDefaultFramePeriod = 0.04;

struct Detection {
    long long frame = 0;
    int camera = 1;  // 1 or 2
    std::string label;
    Point2 point;

    friend bool operator==(const Detection& a, const Detection& b) {
        return a.frame == b.frame && a.camera == b.camera && a.label == b.label &&
               a.point == b.point;
    }
};

struct FramePair {
    long long frame = 0;
    std::vector<Detection> cam1;
    std::vector<Detection> cam2;

    friend bool operator==(const FramePair&, const FramePair&) = default;
};

/// Frame pairs with strictly increasing frame indices. Frames with no
/// detections in either camera are simply absent.
struct DetectionStream {
    std::vector<FramePair> frames;
    double frame_period_s = kDefaultFramePeriod;

    bool empty() const { return frames.empty(); }
    size_t detection_count() const;

    friend bool operator==(const DetectionStream& a, const DetectionStream& b) {
        return a.frames == b.frames;
    }
};

/// Groups detections into sorted frame pairs, dropping exact duplicates.
/// Within a frame, encounter order is preserved.
DetectionStream make_stream(const std::vector<Detection>& detections);

// Record format, one detection per line: `frame,camera,label,x,y`.
// Lines beginning with '#' are comments.
DetectionStream parse_stream(std::istream& in);
void write_stream(std::ostream& out, const DetectionStream& s);
DetectionStream load_stream(const std::string& path);
void save_stream(const std::string& path, const DetectionStream& s);

/// Keeps only detections whose label is in `labels`; drops empty frames.
DetectionStream filter_label(const DetectionStream& s, const std::set<std::string>& labels);

}  // namespace crossview
