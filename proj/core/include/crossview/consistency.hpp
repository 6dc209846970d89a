#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "crossview/calibration.hpp"
#include "crossview/geometry.hpp"
#include "crossview/streams.hpp"

namespace crossview {

/// Either one global threshold (pixels) or a per-patch map.
struct ThresholdSpec {
    std::variant<double, ThresholdMap> value;

    static ThresholdSpec global(double d);
    static ThresholdSpec from_map(ThresholdMap map);
};

struct ContactPoint {
    long long frame = 0;
    Point2 point;  // camera-1 view
    std::string label1;
    std::string label2;
};

/// Frame index -> contact points detected at that frame. Every stored frame
/// has at least one contact point.
struct ContactSet {
    std::map<long long, std::vector<ContactPoint>> by_frame;

    size_t total_points() const;
};

struct DetectStats {
    size_t pairs_checked = 0;
    size_t degenerate_skipped = 0;
};

/// Returns p1 when distance(p1, H(p2)) is strictly below d, empty otherwise.
std::optional<Point2> consistency_check(const Point2& p1, const Point2& p2, const Homography& h,
                                        double d, Metric metric = Metric::manhattan);

/// Threshold at a location: the global value, or the containing patch's
/// value with out-of-grid points clamped to the nearest patch.
double resolve_threshold(const ThresholdSpec& thr, const Point2& at);

struct DetectOptions {
    Metric metric = Metric::manhattan;
    bool same_label_only = false;
};

/// Per frame, crosses cam1 detections of s1 with cam2 detections of s2 and
/// collects every p1 that passes the consistency check. Degenerate pairs are
/// counted in `stats` and skipped.
ContactSet detect_contacts(const DetectionStream& s1, const DetectionStream& s2,
                           const Homography& h, const ThresholdSpec& thr,
                           const DetectOptions& options = {}, DetectStats* stats = nullptr);

// Contact file format: `frame,x,y,label1,label2` lines sorted by frame,
// then x, then y.
ContactSet parse_contacts(std::istream& in);
void write_contacts(std::ostream& out, const ContactSet& q);
ContactSet load_contacts(const std::string& path);
void save_contacts(const std::string& path, const ContactSet& q);

}  // namespace crossview
