#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crossview/calibration.hpp"
#include "crossview/consistency.hpp"
#include "crossview/geometry.hpp"
#include "crossview/streams.hpp"

namespace crossview {

/// Default gap-filling window: one minute of 0.04 s frames.
inline constexpr long long kDefaultMaxGapFrames = 1500;

struct HeatMap {
    PatchGrid grid;  // top-view coordinates
    std::vector<long long> counts;
    long long dropped = 0;  // contact points outside the grid
};

/// Axis-aligned monitored rectangle in camera-1 pixels. Lower edges
/// inclusive, upper edges exclusive.
struct Region {
    std::string name;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool contains(const Point2& p) const {
        return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1;
    }
};

void validate_region(const Region& r);

struct OccupancySeries {
    std::string region;
    long long start = 0;
    std::vector<bool> occupied;  // index i = frame start + i

    long long end() const { return start + static_cast<long long>(occupied.size()) - 1; }
};

struct FrameRange {
    long long start = 0;
    long long end = 0;  // inclusive
};

/// Maps each contact point through top_h and bins it; out-of-grid points
/// are tallied in `dropped`.
HeatMap accumulate_heatmap(const ContactSet& q, const Homography& top_h, const PatchGrid& grid);

OccupancySeries raw_occupancy(const ContactSet& q, const Region& region, const FrameRange& range);

/// Marks every maximal false run strictly between two true frames as true
/// when the run is shorter than max_gap. Leading and trailing false runs
/// are never filled.
OccupancySeries fill_gaps(const OccupancySeries& s, long long max_gap = kDefaultMaxGapFrames);

/// Per-frame minimum cross-view distance; absent when either camera has no
/// detections at the frame.
std::vector<std::optional<double>> min_distance_series(const DetectionStream& s1,
                                                       const DetectionStream& s2,
                                                       const Homography& h,
                                                       const FrameRange& range,
                                                       Metric metric = Metric::manhattan);

// OccupancySeries file: `frame,occupied(0|1)` per line.
void write_occupancy(std::ostream& out, const OccupancySeries& s);
OccupancySeries parse_occupancy(std::istream& in, const std::string& region_name = "");

// HeatMap numeric dump: header `heatmap cols rows origin_x origin_y
// patch_size dropped`, then rows x cols integer counts.
void write_heatmap(std::ostream& out, const HeatMap& map);
HeatMap parse_heatmap(std::istream& in);

/// ASCII PGM (P2) with counts scaled linearly so the max count maps to 255.
void render_grid(std::ostream& out, const HeatMap& map);

}  // namespace crossview
