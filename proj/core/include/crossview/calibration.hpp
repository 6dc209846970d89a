#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "crossview/geometry.hpp"
#include "crossview/streams.hpp"

namespace crossview {

/// Rasterization of the surface in camera-1 pixel coordinates.
struct PatchGrid {
    Point2 origin;
    double patch_size = 1.0;
    int cols = 1;
    int rows = 1;

    int cell_count() const { return cols * rows; }

    /// Column/row of the patch containing p, or nullopt when outside.
    std::optional<std::pair<int, int>> cell_of(const Point2& p) const;

    /// Nearest patch, clamping out-of-grid points to the edge.
    std::pair<int, int> clamped_cell_of(const Point2& p) const;

    int index(int col, int row) const { return row * cols + col; }

    friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

void validate_grid(const PatchGrid& grid);

/// Per-patch multisets of observed cross-view distances.
struct DistanceBags {
    PatchGrid grid;
    std::vector<std::vector<double>> bags;  // cell-indexed
};

enum class PatchProvenance { measured, interpolated };

struct ThresholdMap {
    PatchGrid grid;
    std::vector<double> values;                 // cell-indexed, all > 0
    std::vector<PatchProvenance> provenance;    // parallel to values

    double value_at(const Point2& p) const;
};

/// Calibration table for non-planar surfaces: camera-2 point -> camera-1 point.
struct MappingTable {
    std::vector<std::pair<Point2, Point2>> entries;  // (p2, p1)
};

/// Global observational threshold: max over the listed contact frames of the
/// per-frame minimum distance between cam1 points and mapped cam2 points,
/// scaled by `safety_factor`.
double observe_global_d(const DetectionStream& s1, const DetectionStream& s2,
                        const Homography& h, const std::vector<long long>& contact_frames,
                        double safety_factor = 1.0, Metric metric = Metric::manhattan);

/// For every cam1 detection inside a patch, appends the minimum distance to
/// any mapped cam2 detection at the same frame to that patch's bag.
DistanceBags collect_patch_distances(const DetectionStream& s1, const DetectionStream& s2,
                                     const Homography& h, const PatchGrid& grid,
                                     Metric metric = Metric::manhattan);

/// Upper edge of the modal histogram bin [k*w, (k+1)*w); ties go to the
/// lowest bin.
double select_d_from_histogram(const std::vector<double>& bag, double bin_width);

/// Fills unmeasured patches by repeated 8-neighbor mean passes
/// (double-buffered, so pass order cannot matter).
ThresholdMap interpolate_missing(const PatchGrid& grid,
                                 const std::vector<std::optional<double>>& values);

ThresholdMap build_threshold_map(const DetectionStream& s1, const DetectionStream& s2,
                                 const Homography& h, const PatchGrid& grid,
                                 double bin_width = 1.0, int min_samples = 10,
                                 Metric metric = Metric::manhattan);

/// One (p2 -> p1) entry per listed contact frame; each listed frame must
/// have exactly one detection per camera.
MappingTable learn_mapping_table(const DetectionStream& s1, const DetectionStream& s2,
                                 const std::vector<long long>& contact_frames);

/// Nearest-neighbor lookup by Manhattan distance; ties go to the earliest entry.
Point2 map_point(const MappingTable& table, const Point2& p2);

// ThresholdMap format: header `dmap cols rows origin_x origin_y patch_size`,
// rows x cols values, then a parallel provenance grid of m/i characters.
ThresholdMap read_threshold_map(std::istream& in);
void write_threshold_map(std::ostream& out, const ThresholdMap& map);
ThresholdMap load_threshold_map(const std::string& path);
void save_threshold_map(const std::string& path, const ThresholdMap& map);

// MappingTable format: one `x2,y2,x1,y1` line per entry.
MappingTable read_mapping_table(std::istream& in);
void write_mapping_table(std::ostream& out, const MappingTable& table);

}  // namespace crossview
