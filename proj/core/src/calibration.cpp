#include "crossview/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "crossview/text.hpp"

namespace crossview {

namespace {

const FramePair* find_frame(const DetectionStream& s, long long frame) {
    const auto it = std::lower_bound(
        s.frames.begin(), s.frames.end(), frame,
        [](const FramePair& fp, long long f) { return fp.frame < f; });
    if (it == s.frames.end() || it->frame != frame) return nullptr;
    return &*it;
}

/// Minimum distance from p1 to any mapped cam2 detection; nullopt when no
/// pair could be evaluated.
std::optional<double> min_mapped_distance(const Point2& p1, const std::vector<Detection>& cam2,
                                          const Homography& h, Metric metric) {
    std::optional<double> best;
    for (const auto& d2 : cam2) {
        Point2 mapped;
        try {
            mapped = apply_homography(h, d2.point);
        } catch (const Error&) {
            continue;  // degenerate point, skip the pair
        }
        const double dist = distance(p1, mapped, metric);
        if (!best || dist < *best) best = dist;
    }
    return best;
}

}  // namespace

void validate_grid(const PatchGrid& grid) {
    if (grid.cols < 1 || grid.rows < 1) throw Error("patch grid: cols and rows must be >= 1");
    if (!(grid.patch_size > 0)) throw Error("patch grid: patch_size must be > 0");
    if (!is_finite(grid.origin)) throw Error("patch grid: non-finite origin");
}

std::optional<std::pair<int, int>> PatchGrid::cell_of(const Point2& p) const {
    const double fc = std::floor((p.x - origin.x) / patch_size);
    const double fr = std::floor((p.y - origin.y) / patch_size);
    if (fc < 0 || fr < 0 || fc >= cols || fr >= rows) return std::nullopt;
    return std::make_pair(static_cast<int>(fc), static_cast<int>(fr));
}

std::pair<int, int> PatchGrid::clamped_cell_of(const Point2& p) const {
    const double fc = std::floor((p.x - origin.x) / patch_size);
    const double fr = std::floor((p.y - origin.y) / patch_size);
    const int c = static_cast<int>(std::clamp(fc, 0.0, static_cast<double>(cols - 1)));
    const int r = static_cast<int>(std::clamp(fr, 0.0, static_cast<double>(rows - 1)));
    return {c, r};
}

double ThresholdMap::value_at(const Point2& p) const {
    const auto [c, r] = grid.clamped_cell_of(p);
    return values[grid.index(c, r)];
}

double observe_global_d(const DetectionStream& s1, const DetectionStream& s2,
                        const Homography& h, const std::vector<long long>& contact_frames,
                        double safety_factor, Metric metric) {
    if (contact_frames.empty()) throw Error("observe_global_d: no contact frames given");
    double worst = 0.0;
    for (long long frame : contact_frames) {
        const FramePair* f1 = find_frame(s1, frame);
        const FramePair* f2 = find_frame(s2, frame);
        if (!f1 || f1->cam1.empty() || !f2 || f2->cam2.empty()) {
            throw Error("observe_global_d: no detections in both cameras at frame " +
                        std::to_string(frame));
        }
        std::optional<double> frame_min;
        for (const auto& d1 : f1->cam1) {
            const auto dist = min_mapped_distance(d1.point, f2->cam2, h, metric);
            if (dist && (!frame_min || *dist < *frame_min)) frame_min = dist;
        }
        if (!frame_min) {
            throw Error("observe_global_d: all pairs degenerate at frame " + std::to_string(frame));
        }
        worst = std::max(worst, *frame_min);
    }
    return worst * safety_factor;
}

DistanceBags collect_patch_distances(const DetectionStream& s1, const DetectionStream& s2,
                                     const Homography& h, const PatchGrid& grid, Metric metric) {
    validate_grid(grid);
    DistanceBags bags;
    bags.grid = grid;
    bags.bags.resize(grid.cell_count());
    for (const auto& fp : s1.frames) {
        const FramePair* f2 = find_frame(s2, fp.frame);
        if (!f2 || f2->cam2.empty()) continue;
        for (const auto& d1 : fp.cam1) {
            const auto cell = grid.cell_of(d1.point);
            if (!cell) continue;
            const auto dist = min_mapped_distance(d1.point, f2->cam2, h, metric);
            if (dist) bags.bags[grid.index(cell->first, cell->second)].push_back(*dist);
        }
    }
    return bags;
}

double select_d_from_histogram(const std::vector<double>& bag, double bin_width) {
    if (bag.empty()) throw Error("select_d_from_histogram: empty bag");
    if (!(bin_width > 0)) throw Error("select_d_from_histogram: bin width must be > 0");
    std::map<long long, size_t> counts;
    for (double d : bag) {
        if (d < 0) throw Error("select_d_from_histogram: negative distance");
        counts[static_cast<long long>(std::floor(d / bin_width))]++;
    }
    long long best_bin = counts.begin()->first;
    size_t best_count = counts.begin()->second;
    for (const auto& [bin, count] : counts) {
        if (count > best_count) {  // ties keep the lowest bin (map is ordered)
            best_bin = bin;
            best_count = count;
        }
    }
    return static_cast<double>(best_bin + 1) * bin_width;
}

ThresholdMap interpolate_missing(const PatchGrid& grid,
                                 const std::vector<std::optional<double>>& values) {
    validate_grid(grid);
    if (static_cast<int>(values.size()) != grid.cell_count()) {
        throw Error("interpolate_missing: value grid size mismatch");
    }
    if (std::none_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); })) {
        throw Error("interpolate_missing: no measured patches");
    }

    ThresholdMap map;
    map.grid = grid;
    map.values.assign(grid.cell_count(), 0.0);
    map.provenance.assign(grid.cell_count(), PatchProvenance::interpolated);

    std::vector<std::optional<double>> current = values;
    for (int i = 0; i < grid.cell_count(); ++i) {
        if (current[i]) map.provenance[i] = PatchProvenance::measured;
    }

    while (std::any_of(current.begin(), current.end(),
                       [](const auto& v) { return !v.has_value(); })) {
        auto next = current;
        for (int r = 0; r < grid.rows; ++r) {
            for (int c = 0; c < grid.cols; ++c) {
                const int i = grid.index(c, r);
                if (current[i]) continue;
                double sum = 0.0;
                int n = 0;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int nc = c + dc, nr = r + dr;
                        if (nc < 0 || nr < 0 || nc >= grid.cols || nr >= grid.rows) continue;
                        if (const auto& v = current[grid.index(nc, nr)]) {
                            sum += *v;
                            ++n;
                        }
                    }
                }
                if (n > 0) next[i] = sum / n;
            }
        }
        current = std::move(next);  // each pass fills >= 1 patch on a connected grid
    }
    for (int i = 0; i < grid.cell_count(); ++i) map.values[i] = *current[i];
    return map;
}

ThresholdMap build_threshold_map(const DetectionStream& s1, const DetectionStream& s2,
                                 const Homography& h, const PatchGrid& grid, double bin_width,
                                 int min_samples, Metric metric) {
    const DistanceBags bags = collect_patch_distances(s1, s2, h, grid, metric);
    std::vector<std::optional<double>> measured(grid.cell_count());
    for (int i = 0; i < grid.cell_count(); ++i) {
        if (static_cast<int>(bags.bags[i].size()) >= min_samples) {
            measured[i] = select_d_from_histogram(bags.bags[i], bin_width);
        }
    }
    return interpolate_missing(grid, measured);
}

MappingTable learn_mapping_table(const DetectionStream& s1, const DetectionStream& s2,
                                 const std::vector<long long>& contact_frames) {
    MappingTable table;
    for (long long frame : contact_frames) {
        const FramePair* f1 = find_frame(s1, frame);
        const FramePair* f2 = find_frame(s2, frame);
        const size_t n1 = f1 ? f1->cam1.size() : 0;
        const size_t n2 = f2 ? f2->cam2.size() : 0;
        if (n1 != 1 || n2 != 1) {
            throw Error("learn_mapping_table: frame " + std::to_string(frame) + " has " +
                        std::to_string(n1) + " cam1 / " + std::to_string(n2) +
                        " cam2 detections, need exactly one each");
        }
        table.entries.emplace_back(f2->cam2[0].point, f1->cam1[0].point);
    }
    return table;
}

Point2 map_point(const MappingTable& table, const Point2& p2) {
    if (table.entries.empty()) throw Error("map_point: empty mapping table");
    const auto* best = &table.entries[0];
    double best_dist = manhattan_distance(p2, best->first);
    for (const auto& entry : table.entries) {
        const double d = manhattan_distance(p2, entry.first);
        if (d < best_dist) {  // strict, so the earliest entry wins ties
            best = &entry;
            best_dist = d;
        }
    }
    return best->second;
}

ThresholdMap read_threshold_map(std::istream& in) {
    std::string tag;
    ThresholdMap map;
    long long cols = 0, rows = 0;
    if (!(in >> tag >> cols >> rows >> map.grid.origin.x >> map.grid.origin.y >>
          map.grid.patch_size) ||
        tag != "dmap") {
        throw Error("threshold map file: bad header, expected "
                    "`dmap cols rows origin_x origin_y patch_size`");
    }
    if (cols < 1 || rows < 1) throw Error("threshold map file: invalid dimensions");
    map.grid.cols = static_cast<int>(cols);
    map.grid.rows = static_cast<int>(rows);
    validate_grid(map.grid);
    const int n = map.grid.cell_count();
    map.values.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!(in >> map.values[i])) throw Error("threshold map file: missing values");
        if (!(map.values[i] > 0)) throw Error("threshold map file: non-positive threshold");
    }
    map.provenance.resize(n);
    for (int i = 0; i < n; ++i) {
        char flag = 0;
        if (!(in >> flag) || (flag != 'm' && flag != 'i')) {
            throw Error("threshold map file: bad provenance grid (expected m/i)");
        }
        map.provenance[i] =
            flag == 'm' ? PatchProvenance::measured : PatchProvenance::interpolated;
    }
    return map;
}

void write_threshold_map(std::ostream& out, const ThresholdMap& map) {
    out << "dmap " << map.grid.cols << ' ' << map.grid.rows << ' '
        << format_double(map.grid.origin.x) << ' ' << format_double(map.grid.origin.y) << ' '
        << format_double(map.grid.patch_size) << '\n';
    for (int r = 0; r < map.grid.rows; ++r) {
        for (int c = 0; c < map.grid.cols; ++c) {
            out << (c ? " " : "") << format_double(map.values[map.grid.index(c, r)]);
        }
        out << '\n';
    }
    for (int r = 0; r < map.grid.rows; ++r) {
        for (int c = 0; c < map.grid.cols; ++c) {
            out << (c ? " " : "")
                << (map.provenance[map.grid.index(c, r)] == PatchProvenance::measured ? 'm' : 'i');
        }
        out << '\n';
    }
}

ThresholdMap load_threshold_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open threshold map file: " + path);
    return read_threshold_map(in);
}

void save_threshold_map(const std::string& path, const ThresholdMap& map) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write threshold map file: " + path);
    write_threshold_map(out, map);
}

MappingTable read_mapping_table(std::istream& in) {
    MappingTable table;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string ctx = "mapping table line " + std::to_string(line_no);
        const auto fields = split_fields(line);
        if (fields.size() != 4) throw Error(ctx + ": expected x2,y2,x1,y1");
        const Point2 p2{parse_double(fields[0], ctx), parse_double(fields[1], ctx)};
        const Point2 p1{parse_double(fields[2], ctx), parse_double(fields[3], ctx)};
        table.entries.emplace_back(p2, p1);
    }
    return table;
}

void write_mapping_table(std::ostream& out, const MappingTable& table) {
    for (const auto& [p2, p1] : table.entries) {
        out << format_double(p2.x) << ',' << format_double(p2.y) << ',' << format_double(p1.x)
            << ',' << format_double(p1.y) << '\n';
    }
}

}  // namespace crossview
