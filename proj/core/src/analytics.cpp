#include "crossview/analytics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crossview/text.hpp"

namespace crossview {

void validate_region(const Region& r) {
    if (!(r.x0 < r.x1) || !(r.y0 < r.y1)) {
        throw Error("region '" + r.name + "': need x0 < x1 and y0 < y1");
    }
}

HeatMap accumulate_heatmap(const ContactSet& q, const Homography& top_h, const PatchGrid& grid) {
    validate_grid(grid);
    HeatMap map;
    map.grid = grid;
    map.counts.assign(grid.cell_count(), 0);
    for (const auto& [frame, pts] : q.by_frame) {
        for (const auto& cp : pts) {
            Point2 top;
            try {
                top = apply_homography(top_h, cp.point);
            } catch (const Error&) {
                ++map.dropped;
                continue;
            }
            if (const auto cell = grid.cell_of(top)) {
                ++map.counts[grid.index(cell->first, cell->second)];
            } else {
                ++map.dropped;
            }
        }
    }
    return map;
}

OccupancySeries raw_occupancy(const ContactSet& q, const Region& region,
                              const FrameRange& range) {
    validate_region(region);
    if (range.end < range.start) throw Error("raw_occupancy: empty frame range");
    OccupancySeries s;
    s.region = region.name;
    s.start = range.start;
    s.occupied.assign(static_cast<size_t>(range.end - range.start + 1), false);
    for (auto it = q.by_frame.lower_bound(range.start);
         it != q.by_frame.end() && it->first <= range.end; ++it) {
        for (const auto& cp : it->second) {
            if (region.contains(cp.point)) {
                s.occupied[static_cast<size_t>(it->first - range.start)] = true;
                break;
            }
        }
    }
    return s;
}

OccupancySeries fill_gaps(const OccupancySeries& s, long long max_gap) {
    OccupancySeries out = s;
    const size_t n = out.occupied.size();
    size_t i = 0;
    while (i < n && !out.occupied[i]) ++i;  // skip the leading false run
    while (i < n) {
        if (!out.occupied[i]) {
            size_t j = i;
            while (j < n && !out.occupied[j]) ++j;
            if (j < n && static_cast<long long>(j - i) < max_gap) {
                std::fill(out.occupied.begin() + i, out.occupied.begin() + j, true);
            }
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<std::optional<double>> min_distance_series(const DetectionStream& s1,
                                                       const DetectionStream& s2,
                                                       const Homography& h,
                                                       const FrameRange& range, Metric metric) {
    if (range.end < range.start) throw Error("min_distance_series: empty frame range");
    std::vector<std::optional<double>> series(static_cast<size_t>(range.end - range.start + 1));
    auto it1 = s1.frames.begin();
    auto it2 = s2.frames.begin();
    for (long long frame = range.start; frame <= range.end; ++frame) {
        while (it1 != s1.frames.end() && it1->frame < frame) ++it1;
        while (it2 != s2.frames.end() && it2->frame < frame) ++it2;
        if (it1 == s1.frames.end() || it1->frame != frame || it1->cam1.empty()) continue;
        if (it2 == s2.frames.end() || it2->frame != frame || it2->cam2.empty()) continue;
        std::optional<double> best;
        for (const auto& d1 : it1->cam1) {
            for (const auto& d2 : it2->cam2) {
                Point2 mapped;
                try {
                    mapped = apply_homography(h, d2.point);
                } catch (const Error&) {
                    continue;
                }
                const double dist = distance(d1.point, mapped, metric);
                if (!best || dist < *best) best = dist;
            }
        }
        series[static_cast<size_t>(frame - range.start)] = best;
    }
    return series;
}

void write_occupancy(std::ostream& out, const OccupancySeries& s) {
    for (size_t i = 0; i < s.occupied.size(); ++i) {
        out << (s.start + static_cast<long long>(i)) << ',' << (s.occupied[i] ? 1 : 0) << '\n';
    }
}

OccupancySeries parse_occupancy(std::istream& in, const std::string& region_name) {
    OccupancySeries s;
    s.region = region_name;
    std::string line;
    long long line_no = 0;
    bool first = true;
    long long expected = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string ctx = "occupancy file line " + std::to_string(line_no);
        const auto fields = split_fields(line);
        if (fields.size() != 2) throw Error(ctx + ": expected frame,occupied");
        const long long frame = parse_int(fields[0], ctx);
        const long long flag = parse_int(fields[1], ctx);
        if (flag != 0 && flag != 1) throw Error(ctx + ": occupied must be 0 or 1");
        if (first) {
            s.start = frame;
            expected = frame;
            first = false;
        }
        if (frame != expected) throw Error(ctx + ": non-contiguous frame index");
        s.occupied.push_back(flag == 1);
        ++expected;
    }
    return s;
}

void write_heatmap(std::ostream& out, const HeatMap& map) {
    out << "heatmap " << map.grid.cols << ' ' << map.grid.rows << ' '
        << format_double(map.grid.origin.x) << ' ' << format_double(map.grid.origin.y) << ' '
        << format_double(map.grid.patch_size) << ' ' << map.dropped << '\n';
    for (int r = 0; r < map.grid.rows; ++r) {
        for (int c = 0; c < map.grid.cols; ++c) {
            out << (c ? " " : "") << map.counts[map.grid.index(c, r)];
        }
        out << '\n';
    }
}

HeatMap parse_heatmap(std::istream& in) {
    std::string tag;
    HeatMap map;
    long long cols = 0, rows = 0;
    if (!(in >> tag >> cols >> rows >> map.grid.origin.x >> map.grid.origin.y >>
          map.grid.patch_size >> map.dropped) ||
        tag != "heatmap") {
        throw Error("heatmap file: bad header");
    }
    if (cols < 1 || rows < 1) throw Error("heatmap file: invalid dimensions");
    map.grid.cols = static_cast<int>(cols);
    map.grid.rows = static_cast<int>(rows);
    validate_grid(map.grid);
    map.counts.resize(map.grid.cell_count());
    for (auto& count : map.counts) {
        if (!(in >> count) || count < 0) throw Error("heatmap file: bad count grid");
    }
    return map;
}

void render_grid(std::ostream& out, const HeatMap& map) {
    const long long max_count = map.counts.empty()
                                    ? 0
                                    : *std::max_element(map.counts.begin(), map.counts.end());
    out << "P2\n" << map.grid.cols << ' ' << map.grid.rows << "\n255\n";
    for (int r = 0; r < map.grid.rows; ++r) {
        for (int c = 0; c < map.grid.cols; ++c) {
            const long long count = map.counts[map.grid.index(c, r)];
            const long long pixel = max_count == 0 ? 0 : count * 255 / max_count;
            out << (c ? " " : "") << pixel;
        }
        out << '\n';
    }
}

}  // namespace crossview
