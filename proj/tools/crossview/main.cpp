#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "crossview/analytics.hpp"
#include "crossview/calibration.hpp"
#include "crossview/consistency.hpp"
#include "crossview/geometry.hpp"
#include "crossview/simulator.hpp"
#include "crossview/streams.hpp"
#include "crossview/text.hpp"

namespace cv = crossview;

namespace {

bool log_enabled() {
    const char* level = std::getenv("CROSSVIEW_LOG");
    return level != nullptr && std::string(level) != "" && std::string(level) != "off";
}

void log_info(const std::string& msg) {
    if (log_enabled()) std::cerr << "[crossview] " << msg << '\n';
}

cv::PatchGrid parse_grid_flag(const std::string& value) {
    const auto fields = cv::split_fields(value);
    if (fields.size() != 5) {
        throw CLI::ValidationError("--grid", "expected x0,y0,patch,cols,rows");
    }
    cv::PatchGrid grid;
    grid.origin.x = cv::parse_double(fields[0], "--grid");
    grid.origin.y = cv::parse_double(fields[1], "--grid");
    grid.patch_size = cv::parse_double(fields[2], "--grid");
    grid.cols = static_cast<int>(cv::parse_int(fields[3], "--grid"));
    grid.rows = static_cast<int>(cv::parse_int(fields[4], "--grid"));
    cv::validate_grid(grid);
    return grid;
}

cv::Region parse_region_flag(const std::string& value) {
    const auto fields = cv::split_fields(value);
    if (fields.size() != 5) {
        throw CLI::ValidationError("--region", "expected name,x0,y0,x1,y1");
    }
    cv::Region region;
    region.name = std::string(fields[0]);
    region.x0 = cv::parse_double(fields[1], "--region");
    region.y0 = cv::parse_double(fields[2], "--region");
    region.x1 = cv::parse_double(fields[3], "--region");
    region.y1 = cv::parse_double(fields[4], "--region");
    cv::validate_region(region);
    return region;
}

cv::FrameRange parse_range_flag(const std::string& value) {
    const auto fields = cv::split_fields(value);
    if (fields.size() != 2) throw CLI::ValidationError("--range", "expected start,end");
    cv::FrameRange range;
    range.start = cv::parse_int(fields[0], "--range");
    range.end = cv::parse_int(fields[1], "--range");
    if (range.end < range.start) throw CLI::ValidationError("--range", "end before start");
    return range;
}

// Correspondence file for calib-h: one `x2,y2,x1,y1` line per pair.
std::vector<std::pair<cv::Point2, cv::Point2>> load_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cv::Error("cannot open correspondence file: " + path);
    std::vector<std::pair<cv::Point2, cv::Point2>> pairs;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string ctx = path + " line " + std::to_string(line_no);
        const auto fields = cv::split_fields(line);
        if (fields.size() != 4) throw cv::Error(ctx + ": expected x2,y2,x1,y1");
        const cv::Point2 p2{cv::parse_double(fields[0], ctx), cv::parse_double(fields[1], ctx)};
        const cv::Point2 p1{cv::parse_double(fields[2], ctx), cv::parse_double(fields[3], ctx)};
        pairs.emplace_back(p2, p1);
    }
    return pairs;
}

cv::FrameRange contacts_range(const cv::ContactSet& q) {
    if (q.by_frame.empty()) return {0, 0};
    return {q.by_frame.begin()->first, q.by_frame.rbegin()->first};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-view surface contact detection pipeline"};
    // long-only help so subcommands can use --h for homography files
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    std::string metric_name = "manhattan";

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run the synthetic two-camera scene");
    std::string sim_config, sim_out;
    std::optional<double> sim_sigma;
    std::optional<long long> sim_seed;
    sim->add_option("config", sim_config, "Scene config file")->required();
    sim->add_option("--out", sim_out, "Output prefix (<prefix>_cam1.csv, _cam2.csv, _truth.csv)")
        ->required();
    sim->add_option("--sigma", sim_sigma, "Override detection noise sigma (px)");
    sim->add_option("--seed", sim_seed, "Override RNG seed");

    // calib-h
    auto* calibh = app.add_subcommand("calib-h", "Estimate a homography from correspondences");
    std::string calibh_pairs, calibh_out;
    calibh->add_option("pairs", calibh_pairs, "Correspondence file, lines x2,y2,x1,y1")
        ->required();
    calibh->add_option("--out", calibh_out, "Homography output file")->required();

    // calib-dmap
    auto* calibd = app.add_subcommand("calib-dmap", "Build a per-patch threshold map");
    std::string calibd_s1, calibd_s2, calibd_h, calibd_grid, calibd_out, calibd_labels;
    double calibd_bin = 1.0;
    int calibd_min_samples = 10;
    calibd->add_option("cam1", calibd_s1, "Camera-1 detection stream")->required();
    calibd->add_option("cam2", calibd_s2, "Camera-2 detection stream")->required();
    calibd->add_option("--h", calibd_h, "Homography file (camera 2 -> camera 1)")->required();
    calibd->add_option("--grid", calibd_grid, "x0,y0,patch,cols,rows in camera-1 pixels")
        ->required();
    calibd->add_option("--bin-width", calibd_bin, "Histogram bin width (px)")
        ->capture_default_str();
    calibd->add_option("--min-samples", calibd_min_samples,
                       "Minimum bag size before a patch counts as measured")
        ->capture_default_str();
    calibd->add_option("--labels", calibd_labels,
                       "Comma-separated labels to keep (e.g. wrist_l,wrist_r)");
    calibd->add_option("--metric", metric_name, "Distance metric: manhattan|euclidean")
        ->capture_default_str();
    calibd->add_option("--out", calibd_out, "Threshold map output file")->required();

    // detect
    auto* detect = app.add_subcommand("detect", "Detect surface contacts");
    std::string det_s1, det_s2, det_h, det_dmap, det_out;
    std::optional<double> det_d;
    bool det_same_label = false;
    detect->add_option("cam1", det_s1, "Camera-1 detection stream")->required();
    detect->add_option("cam2", det_s2, "Camera-2 detection stream")->required();
    detect->add_option("--h", det_h, "Homography file (camera 2 -> camera 1)")->required();
    detect->add_option("--d", det_d, "Global distance threshold (px)");
    detect->add_option("--dmap", det_dmap, "Per-patch threshold map file");
    detect->add_flag("--same-label", det_same_label, "Pair only detections with equal labels");
    detect->add_option("--metric", metric_name, "Distance metric: manhattan|euclidean")
        ->capture_default_str();
    detect->add_option("--out", det_out, "Contact set output file")->required();

    // heatmap
    auto* heat = app.add_subcommand("heatmap", "Accumulate contacts into a top-view heat-map");
    std::string heat_contacts, heat_h, heat_grid, heat_out;
    heat->add_option("contacts", heat_contacts, "Contact set file")->required();
    heat->add_option("--h", heat_h, "Top-view homography file (camera-1 -> desk model)")
        ->required();
    heat->add_option("--grid", heat_grid, "x0,y0,patch,cols,rows in top-view coordinates")
        ->required();
    heat->add_option("--out", heat_out, "Output prefix (<prefix>.txt and <prefix>.pgm)")
        ->required();

    // occupancy
    auto* occ = app.add_subcommand("occupancy", "Region occupancy time series");
    std::string occ_contacts, occ_region, occ_range, occ_out;
    bool occ_fill = false;
    long long occ_max_gap = cv::kDefaultMaxGapFrames;
    occ->add_option("contacts", occ_contacts, "Contact set file")->required();
    occ->add_option("--region", occ_region, "name,x0,y0,x1,y1 in camera-1 pixels")->required();
    occ->add_option("--range", occ_range, "start,end frame range (default: contact span)");
    occ->add_flag("--fill", occ_fill, "Fill sub-minute usage gaps");
    occ->add_option("--max-gap", occ_max_gap,
                    "Gap-fill window in frames (default 1500 = one minute at 0.04 s/frame)")
        ->capture_default_str();
    occ->add_option("--out", occ_out, "Series output file")->required();

    // distplot
    auto* dist = app.add_subcommand("distplot", "Per-frame minimum cross-view distance CSV");
    std::string dist_s1, dist_s2, dist_h, dist_range, dist_out;
    dist->add_option("cam1", dist_s1, "Camera-1 detection stream")->required();
    dist->add_option("cam2", dist_s2, "Camera-2 detection stream")->required();
    dist->add_option("--h", dist_h, "Homography file (camera 2 -> camera 1)")->required();
    dist->add_option("--range", dist_range, "start,end frame range (default: stream span)");
    dist->add_option("--metric", metric_name, "Distance metric: manhattan|euclidean")
        ->capture_default_str();
    dist->add_option("--out", dist_out, "CSV output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        const cv::Metric metric = cv::metric_from_string(metric_name);

        if (sim->parsed()) {
            cv::SceneConfig cfg = cv::load_scene_config(sim_config);
            if (sim_sigma) cfg.noise_sigma = *sim_sigma;
            if (sim_seed) cfg.seed = static_cast<uint64_t>(*sim_seed);
            cv::validate_scene(cfg);
            const cv::SimulationResult result = cv::simulate(cfg);
            cv::save_stream(sim_out + "_cam1.csv", result.cam1);
            cv::save_stream(sim_out + "_cam2.csv", result.cam2);
            cv::save_ground_truth(sim_out + "_truth.csv", result.truth);
            log_info("simulated " + std::to_string(cfg.frames) + " frames, " +
                     std::to_string(cfg.objects.size()) + " objects");
        } else if (calibh->parsed()) {
            const auto pairs = load_pairs(calibh_pairs);
            const cv::Homography h = cv::estimate_homography(pairs);
            cv::save_homography(calibh_out, h);
            log_info("estimated homography from " + std::to_string(pairs.size()) + " pairs");
        } else if (calibd->parsed()) {
            cv::DetectionStream s1 = cv::load_stream(calibd_s1);
            cv::DetectionStream s2 = cv::load_stream(calibd_s2);
            if (!calibd_labels.empty()) {
                std::set<std::string> labels;
                for (const auto& f : cv::split_fields(calibd_labels)) labels.emplace(f);
                s1 = cv::filter_label(s1, labels);
                s2 = cv::filter_label(s2, labels);
            }
            const cv::Homography h = cv::load_homography(calibd_h);
            const cv::PatchGrid grid = parse_grid_flag(calibd_grid);
            const cv::ThresholdMap map = cv::build_threshold_map(
                s1, s2, h, grid, calibd_bin, calibd_min_samples, metric);
            cv::save_threshold_map(calibd_out, map);
            log_info("threshold map written to " + calibd_out);
        } else if (detect->parsed()) {
            if (det_d.has_value() == !det_dmap.empty()) {
                std::cerr << "detect: exactly one of --d or --dmap is required\n";
                return 2;
            }
            const cv::DetectionStream s1 = cv::load_stream(det_s1);
            const cv::DetectionStream s2 = cv::load_stream(det_s2);
            const cv::Homography h = cv::load_homography(det_h);
            const cv::ThresholdSpec thr =
                det_d ? cv::ThresholdSpec::global(*det_d)
                      : cv::ThresholdSpec::from_map(cv::load_threshold_map(det_dmap));
            cv::DetectOptions options;
            options.metric = metric;
            options.same_label_only = det_same_label;
            cv::DetectStats stats;
            const cv::ContactSet q = cv::detect_contacts(s1, s2, h, thr, options, &stats);
            cv::save_contacts(det_out, q);
            log_info("checked " + std::to_string(stats.pairs_checked) + " pairs, skipped " +
                     std::to_string(stats.degenerate_skipped) + " degenerate, " +
                     std::to_string(q.total_points()) + " contact points");
        } else if (heat->parsed()) {
            const cv::ContactSet q = cv::load_contacts(heat_contacts);
            const cv::Homography h = cv::load_homography(heat_h);
            const cv::PatchGrid grid = parse_grid_flag(heat_grid);
            const cv::HeatMap map = cv::accumulate_heatmap(q, h, grid);
            {
                std::ofstream out(heat_out + ".txt");
                if (!out) throw cv::Error("cannot write " + heat_out + ".txt");
                cv::write_heatmap(out, map);
            }
            {
                std::ofstream out(heat_out + ".pgm");
                if (!out) throw cv::Error("cannot write " + heat_out + ".pgm");
                cv::render_grid(out, map);
            }
            log_info("heat-map written, dropped " + std::to_string(map.dropped) + " points");
        } else if (occ->parsed()) {
            const cv::ContactSet q = cv::load_contacts(occ_contacts);
            const cv::Region region = parse_region_flag(occ_region);
            const cv::FrameRange range =
                occ_range.empty() ? contacts_range(q) : parse_range_flag(occ_range);
            cv::OccupancySeries series = cv::raw_occupancy(q, region, range);
            if (occ_fill) series = cv::fill_gaps(series, occ_max_gap);
            std::ofstream out(occ_out);
            if (!out) throw cv::Error("cannot write " + occ_out);
            cv::write_occupancy(out, series);
            log_info("occupancy series for region '" + region.name + "' written");
        } else if (dist->parsed()) {
            const cv::DetectionStream s1 = cv::load_stream(dist_s1);
            const cv::DetectionStream s2 = cv::load_stream(dist_s2);
            const cv::Homography h = cv::load_homography(dist_h);
            cv::FrameRange range{0, 0};
            if (!dist_range.empty()) {
                range = parse_range_flag(dist_range);
            } else {
                long long lo = 0, hi = 0;
                bool any = false;
                for (const auto* s : {&s1, &s2}) {
                    if (s->frames.empty()) continue;
                    const long long a = s->frames.front().frame;
                    const long long b = s->frames.back().frame;
                    lo = any ? std::min(lo, a) : a;
                    hi = any ? std::max(hi, b) : b;
                    any = true;
                }
                range = {lo, hi};
            }
            const auto series = cv::min_distance_series(s1, s2, h, range, metric);
            std::ofstream out(dist_out);
            if (!out) throw cv::Error("cannot write " + dist_out);
            for (size_t i = 0; i < series.size(); ++i) {
                out << (range.start + static_cast<long long>(i)) << ',';
                if (series[i]) out << cv::format_double(*series[i]);
                out << '\n';
            }
            log_info("distance series written to " + dist_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
