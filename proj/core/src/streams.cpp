#include "crossview/streams.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "crossview/text.hpp"

namespace crossview {

size_t DetectionStream::detection_count() const {
    size_t n = 0;
    for (const auto& fp : frames) n += fp.cam1.size() + fp.cam2.size();
    return n;
}

DetectionStream make_stream(const std::vector<Detection>& detections) {
    std::map<long long, FramePair> by_frame;
    for (const auto& d : detections) {
        auto& fp = by_frame[d.frame];
        fp.frame = d.frame;
        auto& side = d.camera == 1 ? fp.cam1 : fp.cam2;
        if (std::find(side.begin(), side.end(), d) == side.end()) {
            side.push_back(d);
        }
    }
    DetectionStream out;
    out.frames.reserve(by_frame.size());
    for (auto& [frame, fp] : by_frame) out.frames.push_back(std::move(fp));
    return out;
}

DetectionStream parse_stream(std::istream& in) {
    std::vector<Detection> detections;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string ctx = "stream line " + std::to_string(line_no);
        const auto fields = split_fields(line);
        if (fields.size() != 5) {
            throw Error(ctx + ": expected 5 fields frame,camera,label,x,y, got " +
                        std::to_string(fields.size()));
        }
        Detection d;
        d.frame = parse_int(fields[0], ctx);
        if (d.frame < 0) throw Error(ctx + ": negative frame index");
        const long long cam = parse_int(fields[1], ctx);
        if (cam != 1 && cam != 2) throw Error(ctx + ": camera must be 1 or 2");
        d.camera = static_cast<int>(cam);
        d.label = std::string(fields[2]);
        if (d.label.empty()) throw Error(ctx + ": empty label");
        d.point.x = parse_double(fields[3], ctx);
        d.point.y = parse_double(fields[4], ctx);
        detections.push_back(std::move(d));
    }
    return make_stream(detections);
}

void write_stream(std::ostream& out, const DetectionStream& s) {
    for (const auto& fp : s.frames) {
        for (const auto* side : {&fp.cam1, &fp.cam2}) {
            for (const auto& d : *side) {
                out << d.frame << ',' << d.camera << ',' << d.label << ','
                    << format_double(d.point.x) << ',' << format_double(d.point.y) << '\n';
            }
        }
    }
}

DetectionStream load_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stream file: " + path);
    return parse_stream(in);
}

void save_stream(const std::string& path, const DetectionStream& s) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write stream file: " + path);
    write_stream(out, s);
}

DetectionStream filter_label(const DetectionStream& s, const std::set<std::string>& labels) {
    DetectionStream out;
    out.frame_period_s = s.frame_period_s;
    for (const auto& fp : s.frames) {
        FramePair kept;
        kept.frame = fp.frame;
        for (const auto& d : fp.cam1) {
            if (labels.count(d.label)) kept.cam1.push_back(d);
        }
        for (const auto& d : fp.cam2) {
            if (labels.count(d.label)) kept.cam2.push_back(d);
        }
        if (!kept.cam1.empty() || !kept.cam2.empty()) out.frames.push_back(std::move(kept));
    }
    return out;
}

}  // namespace crossview
