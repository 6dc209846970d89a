#include "crossview/consistency.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "crossview/text.hpp"

namespace crossview {

ThresholdSpec ThresholdSpec::global(double d) {
    if (!(d > 0)) throw Error("threshold: global d must be > 0");
    return ThresholdSpec{d};
}

ThresholdSpec ThresholdSpec::from_map(ThresholdMap map) {
    validate_grid(map.grid);
    if (map.values.empty()) throw Error("threshold: empty threshold map");
    return ThresholdSpec{std::move(map)};
}

size_t ContactSet::total_points() const {
    size_t n = 0;
    for (const auto& [frame, pts] : by_frame) n += pts.size();
    return n;
}

std::optional<Point2> consistency_check(const Point2& p1, const Point2& p2, const Homography& h,
                                        double d, Metric metric) {
    if (!(d > 0)) throw Error("consistency_check: d must be > 0");
    const Point2 mapped = apply_homography(h, p2);
    if (distance(p1, mapped, metric) < d) return p1;
    return std::nullopt;
}

double resolve_threshold(const ThresholdSpec& thr, const Point2& at) {
    if (const double* d = std::get_if<double>(&thr.value)) return *d;
    return std::get<ThresholdMap>(thr.value).value_at(at);
}

ContactSet detect_contacts(const DetectionStream& s1, const DetectionStream& s2,
                           const Homography& h, const ThresholdSpec& thr,
                           const DetectOptions& options, DetectStats* stats) {
    ContactSet q;
    DetectStats local;
    auto it2 = s2.frames.begin();
    for (const auto& f1 : s1.frames) {
        while (it2 != s2.frames.end() && it2->frame < f1.frame) ++it2;
        if (it2 == s2.frames.end()) break;
        if (it2->frame != f1.frame || it2->cam2.empty()) continue;

        std::vector<ContactPoint> contacts;
        for (const auto& d1 : f1.cam1) {
            const double d = resolve_threshold(thr, d1.point);
            for (const auto& d2 : it2->cam2) {
                if (options.same_label_only && d1.label != d2.label) continue;
                ++local.pairs_checked;
                std::optional<Point2> hit;
                try {
                    hit = consistency_check(d1.point, d2.point, h, d, options.metric);
                } catch (const Error&) {
                    ++local.degenerate_skipped;
                    continue;
                }
                if (hit) {
                    contacts.push_back({f1.frame, *hit, d1.label, d2.label});
                    break;  // keyed by p1: one contact point per cam1 detection
                }
            }
        }
        if (!contacts.empty()) q.by_frame.emplace(f1.frame, std::move(contacts));
    }
    if (stats) *stats = local;
    return q;
}

namespace {

bool contact_less(const ContactPoint& a, const ContactPoint& b) {
    return std::tie(a.frame, a.point.x, a.point.y, a.label1, a.label2) <
           std::tie(b.frame, b.point.x, b.point.y, b.label1, b.label2);
}

}  // namespace

ContactSet parse_contacts(std::istream& in) {
    ContactSet q;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string ctx = "contact file line " + std::to_string(line_no);
        const auto fields = split_fields(line);
        if (fields.size() != 5) throw Error(ctx + ": expected frame,x,y,label1,label2");
        ContactPoint cp;
        cp.frame = parse_int(fields[0], ctx);
        cp.point.x = parse_double(fields[1], ctx);
        cp.point.y = parse_double(fields[2], ctx);
        cp.label1 = std::string(fields[3]);
        cp.label2 = std::string(fields[4]);
        q.by_frame[cp.frame].push_back(std::move(cp));
    }
    for (auto& [frame, pts] : q.by_frame) std::sort(pts.begin(), pts.end(), contact_less);
    return q;
}

void write_contacts(std::ostream& out, const ContactSet& q) {
    for (const auto& [frame, pts] : q.by_frame) {
        auto sorted = pts;
        std::sort(sorted.begin(), sorted.end(), contact_less);
        for (const auto& cp : sorted) {
            out << cp.frame << ',' << format_double(cp.point.x) << ',' << format_double(cp.point.y)
                << ',' << cp.label1 << ',' << cp.label2 << '\n';
        }
    }
}

ContactSet load_contacts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open contact file: " + path);
    return parse_contacts(in);
}

void save_contacts(const std::string& path, const ContactSet& q) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write contact file: " + path);
    write_contacts(out, q);
}

}  // namespace crossview
