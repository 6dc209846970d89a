#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "crossview/analytics.hpp"
#include "crossview/random.hpp"

using namespace crossview;

namespace {

ContactSet contacts_at(const std::vector<std::pair<long long, Point2>>& pts) {
    ContactSet q;
    for (const auto& [frame, p] : pts) q.by_frame[frame].push_back({frame, p, "a", "b"});
    return q;
}

ContactSet random_contacts(Rng& rng, int n) {
    std::vector<std::pair<long long, Point2>> pts;
    for (int i = 0; i < n; ++i) {
        pts.push_back({static_cast<long long>(rng.next_u64() % 100),
                       {rng.uniform(-50, 150), rng.uniform(-50, 150)}});
    }
    return contacts_at(pts);
}

// Brute-force reference for fill_gaps.
std::vector<bool> fill_gaps_reference(const std::vector<bool>& in, long long max_gap) {
    std::vector<bool> out = in;
    const long long n = static_cast<long long>(in.size());
    for (long long i = 0; i < n; ++i) {
        if (in[i]) continue;
        long long left = i - 1;
        while (left >= 0 && !in[left]) --left;
        long long right = i + 1;
        while (right < n && !in[right]) ++right;
        if (left < 0 || right >= n) continue;
        if (right - left - 1 < max_gap) out[i] = true;
    }
    return out;
}

}  // namespace

TEST_CASE("accumulate_heatmap") {
    const Homography id = Homography::identity();
    const PatchGrid grid{{0, 0}, 10, 4, 4};

    SUBCASE("empty contact set") {
        const HeatMap map = accumulate_heatmap(ContactSet{}, id, grid);
        for (const long long c : map.counts) CHECK(c == 0);
        CHECK(map.dropped == 0);
    }
    SUBCASE("one contact at a cell center") {
        const HeatMap map = accumulate_heatmap(contacts_at({{0, {15, 25}}}), id, grid);
        CHECK(map.counts[grid.index(1, 2)] == 1);
        long long total = 0;
        for (const long long c : map.counts) total += c;
        CHECK(total == 1);
    }
    SUBCASE("repeated contacts all count") {
        std::vector<std::pair<long long, Point2>> pts;
        for (long long f = 0; f < 7; ++f) pts.push_back({f, {5, 5}});
        const HeatMap map = accumulate_heatmap(contacts_at(pts), id, grid);
        CHECK(map.counts[grid.index(0, 0)] == 7);
    }
    SUBCASE("count conservation on random sets") {
        Rng rng(13);
        for (int trial = 0; trial < 50; ++trial) {
            const ContactSet q = random_contacts(rng, 80);
            const HeatMap map = accumulate_heatmap(q, id, grid);
            long long total = map.dropped;
            for (const long long c : map.counts) total += c;
            CHECK(total == static_cast<long long>(q.total_points()));
        }
    }
}

TEST_CASE("raw_occupancy") {
    const Region desk{"desk", 0, 0, 100, 100};

    SUBCASE("empty contact set") {
        const OccupancySeries s = raw_occupancy(ContactSet{}, desk, {0, 9});
        CHECK(s.occupied.size() == 10);
        for (const bool b : s.occupied) CHECK(!b);
    }
    SUBCASE("single contact marks one frame") {
        const OccupancySeries s = raw_occupancy(contacts_at({{5, {50, 50}}}), desk, {0, 9});
        for (size_t i = 0; i < s.occupied.size(); ++i) CHECK(s.occupied[i] == (i == 5));
    }
    SUBCASE("upper edge is exclusive, lower inclusive") {
        const OccupancySeries hi = raw_occupancy(contacts_at({{0, {100, 50}}}), desk, {0, 0});
        CHECK(!hi.occupied[0]);
        const OccupancySeries lo = raw_occupancy(contacts_at({{0, {0, 0}}}), desk, {0, 0});
        CHECK(lo.occupied[0]);
    }
    SUBCASE("union of contact sets is the OR of the series") {
        Rng rng(21);
        const ContactSet a = random_contacts(rng, 40);
        const ContactSet b = random_contacts(rng, 40);
        ContactSet both = a;
        for (const auto& [frame, pts] : b.by_frame) {
            auto& dst = both.by_frame[frame];
            dst.insert(dst.end(), pts.begin(), pts.end());
        }
        const FrameRange range{0, 99};
        const auto sa = raw_occupancy(a, desk, range);
        const auto sb = raw_occupancy(b, desk, range);
        const auto su = raw_occupancy(both, desk, range);
        for (size_t i = 0; i < su.occupied.size(); ++i) {
            CHECK(su.occupied[i] == (sa.occupied[i] || sb.occupied[i]));
        }
    }
    SUBCASE("bad region") {
        CHECK_THROWS_AS(validate_region(Region{"r", 10, 0, 10, 5}), Error);
    }
}

TEST_CASE("fill_gaps") {
    auto series = [](std::vector<bool> v) {
        OccupancySeries s;
        s.region = "r";
        s.start = 0;
        s.occupied = std::move(v);
        return s;
    };

    SUBCASE("all-false unchanged") {
        const auto s = series(std::vector<bool>(50, false));
        CHECK(fill_gaps(s).occupied == s.occupied);
    }
    SUBCASE("short internal gap filled") {
        std::vector<bool> v(300, false);
        for (int i = 0; i < 100; ++i) v[i] = true;
        for (int i = 200; i < 300; ++i) v[i] = true;
        const auto filled = fill_gaps(series(v), 1500);
        for (const bool b : filled.occupied) CHECK(b);
    }
    SUBCASE("gap of exactly max_gap preserved") {
        std::vector<bool> v;
        v.push_back(true);
        for (int i = 0; i < 10; ++i) v.push_back(false);
        v.push_back(true);
        const auto kept = fill_gaps(series(v), 10);
        CHECK(kept.occupied == v);
        const auto filled = fill_gaps(series(v), 11);
        for (const bool b : filled.occupied) CHECK(b);
    }
    SUBCASE("leading and trailing runs untouched") {
        std::vector<bool> v(20, false);
        v[10] = true;
        const auto out = fill_gaps(series(v), 1500);
        CHECK(out.occupied == v);
    }
    SUBCASE("matches brute force on random series, idempotent and monotone") {
        Rng rng(37);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<bool> v(60);
            for (size_t i = 0; i < v.size(); ++i) v[i] = rng.next_u64() % 3 == 0;
            const long long max_gap = 1 + static_cast<long long>(rng.next_u64() % 8);
            const auto once = fill_gaps(series(v), max_gap);
            CHECK(once.occupied == fill_gaps_reference(v, max_gap));
            CHECK(fill_gaps(once, max_gap).occupied == once.occupied);
            for (size_t i = 0; i < v.size(); ++i) {
                if (v[i]) CHECK(once.occupied[i]);
            }
        }
    }
}

TEST_CASE("min_distance_series") {
    const Homography id = Homography::identity();

    std::vector<Detection> d1{{0, 1, "a", {0, 0}}, {2, 1, "a", {10, 10}}};
    std::vector<Detection> d2{{0, 2, "b", {0, 0}}, {1, 2, "b", {5, 5}}, {2, 2, "b", {13, 14}}};
    const auto series = min_distance_series(make_stream(d1), make_stream(d2), id, {0, 3});
    REQUIRE(series.size() == 4);
    REQUIRE(series[0].has_value());
    CHECK(*series[0] == doctest::Approx(0.0));
    CHECK(!series[1].has_value());  // no cam1 detection
    REQUIRE(series[2].has_value());
    CHECK(*series[2] == doctest::Approx(7.0));
    CHECK(!series[3].has_value());

    SUBCASE("appending farther detections leaves the minimum unchanged") {
        d2.push_back({0, 2, "c", {1000, 1000}});
        const auto more = min_distance_series(make_stream(d1), make_stream(d2), id, {0, 0});
        REQUIRE(more[0].has_value());
        CHECK(*more[0] == doctest::Approx(0.0));
    }
}

TEST_CASE("occupancy file format") {
    OccupancySeries s;
    s.region = "desk";
    s.start = 3;
    s.occupied = {true, false, true};
    std::stringstream ss;
    write_occupancy(ss, s);
    CHECK(ss.str() == "3,1\n4,0\n5,1\n");
    const OccupancySeries back = parse_occupancy(ss, "desk");
    CHECK(back.start == 3);
    CHECK(back.occupied == s.occupied);
}

TEST_CASE("heatmap dump and PGM rendering") {
    const PatchGrid grid{{0, 0}, 10, 2, 1};
    const Homography id = Homography::identity();
    std::vector<std::pair<long long, Point2>> pts;
    pts.push_back({0, {5, 5}});
    for (long long f = 0; f < 4; ++f) pts.push_back({f + 1, {15, 5}});
    pts.push_back({9, {500, 500}});  // dropped
    const HeatMap map = accumulate_heatmap(contacts_at(pts), id, grid);
    CHECK(map.dropped == 1);

    std::stringstream dump;
    write_heatmap(dump, map);
    CHECK(dump.str() == "heatmap 2 1 0 0 10 1\n1 4\n");
    const HeatMap back = parse_heatmap(dump);
    CHECK(back.counts == map.counts);
    CHECK(back.dropped == 1);

    // Linear scaling: counts 1 and 4 -> floor(1*255/4) = 63 and 255.
    std::stringstream pgm;
    render_grid(pgm, map);
    CHECK(pgm.str() == "P2\n2 1\n255\n63 255\n");

    SUBCASE("all-zero map renders all zeros") {
        const HeatMap zero = accumulate_heatmap(ContactSet{}, id, grid);
        std::stringstream out;
        render_grid(out, zero);
        CHECK(out.str() == "P2\n2 1\n255\n0 0\n");
    }
}
