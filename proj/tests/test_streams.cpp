#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "crossview/random.hpp"
#include "crossview/streams.hpp"

using namespace crossview;

namespace {

DetectionStream random_stream(Rng& rng, int n_detections) {
    std::vector<Detection> dets;
    const char* labels[] = {"wrist_l", "wrist_r", "elbow_l", "ball"};
    for (int i = 0; i < n_detections; ++i) {
        Detection d;
        d.frame = static_cast<long long>(rng.next_u64() % 50);
        d.camera = rng.next_u64() % 2 ? 1 : 2;
        d.label = labels[rng.next_u64() % 4];
        d.point = {rng.uniform(-500, 500), rng.uniform(-500, 500)};
        dets.push_back(std::move(d));
    }
    return make_stream(dets);
}

}  // namespace

TEST_CASE("parse_stream basics") {
    SUBCASE("empty input") {
        std::stringstream ss("");
        CHECK(parse_stream(ss).empty());
    }
    SUBCASE("out-of-order frames are sorted") {
        std::stringstream ss("5,1,a,1,2\n2,1,b,3,4\n");
        const DetectionStream s = parse_stream(ss);
        REQUIRE(s.frames.size() == 2);
        CHECK(s.frames[0].frame == 2);
        CHECK(s.frames[1].frame == 5);
    }
    SUBCASE("field mapping") {
        std::stringstream ss("7,2,wrist_l,10.5,20.25\n");
        const DetectionStream s = parse_stream(ss);
        REQUIRE(s.frames.size() == 1);
        CHECK(s.frames[0].frame == 7);
        CHECK(s.frames[0].cam1.empty());
        REQUIRE(s.frames[0].cam2.size() == 1);
        CHECK(s.frames[0].cam2[0].label == "wrist_l");
        CHECK(s.frames[0].cam2[0].point.x == 10.5);
        CHECK(s.frames[0].cam2[0].point.y == 20.25);
    }
    SUBCASE("comments and duplicates") {
        std::stringstream ss("# header\n1,1,a,0,0\n1,1,a,0,0\n");
        CHECK(parse_stream(ss).detection_count() == 1);
    }
}

TEST_CASE("parse_stream error reporting") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        std::stringstream ss(text);
        try {
            parse_stream(ss);
            FAIL("expected parse error for: " << text);
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect_error("1,1,a,0\n", "line 1");
    expect_error("1,1,a,0,0\nx,1,a,0,0\n", "line 2");
    expect_error("1,3,a,0,0\n", "camera must be 1 or 2");
    expect_error("-4,1,a,0,0\n", "negative frame");
    expect_error("1,1,,0,0\n", "empty label");
    expect_error("1,1,a,nope,0\n", "invalid number");
}

TEST_CASE("write/parse round trip") {
    SUBCASE("empty stream") {
        std::stringstream ss;
        write_stream(ss, DetectionStream{});
        CHECK(ss.str().empty());
    }
    SUBCASE("single record") {
        std::stringstream in("3,1,ball,1.5,-2\n");
        const DetectionStream s = parse_stream(in);
        std::stringstream out;
        write_stream(out, s);
        CHECK(out.str() == "3,1,ball,1.5,-2\n");
    }
    SUBCASE("random streams: parse(write(s)) == s and text is stable") {
        Rng rng(99);
        for (int trial = 0; trial < 50; ++trial) {
            const DetectionStream s = random_stream(rng, 40);
            std::stringstream first;
            write_stream(first, s);
            std::stringstream replay(first.str());
            const DetectionStream reparsed = parse_stream(replay);
            CHECK(reparsed == s);
            std::stringstream second;
            write_stream(second, reparsed);
            CHECK(second.str() == first.str());
        }
    }
}

TEST_CASE("stream invariants") {
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        const DetectionStream s = random_stream(rng, 60);
        for (size_t i = 1; i < s.frames.size(); ++i) {
            CHECK(s.frames[i - 1].frame < s.frames[i].frame);
        }
        for (const auto& fp : s.frames) {
            for (const auto& d : fp.cam1) {
                CHECK(d.camera == 1);
                CHECK(d.frame == fp.frame);
            }
            for (const auto& d : fp.cam2) {
                CHECK(d.camera == 2);
                CHECK(d.frame == fp.frame);
            }
        }
    }
}

TEST_CASE("filter_label") {
    std::stringstream ss(
        "0,1,wrist_l,1,1\n0,2,wrist_r,2,2\n1,1,elbow_l,3,3\n2,2,wrist_l,4,4\n2,1,elbow_r,5,5\n");
    const DetectionStream s = parse_stream(ss);

    SUBCASE("all labels keeps everything") {
        const auto all = filter_label(s, {"wrist_l", "wrist_r", "elbow_l", "elbow_r"});
        CHECK(all == s);
    }
    SUBCASE("empty label set drops everything") {
        CHECK(filter_label(s, {}).empty());
    }
    SUBCASE("wrist-only filter") {
        const auto wrists = filter_label(s, {"wrist_l", "wrist_r"});
        CHECK(wrists.detection_count() == 3);  // counted from the fixture text
        for (const auto& fp : wrists.frames) {
            CHECK(!(fp.cam1.empty() && fp.cam2.empty()));
        }
    }
    SUBCASE("never grows and is idempotent") {
        Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const DetectionStream r = random_stream(rng, 50);
            const auto once = filter_label(r, {"wrist_l", "ball"});
            CHECK(once.detection_count() <= r.detection_count());
            CHECK(filter_label(once, {"wrist_l", "ball"}) == once);
        }
    }
}
