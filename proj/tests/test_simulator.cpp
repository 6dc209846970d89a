#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "crossview/analytics.hpp"
#include "crossview/consistency.hpp"
#include "crossview/simulator.hpp"
#include "test_util.hpp"

using namespace crossview;
using namespace crossview::testing;

namespace {

SceneConfig two_camera_scene(uint64_t seed) {
    Rng rng(seed);
    SceneConfig cfg;
    cfg.cam1 = random_oblique_camera(rng);
    cfg.cam2 = random_oblique_camera(rng);
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("plane_induced_homography") {
    Rng rng(1);
    const SimCamera cam = random_oblique_camera(rng);

    SUBCASE("identical cameras give the identity") {
        const Homography h = plane_induced_homography(cam.cam, cam.cam);
        CHECK(max_coeff_difference(h, Homography::identity()) < 1e-12);
    }
    SUBCASE("pure principal point shift gives a translation") {
        CameraModel shifted = cam.cam;
        shifted.cx += 12.5;
        shifted.cy -= 4.0;
        const Homography h = plane_induced_homography(shifted, cam.cam);
        CHECK(max_coeff_difference(h, Homography::translation(12.5, -4.0)) < 1e-9);
    }
    SUBCASE("projection consistency on random camera pairs") {
        Rng prng(2);
        for (int trial = 0; trial < 20; ++trial) {
            const SimCamera c1 = random_oblique_camera(prng);
            const SimCamera c2 = random_oblique_camera(prng);
            const Homography h = plane_induced_homography(c1.cam, c2.cam);
            double worst = 0;
            for (int i = 0; i < 100; ++i) {
                const Point3 x{prng.uniform(-0.5, 0.5), prng.uniform(-0.5, 0.5), 0};
                const Point2 expected = project_point(c1.cam, x);
                const Point2 mapped = apply_homography(h, project_point(c2.cam, x));
                worst = std::max(worst, manhattan_distance(expected, mapped));
            }
            CHECK(worst < 1e-9);
        }
    }
    SUBCASE("estimation from projections recovers the analytic map") {
        Rng prng(3);
        const SimCamera c1 = random_oblique_camera(prng);
        const SimCamera c2 = random_oblique_camera(prng);
        const Homography analytic = plane_induced_homography(c1.cam, c2.cam);
        std::vector<std::pair<Point2, Point2>> pairs;
        for (int i = 0; i < 12; ++i) {
            const Point3 x{prng.uniform(-0.5, 0.5), prng.uniform(-0.5, 0.5), 0};
            pairs.push_back({project_point(c2.cam, x), project_point(c1.cam, x)});
        }
        CHECK(max_coeff_difference(estimate_homography(pairs), analytic) < 1e-6);
    }
}

TEST_CASE("scene validation") {
    SceneConfig cfg = two_camera_scene(10);
    cfg.frames = 5;
    cfg.objects.push_back(static_trajectory({0, 0, 0}, 5));
    CHECK_NOTHROW(validate_scene(cfg));

    SUBCASE("trajectory length mismatch") {
        cfg.objects[0].pop_back();
        CHECK_THROWS_AS(validate_scene(cfg), Error);
    }
    SUBCASE("negative sigma") {
        cfg.noise_sigma = -1;
        CHECK_THROWS_AS(validate_scene(cfg), Error);
    }
    SUBCASE("straight-down camera is not oblique") {
        cfg.cam1.cam = make_look_at_camera(1000, 1000, 500, 500, {0, 0, 3}, {0, 0, 0},
                                           {0, 1, 0});
        CHECK_THROWS_AS(validate_scene(cfg), Error);
    }
}

TEST_CASE("simulate") {
    SceneConfig cfg = two_camera_scene(20);
    cfg.frames = 100;
    cfg.objects.push_back(static_trajectory({0.1, -0.05, 0}, cfg.frames));

    SUBCASE("noise-free resting object: every frame is a contact") {
        const SimulationResult sim = simulate(cfg);
        const auto contact = sim.truth.contact_frames();
        CHECK(contact.size() == 100);
        // Tiny threshold recovers all frames because the projections agree.
        const Homography h = plane_induced_homography(cfg.cam1.cam, cfg.cam2.cam);
        const ContactSet q = detect_contacts(sim.cam1, sim.cam2, h, ThresholdSpec::global(1e-6));
        CHECK(q.by_frame.size() == 100);
    }
    SUBCASE("same seed twice gives bit-identical streams") {
        cfg.noise_sigma = 1.5;
        const SimulationResult a = simulate(cfg);
        const SimulationResult b = simulate(cfg);
        CHECK(a.cam1 == b.cam1);
        CHECK(a.cam2 == b.cam2);
        cfg.seed += 1;
        const SimulationResult c = simulate(cfg);
        CHECK(!(a.cam1 == c.cam1));
    }
    SUBCASE("larger noise widens the contact-frame distance") {
        const Homography h = plane_induced_homography(cfg.cam1.cam, cfg.cam2.cam);
        auto mean_min_distance = [&](double sigma) {
            SceneConfig noisy = cfg;
            noisy.noise_sigma = sigma;
            const SimulationResult sim = simulate(noisy);
            const auto series = min_distance_series(sim.cam1, sim.cam2, h,
                                                    {0, noisy.frames - 1});
            double sum = 0;
            int n = 0;
            for (const auto& v : series) {
                if (v) {
                    sum += *v;
                    ++n;
                }
            }
            REQUIRE(n > 0);
            return sum / n;
        };
        CHECK(mean_min_distance(1.0) < mean_min_distance(3.0));
    }
}

TEST_CASE("lift_profile") {
    SceneConfig cfg = two_camera_scene(30);
    cfg.frames = 50;
    cfg.objects.push_back(lift_trajectory({0, 0}, 0.5, cfg.frames));

    const auto profile = lift_profile(cfg);
    REQUIRE(profile.size() == 50);
    CHECK(profile[0].first == 0.0);
    CHECK(profile[0].second <= 1e-9);
    for (size_t i = 1; i < profile.size(); ++i) {
        CHECK(profile[i].first > profile[i - 1].first);
        CHECK(profile[i].second > profile[i - 1].second);
    }

    SUBCASE("noise must be off") {
        cfg.noise_sigma = 1;
        CHECK_THROWS_AS(lift_profile(cfg), Error);
    }
}

TEST_CASE("ambiguity_experiment") {
    Rng rng(40);
    AmbiguityConfig cfg;
    cfg.cam1 = random_oblique_camera(rng);
    cfg.cam2 = random_oblique_camera(rng);
    cfg.frames = 500;
    cfg.seed = 7;
    cfg.d = 5.0;

    SUBCASE("well separated airborne objects produce no contacts") {
        cfg.box1 = {-0.5, -0.4, -0.5, -0.4, 0.3, 0.5};
        cfg.box2 = {0.4, 0.5, 0.4, 0.5, 0.3, 0.5};
        const AmbiguityResult result = ambiguity_experiment(cfg, 4);
        CHECK(result.total_frames == 2000);
        CHECK(result.rate == 0.0);
        CHECK(result.false_positive_frames == 0);
    }
    SUBCASE("control run on the plane reports every frame") {
        cfg.box1 = {-0.1, 0.1, -0.1, 0.1, 0.0, 0.0};
        cfg.box2 = {-0.1, 0.1, -0.1, 0.1, 0.0, 0.0};
        const AmbiguityResult result = ambiguity_experiment(cfg, 2);
        CHECK(result.rate == doctest::Approx(1.0));
        CHECK(result.false_positive_frames == 0);  // contacts are real here
    }
    SUBCASE("deterministic across runs") {
        cfg.box1 = {-0.3, 0.3, -0.3, 0.3, 0.05, 0.4};
        cfg.box2 = {-0.3, 0.3, -0.3, 0.3, 0.05, 0.4};
        const AmbiguityResult a = ambiguity_experiment(cfg, 3);
        const AmbiguityResult b = ambiguity_experiment(cfg, 3);
        CHECK(a.reported_frames == b.reported_frames);
        CHECK(a.false_positive_frames == b.false_positive_frames);
    }
}

TEST_CASE("scene config parsing") {
    const std::string text =
        "# synthetic scene\n"
        "[camera1]\n"
        "fx = 1000\nfy = 1000\ncx = 960\ncy = 540\n"
        "pos = 1.5, -1.0, 1.8\nlook_at = 0, 0, 0\n"
        "[camera2]\n"
        "fx = 900\nfy = 900\ncx = 960\ncy = 540\n"
        "pos = -1.2, 1.4, 2.0\nlook_at = 0, 0, 0\n"
        "[object.0]\n"
        "type = square\nbase = 0, 0\nheight = 0.4\nrest = 5\nair = 5\n"
        "[noise]\nsigma = 0.5\n"
        "[run]\nframes = 40\nseed = 123\n";
    std::stringstream ss(text);
    const SceneConfig cfg = parse_scene_config(ss);
    CHECK(cfg.frames == 40);
    CHECK(cfg.seed == 123);
    CHECK(cfg.noise_sigma == 0.5);
    REQUIRE(cfg.objects.size() == 1);
    CHECK(cfg.objects[0].size() == 40);
    CHECK(cfg.objects[0][0].z == 0.0);
    CHECK(cfg.objects[0][5].z == 0.4);

    SUBCASE("missing section rejected") {
        std::stringstream bad("[run]\nframes = 10\n");
        CHECK_THROWS_AS(parse_scene_config(bad), Error);
    }
    SUBCASE("key outside section rejected") {
        std::stringstream bad("frames = 10\n");
        CHECK_THROWS_AS(parse_scene_config(bad), Error);
    }
}

TEST_CASE("ground truth csv") {
    SceneConfig cfg = two_camera_scene(50);
    cfg.frames = 2;
    cfg.objects.push_back(static_trajectory({0.25, 0, 0}, 2));
    const SimulationResult sim = simulate(cfg);
    std::stringstream ss;
    write_ground_truth(ss, sim.truth);
    CHECK(ss.str() == "0,0,0.25,0,0,1\n1,0,0.25,0,0,1\n");
}
