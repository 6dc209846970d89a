#include <benchmark/benchmark.h>

#include <vector>

#include "crossview/calibration.hpp"
#include "crossview/consistency.hpp"
#include "crossview/geometry.hpp"
#include "crossview/random.hpp"
#include "crossview/simulator.hpp"
#include "test_util.hpp"

using namespace crossview;
using namespace crossview::testing;

namespace {

std::vector<std::pair<Point2, Point2>> make_pairs(int n) {
    Rng rng(1);
    const Homography h = random_homography(rng);
    std::vector<std::pair<Point2, Point2>> pairs;
    pairs.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Point2 p{rng.uniform(0, 1000), rng.uniform(0, 1000)};
        pairs.push_back({p, apply_homography(h, p)});
    }
    return pairs;
}

void bm_estimate_homography(benchmark::State& state) {
    const auto pairs = make_pairs(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_homography(pairs));
    }
}
BENCHMARK(bm_estimate_homography)->Arg(4)->Arg(16)->Arg(64);

void bm_apply_homography(benchmark::State& state) {
    Rng rng(2);
    const Homography h = random_homography(rng);
    const Point2 p{123.4, 567.8};
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_homography(h, p));
    }
}
BENCHMARK(bm_apply_homography);

SimulationResult make_scene(long long frames, int objects) {
    Rng rng(3);
    SceneConfig cfg;
    cfg.cam1 = random_oblique_camera(rng);
    cfg.cam2 = random_oblique_camera(rng);
    cfg.frames = frames;
    cfg.noise_sigma = 1.0;
    cfg.seed = 4;
    for (int i = 0; i < objects; ++i) {
        const double off = 0.05 * i;
        cfg.objects.push_back(square_wave_trajectory({-0.3 + off, -0.3}, {0.3, 0.3 - off}, 0.4,
                                                     5, 5, frames));
    }
    return simulate(cfg);
}

void bm_detect_contacts(benchmark::State& state) {
    const SimulationResult sim = make_scene(1000, static_cast<int>(state.range(0)));
    Rng rng(3);
    const SimCamera c1 = random_oblique_camera(rng);
    const SimCamera c2 = random_oblique_camera(rng);
    const Homography h = plane_induced_homography(c1.cam, c2.cam);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            detect_contacts(sim.cam1, sim.cam2, h, ThresholdSpec::global(5.0)));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_detect_contacts)->Arg(1)->Arg(4)->Arg(8);

void bm_build_threshold_map(benchmark::State& state) {
    const SimulationResult sim = make_scene(2000, 1);
    Rng rng(3);
    const SimCamera c1 = random_oblique_camera(rng);
    const SimCamera c2 = random_oblique_camera(rng);
    const Homography h = plane_induced_homography(c1.cam, c2.cam);
    const PatchGrid grid{{0, 0}, 100, 40, 40};
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_threshold_map(sim.cam1, sim.cam2, h, grid, 5.0, 5));
    }
}
BENCHMARK(bm_build_threshold_map);

void bm_simulate(benchmark::State& state) {
    Rng rng(5);
    SceneConfig cfg;
    cfg.cam1 = random_oblique_camera(rng);
    cfg.cam2 = random_oblique_camera(rng);
    cfg.frames = state.range(0);
    cfg.noise_sigma = 1.0;
    cfg.objects.push_back(lift_trajectory({0, 0}, 0.5, cfg.frames));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
