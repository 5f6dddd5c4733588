#include <benchmark/benchmark.h>

#include <random>

#include "mono3d/eval.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/synth.hpp"
#include "mono3d/warp.hpp"

using namespace mono3d;

namespace {

Box3D random_box(std::mt19937_64& rng, bool tilted) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI), c(-2, 2), ang(-0.1, 0.1);
  Box3D b;
  b.center = Vec3(c(rng), c(rng) * 0.2, 15 + c(rng));
  b.h = 1.5;
  b.w = 1.7;
  b.l = 4.2;
  if (tilted)
    b.heading = Heading::full_rotation(compose_r3d(ang(rng), u(rng), ang(rng)));
  else
    b.heading = Heading::yaw_only(u(rng));
  return b;
}

void BM_iou_bev(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const BoxCorners a = box_corners(random_box(rng, false));
  const BoxCorners b = box_corners(random_box(rng, false));
  for (auto _ : state) benchmark::DoNotOptimize(iou_bev(a, b));
}
BENCHMARK(BM_iou_bev);

void BM_iou_3d_envelope(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const BoxCorners a = box_corners(random_box(rng, true));
  const BoxCorners b = box_corners(random_box(rng, true));
  for (auto _ : state) benchmark::DoNotOptimize(iou_3d(a, b));
}
BENCHMARK(BM_iou_3d_envelope);

void BM_iou_3d_exact(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const BoxCorners a = box_corners(random_box(rng, true));
  const BoxCorners b = box_corners(random_box(rng, true));
  for (auto _ : state) benchmark::DoNotOptimize(iou_3d_exact(a, b));
}
BENCHMARK(BM_iou_3d_exact);

void BM_synthesize_view(benchmark::State& state) {
  const int w = 640, h = 192;
  ImageBuffer img = ImageBuffer::filled(w, h, 120, 90, 60);
  DepthRaster depth = DepthRaster::constant(w, h, 12.0f);
  const CameraIntrinsics k(360, 360, w / 2.0, h / 2.0, w, h);
  RigidPose pose;
  pose.rotation = rot_axis(Axis::X, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_view(img, depth, k, pose));
}
BENCHMARK(BM_synthesize_view)->Unit(benchmark::kMillisecond);

void BM_ap_from_matches(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<double, bool>> flags;
  flags.reserve(10000);
  for (int i = 0; i < 10000; ++i) flags.emplace_back(u(rng), u(rng) < 0.6);
  for (auto _ : state) {
    auto copy = flags;
    benchmark::DoNotOptimize(ap_from_matches(std::move(copy), 7000, 40));
  }
}
BENCHMARK(BM_ap_from_matches)->Unit(benchmark::kMicrosecond);

void BM_synth_sweep_small(benchmark::State& state) {
  SynthConfig cfg;
  cfg.frames = 5;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
}
BENCHMARK(BM_synth_sweep_small)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
