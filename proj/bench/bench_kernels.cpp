// Serial reference kernels against their OpenMP versions on page-sized inputs.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "synthpass/kernels.hpp"

using namespace synthpass;
namespace k = synthpass::kernels;

namespace {

Raster noise_raster(int w, int h, std::uint32_t seed) {
  std::mt19937 gen(seed);
  Raster r(w, h);
  for (auto& p : r.pixels()) {
    p = {static_cast<std::uint8_t>(gen()), static_cast<std::uint8_t>(gen()), static_cast<std::uint8_t>(gen()), 255};
  }
  return r;
}

// Half-resolution passport canvas.
constexpr int kW = 738;
constexpr int kH = 520;

const Raster& page() {
  static const Raster r = noise_raster(kW, kH, 1);
  return r;
}

template <Raster (*Blur)(const Raster&, double)>
void BM_BlurRaster(benchmark::State& state) {
  const double sigma = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(Blur(page(), sigma));
  state.SetItemsProcessed(state.iterations() * kW * kH);
}

template <Plane (*Blur)(const Plane&, double, k::Border)>
void BM_BlurPlane(benchmark::State& state) {
  Plane p(kW, kH);
  std::mt19937 gen(2);
  for (auto& v : p.pixels()) v = static_cast<float>(gen() % 1000) / 1000.0f;
  for (auto _ : state) benchmark::DoNotOptimize(Blur(p, 1.5, k::Border::Zero));
  state.SetItemsProcessed(state.iterations() * kW * kH);
}

template <k::LaplacianMoments (*Lap)(const Image<std::uint8_t>&, const Rect&)>
void BM_Laplacian(benchmark::State& state) {
  const auto gray = to_gray(page());
  const Rect all{0, 0, kW, kH};
  for (auto _ : state) benchmark::DoNotOptimize(Lap(gray, all));
  state.SetItemsProcessed(state.iterations() * kW * kH);
}

template <void (*Over)(Raster&, const Raster&, const Plane&, int, int)>
void BM_SourceOver(benchmark::State& state) {
  const Raster src = noise_raster(kW, kH, 3);
  const Plane alpha(kW, kH, 0.6f);
  Raster canvas = page();
  for (auto _ : state) {
    Over(canvas, src, alpha, 0, 0);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * kW * kH);
}

template <Raster (*Warp)(const Raster&, const k::Affine&, int, int)>
void BM_Warp(benchmark::State& state) {
  k::Affine m;
  m.a = 0.9;
  m.b = -0.1;
  m.c = 0.1;
  m.d = 0.9;
  m.tx = 20;
  m.ty = 10;
  for (auto _ : state) benchmark::DoNotOptimize(Warp(page(), m, 413, 531));
  state.SetItemsProcessed(state.iterations() * 413 * 531);
}

template <Raster (*Resample)(const Raster&, int, int)>
void BM_Resample(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Resample(page(), kW / 3, kH / 3));
  state.SetItemsProcessed(state.iterations() * kW * kH);
}

template <BinaryMask (*Mask)(const Raster&, Rgba, int)>
void BM_ChebyshevMask(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Mask(page(), {128, 64, 200, 255}, 40));
  state.SetItemsProcessed(state.iterations() * kW * kH);
}

}  // namespace

BENCHMARK(BM_BlurRaster<k::serial::blur>)->Name("blur_rgba/serial")->Arg(8)->Arg(15)->Arg(30);
BENCHMARK(BM_BlurRaster<k::omp::blur>)->Name("blur_rgba/omp")->Arg(8)->Arg(15)->Arg(30);
BENCHMARK(BM_BlurPlane<k::serial::blur>)->Name("blur_plane/serial");
BENCHMARK(BM_BlurPlane<k::omp::blur>)->Name("blur_plane/omp");
BENCHMARK(BM_Laplacian<k::serial::laplacian_moments>)->Name("laplacian/serial");
BENCHMARK(BM_Laplacian<k::omp::laplacian_moments>)->Name("laplacian/omp");
BENCHMARK(BM_SourceOver<k::serial::source_over>)->Name("source_over/serial");
BENCHMARK(BM_SourceOver<k::omp::source_over>)->Name("source_over/omp");
BENCHMARK(BM_Warp<k::serial::warp>)->Name("warp/serial");
BENCHMARK(BM_Warp<k::omp::warp>)->Name("warp/omp");
BENCHMARK(BM_Resample<k::serial::resample>)->Name("resample/serial");
BENCHMARK(BM_Resample<k::omp::resample>)->Name("resample/omp");
BENCHMARK(BM_ChebyshevMask<k::serial::chebyshev_mask>)->Name("chebyshev_mask/serial");
BENCHMARK(BM_ChebyshevMask<k::omp::chebyshev_mask>)->Name("chebyshev_mask/omp");

BENCHMARK_MAIN();
