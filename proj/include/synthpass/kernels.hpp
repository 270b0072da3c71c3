#pragma once

// Pixel kernels used by the quality filter, compositor and pattern tools.
//
// Every kernel exists twice: a plain serial reference in kernels::serial and a
// row-parallel OpenMP version in kernels::omp. Both perform the same arithmetic in
// the same order per output pixel, so results are bit-identical for any thread count.
// Unqualified kernels:: names forward to the OpenMP versions.

#include <cstdint>
#include <vector>

#include "synthpass/core/image.hpp"

namespace synthpass::kernels {

enum class Border { Zero, Replicate };

/// Radius of the sampled Gaussian: ceil(3 * sigma). Zero for sigma <= 0.
int gaussian_radius(double sigma);
/// Normalized taps, length 2 * radius + 1.
std::vector<float> gaussian_taps(double sigma);

/// Exact integer moments of the 4-neighbour Laplacian response.
struct LaplacianMoments {
  std::int64_t count = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;

  double variance() const;
};

/// Maps destination coordinates to source coordinates: (a*x + b*y + tx, c*x + d*y + ty).
struct Affine {
  double a = 1, b = 0, tx = 0;
  double c = 0, d = 1, ty = 0;

  PointF apply(PointF p) const { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }
  Affine inverse() const;
};

namespace serial {
Plane blur(const Plane& src, double sigma, Border border);
Raster blur(const Raster& src, double sigma);
LaplacianMoments laplacian_moments(const Image<std::uint8_t>& gray, const Rect& region);
void source_over(Raster& canvas, const Raster& src, const Plane& alpha, int origin_x, int origin_y);
BinaryMask chebyshev_mask(const Raster& src, Rgba center, int tolerance);
Raster warp(const Raster& src, const Affine& dst_to_src, int width, int height);
Raster resample(const Raster& src, int width, int height);
}  // namespace serial

namespace omp {
Plane blur(const Plane& src, double sigma, Border border);
Raster blur(const Raster& src, double sigma);
LaplacianMoments laplacian_moments(const Image<std::uint8_t>& gray, const Rect& region);
void source_over(Raster& canvas, const Raster& src, const Plane& alpha, int origin_x, int origin_y);
BinaryMask chebyshev_mask(const Raster& src, Rgba center, int tolerance);
Raster warp(const Raster& src, const Affine& dst_to_src, int width, int height);
Raster resample(const Raster& src, int width, int height);
}  // namespace omp

using omp::blur;
using omp::chebyshev_mask;
using omp::laplacian_moments;
using omp::resample;
using omp::source_over;
using omp::warp;

}  // namespace synthpass::kernels
