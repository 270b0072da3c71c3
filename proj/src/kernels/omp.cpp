// Row-parallel OpenMP kernels. Each output row is computed by exactly one thread with
// the same per-pixel arithmetic as kernels::serial, so results never depend on the
// thread count. Reductions are over exact 64-bit integers.

#include <omp.h>

#include "pixel_ops.hpp"
#include "synthpass/kernels.hpp"

namespace synthpass::kernels::omp {

using namespace detail;

Plane blur(const Plane& src, double sigma, Border border) {
  if (gaussian_radius(sigma) == 0 || src.empty()) return src;
  const auto taps = gaussian_taps(sigma);
  const bool replicate = border == Border::Replicate;
  Plane tmp(src.width(), src.height());
  Plane out(src.width(), src.height());
  const int h = src.height();
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) convolve_row(src, tmp, y, taps, replicate);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) convolve_col(tmp, out, y, taps, replicate);
  }
  return out;
}

Raster blur(const Raster& src, double sigma) {
  if (gaussian_radius(sigma) == 0 || src.empty()) return src;
  const auto taps = gaussian_taps(sigma);
  const int h = src.height();
  const int w = src.width();
  Image<Premul> pre(w, h);
  Image<Premul> tmp(w, h);
  Raster out(w, h);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) pre.at(x, y) = premultiply(src.at(x, y));
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) convolve_row(pre, tmp, y, taps);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) convolve_col(tmp, pre, y, taps);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(x, y) = unpremultiply(pre.at(x, y));
    }
  }
  return out;
}

LaplacianMoments laplacian_moments(const Image<std::uint8_t>& gray, const Rect& region) {
  const Rect r = region.intersect(image_rect(gray));
  std::int64_t count = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  const int y0 = r.y;
  const int y1 = r.bottom();
#pragma omp parallel for schedule(static) reduction(+ : count, sum, sum_sq)
  for (int y = y0; y < y1; ++y) {
    for (int x = r.x; x < r.right(); ++x) {
      const std::int64_t v = laplacian_at(gray, x, y);
      sum += v;
      sum_sq += v * v;
      ++count;
    }
  }
  return {count, sum, sum_sq};
}

void source_over(Raster& canvas, const Raster& src, const Plane& alpha, int origin_x, int origin_y) {
  const Rect target = Rect{origin_x, origin_y, src.width(), src.height()}.intersect(image_rect(canvas));
  const int y0 = target.y;
  const int y1 = target.bottom();
#pragma omp parallel for schedule(static)
  for (int y = y0; y < y1; ++y) {
    for (int x = target.x; x < target.right(); ++x) {
      const float a = alpha.at(x - origin_x, y - origin_y);
      if (a <= 0.0f) continue;
      canvas.at(x, y) = blend_over(canvas.at(x, y), src.at(x - origin_x, y - origin_y), a);
    }
  }
}

BinaryMask chebyshev_mask(const Raster& src, Rgba center, int tolerance) {
  BinaryMask out(src.width(), src.height());
  const int h = src.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < src.width(); ++x) out.at(x, y) = within(src.at(x, y), center, tolerance) ? 1 : 0;
  }
  return out;
}

Raster warp(const Raster& src, const Affine& dst_to_src, int width, int height) {
  Raster out(width, height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const PointF s = dst_to_src.apply({x + 0.5, y + 0.5});
      out.at(x, y) = sample_bilinear(src, s.x, s.y);
    }
  }
  return out;
}

Raster resample(const Raster& src, int width, int height) {
  if (width == src.width() && height == src.height()) return src;
  const auto tx = resample_taps(src.width(), width);
  const auto ty = resample_taps(src.height(), height);
  const int sh = src.height();
  Image<Premul> tmp(width, sh);
  Raster out(width, height);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < sh; ++y) {
      for (int x = 0; x < width; ++x) {
        const auto& t = tx[static_cast<std::size_t>(x)];
        Premul acc;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          const Premul p = premultiply(src.at(clampi(t.first + static_cast<int>(k), 0, src.width() - 1), y));
          acc.r += t.weights[k] * p.r;
          acc.g += t.weights[k] * p.g;
          acc.b += t.weights[k] * p.b;
          acc.a += t.weights[k] * p.a;
        }
        tmp.at(x, y) = acc;
      }
    }
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      const auto& t = ty[static_cast<std::size_t>(y)];
      for (int x = 0; x < width; ++x) {
        Premul acc;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          const Premul& p = tmp.at(x, clampi(t.first + static_cast<int>(k), 0, sh - 1));
          acc.r += t.weights[k] * p.r;
          acc.g += t.weights[k] * p.g;
          acc.b += t.weights[k] * p.b;
          acc.a += t.weights[k] * p.a;
        }
        out.at(x, y) = unpremultiply(acc);
      }
    }
  }
  return out;
}

}  // namespace synthpass::kernels::omp
