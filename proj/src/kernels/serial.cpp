// Straightforward single-threaded reference kernels.

#include "pixel_ops.hpp"
#include "synthpass/kernels.hpp"

namespace synthpass::kernels::serial {

using namespace detail;

Plane blur(const Plane& src, double sigma, Border border) {
  if (gaussian_radius(sigma) == 0 || src.empty()) return src;
  const auto taps = gaussian_taps(sigma);
  const bool replicate = border == Border::Replicate;
  Plane tmp(src.width(), src.height());
  Plane out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) convolve_row(src, tmp, y, taps, replicate);
  for (int y = 0; y < src.height(); ++y) convolve_col(tmp, out, y, taps, replicate);
  return out;
}

Raster blur(const Raster& src, double sigma) {
  if (gaussian_radius(sigma) == 0 || src.empty()) return src;
  const auto taps = gaussian_taps(sigma);
  Image<Premul> pre(src.width(), src.height());
  for (std::size_t i = 0; i < src.size(); ++i) pre.pixels()[i] = premultiply(src.pixels()[i]);
  Image<Premul> tmp(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) convolve_row(pre, tmp, y, taps);
  for (int y = 0; y < src.height(); ++y) convolve_col(tmp, pre, y, taps);
  Raster out(src.width(), src.height());
  for (std::size_t i = 0; i < src.size(); ++i) out.pixels()[i] = unpremultiply(pre.pixels()[i]);
  return out;
}

LaplacianMoments laplacian_moments(const Image<std::uint8_t>& gray, const Rect& region) {
  const Rect r = region.intersect(image_rect(gray));
  LaplacianMoments m;
  for (int y = r.y; y < r.bottom(); ++y) {
    for (int x = r.x; x < r.right(); ++x) {
      const std::int64_t v = laplacian_at(gray, x, y);
      m.sum += v;
      m.sum_sq += v * v;
      ++m.count;
    }
  }
  return m;
}

void source_over(Raster& canvas, const Raster& src, const Plane& alpha, int origin_x, int origin_y) {
  const Rect target = Rect{origin_x, origin_y, src.width(), src.height()}.intersect(image_rect(canvas));
  for (int y = target.y; y < target.bottom(); ++y) {
    for (int x = target.x; x < target.right(); ++x) {
      const float a = alpha.at(x - origin_x, y - origin_y);
      if (a <= 0.0f) continue;
      canvas.at(x, y) = blend_over(canvas.at(x, y), src.at(x - origin_x, y - origin_y), a);
    }
  }
}

BinaryMask chebyshev_mask(const Raster& src, Rgba center, int tolerance) {
  BinaryMask out(src.width(), src.height());
  for (std::size_t i = 0; i < src.size(); ++i) out.pixels()[i] = within(src.pixels()[i], center, tolerance) ? 1 : 0;
  return out;
}

Raster warp(const Raster& src, const Affine& dst_to_src, int width, int height) {
  Raster out(width, height);
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
  Image<Premul> tmp(width, src.height());
  for (int y = 0; y < src.height(); ++y) {
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
  Raster out(width, height);
  for (int y = 0; y < height; ++y) {
    const auto& t = ty[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      Premul acc;
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        const Premul& p = tmp.at(x, clampi(t.first + static_cast<int>(k), 0, src.height() - 1));
        acc.r += t.weights[k] * p.r;
        acc.g += t.weights[k] * p.g;
        acc.b += t.weights[k] * p.b;
        acc.a += t.weights[k] * p.a;
      }
      out.at(x, y) = unpremultiply(acc);
    }
  }
  return out;
}

}  // namespace synthpass::kernels::serial
