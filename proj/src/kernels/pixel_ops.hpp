#pragma once

// Per-pixel building blocks shared by the serial and OpenMP kernels. Keeping the
// arithmetic here is what makes the two variants bit-identical.

#include <algorithm>
#include <cmath>
#include <vector>

#include "synthpass/core/image.hpp"

namespace synthpass::kernels::detail {

inline std::uint8_t to_u8(float v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0f, 255.0f) + 0.5f); }

struct Premul {
  float r = 0, g = 0, b = 0, a = 0;
};

inline Premul premultiply(const Rgba& p) {
  const float a = p.a / 255.0f;
  return {p.r * a, p.g * a, p.b * a, a};
}

inline Rgba unpremultiply(const Premul& p) {
  if (p.a <= 0.0f) return {0, 0, 0, 0};
  const float inv = 1.0f / p.a;
  return {to_u8(p.r * inv), to_u8(p.g * inv), to_u8(p.b * inv), to_u8(p.a * 255.0f)};
}

inline Rgba blend_over(const Rgba& dst, const Rgba& src, float alpha) {
  const float da = dst.a / 255.0f;
  const float out_a = alpha + da * (1.0f - alpha);
  if (out_a <= 0.0f) return {0, 0, 0, 0};
  const float wd = da * (1.0f - alpha);
  const float inv = 1.0f / out_a;
  return {to_u8((src.r * alpha + dst.r * wd) * inv), to_u8((src.g * alpha + dst.g * wd) * inv),
          to_u8((src.b * alpha + dst.b * wd) * inv), to_u8(out_a * 255.0f)};
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

/// Horizontal pass of a separable convolution for one row of a Plane.
inline void convolve_row(const Plane& src, Plane& dst, int y, const std::vector<float>& taps, bool replicate) {
  const int r = static_cast<int>(taps.size() / 2);
  const int w = src.width();
  for (int x = 0; x < w; ++x) {
    float acc = 0.0f;
    for (int k = -r; k <= r; ++k) {
      int sx = x + k;
      if (sx < 0 || sx >= w) {
        if (!replicate) continue;
        sx = clampi(sx, 0, w - 1);
      }
      acc += taps[static_cast<std::size_t>(k + r)] * src.at(sx, y);
    }
    dst.at(x, y) = acc;
  }
}

inline void convolve_col(const Plane& src, Plane& dst, int y, const std::vector<float>& taps, bool replicate) {
  const int r = static_cast<int>(taps.size() / 2);
  const int h = src.height();
  for (int x = 0; x < src.width(); ++x) {
    float acc = 0.0f;
    for (int k = -r; k <= r; ++k) {
      int sy = y + k;
      if (sy < 0 || sy >= h) {
        if (!replicate) continue;
        sy = clampi(sy, 0, h - 1);
      }
      acc += taps[static_cast<std::size_t>(k + r)] * src.at(x, sy);
    }
    dst.at(x, y) = acc;
  }
}

inline void convolve_row(const Image<Premul>& src, Image<Premul>& dst, int y, const std::vector<float>& taps) {
  const int r = static_cast<int>(taps.size() / 2);
  const int w = src.width();
  for (int x = 0; x < w; ++x) {
    Premul acc;
    for (int k = -r; k <= r; ++k) {
      const Premul& p = src.at(clampi(x + k, 0, w - 1), y);
      const float t = taps[static_cast<std::size_t>(k + r)];
      acc.r += t * p.r;
      acc.g += t * p.g;
      acc.b += t * p.b;
      acc.a += t * p.a;
    }
    dst.at(x, y) = acc;
  }
}

inline void convolve_col(const Image<Premul>& src, Image<Premul>& dst, int y, const std::vector<float>& taps) {
  const int r = static_cast<int>(taps.size() / 2);
  const int h = src.height();
  for (int x = 0; x < src.width(); ++x) {
    Premul acc;
    for (int k = -r; k <= r; ++k) {
      const Premul& p = src.at(x, clampi(y + k, 0, h - 1));
      const float t = taps[static_cast<std::size_t>(k + r)];
      acc.r += t * p.r;
      acc.g += t * p.g;
      acc.b += t * p.b;
      acc.a += t * p.a;
    }
    dst.at(x, y) = acc;
  }
}

inline int laplacian_at(const Image<std::uint8_t>& g, int x, int y) {
  const int w = g.width() - 1;
  const int h = g.height() - 1;
  return static_cast<int>(g.at(clampi(x - 1, 0, w), y)) + g.at(clampi(x + 1, 0, w), y) +
         g.at(x, clampi(y - 1, 0, h)) + g.at(x, clampi(y + 1, 0, h)) - 4 * static_cast<int>(g.at(x, y));
}

inline bool within(const Rgba& p, const Rgba& c, int tol) {
  return std::abs(int(p.r) - int(c.r)) <= tol && std::abs(int(p.g) - int(c.g)) <= tol &&
         std::abs(int(p.b) - int(c.b)) <= tol;
}

/// Bilinear sample at continuous coordinates (pixel centers at +0.5), edge replicated.
inline Rgba sample_bilinear(const Raster& src, double sx, double sy) {
  const double fx = sx - 0.5;
  const double fy = sy - 0.5;
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const float tx = static_cast<float>(fx - x0f);
  const float ty = static_cast<float>(fy - y0f);
  const int w = src.width() - 1;
  const int h = src.height() - 1;
  // Clamp in double first so far-away coordinates cannot overflow int.
  const int x0 = static_cast<int>(std::clamp(x0f, -1.0, static_cast<double>(w + 1)));
  const int y0 = static_cast<int>(std::clamp(y0f, -1.0, static_cast<double>(h + 1)));
  const Premul p00 = premultiply(src.at(clampi(x0, 0, w), clampi(y0, 0, h)));
  const Premul p10 = premultiply(src.at(clampi(x0 + 1, 0, w), clampi(y0, 0, h)));
  const Premul p01 = premultiply(src.at(clampi(x0, 0, w), clampi(y0 + 1, 0, h)));
  const Premul p11 = premultiply(src.at(clampi(x0 + 1, 0, w), clampi(y0 + 1, 0, h)));
  auto lerp2 = [&](float a, float b, float c, float d) {
    const float top = a + (b - a) * tx;
    const float bot = c + (d - c) * tx;
    return top + (bot - top) * ty;
  };
  return unpremultiply({lerp2(p00.r, p10.r, p01.r, p11.r), lerp2(p00.g, p10.g, p01.g, p11.g),
                        lerp2(p00.b, p10.b, p01.b, p11.b), lerp2(p00.a, p10.a, p01.a, p11.a)});
}

/// Tent-filter taps for one output index of a 1-D resample. Filter support widens when shrinking.
struct ResampleTaps {
  int first = 0;
  std::vector<float> weights;
};

inline std::vector<ResampleTaps> resample_taps(int src_len, int dst_len) {
  std::vector<ResampleTaps> out(static_cast<std::size_t>(dst_len));
  const double scale = static_cast<double>(src_len) / dst_len;
  const double support = std::max(1.0, scale);
  for (int i = 0; i < dst_len; ++i) {
    const double center = (i + 0.5) * scale;
    const int lo = static_cast<int>(std::floor(center - support));
    const int hi = static_cast<int>(std::ceil(center + support));
    ResampleTaps t;
    t.first = lo;
    double total = 0.0;
    std::vector<double> w;
    for (int s = lo; s <= hi; ++s) {
      const double d = std::abs((s + 0.5) - center) / support;
      const double v = d < 1.0 ? 1.0 - d : 0.0;
      w.push_back(v);
      total += v;
    }
    for (double v : w) t.weights.push_back(static_cast<float>(v / total));
    out[static_cast<std::size_t>(i)] = std::move(t);
  }
  return out;
}

}  // namespace synthpass::kernels::detail
