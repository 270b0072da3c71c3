#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace synthpass {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 0;

  bool operator==(const Rgba&) const = default;
};

/// Dense row-major image. Pixel (x, y) covers the unit square [x, x+1) x [y, y+1).
template <class T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  std::size_t size() const { return pixels_.size(); }

  T& at(int x, int y) { return pixels_[index(x, y)]; }
  const T& at(int x, int y) const { return pixels_[index(x, y)]; }

  /// Edge-replicating access; coordinates outside the image clamp to the border.
  const T& clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<T> row(int y) { return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const {
    return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() { return pixels_; }
  std::span<const T> pixels() const { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const {
    assert(contains(x, y));
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> pixels_;
};

/// 8-bit straight-alpha RGBA raster.
using Raster = Image<Rgba>;
/// Single-channel float image; used for alpha masks in [0, 1] and intermediate responses.
using Plane = Image<float>;
/// Binary mask, values 0 or 1.
using BinaryMask = Image<std::uint8_t>;

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  long long area() const { return static_cast<long long>(w) * h; }
  bool empty() const { return w <= 0 || h <= 0; }

  bool contains(const Rect& o) const {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }
  bool contains_point(double px, double py) const { return px >= x && py >= y && px <= right() && py <= bottom(); }

  Rect dilated(int r) const { return {x - r, y - r, w + 2 * r, h + 2 * r}; }

  Rect intersect(const Rect& o) const {
    const int x0 = std::max(x, o.x);
    const int y0 = std::max(y, o.y);
    const int x1 = std::min(right(), o.right());
    const int y1 = std::min(bottom(), o.bottom());
    if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
    return {x0, y0, x1 - x0, y1 - y0};
  }

  bool operator==(const Rect&) const = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const PointF&) const = default;
};

inline Rect image_rect(int width, int height) { return {0, 0, width, height}; }

template <class T>
Rect image_rect(const Image<T>& img) {
  return {0, 0, img.width(), img.height()};
}

/// Integer luma (BT.601 weights), deterministic across platforms.
inline std::uint8_t luma(const Rgba& p) {
  return static_cast<std::uint8_t>((299u * p.r + 587u * p.g + 114u * p.b + 500u) / 1000u);
}

Image<std::uint8_t> to_gray(const Raster& img);
Plane alpha_plane(const Raster& img);
Raster crop(const Raster& img, const Rect& r);

}  // namespace synthpass
