#include "synthpass/core/image.hpp"

namespace synthpass {

Image<std::uint8_t> to_gray(const Raster& img) {
  Image<std::uint8_t> out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = luma(src[i]);
  return out;
}

Plane alpha_plane(const Raster& img) {
  Plane out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i].a) / 255.0f;
  return out;
}

Raster crop(const Raster& img, const Rect& r) {
  const Rect c = r.intersect(image_rect(img));
  Raster out(c.w, c.h);
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) out.at(x, y) = img.at(c.x + x, c.y + y);
  }
  return out;
}

}  // namespace synthpass
