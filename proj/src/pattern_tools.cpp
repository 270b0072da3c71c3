#include "synthpass/pattern_tools.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>

#include "synthpass/core/png_io.hpp"
#include "synthpass/kernels.hpp"

namespace synthpass {

BinaryMask threshold_extract(const Raster& image, Rgba center, int tolerance) {
  if (tolerance < 0) throw std::invalid_argument("threshold_extract: tolerance must be >= 0");
  return kernels::chebyshev_mask(image, center, tolerance);
}

std::vector<Component> contour_components(const BinaryMask& mask, long long min_area) {
  const int w = mask.width();
  const int h = mask.height();
  Image<int> label(w, h, -1);
  std::vector<Component> out;
  std::vector<std::pair<int, int>> stack;
  std::vector<std::pair<int, int>> members;
  int next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || label.at(x, y) >= 0) continue;
      members.clear();
      stack.assign(1, {x, y});
      label.at(x, y) = next;
      int x0 = x, x1 = x, y0 = y, y1 = y;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        members.push_back({cx, cy});
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!mask.contains(nx, ny) || !mask.at(nx, ny) || label.at(nx, ny) >= 0) continue;
            label.at(nx, ny) = next;
            stack.push_back({nx, ny});
          }
        }
      }
      ++next;
      if (static_cast<long long>(members.size()) < min_area) continue;
      Component c;
      c.bounds = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
      c.mask = BinaryMask(c.bounds.w, c.bounds.h);
      for (const auto& [mx, my] : members) c.mask.at(mx - x0, my - y0) = 1;
      c.area = static_cast<long long>(members.size());
      out.push_back(std::move(c));
    }
  }
  // Discovery order is raster order of each component's first pixel, so a stable sort
  // breaks area ties by top-left position.
  std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) { return a.area > b.area; });
  return out;
}

void paint_component(BinaryMask& target, const Component& c) {
  for (int y = 0; y < c.bounds.h; ++y) {
    for (int x = 0; x < c.bounds.w; ++x) {
      if (c.mask.at(x, y) && target.contains(c.bounds.x + x, c.bounds.y + y)) {
        target.at(c.bounds.x + x, c.bounds.y + y) = 1;
      }
    }
  }
}

namespace {

struct WeightedColor {
  Rgb color;
  double count;
};

double dist2(const Rgb& a, const Rgb& b) {
  const double dr = a.r - b.r;
  const double dg = a.g - b.g;
  const double db = a.b - b.b;
  return dr * dr + dg * dg + db * db;
}

std::size_t nearest(const std::vector<Rgb>& centers, const Rgb& c) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = dist2(centers[i], c);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

Palette estimate_palette(const Raster& image, const BinaryMask& mask, int k) {
  if (k < 1) throw std::invalid_argument("estimate_palette: k must be >= 1");
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw std::invalid_argument("estimate_palette: mask size differs from image size");
  }
  // Histogram of distinct colours keyed by packed RGB; map order makes every later step
  // independent of pixel order.
  std::map<std::uint32_t, double> histogram;
  double total = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (!mask.pixels()[i]) continue;
    const Rgba p = image.pixels()[i];
    histogram[(std::uint32_t{p.r} << 16) | (std::uint32_t{p.g} << 8) | p.b] += 1.0;
    total += 1.0;
  }
  if (histogram.empty()) throw std::invalid_argument("estimate_palette: mask selects no pixels");

  std::vector<WeightedColor> colors;
  colors.reserve(histogram.size());
  for (const auto& [packed, count] : histogram) {
    colors.push_back({{double(packed >> 16), double((packed >> 8) & 0xff), double(packed & 0xff)}, count});
  }

  Palette palette;
  if (colors.size() <= static_cast<std::size_t>(k)) {
    palette.fewer_colors_than_k = colors.size() < static_cast<std::size_t>(k);
    for (const auto& c : colors) palette.entries.push_back({c.color, c.count / total});
  } else {
    // Farthest-point seeding from the most frequent colour.
    std::vector<Rgb> centers;
    std::size_t first = 0;
    for (std::size_t i = 1; i < colors.size(); ++i) {
      if (colors[i].count > colors[first].count) first = i;
    }
    centers.push_back(colors[first].color);
    std::vector<double> min_d(colors.size(), std::numeric_limits<double>::infinity());
    while (centers.size() < static_cast<std::size_t>(k)) {
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < colors.size(); ++i) {
        min_d[i] = std::min(min_d[i], dist2(colors[i].color, centers.back()));
        if (min_d[i] > far_d) {
          far_d = min_d[i];
          far = i;
        }
      }
      centers.push_back(colors[far].color);
    }

    std::vector<double> weight(centers.size());
    for (int iter = 0; iter < kPaletteIterations; ++iter) {
      std::vector<Rgb> sum(centers.size());
      std::fill(weight.begin(), weight.end(), 0.0);
      for (const auto& c : colors) {
        const std::size_t j = nearest(centers, c.color);
        sum[j].r += c.color.r * c.count;
        sum[j].g += c.color.g * c.count;
        sum[j].b += c.color.b * c.count;
        weight[j] += c.count;
      }
      bool moved = false;
      for (std::size_t j = 0; j < centers.size(); ++j) {
        if (weight[j] == 0.0) continue;
        const Rgb m{sum[j].r / weight[j], sum[j].g / weight[j], sum[j].b / weight[j]};
        moved = moved || !(m == centers[j]);
        centers[j] = m;
      }
      if (!moved) break;
    }
    std::fill(weight.begin(), weight.end(), 0.0);
    for (const auto& c : colors) weight[nearest(centers, c.color)] += c.count;
    for (std::size_t j = 0; j < centers.size(); ++j) palette.entries.push_back({centers[j], weight[j] / total});
  }
  std::stable_sort(palette.entries.begin(), palette.entries.end(),
                   [](const PaletteEntry& a, const PaletteEntry& b) { return a.weight > b.weight; });
  return palette;
}

Raster snap_to_palette(const Raster& image, const Palette& palette) {
  if (palette.entries.empty()) throw std::invalid_argument("snap_to_palette: empty palette");
  std::vector<Rgb> centers;
  for (const auto& e : palette.entries) centers.push_back(e.color);
  auto to_u8 = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
  Raster out = image;
  for (auto& p : out.pixels()) {
    if (p.a == 0) continue;
    const Rgb& c = centers[nearest(centers, {double(p.r), double(p.g), double(p.b)})];
    p = {to_u8(c.r), to_u8(c.g), to_u8(c.b), p.a};
  }
  return out;
}

PatternAsset extract_pattern(const Raster& image, const BinaryMask& mask, int k, bool snap) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw std::invalid_argument("extract_pattern: mask size differs from image size");
  }
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw PatternError("extract_pattern: mask selects no pixels");

  PatternAsset asset;
  asset.source_bounds = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  asset.palette = estimate_palette(image, mask, k);
  asset.image = Raster(asset.source_bounds.w, asset.source_bounds.h);
  bool any_clear = false;
  bool any_opaque = false;
  bool any_partial = false;
  for (int y = 0; y < asset.image.height(); ++y) {
    for (int x = 0; x < asset.image.width(); ++x) {
      Rgba p = image.at(x0 + x, y0 + y);
      if (!mask.at(x0 + x, y0 + y)) p.a = 0;
      asset.image.at(x, y) = p;
      any_clear = any_clear || p.a == 0;
      any_opaque = any_opaque || p.a == 255;
      any_partial = any_partial || (p.a != 0 && p.a != 255);
    }
  }
  asset.trivial_alpha = !any_partial && (!any_clear || !any_opaque);
  if (snap) asset.image = snap_to_palette(asset.image, asset.palette);
  return asset;
}

std::filesystem::path palette_sidecar_path(const std::filesystem::path& png_path) {
  auto p = png_path;
  p.replace_extension(".palette.json");
  return p;
}

void save_pattern_asset(const std::filesystem::path& png_path, const PatternAsset& asset) {
  write_png(png_path, asset.image);
  nlohmann::ordered_json j;
  j["source_bounds"] = {asset.source_bounds.x, asset.source_bounds.y, asset.source_bounds.w, asset.source_bounds.h};
  j["fewer_colors_than_k"] = asset.palette.fewer_colors_than_k;
  j["trivial_alpha"] = asset.trivial_alpha;
  auto& entries = j["palette"] = nlohmann::ordered_json::array();
  for (const auto& e : asset.palette.entries) {
    entries.push_back({{"rgb", {e.color.r, e.color.g, e.color.b}}, {"weight", e.weight}});
  }
  std::ofstream out(palette_sidecar_path(png_path), std::ios::binary);
  if (!out) throw PatternError("cannot write " + palette_sidecar_path(png_path).string());
  out << j.dump(2) << '\n';
}

PatternAsset load_pattern_asset(const std::filesystem::path& png_path) {
  PatternAsset asset;
  asset.image = read_png(png_path);
  const auto sidecar = palette_sidecar_path(png_path);
  std::ifstream in(sidecar, std::ios::binary);
  if (!in) throw PatternError("missing palette sidecar " + sidecar.string());
  try {
    const auto j = nlohmann::json::parse(in);
    const auto& b = j.at("source_bounds");
    asset.source_bounds = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
    asset.palette.fewer_colors_than_k = j.value("fewer_colors_than_k", false);
    asset.trivial_alpha = j.value("trivial_alpha", false);
    for (const auto& e : j.at("palette")) {
      const auto& c = e.at("rgb");
      asset.palette.entries.push_back({{c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()},
                                       e.at("weight").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw PatternError(sidecar.string() + ": " + e.what());
  }
  return asset;
}

}  // namespace synthpass
