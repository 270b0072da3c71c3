#pragma once

// Classical extraction of logos and security patterns from reference scans.

#include <array>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "synthpass/core/image.hpp"

namespace synthpass {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  bool operator==(const Rgb&) const = default;
};

/// 1 where every colour channel is within `tolerance` of `center` (Chebyshev distance).
/// Alpha is ignored. Throws std::invalid_argument for negative tolerance.
BinaryMask threshold_extract(const Raster& image, Rgba center, int tolerance);

struct Component {
  Rect bounds;
  /// bounds.w x bounds.h; 1 for pixels belonging to this component.
  BinaryMask mask;
  long long area = 0;
};

/// 8-connected components with area >= min_area, largest first (ties by top-left position).
std::vector<Component> contour_components(const BinaryMask& mask, long long min_area = 0);

/// Pastes a component back into a full-size mask.
void paint_component(BinaryMask& target, const Component& c);

struct PaletteEntry {
  Rgb color;
  double weight = 0.0;
};

struct Palette {
  /// Sorted by weight, heaviest first. Weights sum to 1.
  std::vector<PaletteEntry> entries;
  /// Set when the masked region holds fewer distinct colours than requested.
  bool fewer_colors_than_k = false;
};

inline constexpr int kPaletteIterations = 20;

/// k-means over the masked pixels' RGB values, farthest-point seeded, 20 Lloyd iterations.
/// Throws std::invalid_argument for an empty mask, a size mismatch or k < 1.
Palette estimate_palette(const Raster& image, const BinaryMask& mask, int k);

/// Replaces each opaque pixel's colour with the nearest palette colour; alpha is preserved.
Raster snap_to_palette(const Raster& image, const Palette& palette);

struct PatternAsset {
  Raster image;
  Palette palette;
  Rect source_bounds;
  /// Alpha is all-0 or all-255.
  bool trivial_alpha = false;
};

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Crops `image` to the bounding box of `mask`, keeping only masked pixels opaque, and
/// attaches a k-colour palette. With `snap`, colours are replaced by their palette entries.
PatternAsset extract_pattern(const Raster& image, const BinaryMask& mask, int k, bool snap = false);

/// Writes `<path>` (PNG) and `<path stem>.palette.json` beside it.
void save_pattern_asset(const std::filesystem::path& png_path, const PatternAsset& asset);
PatternAsset load_pattern_asset(const std::filesystem::path& png_path);
std::filesystem::path palette_sidecar_path(const std::filesystem::path& png_path);

}  // namespace synthpass
