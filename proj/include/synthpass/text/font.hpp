#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <vector>

#include "synthpass/core/image.hpp"

namespace synthpass::text {

class FontError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One closed glyph contour: on-curve points with optional quadratic control points in
/// between. Implied on-curve midpoints are already materialized, so the sequence always
/// starts on-curve and never has two consecutive off-curve points.
struct Contour {
  std::vector<PointF> points;
  std::vector<bool> on_curve;
};

using Outline = std::vector<Contour>;

struct HMetrics {
  int advance = 0;
  int left_side_bearing = 0;
};

/// Minimal TrueType ('glyf' flavoured sfnt) reader: cmap formats 4 and 12, hmtx, simple
/// and composite glyphs. No hinting, no kerning tables, no shaping.
class Font {
 public:
  explicit Font(std::vector<std::uint8_t> data);
  static std::shared_ptr<const Font> load(const std::filesystem::path& path);

  int units_per_em() const { return units_per_em_; }
  int ascender() const { return ascender_; }
  int descender() const { return descender_; }
  int line_gap() const { return line_gap_; }
  int glyph_count() const { return num_glyphs_; }

  /// 0 (.notdef) when the font has no glyph for the code point.
  std::uint16_t glyph_index(char32_t cp) const;
  HMetrics metrics(std::uint16_t glyph) const;
  /// Outline in font units, y axis pointing up.
  Outline outline(std::uint16_t glyph) const;

 private:
  std::uint32_t table(const char* tag) const;
  std::uint32_t glyph_offset(std::uint16_t glyph, std::uint32_t* length) const;
  void append_outline(std::uint16_t glyph, const double m[6], Outline& out, int depth) const;

  std::vector<std::uint8_t> data_;
  int units_per_em_ = 0;
  int ascender_ = 0;
  int descender_ = 0;
  int line_gap_ = 0;
  int num_glyphs_ = 0;
  int num_hmetrics_ = 0;
  int index_to_loc_format_ = 0;
  std::uint32_t cmap_subtable_ = 0;
  std::uint16_t cmap_format_ = 0;
  std::uint32_t loca_ = 0;
  std::uint32_t glyf_ = 0;
  std::uint32_t hmtx_ = 0;
};

/// Exact-area coverage rasterizer for closed polylines (signed-area accumulation).
/// Coordinates are in pixels relative to the buffer's top-left corner; geometry outside
/// the buffer is clipped without disturbing coverage inside it.
class CoverageRasterizer {
 public:
  CoverageRasterizer(int width, int height);

  void line(PointF p0, PointF p1);
  void quad(PointF p0, PointF control, PointF p1);
  void contour(const Contour& c);

  /// Non-zero coverage in [0, 1].
  Plane coverage() const;

 private:
  int width_;
  int height_;
  std::vector<double> acc_;  // (width + 2) per row
};

}  // namespace synthpass::text
