#pragma once

// Layer compositing: text layout and rendering, masked alpha blending with edge blur,
// and full-document rendering in z order.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synthpass/core/image.hpp"
#include "synthpass/face_filter.hpp"
#include "synthpass/mrz.hpp"
#include "synthpass/subject_gen.hpp"
#include "synthpass/template_model.hpp"

namespace synthpass {

class RenderError : public std::runtime_error {
 public:
  RenderError(std::string layer, const std::string& what)
      : std::runtime_error("layer '" + layer + "': " + what), layer_(std::move(layer)) {}
  const std::string& layer() const { return layer_; }

 private:
  std::string layer_;
};

class TextOverflowError : public RenderError {
 public:
  TextOverflowError(std::string layer, double measured_width, double available_width, double measured_height,
                    double available_height);
  double measured_width() const { return measured_width_; }
  double available_width() const { return available_width_; }

 private:
  double measured_width_;
  double available_width_;
};

/// Switches for the configured character-level layout corrections.
struct CharacterTuning {
  bool kerning = true;
  bool curvature = true;
  bool rotation = true;
};

struct PostOps {
  double edge_blur_sigma = 1.5;
  std::map<std::string, double> opacity_overrides;
  CharacterTuning character;
  /// Std-dev of seeded per-pixel luma noise applied to the finished page; 0 disables.
  double sensor_noise = 0.0;
};

struct GlyphPlacement {
  char32_t ch = 0;
  std::uint16_t glyph = 0;
  PointF origin;  // baseline origin, layer-local pixels before rotation
  double advance = 0.0;
  int line = 0;
};

struct TextLayout {
  std::vector<GlyphPlacement> glyphs;
  std::vector<double> line_widths;
  double width = 0.0;   // widest line
  double height = 0.0;  // ascent of the first line to descent of the last
  double pixel_size = 0.0;
  double scale = 0.0;   // pixels per font unit
};

double points_to_pixels(double points, int dpi);

/// Lays out `text` (UTF-8, '\n' separates lines) inside a box `box_width` wide.
/// Throws RenderError when kerning_offsets does not match the character count.
TextLayout layout_text(const text::Font& font, const TextStyle& style, std::string_view text, int dpi, double box_width,
                       const CharacterTuning& tuning = {});

/// Rasterizes text into layer.bounds. On overflow throws TextOverflowError and leaves the canvas unchanged.
/// Returns the rectangle of canvas pixels that may have changed.
Rect render_text_field(Raster& canvas, const LayerSpec& layer, const CountryConfig& config, std::string_view text,
                       const CharacterTuning& tuning = {}, std::optional<double> opacity = std::nullopt);

/// Source-over of `asset` at (origin_x, origin_y) with alpha = blur(mask, sigma) * opacity.
/// Touches at most the asset rectangle dilated by ceil(3 sigma). Returns that rectangle clipped to the canvas.
Rect composite_layer(Raster& canvas, const Raster& asset, const Plane& mask, int origin_x, int origin_y, double opacity,
                     double edge_blur_sigma);

struct RenderAssets {
  std::optional<Raster> face;
  std::optional<Landmarks> face_landmarks;  // enables the ICAO crop
  std::optional<Raster> signature;          // raw scan; binarized at render time
  std::optional<Raster> fingerprint;
};

struct RenderJob {
  std::shared_ptr<const Template> tpl;
  SubjectRecord subject;
  MrzTd3 mrz;
  RenderAssets assets;
  std::uint64_t seed = 0;
  PostOps post_ops;
};

struct LayerLogEntry {
  std::string layer;
  LayerClass layer_class = LayerClass::StaticDescriptionText;
  int z_order = 0;
  Rect bounds;
  Rect touched;
  std::vector<std::string> ops;
  double millis = 0.0;
};

struct RenderResult {
  Raster image;
  std::vector<LayerLogEntry> log;
};

/// Text shown in a bound SubjectTextField layer.
std::string field_text(const SubjectRecord& subject, const MrzTd3& mrz, SubjectField field, const CountryConfig& config);

/// Checks the RenderJob invariants: every text binding resolvable, every biometric slot supplied.
ValidationReport validate_job(const RenderJob& job);

/// Renders a single static or pattern image layer (used for empty templates too).
Rect render_image_layer(Raster& canvas, const LayerSpec& layer, const LayerAsset& asset, double opacity, double sigma);

RenderResult render_document(const RenderJob& job);

/// One JSON object per line per layer.
std::string render_log_jsonl(const RenderResult& result, std::string_view document);

}  // namespace synthpass
