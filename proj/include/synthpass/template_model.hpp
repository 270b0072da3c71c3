#pragma once

// Country configuration, classified layer stacks and empty-template derivation.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synthpass/core/date.hpp"
#include "synthpass/core/image.hpp"
#include "synthpass/core/report.hpp"
#include "synthpass/face_filter.hpp"
#include "synthpass/text/font.hpp"

namespace synthpass {

inline constexpr int kConfigSchemaVersion = 1;

enum class LayerClass { StaticDescriptionText, SubjectTextField, BiometricArea, LogoPattern };

std::string_view to_string(LayerClass c);
std::optional<LayerClass> parse_layer_class(std::string_view s);

enum class Alignment { Left, Center, Right };

struct TextStyle {
  std::string font_family;
  double font_size = 10.0;              // points
  std::vector<double> kerning_offsets;  // px added before each character; empty = none
  double letter_spacing = 0.0;          // px added after every character
  double rotation = 0.0;                // degrees, counter-clockwise on the page
  double baseline_curvature = 0.0;      // 1/px; glyph i rises by c * (x_i - x_mid)^2
  Rgba color{0, 0, 0, 255};
  Alignment alignment = Alignment::Left;
  double line_spacing = 1.2;            // line advance as a multiple of the pixel size
  std::string content;                  // fixed text of StaticDescriptionText layers
};

enum class Fit { Stretch, Contain, Cover };
enum class BiometricKind { Face, Signature, Fingerprint };

std::string_view to_string(BiometricKind k);

struct ImagePlacement {
  std::filesystem::path asset;  // static/logo layers; empty for biometric slots
  Fit fit = Fit::Stretch;
  std::optional<BiometricKind> biometric;
  std::optional<Rgba> tint;     // recolours opaque pixels (signature ink)
  bool grayscale = false;
};

struct LayerSpec {
  std::string id;
  LayerClass layer_class = LayerClass::StaticDescriptionText;
  int z_order = 0;
  Rect bounds;
  std::optional<std::filesystem::path> mask_ref;
  double opacity = 1.0;
  std::optional<double> edge_blur_sigma;  // overrides the render job default
  std::variant<TextStyle, ImagePlacement> render;
  int source_line = 0;

  bool is_text() const { return std::holds_alternative<TextStyle>(render); }
  const TextStyle& text() const { return std::get<TextStyle>(render); }
  const ImagePlacement& image() const { return std::get<ImagePlacement>(render); }
};

struct Canvas {
  int width = 0;
  int height = 0;
  double dpi = 600.0;
  Rgba background{255, 255, 255, 255};
};

/// SubjectRecord attributes that can drive a SubjectTextField layer.
enum class SubjectField {
  Surname,
  GivenName,
  Sex,
  BirthDate,
  BirthPlace,
  Nationality,
  DocumentNumber,
  IssueDate,
  ExpiryDate,
  IssuingAuthority,
  PersonalNumber,
  Mrz,
};

std::string_view to_string(SubjectField f);
std::optional<SubjectField> parse_subject_field(std::string_view s);

struct DictionaryPaths {
  std::filesystem::path given_male;
  std::filesystem::path given_female;
  std::filesystem::path surname;
  std::filesystem::path city;
  std::filesystem::path authority;
};

struct AssetPools {
  std::optional<std::filesystem::path> faces;
  std::optional<std::filesystem::path> signatures;
  std::optional<std::filesystem::path> fingerprints;
};

struct CountryConfig {
  int schema_version = kConfigSchemaVersion;
  std::string country_code;
  Canvas canvas;
  std::vector<LayerSpec> layers;  // ascending z_order
  std::map<SubjectField, std::string> field_bindings;
  std::string mrz_layer_id;
  DictionaryPaths dictionaries;
  AssetPools assets;
  int validity_years = 10;
  std::string document_number_pattern = "[A-Z]{2}[0-9]{7}";
  std::optional<std::string> personal_number_pattern;
  std::string date_format = "%d.%m.%Y";
  Date reference_date{std::chrono::year{2025}, std::chrono::month{6}, std::chrono::day{30}};
  CropGeometry portrait_crop;
  std::map<std::string, std::filesystem::path> font_paths;
  std::map<std::string, std::shared_ptr<const text::Font>> fonts;
  std::filesystem::path source_path;

  const LayerSpec* find_layer(std::string_view id) const;
  const text::Font& font(const std::string& family) const;
};

/// Diagnostic from load_config; the message carries file, line and offending element.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string element, int line, const std::string& what)
      : std::runtime_error(what), element_(std::move(element)), line_(line) {}
  const std::string& element() const { return element_; }
  int line() const { return line_; }

 private:
  std::string element_;
  int line_;
};

CountryConfig load_config(const std::filesystem::path& path);
CountryConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           const std::string& source_name = "<config>");

/// Structural checks shared by load_config and validate_template.
ValidationReport check_config(const CountryConfig& config);

/// Uniformly rescales canvas, bounds, dpi and pixel-denominated style parameters.
CountryConfig scale_config(const CountryConfig& config, double factor);

/// Per-layer pixels resampled into layer bounds; mask combines mask_ref and asset alpha.
struct LayerAsset {
  Raster image;
  Plane mask;
};

struct Template {
  std::shared_ptr<const CountryConfig> config;
  Raster empty;                              // static text + logo/pattern layers, in z order
  std::vector<std::string> rendered_layers;  // ids composited into `empty`
  std::vector<std::string> slots;            // subject text and biometric placement slots
  std::map<std::string, LayerAsset> assets;  // loaded static image layers
};

class TemplateError : public std::runtime_error {
 public:
  TemplateError(std::string layer, const std::string& what)
      : std::runtime_error("layer '" + layer + "': " + what), layer_(std::move(layer)) {}
  const std::string& layer() const { return layer_; }

 private:
  std::string layer_;
};

/// Places an asset into a w x h box according to `fit`; uncovered area stays transparent.
Raster fit_into(const Raster& asset, int width, int height, Fit fit);

/// Loads and fits a layer's image and mask to its bounds.
LayerAsset load_layer_asset(const LayerSpec& layer);

Template derive_empty_template(std::shared_ptr<const CountryConfig> config, double edge_blur_sigma = 1.5);

ValidationReport validate_template(const Template& tpl);

}  // namespace synthpass
