#include "synthpass/compositor.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "synthpass/core/rng.hpp"
#include "synthpass/core/text_util.hpp"
#include "synthpass/kernels.hpp"

namespace synthpass {

namespace {

std::string format_px(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

TextOverflowError::TextOverflowError(std::string layer, double measured_width, double available_width,
                                     double measured_height, double available_height)
    : RenderError(std::move(layer), "text overflows bounds: measured " + format_px(measured_width) + "x" +
                                        format_px(measured_height) + " px, available " + format_px(available_width) +
                                        "x" + format_px(available_height) + " px"),
      measured_width_(measured_width),
      available_width_(available_width) {}

double points_to_pixels(double points, int dpi) { return points * dpi / 72.0; }

TextLayout layout_text(const text::Font& font, const TextStyle& style, std::string_view utf8, int dpi,
                       double box_width, const CharacterTuning& tuning) {
  const std::u32string cps = utf8_decode(utf8);
  std::size_t chars = 0;
  for (char32_t c : cps) chars += c != U'\n';
  const bool kern = tuning.kerning && !style.kerning_offsets.empty();
  if (kern && style.kerning_offsets.size() != chars) {
    throw std::invalid_argument("kerning_offsets has " + std::to_string(style.kerning_offsets.size()) +
                                " entries for " + std::to_string(chars) + " characters");
  }

  TextLayout out;
  out.pixel_size = points_to_pixels(style.font_size, dpi);
  out.scale = out.pixel_size / font.units_per_em();
  const double ascent = font.ascender() * out.scale;
  const double descent = -font.descender() * out.scale;
  const double line_advance = out.pixel_size * style.line_spacing;

  std::size_t char_index = 0;
  int line = 0;
  std::size_t line_begin = 0;
  double pen = 0.0;
  auto finish_line = [&]() {
    double width = pen;
    if (out.glyphs.size() > line_begin) width -= style.letter_spacing;
    width = std::max(width, 0.0);
    out.line_widths.push_back(width);
    double offset = 0.0;
    if (style.alignment == Alignment::Center) offset = (box_width - width) / 2.0;
    if (style.alignment == Alignment::Right) offset = box_width - width;
    const double baseline = ascent + line * line_advance;
    const double mid = offset + width / 2.0;
    for (std::size_t i = line_begin; i < out.glyphs.size(); ++i) {
      auto& g = out.glyphs[i];
      g.origin.x += offset;
      g.origin.y = baseline;
      if (tuning.curvature && style.baseline_curvature != 0.0) {
        const double dx = g.origin.x + g.advance / 2.0 - mid;
        g.origin.y -= style.baseline_curvature * dx * dx;
      }
    }
    out.width = std::max(out.width, width);
  };

  for (char32_t c : cps) {
    if (c == U'\n') {
      finish_line();
      ++line;
      line_begin = out.glyphs.size();
      pen = 0.0;
      continue;
    }
    if (kern) pen += style.kerning_offsets[char_index];
    const std::uint16_t glyph = font.glyph_index(c);
    const double advance = font.metrics(glyph).advance * out.scale;
    out.glyphs.push_back({c, glyph, {pen, 0.0}, advance, line});
    pen += advance + style.letter_spacing;
    ++char_index;
  }
  finish_line();
  out.height = ascent + descent + line * line_advance;
  return out;
}

Rect render_text_field(Raster& canvas, const LayerSpec& layer, const CountryConfig& config, std::string_view text,
                       const CharacterTuning& tuning, std::optional<double> opacity) {
  if (!layer.is_text()) throw RenderError(layer.id, "not a text layer");
  if (layer.layer_class != LayerClass::SubjectTextField && layer.layer_class != LayerClass::StaticDescriptionText) {
    throw RenderError(layer.id, "text can only be rendered into text layer classes");
  }
  if (text.empty()) return {layer.bounds.x, layer.bounds.y, 0, 0};
  const TextStyle& style = layer.text();
  const text::Font& font = config.font(style.font_family);
  const int dpi = static_cast<int>(std::lround(config.canvas.dpi));

  TextLayout lay;
  try {
    lay = layout_text(font, style, text, dpi, layer.bounds.w, tuning);
  } catch (const std::invalid_argument& e) {
    throw RenderError(layer.id, e.what());
  }
  constexpr double kSlack = 1e-6;
  if (lay.width > layer.bounds.w + kSlack || lay.height > layer.bounds.h + kSlack) {
    throw TextOverflowError(layer.id, lay.width, layer.bounds.w, lay.height, layer.bounds.h);
  }

  const double theta = tuning.rotation ? style.rotation * std::numbers::pi / 180.0 : 0.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cx = layer.bounds.w / 2.0;
  const double cy = layer.bounds.h / 2.0;
  auto place = [&](double x, double y) {
    // Counter-clockwise on the page, i.e. with the y axis pointing down.
    const double dx = x - cx;
    const double dy = y - cy;
    return PointF{cx + dx * cs + dy * sn, cy - dx * sn + dy * cs};
  };

  text::CoverageRasterizer raster(layer.bounds.w, layer.bounds.h);
  std::unordered_map<std::uint16_t, text::Outline> outlines;
  for (const auto& g : lay.glyphs) {
    auto it = outlines.find(g.glyph);
    if (it == outlines.end()) it = outlines.emplace(g.glyph, font.outline(g.glyph)).first;
    for (const auto& contour : it->second) {
      text::Contour t;
      t.on_curve = contour.on_curve;
      t.points.reserve(contour.points.size());
      for (const auto& p : contour.points) {
        t.points.push_back(place(g.origin.x + p.x * lay.scale, g.origin.y - p.y * lay.scale));
      }
      raster.contour(t);
    }
  }

  Plane alpha = raster.coverage();
  const float k = static_cast<float>(style.color.a / 255.0 * opacity.value_or(layer.opacity));
  for (auto& a : alpha.pixels()) a *= k;
  const Raster ink(layer.bounds.w, layer.bounds.h, {style.color.r, style.color.g, style.color.b, 255});
  kernels::source_over(canvas, ink, alpha, layer.bounds.x, layer.bounds.y);
  return layer.bounds.intersect(image_rect(canvas));
}

Rect composite_layer(Raster& canvas, const Raster& asset, const Plane& mask, int origin_x, int origin_y, double opacity,
                     double edge_blur_sigma) {
  if (asset.width() != mask.width() || asset.height() != mask.height()) {
    throw std::invalid_argument("composite_layer: asset is " + std::to_string(asset.width()) + "x" +
                                std::to_string(asset.height()) + " but mask is " + std::to_string(mask.width()) +
                                "x" + std::to_string(mask.height()));
  }
  if (opacity <= 0.0 || asset.empty()) return {origin_x, origin_y, 0, 0};
  const int r = kernels::gaussian_radius(edge_blur_sigma);
  const int w = asset.width() + 2 * r;
  const int h = asset.height() + 2 * r;

  // Colour and coverage are blurred separately: colour premultiplied by the mask so that
  // transparent asset pixels never bleed into the seam, coverage at float precision.
  Raster colour(w, h);
  Plane alpha(w, h, 0.0f);
  for (int y = 0; y < asset.height(); ++y) {
    for (int x = 0; x < asset.width(); ++x) {
      const Rgba p = asset.at(x, y);
      const float m = std::clamp(mask.at(x, y), 0.0f, 1.0f);
      colour.at(x + r, y + r) = {p.r, p.g, p.b, static_cast<std::uint8_t>(m * 255.0f + 0.5f)};
      alpha.at(x + r, y + r) = m;
    }
  }
  if (r > 0) {
    colour = kernels::blur(colour, edge_blur_sigma);
    alpha = kernels::blur(alpha, edge_blur_sigma, kernels::Border::Zero);
  }
  const float o = static_cast<float>(std::min(opacity, 1.0));
  for (auto& a : alpha.pixels()) a *= o;
  kernels::source_over(canvas, colour, alpha, origin_x - r, origin_y - r);
  return Rect{origin_x - r, origin_y - r, w, h}.intersect(image_rect(canvas));
}

Rect render_image_layer(Raster& canvas, const LayerSpec& layer, const LayerAsset& asset, double opacity, double sigma) {
  return composite_layer(canvas, asset.image, asset.mask, layer.bounds.x, layer.bounds.y, opacity, sigma);
}

std::string field_text(const SubjectRecord& s, const MrzTd3& mrz, SubjectField field, const CountryConfig& config) {
  switch (field) {
    case SubjectField::Surname: return to_upper_utf8(s.surname);
    case SubjectField::GivenName: return to_upper_utf8(s.given_name);
    case SubjectField::Sex: return std::string(1, sex_code(s.sex));
    case SubjectField::BirthDate: return format_date(s.birth_date, config.date_format);
    case SubjectField::BirthPlace: return to_upper_utf8(s.birth_place);
    case SubjectField::Nationality: return s.nationality;
    case SubjectField::DocumentNumber: return s.document_number;
    case SubjectField::IssueDate: return format_date(s.issue_date, config.date_format);
    case SubjectField::ExpiryDate: return format_date(s.expiry_date, config.date_format);
    case SubjectField::IssuingAuthority: return to_upper_utf8(s.issuing_authority);
    case SubjectField::PersonalNumber: return s.personal_number.value_or("");
    case SubjectField::Mrz: return mrz.line1.empty() && mrz.line2.empty() ? std::string() : mrz.text();
  }
  return {};
}

ValidationReport validate_job(const RenderJob& job) {
  ValidationReport r;
  if (!job.tpl || !job.tpl->config) {
    r.push_back({"job", "template", "render job has no template"});
    return r;
  }
  const CountryConfig& c = *job.tpl->config;
  for (const auto& [field, id] : c.field_bindings) {
    if (field == SubjectField::PersonalNumber && !job.subject.personal_number) {
      r.push_back({id, "binding", "subject has no personal_number for this field"});
    }
    const bool no_mrz = job.mrz.line1.empty() && job.mrz.line2.empty();
    if (field == SubjectField::Mrz && !no_mrz &&
        (job.mrz.line1.size() != kTd3LineLength || job.mrz.line2.size() != kTd3LineLength)) {
      r.push_back({id, "binding", "machine-readable zone lines must be 44 characters"});
    }
  }
  for (const auto& l : c.layers) {
    if (l.layer_class != LayerClass::BiometricArea) continue;
    const auto kind = l.image().biometric;
    const bool have = (kind == BiometricKind::Face && job.assets.face) ||
                      (kind == BiometricKind::Signature && job.assets.signature) ||
                      (kind == BiometricKind::Fingerprint && job.assets.fingerprint);
    if (!have) r.push_back({l.id, "biometric", "no " + std::string(to_string(*kind)) + " asset supplied"});
  }
  return r;
}

namespace {

Raster to_grayscale(Raster img) {
  for (auto& p : img.pixels()) {
    const std::uint8_t g = luma(p);
    p = {g, g, g, p.a};
  }
  return img;
}

LayerAsset biometric_asset(const RenderJob& job, const LayerSpec& layer, std::vector<std::string>& ops) {
  const CountryConfig& c = *job.tpl->config;
  const ImagePlacement& im = layer.image();
  const int w = layer.bounds.w;
  const int h = layer.bounds.h;
  LayerAsset a;
  switch (*im.biometric) {
    case BiometricKind::Face:
      if (job.assets.face_landmarks) {
        a.image = crop_icao(*job.assets.face, *job.assets.face_landmarks, w, h, c.portrait_crop);
        ops.push_back("icao_crop");
      } else {
        a.image = fit_into(*job.assets.face, w, h, Fit::Cover);
        ops.push_back("fit_cover");
      }
      break;
    case BiometricKind::Signature: {
      const SignatureExtraction sig = signature_extract(*job.assets.signature);
      ops.push_back("binarize");
      if (sig.blank) {
        ops.push_back("blank_signature_skipped");
        return a;
      }
      a.image = fit_into(sig.ink, w, h, im.fit == Fit::Stretch ? Fit::Contain : im.fit);
      break;
    }
    case BiometricKind::Fingerprint:
      a.image = fit_into(*job.assets.fingerprint, w, h, im.fit);
      break;
  }
  if (im.grayscale) {
    a.image = to_grayscale(std::move(a.image));
    ops.push_back("grayscale");
  }
  if (im.tint) {
    for (auto& p : a.image.pixels()) p = {im.tint->r, im.tint->g, im.tint->b, p.a};
    ops.push_back("tint");
  }
  a.mask = alpha_plane(a.image);
  const auto pre = job.tpl->assets.find(layer.id);
  if (pre != job.tpl->assets.end() && !pre->second.mask.empty()) {
    for (std::size_t i = 0; i < a.mask.size(); ++i) a.mask.pixels()[i] *= pre->second.mask.pixels()[i];
    ops.push_back("mask");
  }
  return a;
}

void apply_sensor_noise(Raster& img, double sigma, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6e6f697365ULL));
  for (auto& p : img.pixels()) {
    const float n = static_cast<float>(sigma * rng.normal());
    auto add = [n](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(v + n, 0.0f, 255.0f) + 0.5f); };
    p = {add(p.r), add(p.g), add(p.b), p.a};
  }
}

}  // namespace

RenderResult render_document(const RenderJob& job) {
  const ValidationReport problems = validate_job(job);
  if (!problems.empty()) throw RenderError(problems.front().subject, problems.front().message);
  const Template& tpl = *job.tpl;
  const CountryConfig& c = *tpl.config;

  std::map<std::string, SubjectField> bound;
  for (const auto& [field, id] : c.field_bindings) bound.emplace(id, field);

  RenderResult out;
  out.image = Raster(c.canvas.width, c.canvas.height, c.canvas.background);
  for (const auto& l : c.layers) {
    const auto t0 = std::chrono::steady_clock::now();
    LayerLogEntry entry{l.id, l.layer_class, l.z_order, l.bounds, {}, {}, 0.0};
    const auto ov = job.post_ops.opacity_overrides.find(l.id);
    const double opacity = ov != job.post_ops.opacity_overrides.end() ? ov->second : l.opacity;
    const double sigma = l.edge_blur_sigma.value_or(job.post_ops.edge_blur_sigma);
    try {
      if (l.is_text()) {
        const std::string text = l.layer_class == LayerClass::SubjectTextField
                                     ? field_text(job.subject, job.mrz, bound.at(l.id), c)
                                     : l.text().content;
        entry.touched = render_text_field(out.image, l, c, text, job.post_ops.character, opacity);
        entry.ops.push_back("text");
        if (l.text().rotation != 0.0 && job.post_ops.character.rotation) entry.ops.push_back("rotation");
        if (l.text().baseline_curvature != 0.0 && job.post_ops.character.curvature) entry.ops.push_back("curvature");
        if (!l.text().kerning_offsets.empty() && job.post_ops.character.kerning) entry.ops.push_back("kerning");
      } else if (l.layer_class == LayerClass::BiometricArea) {
        const LayerAsset a = biometric_asset(job, l, entry.ops);
        if (!a.image.empty()) {
          entry.touched = render_image_layer(out.image, l, a, opacity, sigma);
          entry.ops.push_back("composite");
        }
      } else {
        entry.touched = render_image_layer(out.image, l, tpl.assets.at(l.id), opacity, sigma);
        entry.ops.push_back("composite");
      }
      if (!l.is_text() && sigma > 0) entry.ops.push_back("edge_blur");
      if (opacity != 1.0) entry.ops.push_back("opacity");
    } catch (const RenderError&) {
      throw;
    } catch (const std::exception& e) {
      throw RenderError(l.id, e.what());
    }
    entry.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.log.push_back(std::move(entry));
  }
  if (job.post_ops.sensor_noise > 0.0) apply_sensor_noise(out.image, job.post_ops.sensor_noise, job.seed);
  return out;
}

std::string render_log_jsonl(const RenderResult& result, std::string_view document) {
  std::string out;
  for (const auto& e : result.log) {
    nlohmann::ordered_json j;
    j["document"] = document;
    j["layer"] = e.layer;
    j["class"] = to_string(e.layer_class);
    j["z_order"] = e.z_order;
    j["bounds"] = {e.bounds.x, e.bounds.y, e.bounds.w, e.bounds.h};
    j["touched"] = {e.touched.x, e.touched.y, e.touched.w, e.touched.h};
    j["ops"] = e.ops;
    j["ms"] = std::round(e.millis * 1000.0) / 1000.0;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace synthpass
