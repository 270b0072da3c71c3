// Regenerates the procedural fixture set: template layers and country configs, candidate
// face images with landmark sidecars, signature scans and synthetic score files.
//
//   make_fixtures <fixtures-dir> <font-dir>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "synthpass/compositor.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/core/rng.hpp"
#include "synthpass/face_filter.hpp"
#include "synthpass/kernels.hpp"
#include "synthpass/template_model.hpp"
#include "synthpass/text/font.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace synthpass;

namespace {

constexpr int kCanvasW = 1476;
constexpr int kCanvasH = 1039;
constexpr double kDpi = 300.0;

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

std::uint8_t u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgba mix(Rgba a, Rgba b, double t) {
  return {u8(a.r + (b.r - a.r) * t), u8(a.g + (b.g - a.g) * t), u8(a.b + (b.b - a.b) * t),
          u8(a.a + (b.a - a.a) * t)};
}

std::string hex(Rgba c) {
  char buf[10];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream(p, std::ios::binary) << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Template layers

struct Field {
  std::string id;
  std::string binding;
  Rect bounds;
  std::string label;
  double font_size = 9.0;
  std::string family = "sans";
};

struct Country {
  std::string code;
  Rgba paper0, paper1, line, emblem, text;
  std::string header;
  double header_size = 9.5;
  double header_curvature = 0.0;
  bool header_kerning = false;
  std::string signature_label;
  std::vector<Field> fields;
  std::string doc_pattern;
  std::optional<std::string> personal_pattern;
  std::string date_format;
  double emblem_opacity = 0.35;
  double doc_rotation = 0.0;
};

Raster guilloche(const Country& c, std::uint64_t seed) {
  Rng rng(seed);
  const double p1 = rng.uniform(40, 70), p2 = rng.uniform(70, 110), k = rng.uniform(5, 9);
  const double cx = kCanvasW * 0.68, cy = kCanvasH * 0.42;
  Raster img(kCanvasW, kCanvasH);
  for (int y = 0; y < kCanvasH; ++y) {
    for (int x = 0; x < kCanvasW; ++x) {
      const double t = (x + 0.3 * y) / (kCanvasW + 0.3 * kCanvasH);
      Rgba p = mix(c.paper0, c.paper1, t);
      const double v1 = std::sin((x + 38 * std::sin(y / p1)) / 8.5);
      const double v2 = std::sin((y + 22 * std::sin(x / p2)) / 7.0);
      const double r = std::hypot(x - cx, y - cy);
      const double th = std::atan2(y - cy, x - cx);
      const double v3 = std::sin(r / 5.5 + 2.6 * std::sin(k * th));
      double ink = 0.22 * smoothstep(0.22, 0.0, std::abs(v1)) + 0.18 * smoothstep(0.22, 0.0, std::abs(v2));
      ink += 0.30 * smoothstep(0.25, 0.0, std::abs(v3)) * smoothstep(420, 150, r);
      p = mix(p, c.line, std::min(ink, 0.6));
      img.at(x, y) = p;
    }
  }
  return img;
}

Raster emblem(Rgba colour, int size) {
  Raster img(size, size);
  const double c = size / 2.0;
  const double outer = size * 0.46, ring = size * 0.41;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x + 0.5 - c, dy = y + 0.5 - c;
      const double r = std::hypot(dx, dy);
      const double th = std::atan2(dy, dx);
      // Ring, eight-point star and central disc, each with a one-pixel soft edge.
      double a = smoothstep(outer + 0.5, outer - 0.5, r) * smoothstep(ring - 0.5, ring + 0.5, r);
      const double star = size * (0.22 + 0.12 * std::pow(std::abs(std::cos(4 * th)), 3));
      a = std::max(a, smoothstep(star + 0.5, star - 0.5, r) * smoothstep(size * 0.08 - 0.5, size * 0.08 + 0.5, r));
      a = std::max(a, smoothstep(size * 0.05 + 0.5, size * 0.05 - 0.5, r));
      const double ticks = std::abs(std::sin(18 * th));
      a = std::max(a, smoothstep(0.25, 0.05, ticks) * smoothstep(ring - 4.5, ring - 3.5, r) *
                          smoothstep(ring - 0.5, ring - 1.5, r));
      img.at(x, y) = {colour.r, colour.g, colour.b, u8(255 * a)};
    }
  }
  return img;
}

Raster rounded_mask(int w, int h, double radius) {
  Raster img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double qx = std::max({radius - px, px - (w - radius), 0.0});
      const double qy = std::max({radius - py, py - (h - radius), 0.0});
      const double d = std::hypot(qx, qy) - radius + 3.0;
      const std::uint8_t v = u8(255 * smoothstep(1.5, -1.5, d));
      img.at(x, y) = {v, v, v, 255};
    }
  }
  return img;
}

void draw_label(Raster& canvas, const CountryConfig& cfg, const std::string& text, Rect box, double size,
                Rgba colour) {
  LayerSpec l;
  l.id = "label";
  l.layer_class = LayerClass::StaticDescriptionText;
  l.bounds = box;
  TextStyle st;
  st.font_family = "sans";
  st.font_size = size;
  st.color = colour;
  l.render = st;
  render_text_field(canvas, l, cfg, text, {}, 1.0);
}

std::vector<Field> base_fields(const std::array<std::string, 8>& labels) {
  return {
      {"surname", "surname", {520, 180, 880, 56}, labels[0]},
      {"given_name", "given_name", {520, 262, 880, 56}, labels[1]},
      {"birth_date", "birth_date", {520, 344, 400, 56}, labels[2]},
      {"sex", "sex", {1000, 344, 140, 56}, labels[3]},
      {"birth_place", "birth_place", {520, 426, 880, 56}, labels[4]},
      {"issue_date", "issue_date", {520, 508, 400, 56}, labels[5]},
      {"expiry_date", "expiry_date", {1000, 508, 400, 56}, labels[6]},
      {"document_number", "document_number", {520, 590, 460, 56}, labels[7]},
  };
}

std::vector<Country> countries() {
  std::vector<Country> out;

  Country pol;
  pol.code = "POL";
  pol.paper0 = {236, 226, 238, 255};
  pol.paper1 = {222, 232, 244, 255};
  pol.line = {150, 110, 170, 255};
  pol.emblem = {170, 40, 60, 255};
  pol.text = {30, 25, 40, 255};
  pol.header = "RZECZPOSPOLITA POLSKA  REPUBLIC OF POLAND";
  pol.signature_label = "Podpis posiadacza / Holder's signature";
  pol.fields = base_fields({"1. Nazwisko / Surname", "2. Imiona / Given names", "3. Data urodzenia / Date of birth",
                            "4. Płeć / Sex", "5. Miejsce urodzenia / Place of birth",
                            "6. Data wydania / Date of issue", "7. Data ważności / Date of expiry",
                            "Nr paszportu / Passport No."});
  pol.doc_pattern = "[A-Z]{2}[0-9]{7}";
  pol.personal_pattern = "[0-9]{11}";
  pol.date_format = "%d.%m.%Y";
  out.push_back(pol);

  Country esp;
  esp.code = "ESP";
  esp.paper0 = {244, 230, 226, 255};
  esp.paper1 = {240, 236, 214, 255};
  esp.line = {190, 110, 90, 255};
  esp.emblem = {150, 30, 30, 255};
  esp.text = {40, 20, 20, 255};
  esp.header = "REINO DE ESPAÑA  PASAPORTE";
  esp.header_kerning = true;
  esp.signature_label = "Firma del titular / Holder's signature";
  esp.fields = base_fields({"Apellidos / Surname", "Nombre / Given names", "Fecha de nacimiento / Date of birth",
                            "Sexo / Sex", "Lugar de nacimiento / Place of birth",
                            "Fecha de expedición / Date of issue", "Fecha de caducidad / Date of expiry",
                            "N.º pasaporte / Passport No."});
  esp.fields.push_back({"personal_number", "personal_number", {1040, 590, 380, 56}, "DNI / Personal No."});
  esp.doc_pattern = "[A-Z]{3}[0-9]{6}";
  esp.personal_pattern = "[0-9]{8}[A-Z]";
  esp.date_format = "%d %m %Y";
  esp.emblem_opacity = 0.3;
  out.push_back(esp);

  Country prt;
  prt.code = "PRT";
  prt.paper0 = {226, 238, 230, 255};
  prt.paper1 = {236, 232, 220, 255};
  prt.line = {80, 140, 110, 255};
  prt.emblem = {20, 90, 60, 255};
  prt.text = {15, 35, 30, 255};
  prt.header = "REPÚBLICA PORTUGUESA  PASSAPORTE";
  prt.header_curvature = 0.00004;
  prt.signature_label = "Assinatura do titular / Holder's signature";
  prt.fields = base_fields({"Apelido(s) / Surname", "Nome(s) próprio(s) / Given names",
                            "Data de nascimento / Date of birth", "Sexo / Sex",
                            "Local de nascimento / Place of birth", "Data de emissão / Date of issue",
                            "Válido até / Date of expiry", "Passaporte n.º / Passport No."});
  prt.fields.push_back({"issuing_authority", "issuing_authority", {1040, 590, 380, 56}, "Autoridade / Authority", 7.0});
  prt.doc_pattern = "[A-Z][0-9]{6}";
  prt.date_format = "%d %b %Y";
  prt.doc_rotation = 1.5;
  out.push_back(prt);
  return out;
}

json text_style(const std::string& family, double size, Rgba colour) {
  json t;
  t["font_family"] = family;
  t["font_size"] = size;
  t["color"] = hex(colour);
  return t;
}

json bounds_json(Rect r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

void make_country(const fs::path& root, const fs::path& fonts, const Country& c, std::uint64_t seed) {
  const fs::path dir = root / "countries" / c.code;
  fs::create_directories(dir / "layers");

  CountryConfig label_cfg;
  label_cfg.canvas = {kCanvasW, kCanvasH, kDpi, {255, 255, 255, 255}};
  label_cfg.fonts["sans"] = text::Font::load(fonts / "DejaVuSans.ttf");

  Raster bg = guilloche(c, seed);
  const Rgba label_colour = mix(c.text, c.line, 0.45);
  for (const auto& f : c.fields) {
    draw_label(bg, label_cfg, f.label, {f.bounds.x, f.bounds.y - 26, std::min(f.bounds.w + 40, kCanvasW - f.bounds.x - 10), 26},
               5.0, label_colour);
  }
  draw_label(bg, label_cfg, c.signature_label, {520, 674, 600, 26}, 5.0, label_colour);
  write_png(dir / "layers" / "guilloche.png", bg);
  write_png(dir / "layers" / "emblem.png", emblem(c.emblem, 240));
  write_png(dir / "layers" / "face_mask.png", rounded_mask(400, 520, 28));

  json cfg;
  cfg["schema_version"] = 1;
  cfg["country_code"] = c.code;
  cfg["canvas"] = {{"width", kCanvasW}, {"height", kCanvasH}, {"dpi", kDpi}, {"background", "#ffffff"}};
  cfg["fonts"] = {{"sans", "../../fonts/DejaVuSans.ttf"},
                  {"sans-bold", "../../fonts/DejaVuSans-Bold.ttf"},
                  {"ocrb", "../../fonts/DejaVuSansMono.ttf"}};
  cfg["validity_years"] = 10;
  cfg["document_number_pattern"] = c.doc_pattern;
  cfg["personal_number_pattern"] = c.personal_pattern ? json(*c.personal_pattern) : json(nullptr);
  cfg["date_format"] = c.date_format;
  cfg["reference_date"] = "2025-06-30";
  cfg["dictionaries"] = {{"given_male", "dictionaries/given_male.txt"},
                         {"given_female", "dictionaries/given_female.txt"},
                         {"surname", "dictionaries/surname.txt"},
                         {"city", "dictionaries/city.txt"},
                         {"authority", "dictionaries/authority.txt"}};
  cfg["assets"] = {{"faces", "../../portraits"}, {"signatures", "../../signatures"}};
  cfg["mrz_layer_id"] = "mrz";

  json layers = json::array();
  int z = 0;
  layers.push_back({{"id", "guilloche"},
                    {"class", "LogoPattern"},
                    {"z_order", z++},
                    {"bounds", bounds_json({0, 0, kCanvasW, kCanvasH})},
                    {"opacity", 1.0},
                    {"edge_blur_sigma", 0.0},
                    {"image", {{"asset", "layers/guilloche.png"}, {"fit", "stretch"}}}});
  layers.push_back({{"id", "emblem"},
                    {"class", "LogoPattern"},
                    {"z_order", z++},
                    {"bounds", bounds_json({1150, 640, 240, 240})},
                    {"opacity", c.emblem_opacity},
                    {"image", {{"asset", "layers/emblem.png"}, {"fit", "contain"}}}});
  json header = text_style("sans-bold", c.header_size, c.text);
  header["alignment"] = "center";
  header["content"] = c.header;
  if (c.header_curvature != 0.0) header["baseline_curvature"] = c.header_curvature;
  if (c.header_kerning) {
    std::vector<double> k;
    std::size_t chars = 0;
    for (unsigned char ch : c.header) chars += (ch & 0xC0) != 0x80;
    for (std::size_t i = 0; i < chars; ++i) k.push_back(i == 0 ? 0.0 : 1.5);
    header["kerning_offsets"] = k;
  }
  layers.push_back({{"id", "header"},
                    {"class", "StaticDescriptionText"},
                    {"z_order", z++},
                    {"bounds", bounds_json({60, 50, 1356, 90})},
                    {"opacity", 0.95},
                    {"text", header}});
  layers.push_back({{"id", "face"},
                    {"class", "BiometricArea"},
                    {"z_order", z++},
                    {"bounds", bounds_json({60, 170, 400, 520})},
                    {"mask_ref", "layers/face_mask.png"},
                    {"opacity", 1.0},
                    {"biometric", "face"},
                    {"image", {{"fit", "cover"}}}});
  json bindings = json::object();
  for (const auto& f : c.fields) {
    json st = text_style(f.family, f.font_size, c.text);
    if (f.id == "document_number") {
      st["color"] = hex(mix(c.emblem, c.text, 0.3));
      st["letter_spacing"] = 2.0;
      if (c.doc_rotation != 0.0) st["rotation"] = c.doc_rotation;
    }
    layers.push_back({{"id", f.id},
                      {"class", "SubjectTextField"},
                      {"z_order", z++},
                      {"bounds", bounds_json(f.bounds)},
                      {"opacity", 0.92},
                      {"text", st}});
    bindings[f.binding] = f.id;
  }
  layers.push_back({{"id", "signature"},
                    {"class", "BiometricArea"},
                    {"z_order", z++},
                    {"bounds", bounds_json({520, 700, 460, 120})},
                    {"opacity", 0.9},
                    {"edge_blur_sigma", 0.6},
                    {"biometric", "signature"},
                    {"image", {{"fit", "contain"}, {"tint", "#1c1f4a"}}}});
  json mrz = text_style("ocrb", 11.0, {20, 20, 20, 255});
  mrz["line_spacing"] = 1.25;
  layers.push_back({{"id", "mrz"},
                    {"class", "SubjectTextField"},
                    {"z_order", z++},
                    {"bounds", bounds_json({80, 890, 1316, 130})},
                    {"opacity", 0.95},
                    {"text", mrz}});
  bindings["mrz"] = "mrz";
  cfg["layers"] = layers;
  cfg["field_bindings"] = bindings;
  write_json(dir / "config.json", cfg);
}

// The smallest config: one layer per class, 1024 x 724 at 300 dpi.
void make_minimal(const fs::path& root) {
  const fs::path dir = root / "minimal";
  fs::create_directories(dir / "layers");
  Raster logo = emblem({40, 70, 140, 255}, 160);
  write_png(dir / "layers" / "logo.png", logo);
  json cfg;
  cfg["schema_version"] = 1;
  cfg["country_code"] = "UTO";
  cfg["canvas"] = {{"width", 1024}, {"height", 724}, {"dpi", 300}, {"background", "#f4f1ea"}};
  cfg["fonts"] = {{"sans", "../fonts/DejaVuSans.ttf"}};
  cfg["dictionaries"] = {{"given_male", "../countries/POL/dictionaries/given_male.txt"},
                         {"given_female", "../countries/POL/dictionaries/given_female.txt"},
                         {"surname", "../countries/POL/dictionaries/surname.txt"},
                         {"city", "../countries/POL/dictionaries/city.txt"},
                         {"authority", "../countries/POL/dictionaries/authority.txt"}};
  cfg["mrz_layer_id"] = "mrz";
  json title = text_style("sans", 12, {20, 30, 60, 255});
  title["content"] = "UTOPIA PASSPORT";
  cfg["layers"] = json::array(
      {{{"id", "title"}, {"class", "StaticDescriptionText"}, {"z_order", 1},
        {"bounds", bounds_json({40, 30, 700, 80})}, {"text", title}},
       {{"id", "logo"}, {"class", "LogoPattern"}, {"z_order", 2}, {"bounds", bounds_json({820, 30, 160, 160})},
        {"opacity", 0.8}, {"image", {{"asset", "layers/logo.png"}}}},
       {{"id", "face"}, {"class", "BiometricArea"}, {"z_order", 3}, {"bounds", bounds_json({40, 150, 300, 390})},
        {"biometric", "face"}, {"image", {{"fit", "cover"}}}},
       {{"id", "mrz"}, {"class", "SubjectTextField"}, {"z_order", 4}, {"bounds", bounds_json({40, 600, 944, 100})},
        {"text", text_style("sans", 8, {0, 0, 0, 255})}}});
  cfg["field_bindings"] = {{"mrz", "mrz"}};
  write_json(dir / "config.json", cfg);
}

// ---------------------------------------------------------------------------
// Faces

struct FaceSpec {
  std::string name;
  int width = 360;
  int height = 450;
  double eye_distance = 100;
  double mid_x = 180;
  double eye_y = 200;
  double blur = 0;
  Rgba skin, hair, backdrop;
  std::string expect;  // "pass" or the criterion expected to fail
};

double ellipse_field(double x, double y, double cx, double cy, double rx, double ry) {
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return (std::sqrt(dx * dx + dy * dy) - 1.0) * std::min(rx, ry);
}

double inside(double d) { return smoothstep(0.75, -0.75, d); }

Raster draw_face(const FaceSpec& f, std::uint64_t seed) {
  Rng rng(seed);
  Raster img(f.width, f.height);
  const double d = f.eye_distance;
  const double lx = f.mid_x - d / 2, rx = f.mid_x + d / 2, ey = f.eye_y;
  const double fcx = f.mid_x, fcy = ey + 0.42 * d, frx = 0.98 * d, fry = 1.32 * d;
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      Rgba p = mix(f.backdrop, {255, 255, 255, 255}, 0.25 * py / f.height);
      // Hair behind the head, then neck and shoulders, then the face itself.
      p = mix(p, f.hair, inside(ellipse_field(px, py, fcx, fcy - 0.28 * d, 1.12 * d, 1.30 * d)));
      const double neck = std::max(std::abs(px - fcx) - 0.45 * d, fcy + 0.9 * d - py);
      p = mix(p, mix(f.skin, {0, 0, 0, 255}, 0.12), inside(neck));
      const double shoulders = ellipse_field(px, py, fcx, fcy + 2.55 * d, 2.2 * d, 1.2 * d);
      p = mix(p, {60, 64, 80, 255}, inside(shoulders));
      p = mix(p, f.skin, inside(ellipse_field(px, py, fcx, fcy, frx, fry)));
      p = mix(p, f.hair, inside(ellipse_field(px, py, fcx, fcy - 1.05 * d, 0.92 * d, 0.42 * d)));
      for (double ex : {lx, rx}) {
        p = mix(p, mix(f.hair, {0, 0, 0, 255}, 0.3),
                inside(ellipse_field(px, py, ex, ey - 0.22 * d, 0.2 * d, 0.045 * d)));
        p = mix(p, {245, 245, 240, 255}, inside(ellipse_field(px, py, ex, ey, 0.17 * d, 0.075 * d)));
        p = mix(p, {90, 60, 40, 255}, inside(ellipse_field(px, py, ex, ey, 0.07 * d, 0.07 * d)));
        p = mix(p, {10, 10, 10, 255}, inside(ellipse_field(px, py, ex, ey, 0.03 * d, 0.03 * d)));
      }
      const double nose = std::abs(px - fcx - 0.05 * (py - ey)) - 0.02 * d;
      if (py > ey + 0.1 * d && py < ey + 0.55 * d) p = mix(p, mix(f.skin, {0, 0, 0, 255}, 0.25), 0.6 * inside(nose));
      p = mix(p, {170, 70, 80, 255}, inside(ellipse_field(px, py, fcx, ey + 0.82 * d, 0.24 * d, 0.06 * d)));
      img.at(x, y) = p;
    }
  }
  // Pore-scale texture so the sharpness measure has something to respond to.
  for (auto& p : img.pixels()) {
    const double n = 7.0 * rng.normal();
    p = {u8(p.r + n), u8(p.g + n), u8(p.b + n), 255};
  }
  return kernels::blur(img, f.blur);
}

void make_faces(const fs::path& root) {
  const fs::path dir = root / "faces";
  fs::create_directories(dir);
  Rng rng(20240611);
  const Rgba skins[] = {{224, 185, 160, 255}, {198, 150, 118, 255}, {236, 200, 178, 255}, {170, 122, 92, 255},
                        {214, 172, 140, 255}};
  const Rgba hairs[] = {{60, 40, 25, 255}, {25, 20, 18, 255}, {150, 110, 60, 255}, {40, 30, 30, 255},
                        {100, 70, 40, 255}};
  json truth = json::object();
  for (int s = 0; s < 5; ++s) {
    std::vector<double> blurs = {0.0, 0.8, 1.4, 2.0};
    rng.shuffle(blurs);
    std::vector<FaceSpec> specs;
    for (double b : blurs) {
      FaceSpec f;
      f.blur = b;
      f.eye_distance = rng.uniform(92, 112);
      f.mid_x = 180 + rng.uniform(-12, 12);
      f.eye_y = 195 + rng.uniform(-10, 10);
      f.expect = "pass";
      specs.push_back(f);
    }
    FaceSpec soft;
    soft.blur = 5.0;
    soft.eye_distance = 104;
    soft.expect = "sharpness";
    specs.push_back(soft);
    FaceSpec geo;
    if (s % 2 == 0) {
      geo.eye_distance = 38;
      geo.eye_y = 210;
      geo.expect = "bbox_pixels";
    } else {
      geo.mid_x = 72;
      geo.eye_distance = 96;
      geo.expect = "eye_margin_ratio";
    }
    specs.push_back(geo);
    // Interleave so that input order is not the quality order.
    std::vector<std::size_t> order = {4, 0, 1, 5, 2, 3};
    if (s % 2) order = {0, 5, 3, 1, 4, 2};
    for (std::size_t i = 0; i < order.size(); ++i) {
      FaceSpec f = specs[order[i]];
      f.skin = skins[s];
      f.hair = hairs[s];
      f.backdrop = {200, 212, 226, 255};
      f.name = "s" + std::to_string(s + 1) + "_" + std::to_string(i + 1) + ".png";
      const Raster img = draw_face(f, derive_seed(77, s * 10 + i));
      write_png(dir / f.name, img);
      Landmarks lm;
      lm.left_eye = {f.mid_x - f.eye_distance / 2, f.eye_y};
      lm.right_eye = {f.mid_x + f.eye_distance / 2, f.eye_y};
      const double fcy = f.eye_y + 0.42 * f.eye_distance;
      const int bx = static_cast<int>(std::floor(f.mid_x - 0.98 * f.eye_distance));
      const int by = static_cast<int>(std::floor(fcy - 1.32 * f.eye_distance));
      const int bw = static_cast<int>(std::ceil(1.96 * f.eye_distance));
      const int bh = static_cast<int>(std::ceil(2.64 * f.eye_distance));
      lm.face_bbox = Rect{bx, by, bw, bh}.intersect(image_rect(img));
      lm.source = "fixture-generator";
      SidecarLandmarkProvider::write(SidecarLandmarkProvider::sidecar_path(dir / f.name), lm);
      truth[f.name] = {{"subject", "s" + std::to_string(s + 1)}, {"blur_sigma", f.blur}, {"expect", f.expect}};
    }
  }
  write_json(dir / "truth.json", truth);
}

// ---------------------------------------------------------------------------
// Signatures

Raster draw_signature(std::uint64_t seed) {
  Rng rng(seed);
  const int w = 480, h = 160;
  Image<float> ink(w, h, 0.0f);
  // Pen trajectory: a drifting sum of sinusoids with a few loops, stamped as a round nib.
  const double a1 = rng.uniform(18, 34), a2 = rng.uniform(6, 14), w1 = rng.uniform(0.05, 0.09),
               w2 = rng.uniform(0.16, 0.3), ph = rng.uniform(0, 6.28);
  const double x0 = rng.uniform(30, 60), x1 = rng.uniform(380, 440);
  const double nib = rng.uniform(1.8, 2.6);
  const int steps = 4000;
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const double x = x0 + (x1 - x0) * t + 14 * std::sin(t * 40 + ph);
    const double y = h * 0.55 + a1 * std::sin(w1 * (x - x0) + ph) * (1 - t * 0.4) + a2 * std::cos(w2 * (x - x0)) -
                     18 * t;
    if (std::fmod(t * 7 + ph, 1.0) > 0.93) continue;  // pen lifts
    for (int yy = static_cast<int>(y - nib - 2); yy <= static_cast<int>(y + nib + 2); ++yy) {
      for (int xx = static_cast<int>(x - nib - 2); xx <= static_cast<int>(x + nib + 2); ++xx) {
        if (!ink.contains(xx, yy)) continue;
        const double dd = std::hypot(xx + 0.5 - x, yy + 0.5 - y);
        ink.at(xx, yy) = std::max(ink.at(xx, yy), static_cast<float>(smoothstep(nib + 0.7, nib - 0.7, dd)));
      }
    }
  }
  // Underline flourish.
  const double uy = h * 0.8 + rng.uniform(-6, 6);
  for (int x = static_cast<int>(x0 + 20); x < static_cast<int>(x1 - 40); ++x) {
    for (int yy = static_cast<int>(uy - 3); yy <= static_cast<int>(uy + 3); ++yy) {
      const double yc = uy + 3 * std::sin(x * 0.02);
      ink.at(x, yy) = std::max(ink.at(x, yy), static_cast<float>(smoothstep(1.9, 0.6, std::abs(yy + 0.5 - yc))));
    }
  }
  Raster img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double paper = 236 + 6.0 * x / w + 2.5 * rng.normal();
      const double v = paper + (38 - paper) * ink.at(x, y);
      img.at(x, y) = {u8(v), u8(v), u8(v + 8 * ink.at(x, y)), 255};
    }
  }
  return img;
}

void make_signatures(const fs::path& root) {
  const fs::path dir = root / "signatures";
  fs::create_directories(dir);
  for (int i = 1; i <= 6; ++i) {
    write_png(dir / ("sig_" + std::to_string(i) + ".png"), draw_signature(derive_seed(501, i)));
  }
}

// ---------------------------------------------------------------------------
// Score files

struct ScoreSpec {
  std::string name;
  int bona_fide, print, screen;
  double bf_mean, print_mean, screen_mean, spread;
  bool lower = false;
  int decimals = 4;
};

void make_scores(const fs::path& root) {
  const fs::path dir = root / "scores";
  fs::create_directories(dir);
  const ScoreSpec specs[] = {
      {"mixed", 300, 200, 200, 0.25, 0.72, 0.62, 0.14, false, 3},
      {"lower_polarity", 150, 120, 90, 0.8, 0.35, 0.42, 0.15, true, 4},
      {"small", 80, 40, 30, 0.3, 0.7, 0.65, 0.16, false, 4},
      {"separated", 20, 20, 20, 0.1, 0.9, 0.8, 0.03, false, 4},
  };
  Rng rng(90210);
  for (const auto& s : specs) {
    std::ofstream out(dir / (s.name + ".csv"), std::ios::binary);
    if (s.lower) out << "polarity=lower\n";
    out << "path,label,pai,score\n";
    const double scale = std::pow(10.0, s.decimals);
    auto emit = [&](const std::string& prefix, const char* label, const char* pai, int n, double mean) {
      for (int i = 0; i < n; ++i) {
        double v = mean + s.spread * rng.normal();
        if (s.name == "separated") v = std::clamp(v, mean - 0.05, mean + 0.05);
        v = std::round(v * scale) / scale;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", s.decimals, v);
        out << prefix << "_" << i << ".png," << label << "," << pai << "," << buf << "\n";
      }
    };
    emit("bf/img", "bonafide", "none", s.bona_fide, s.bf_mean);
    emit("print/img", "attack", "print", s.print, s.print_mean);
    emit("screen/img", "attack", "screen", s.screen, s.screen_mean);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: make_fixtures <fixtures-dir> <font-dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  const fs::path fonts = argv[2];
  try {
    fs::create_directories(root / "fonts");
    for (const char* f : {"DejaVuSans.ttf", "DejaVuSans-Bold.ttf", "DejaVuSansMono.ttf"}) {
      if (!fs::exists(root / "fonts" / f)) fs::copy_file(fonts / f, root / "fonts" / f);
    }
    std::uint64_t seed = 1;
    for (const auto& c : countries()) make_country(root, root / "fonts", c, seed++);
    make_minimal(root);
    make_faces(root);
    make_signatures(root);
    make_scores(root);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
