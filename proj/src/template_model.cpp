#include "synthpass/template_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "synthpass/compositor.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/kernels.hpp"

namespace synthpass {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(LayerClass c) {
  switch (c) {
    case LayerClass::StaticDescriptionText: return "StaticDescriptionText";
    case LayerClass::SubjectTextField: return "SubjectTextField";
    case LayerClass::BiometricArea: return "BiometricArea";
    case LayerClass::LogoPattern: return "LogoPattern";
  }
  return "?";
}

std::optional<LayerClass> parse_layer_class(std::string_view s) {
  for (auto c : {LayerClass::StaticDescriptionText, LayerClass::SubjectTextField, LayerClass::BiometricArea,
                 LayerClass::LogoPattern}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(BiometricKind k) {
  switch (k) {
    case BiometricKind::Face: return "face";
    case BiometricKind::Signature: return "signature";
    case BiometricKind::Fingerprint: return "fingerprint";
  }
  return "?";
}

namespace {

constexpr SubjectField kAllFields[] = {
    SubjectField::Surname,        SubjectField::GivenName,  SubjectField::Sex,
    SubjectField::BirthDate,      SubjectField::BirthPlace, SubjectField::Nationality,
    SubjectField::DocumentNumber, SubjectField::IssueDate,  SubjectField::ExpiryDate,
    SubjectField::IssuingAuthority, SubjectField::PersonalNumber, SubjectField::Mrz,
};

}  // namespace

std::string_view to_string(SubjectField f) {
  switch (f) {
    case SubjectField::Surname: return "surname";
    case SubjectField::GivenName: return "given_name";
    case SubjectField::Sex: return "sex";
    case SubjectField::BirthDate: return "birth_date";
    case SubjectField::BirthPlace: return "birth_place";
    case SubjectField::Nationality: return "nationality";
    case SubjectField::DocumentNumber: return "document_number";
    case SubjectField::IssueDate: return "issue_date";
    case SubjectField::ExpiryDate: return "expiry_date";
    case SubjectField::IssuingAuthority: return "issuing_authority";
    case SubjectField::PersonalNumber: return "personal_number";
    case SubjectField::Mrz: return "mrz";
  }
  return "?";
}

std::optional<SubjectField> parse_subject_field(std::string_view s) {
  for (auto f : kAllFields) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

const LayerSpec* CountryConfig::find_layer(std::string_view id) const {
  for (const auto& l : layers) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const text::Font& CountryConfig::font(const std::string& family) const {
  const auto it = fonts.find(family);
  if (it == fonts.end() || !it->second) throw text::FontError("font family '" + family + "' is not loaded");
  return *it->second;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class ConfigParser {
 public:
  ConfigParser(std::string_view text, fs::path base_dir, std::string source)
      : text_(text), base_(std::move(base_dir)), source_(std::move(source)) {}

  CountryConfig parse() {
    json root;
    try {
      root = json::parse(text_.begin(), text_.end());
    } catch (const json::parse_error& e) {
      const int line = line_at(e.byte == 0 ? 0 : e.byte - 1);
      fail("document", line, std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) fail("document", 1, "top level must be an object");

    CountryConfig c;
    c.source_path = fs::path(source_);
    c.schema_version = get<int>(root, "schema_version", "document");
    if (c.schema_version != kConfigSchemaVersion) {
      fail("schema_version", key_line("schema_version"),
           "unsupported schema_version " + std::to_string(c.schema_version));
    }
    c.country_code = get<std::string>(root, "country_code", "document");
    if (!std::regex_match(c.country_code, std::regex("[A-Z]{3}"))) {
      fail("country_code", key_line("country_code"), "country_code must be three upper-case letters");
    }

    const json& canvas = object(root, "canvas", "document");
    c.canvas.width = get<int>(canvas, "width", "canvas");
    c.canvas.height = get<int>(canvas, "height", "canvas");
    c.canvas.dpi = canvas.contains("dpi") ? get<double>(canvas, "dpi", "canvas") : 600.0;
    if (canvas.contains("background")) c.canvas.background = color(canvas["background"], "canvas");
    if (c.canvas.width <= 0 || c.canvas.height <= 0 || c.canvas.dpi <= 0) {
      fail("canvas", key_line("canvas"), "canvas dimensions and dpi must be positive");
    }

    if (root.contains("fonts")) {
      for (const auto& [family, path] : object(root, "fonts", "document").items()) {
        if (!path.is_string()) fail("fonts", key_line("fonts"), "font path for '" + family + "' must be a string");
        c.font_paths[family] = resolve(path.get<std::string>());
      }
    }

    const json& layers = root.contains("layers") ? root["layers"] : json();
    if (!layers.is_array()) fail("layers", key_line("layers"), "'layers' must be an array");
    for (const auto& l : layers) c.layers.push_back(parse_layer(l));

    c.mrz_layer_id = get<std::string>(root, "mrz_layer_id", "document");
    for (const auto& [attr, id] : object(root, "field_bindings", "document").items()) {
      const auto field = parse_subject_field(attr);
      const int line = key_line(attr);
      if (!field) fail("field_bindings." + attr, line, "unknown subject attribute '" + attr + "'");
      if (!id.is_string()) fail("field_bindings." + attr, line, "binding target must be a layer id string");
      c.field_bindings[*field] = id.get<std::string>();
    }

    const json& dicts = object(root, "dictionaries", "document");
    c.dictionaries.given_male = resolve(get<std::string>(dicts, "given_male", "dictionaries"));
    c.dictionaries.given_female = resolve(get<std::string>(dicts, "given_female", "dictionaries"));
    c.dictionaries.surname = resolve(get<std::string>(dicts, "surname", "dictionaries"));
    c.dictionaries.city = resolve(get<std::string>(dicts, "city", "dictionaries"));
    c.dictionaries.authority = resolve(get<std::string>(dicts, "authority", "dictionaries"));

    if (root.contains("assets")) {
      const json& a = object(root, "assets", "document");
      for (const char* k : {"faces", "signatures", "fingerprints"}) {
        if (!a.contains(k) || a[k].is_null()) continue;
        const fs::path p = resolve(get<std::string>(a, k, "assets"));
        if (std::string_view(k) == "faces") c.assets.faces = p;
        else if (std::string_view(k) == "signatures") c.assets.signatures = p;
        else c.assets.fingerprints = p;
      }
    }

    if (root.contains("validity_years")) c.validity_years = get<int>(root, "validity_years", "document");
    if (c.validity_years <= 0) fail("validity_years", key_line("validity_years"), "validity_years must be positive");
    if (root.contains("document_number_pattern")) {
      c.document_number_pattern = get<std::string>(root, "document_number_pattern", "document");
    }
    if (root.contains("personal_number_pattern") && !root["personal_number_pattern"].is_null()) {
      c.personal_number_pattern = get<std::string>(root, "personal_number_pattern", "document");
    }
    if (root.contains("date_format")) c.date_format = get<std::string>(root, "date_format", "document");
    if (root.contains("reference_date")) {
      try {
        c.reference_date = parse_date(get<std::string>(root, "reference_date", "document"));
      } catch (const std::invalid_argument& e) {
        fail("reference_date", key_line("reference_date"), e.what());
      }
    }
    if (root.contains("portrait_crop")) {
      const json& pc = object(root, "portrait_crop", "document");
      if (pc.contains("eye_line_from_bottom")) {
        c.portrait_crop.eye_line_from_bottom = get<double>(pc, "eye_line_from_bottom", "portrait_crop");
      }
      if (pc.contains("inter_eye_width")) {
        c.portrait_crop.inter_eye_width = get<double>(pc, "inter_eye_width", "portrait_crop");
      }
    }

    const auto report = check_config(c);
    if (!report.empty()) {
      const Violation& v = report.front();
      const std::string element = v.subject.substr(0, v.subject.find(','));
      fail(v.subject, layer_line(element), "layer '" + v.subject + "': " + v.message);
    }

    std::stable_sort(c.layers.begin(), c.layers.end(),
                     [](const LayerSpec& a, const LayerSpec& b) { return a.z_order < b.z_order; });

    for (const auto& [family, path] : c.font_paths) {
      try {
        c.fonts[family] = text::Font::load(path);
      } catch (const text::FontError& e) {
        fail("fonts." + family, key_line(family), e.what());
      }
    }
    for (const auto& l : c.layers) {
      if (l.is_text() && !c.fonts.count(l.text().font_family)) {
        fail(l.id, l.source_line, "layer '" + l.id + "': unknown font family '" + l.text().font_family + "'");
      }
    }
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& element, int line, const std::string& msg) const {
    std::ostringstream os;
    os << source_ << ":" << line << ": " << msg;
    throw ConfigError(element, line, os.str());
  }

  int line_at(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
  }

  int key_line(const std::string& key) const {
    const auto pos = text_.find("\"" + key + "\"");
    return pos == std::string_view::npos ? 0 : line_at(pos);
  }

  int layer_line(const std::string& id) const {
    const std::regex re("\"id\"\\s*:\\s*\"" + std::regex_replace(id, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") +
                        "\"");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(text_.begin(), text_.end(), m, re)) {
      return line_at(static_cast<std::size_t>(m.position(0)));
    }
    return key_line(id);
  }

  const json& object(const json& parent, const char* key, const std::string& element) const {
    if (!parent.contains(key)) fail(element, key_line(element), std::string("missing required key '") + key + "'");
    const json& v = parent[key];
    if (!v.is_object()) fail(key, key_line(key), std::string("'") + key + "' must be an object");
    return v;
  }

  template <class T>
  T get(const json& parent, const char* key, const std::string& element, int line = -1) const {
    if (line < 0) line = key_line(key);
    if (!parent.contains(key)) {
      fail(element, line > 0 ? line : key_line(element),
           (element == "document" ? std::string() : element + ": ") + "missing required key '" + key + "'");
    }
    try {
      return parent[key].get<T>();
    } catch (const json::exception&) {
      fail(element, line, (element == "document" ? std::string() : element + ": ") + "key '" + key +
                              "' has the wrong type");
    }
  }

  Rgba color(const json& v, const std::string& element) const {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      static const std::regex hex("#([0-9a-fA-F]{6})([0-9a-fA-F]{2})?");
      std::smatch m;
      if (std::regex_match(s, m, hex)) {
        const unsigned long rgb = std::stoul(m[1].str(), nullptr, 16);
        const unsigned long a = m[2].matched ? std::stoul(m[2].str(), nullptr, 16) : 255ul;
        return {static_cast<std::uint8_t>(rgb >> 16), static_cast<std::uint8_t>((rgb >> 8) & 255),
                static_cast<std::uint8_t>(rgb & 255), static_cast<std::uint8_t>(a)};
      }
    }
    fail(element, key_line(element), element + ": colours are written as \"#rrggbb\" or \"#rrggbbaa\"");
  }

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : (base_ / path).lexically_normal();
  }

  LayerSpec parse_layer(const json& l) {
    if (!l.is_object()) fail("layers", key_line("layers"), "each layer must be an object");
    LayerSpec s;
    if (!l.contains("id") || !l["id"].is_string()) fail("layers", key_line("layers"), "layer without a string 'id'");
    s.id = l["id"].get<std::string>();
    const int line = layer_line(s.id);
    s.source_line = line;
    const std::string ctx = "layer '" + s.id + "'";
    const std::string cls = get<std::string>(l, "class", s.id, line);
    const auto parsed = parse_layer_class(cls);
    if (!parsed) fail(s.id, line, ctx + ": unknown layer class '" + cls + "'");
    s.layer_class = *parsed;
    s.z_order = get<int>(l, "z_order", s.id, line);
    const json& b = l.contains("bounds") ? l["bounds"] : json();
    if (!b.is_object()) fail(s.id, line, ctx + ": missing 'bounds' object");
    s.bounds = {get<int>(b, "x", s.id, line), get<int>(b, "y", s.id, line), get<int>(b, "w", s.id, line),
                get<int>(b, "h", s.id, line)};
    if (l.contains("opacity")) s.opacity = get<double>(l, "opacity", s.id, line);
    if (l.contains("edge_blur_sigma") && !l["edge_blur_sigma"].is_null()) {
      s.edge_blur_sigma = get<double>(l, "edge_blur_sigma", s.id, line);
    }
    if (l.contains("mask_ref") && !l["mask_ref"].is_null()) s.mask_ref = resolve(get<std::string>(l, "mask_ref", s.id, line));

    if (l.contains("text")) {
      const json& t = l["text"];
      if (!t.is_object()) fail(s.id, line, ctx + ": 'text' must be an object");
      TextStyle st;
      st.font_family = get<std::string>(t, "font_family", s.id, line);
      st.font_size = get<double>(t, "font_size", s.id, line);
      if (t.contains("kerning_offsets")) st.kerning_offsets = get<std::vector<double>>(t, "kerning_offsets", s.id, line);
      if (t.contains("letter_spacing")) st.letter_spacing = get<double>(t, "letter_spacing", s.id, line);
      if (t.contains("rotation")) st.rotation = get<double>(t, "rotation", s.id, line);
      if (t.contains("baseline_curvature")) st.baseline_curvature = get<double>(t, "baseline_curvature", s.id, line);
      if (t.contains("color")) st.color = color(t["color"], s.id);
      if (t.contains("line_spacing")) st.line_spacing = get<double>(t, "line_spacing", s.id, line);
      if (t.contains("content")) st.content = get<std::string>(t, "content", s.id, line);
      if (t.contains("alignment")) {
        const std::string a = get<std::string>(t, "alignment", s.id, line);
        if (a == "left") st.alignment = Alignment::Left;
        else if (a == "center") st.alignment = Alignment::Center;
        else if (a == "right") st.alignment = Alignment::Right;
        else fail(s.id, line, ctx + ": alignment must be left, center or right");
      }
      if (st.font_size <= 0) fail(s.id, line, ctx + ": font_size must be positive");
      s.render = std::move(st);
    } else {
      ImagePlacement ip;
      if (l.contains("image")) {
        const json& im = l["image"];
        if (!im.is_object()) fail(s.id, line, ctx + ": 'image' must be an object");
        if (im.contains("asset") && !im["asset"].is_null()) ip.asset = resolve(get<std::string>(im, "asset", s.id, line));
        if (im.contains("fit")) {
          const std::string f = get<std::string>(im, "fit", s.id, line);
          if (f == "stretch") ip.fit = Fit::Stretch;
          else if (f == "contain") ip.fit = Fit::Contain;
          else if (f == "cover") ip.fit = Fit::Cover;
          else fail(s.id, line, ctx + ": fit must be stretch, contain or cover");
        }
        if (im.contains("tint")) ip.tint = color(im["tint"], s.id);
        if (im.contains("grayscale")) ip.grayscale = get<bool>(im, "grayscale", s.id, line);
      }
      if (l.contains("biometric")) {
        const std::string k = get<std::string>(l, "biometric", s.id, line);
        if (k == "face") ip.biometric = BiometricKind::Face;
        else if (k == "signature") ip.biometric = BiometricKind::Signature;
        else if (k == "fingerprint") ip.biometric = BiometricKind::Fingerprint;
        else fail(s.id, line, ctx + ": biometric must be face, signature or fingerprint");
      }
      s.render = std::move(ip);
    }
    return s;
  }

  std::string_view text_;
  fs::path base_;
  std::string source_;
};

}  // namespace

CountryConfig parse_config(std::string_view json_text, const fs::path& base_dir, const std::string& source_name) {
  return ConfigParser(json_text, base_dir, source_name).parse();
}

CountryConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("document", 0, path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return parse_config(text, path.parent_path(), path.string());
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport check_config(const CountryConfig& c) {
  ValidationReport r;
  const Rect canvas = image_rect(c.canvas.width, c.canvas.height);
  std::map<int, std::string> z_seen;
  std::set<std::string> ids;
  for (const auto& l : c.layers) {
    if (!ids.insert(l.id).second) r.push_back({l.id, "duplicate_id", "layer id '" + l.id + "' is used twice"});
    if (l.bounds.empty() || !canvas.contains(l.bounds)) {
      std::ostringstream os;
      os << "bounds [" << l.bounds.x << "," << l.bounds.y << " " << l.bounds.w << "x" << l.bounds.h
         << "] are not inside the " << c.canvas.width << "x" << c.canvas.height << " canvas";
      r.push_back({l.id, "bounds", os.str()});
    }
    if (auto [it, fresh] = z_seen.emplace(l.z_order, l.id); !fresh) {
      r.push_back({it->second + "," + l.id, "z_order",
                   "layers '" + it->second + "' and '" + l.id + "' share z_order " + std::to_string(l.z_order)});
    }
    if (!(l.opacity >= 0.0 && l.opacity <= 1.0)) r.push_back({l.id, "opacity", "opacity must lie in [0, 1]"});
    const bool text_class = l.layer_class == LayerClass::StaticDescriptionText || l.layer_class == LayerClass::SubjectTextField;
    if (l.layer_class == LayerClass::SubjectTextField && !l.is_text()) {
      r.push_back({l.id, "render_params", "subject text fields need a 'text' style"});
    }
    if (l.is_text() && !text_class) r.push_back({l.id, "render_params", "only text layers may carry a 'text' style"});
    if (l.is_text() && l.layer_class == LayerClass::StaticDescriptionText) {
      const auto& st = l.text();
      std::size_t chars = 0;
      for (unsigned char ch : st.content) chars += (ch & 0xC0) != 0x80 && ch != '\n';
      if (!st.kerning_offsets.empty() && st.kerning_offsets.size() != chars) {
        r.push_back({l.id, "kerning", "kerning_offsets has " + std::to_string(st.kerning_offsets.size()) +
                                          " entries for " + std::to_string(chars) + " characters"});
      }
    }
    if (!l.is_text()) {
      const auto& im = l.image();
      if (l.layer_class == LayerClass::BiometricArea && !im.biometric) {
        r.push_back({l.id, "render_params", "biometric areas must declare face, signature or fingerprint"});
      }
      if (l.layer_class != LayerClass::BiometricArea && im.asset.empty()) {
        r.push_back({l.id, "render_params", "image layer has no asset"});
      }
    }
  }

  std::map<std::string, int> bound_count;
  for (const auto& [field, id] : c.field_bindings) {
    const LayerSpec* l = c.find_layer(id);
    if (!l || l->layer_class != LayerClass::SubjectTextField) {
      r.push_back({id, "binding", "field '" + std::string(to_string(field)) +
                                      "' is bound to '" + id + "', which is not a SubjectTextField layer"});
      continue;
    }
    ++bound_count[id];
  }
  for (const auto& l : c.layers) {
    if (l.layer_class != LayerClass::SubjectTextField) continue;
    const int n = bound_count[l.id];
    if (n == 0) r.push_back({l.id, "binding", "subject text field is not bound to any subject attribute"});
    if (n > 1) r.push_back({l.id, "binding", "subject text field is bound " + std::to_string(n) + " times"});
  }
  const LayerSpec* mrz = c.find_layer(c.mrz_layer_id);
  if (!mrz || mrz->layer_class != LayerClass::SubjectTextField) {
    r.push_back({c.mrz_layer_id, "mrz_layer", "mrz_layer_id does not name a SubjectTextField layer"});
  } else {
    const auto it = c.field_bindings.find(SubjectField::Mrz);
    if (it == c.field_bindings.end() || it->second != c.mrz_layer_id) {
      r.push_back({c.mrz_layer_id, "mrz_layer", "the mrz attribute must be bound to mrz_layer_id"});
    }
  }
  return r;
}

ValidationReport validate_template(const Template& tpl) {
  if (!tpl.config) return {{"template", "config", "template has no configuration"}};
  ValidationReport r = check_config(*tpl.config);
  for (const auto& l : tpl.config->layers) {
    if (l.mask_ref && !fs::exists(*l.mask_ref)) {
      r.push_back({l.id, "missing_asset", "mask asset " + l.mask_ref->string() + " does not exist"});
    }
    if (!l.is_text() && !l.image().asset.empty() && !fs::exists(l.image().asset)) {
      r.push_back({l.id, "missing_asset", "image asset " + l.image().asset.string() + " does not exist"});
    }
    if (l.is_text()) {
      const auto it = tpl.config->fonts.find(l.text().font_family);
      if (it == tpl.config->fonts.end() || !it->second) {
        r.push_back({l.id, "font", "font family '" + l.text().font_family + "' is not loaded"});
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scaling and assets

CountryConfig scale_config(const CountryConfig& config, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("scale factor must be positive");
  CountryConfig c = config;
  auto sc = [f](int v) { return static_cast<int>(std::lround(v * f)); };
  c.canvas.width = std::max(1, sc(config.canvas.width));
  c.canvas.height = std::max(1, sc(config.canvas.height));
  c.canvas.dpi = config.canvas.dpi * f;
  for (auto& l : c.layers) {
    const int x0 = sc(l.bounds.x);
    const int y0 = sc(l.bounds.y);
    l.bounds = {x0, y0, std::max(1, sc(l.bounds.right()) - x0), std::max(1, sc(l.bounds.bottom()) - y0)};
    l.bounds = l.bounds.intersect(image_rect(c.canvas.width, c.canvas.height));
    if (l.edge_blur_sigma) *l.edge_blur_sigma *= f;
    if (l.is_text()) {
      auto& st = std::get<TextStyle>(l.render);
      for (auto& k : st.kerning_offsets) k *= f;
      st.letter_spacing *= f;
      st.baseline_curvature /= f;
    }
  }
  return c;
}

Raster fit_into(const Raster& asset, int width, int height, Fit fit) {
  if (asset.empty()) throw std::invalid_argument("cannot fit an empty asset");
  if (fit == Fit::Stretch) return kernels::resample(asset, width, height);
  const double sx = static_cast<double>(width) / asset.width();
  const double sy = static_cast<double>(height) / asset.height();
  const double s = fit == Fit::Contain ? std::min(sx, sy) : std::max(sx, sy);
  const int rw = std::max(1, static_cast<int>(std::lround(asset.width() * s)));
  const int rh = std::max(1, static_cast<int>(std::lround(asset.height() * s)));
  const Raster scaled = kernels::resample(asset, rw, rh);
  Raster out(width, height);
  const int ox = (width - rw) / 2;
  const int oy = (height - rh) / 2;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int sx2 = x - ox;
      const int sy2 = y - oy;
      if (scaled.contains(sx2, sy2)) out.at(x, y) = scaled.at(sx2, sy2);
    }
  }
  return out;
}

namespace {

Plane load_mask(const LayerSpec& layer) {
  Plane mask(layer.bounds.w, layer.bounds.h, 1.0f);
  try {
    const Raster m = kernels::resample(read_png(*layer.mask_ref), layer.bounds.w, layer.bounds.h);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Rgba p = m.pixels()[i];
      mask.pixels()[i] = (luma(p) / 255.0f) * (p.a / 255.0f);
    }
  } catch (const ImageIoError& e) {
    throw TemplateError(layer.id, e.what());
  }
  return mask;
}

}  // namespace

LayerAsset load_layer_asset(const LayerSpec& layer) {
  if (layer.is_text() || layer.image().asset.empty()) throw TemplateError(layer.id, "layer has no image asset");
  LayerAsset a;
  try {
    a.image = fit_into(read_png(layer.image().asset), layer.bounds.w, layer.bounds.h, layer.image().fit);
    a.mask = alpha_plane(a.image);
  } catch (const ImageIoError& e) {
    throw TemplateError(layer.id, e.what());
  }
  if (layer.mask_ref) {
    const Plane m = load_mask(layer);
    for (std::size_t i = 0; i < m.size(); ++i) a.mask.pixels()[i] *= m.pixels()[i];
  }
  if (layer.image().tint) {
    const Rgba t = *layer.image().tint;
    for (auto& p : a.image.pixels()) p = {t.r, t.g, t.b, p.a};
  }
  return a;
}

Template derive_empty_template(std::shared_ptr<const CountryConfig> config, double edge_blur_sigma) {
  if (!config) throw std::invalid_argument("derive_empty_template: null config");
  Template t;
  t.config = config;
  t.empty = Raster(config->canvas.width, config->canvas.height, config->canvas.background);
  for (const auto& l : config->layers) {
    switch (l.layer_class) {
      case LayerClass::SubjectTextField:
        t.slots.push_back(l.id);
        break;
      case LayerClass::BiometricArea:
        t.slots.push_back(l.id);
        if (l.mask_ref) t.assets.emplace(l.id, LayerAsset{{}, load_mask(l)});
        break;
      case LayerClass::StaticDescriptionText:
      case LayerClass::LogoPattern:
        if (l.is_text()) {
          render_text_field(t.empty, l, *config, l.text().content);
        } else {
          auto [it, _] = t.assets.emplace(l.id, load_layer_asset(l));
          render_image_layer(t.empty, l, it->second, l.opacity, l.edge_blur_sigma.value_or(edge_blur_sigma));
        }
        t.rendered_layers.push_back(l.id);
        break;
    }
  }
  return t;
}

}  // namespace synthpass
