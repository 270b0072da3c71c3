#include "synthpass/text/font.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace synthpass::text {

namespace {

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& d) : d_(d) {}

  void check(std::uint32_t off, std::uint32_t n) const {
    if (static_cast<std::uint64_t>(off) + n > d_.size()) throw FontError("font data truncated");
  }
  std::uint8_t u8(std::uint32_t off) const {
    check(off, 1);
    return d_[off];
  }
  std::uint16_t u16(std::uint32_t off) const {
    check(off, 2);
    return static_cast<std::uint16_t>((d_[off] << 8) | d_[off + 1]);
  }
  std::int16_t i16(std::uint32_t off) const { return static_cast<std::int16_t>(u16(off)); }
  std::uint32_t u32(std::uint32_t off) const {
    check(off, 4);
    return (std::uint32_t{d_[off]} << 24) | (std::uint32_t{d_[off + 1]} << 16) | (std::uint32_t{d_[off + 2]} << 8) |
           d_[off + 3];
  }
  double f2dot14(std::uint32_t off) const { return i16(off) / 16384.0; }

 private:
  const std::vector<std::uint8_t>& d_;
};

constexpr std::uint8_t kOnCurve = 0x01;
constexpr std::uint8_t kXShort = 0x02;
constexpr std::uint8_t kYShort = 0x04;
constexpr std::uint8_t kRepeat = 0x08;
constexpr std::uint8_t kXSame = 0x10;
constexpr std::uint8_t kYSame = 0x20;

constexpr std::uint16_t kArgWords = 0x0001;
constexpr std::uint16_t kArgsAreXY = 0x0002;
constexpr std::uint16_t kHaveScale = 0x0008;
constexpr std::uint16_t kMoreComponents = 0x0020;
constexpr std::uint16_t kHaveXYScale = 0x0040;
constexpr std::uint16_t kHaveTwoByTwo = 0x0080;

Contour close_contour(const std::vector<PointF>& pts, const std::vector<bool>& on) {
  Contour c;
  const std::size_t n = pts.size();
  if (n == 0) return c;
  // Start at an on-curve point; synthesize one if the contour is all control points.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (on[i]) {
      start = i;
      break;
    }
  }
  std::vector<PointF> p;
  std::vector<bool> f;
  if (start == n) {
    p.push_back({(pts[0].x + pts[1 % n].x) / 2, (pts[0].y + pts[1 % n].y) / 2});
    f.push_back(true);
    start = 1 % n;
    for (std::size_t k = 0; k < n; ++k) {
      p.push_back(pts[(start + k) % n]);
      f.push_back(on[(start + k) % n]);
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      p.push_back(pts[(start + k) % n]);
      f.push_back(on[(start + k) % n]);
    }
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0 && !f[i] && !f[i - 1]) {
      c.points.push_back({(p[i - 1].x + p[i].x) / 2, (p[i - 1].y + p[i].y) / 2});
      c.on_curve.push_back(true);
    }
    c.points.push_back(p[i]);
    c.on_curve.push_back(f[i]);
  }
  // Wrap-around: a trailing control point followed by the starting control point.
  if (!c.on_curve.back() && !f.front()) {
    c.points.push_back({(p.back().x + p.front().x) / 2, (p.back().y + p.front().y) / 2});
    c.on_curve.push_back(true);
  }
  return c;
}

}  // namespace

Font::Font(std::vector<std::uint8_t> data) : data_(std::move(data)) {
  Reader r(data_);
  const std::uint32_t version = r.u32(0);
  if (version != 0x00010000 && version != 0x74727565) throw FontError("not a TrueType font");
  const std::uint32_t head = table("head");
  const std::uint32_t hhea = table("hhea");
  const std::uint32_t maxp = table("maxp");
  const std::uint32_t cmap = table("cmap");
  loca_ = table("loca");
  glyf_ = table("glyf");
  hmtx_ = table("hmtx");
  if (!head || !hhea || !maxp || !cmap || !loca_ || !glyf_ || !hmtx_) throw FontError("missing required sfnt table");

  units_per_em_ = r.u16(head + 18);
  index_to_loc_format_ = r.i16(head + 50);
  ascender_ = r.i16(hhea + 4);
  descender_ = r.i16(hhea + 6);
  line_gap_ = r.i16(hhea + 8);
  num_hmetrics_ = r.u16(hhea + 34);
  num_glyphs_ = r.u16(maxp + 4);
  if (units_per_em_ <= 0 || num_hmetrics_ <= 0) throw FontError("invalid font header");

  const std::uint16_t count = r.u16(cmap + 2);
  int best_rank = 0;
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::uint32_t rec = cmap + 4 + 8u * i;
    const std::uint16_t platform = r.u16(rec);
    const std::uint16_t encoding = r.u16(rec + 2);
    const std::uint32_t sub = cmap + r.u32(rec + 4);
    const std::uint16_t format = r.u16(sub);
    int rank = 0;
    if (format == 12 && (platform == 3 || platform == 0)) rank = 3;
    else if (format == 4 && platform == 3 && encoding == 1) rank = 2;
    else if (format == 4 && platform == 0) rank = 1;
    if (rank > best_rank) {
      best_rank = rank;
      cmap_subtable_ = sub;
      cmap_format_ = format;
    }
  }
  if (best_rank == 0) throw FontError("no usable Unicode cmap subtable");
}

std::shared_ptr<const Font> Font::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FontError("cannot open font " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return std::make_shared<const Font>(std::move(bytes));
  } catch (const FontError& e) {
    throw FontError(path.string() + ": " + e.what());
  }
}

std::uint32_t Font::table(const char* tag) const {
  Reader r(data_);
  const std::uint16_t n = r.u16(4);
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::uint32_t rec = 12 + 16u * i;
    r.check(rec, 16);
    if (std::memcmp(data_.data() + rec, tag, 4) == 0) return r.u32(rec + 8);
  }
  return 0;
}

std::uint16_t Font::glyph_index(char32_t cp) const {
  Reader r(data_);
  const std::uint32_t s = cmap_subtable_;
  if (cmap_format_ == 12) {
    const std::uint32_t groups = r.u32(s + 12);
    std::uint32_t lo = 0;
    std::uint32_t hi = groups;
    while (lo < hi) {
      const std::uint32_t mid = (lo + hi) / 2;
      const std::uint32_t g = s + 16 + 12 * mid;
      const std::uint32_t start = r.u32(g);
      const std::uint32_t end = r.u32(g + 4);
      if (cp < start) hi = mid;
      else if (cp > end) lo = mid + 1;
      else return static_cast<std::uint16_t>(r.u32(g + 8) + (cp - start));
    }
    return 0;
  }
  if (cp > 0xFFFF) return 0;
  const std::uint16_t seg_count = r.u16(s + 6) / 2;
  const std::uint32_t end_codes = s + 14;
  const std::uint32_t start_codes = end_codes + 2u * seg_count + 2;
  const std::uint32_t deltas = start_codes + 2u * seg_count;
  const std::uint32_t range_offsets = deltas + 2u * seg_count;
  for (std::uint16_t i = 0; i < seg_count; ++i) {
    if (cp > r.u16(end_codes + 2u * i)) continue;
    const std::uint16_t start = r.u16(start_codes + 2u * i);
    if (cp < start) return 0;
    const std::uint16_t delta = r.u16(deltas + 2u * i);
    const std::uint32_t ro_addr = range_offsets + 2u * i;
    const std::uint16_t ro = r.u16(ro_addr);
    if (ro == 0) return static_cast<std::uint16_t>((cp + delta) & 0xFFFF);
    const std::uint16_t g = r.u16(ro_addr + ro + 2u * (static_cast<std::uint32_t>(cp) - start));
    return g == 0 ? 0 : static_cast<std::uint16_t>((g + delta) & 0xFFFF);
  }
  return 0;
}

HMetrics Font::metrics(std::uint16_t glyph) const {
  Reader r(data_);
  if (glyph < num_hmetrics_) return {r.u16(hmtx_ + 4u * glyph), r.i16(hmtx_ + 4u * glyph + 2)};
  const int advance = r.u16(hmtx_ + 4u * (num_hmetrics_ - 1));
  const std::uint32_t lsb = hmtx_ + 4u * num_hmetrics_ + 2u * (glyph - num_hmetrics_);
  return {advance, r.i16(lsb)};
}

std::uint32_t Font::glyph_offset(std::uint16_t glyph, std::uint32_t* length) const {
  Reader r(data_);
  if (glyph >= num_glyphs_) throw FontError("glyph index out of range");
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  if (index_to_loc_format_ == 0) {
    a = 2u * r.u16(loca_ + 2u * glyph);
    b = 2u * r.u16(loca_ + 2u * glyph + 2);
  } else {
    a = r.u32(loca_ + 4u * glyph);
    b = r.u32(loca_ + 4u * glyph + 4);
  }
  *length = b > a ? b - a : 0;
  return glyf_ + a;
}

Outline Font::outline(std::uint16_t glyph) const {
  Outline out;
  const double identity[6] = {1, 0, 0, 1, 0, 0};
  append_outline(glyph, identity, out, 0);
  return out;
}

void Font::append_outline(std::uint16_t glyph, const double m[6], Outline& out, int depth) const {
  if (depth > 8) throw FontError("composite glyph nesting too deep");
  std::uint32_t length = 0;
  const std::uint32_t g = glyph_offset(glyph, &length);
  if (length == 0) return;
  Reader r(data_);
  const std::int16_t contours = r.i16(g);
  auto xf = [&](double x, double y) { return PointF{m[0] * x + m[2] * y + m[4], m[1] * x + m[3] * y + m[5]}; };

  if (contours >= 0) {
    std::vector<std::uint16_t> ends(static_cast<std::size_t>(contours));
    for (int i = 0; i < contours; ++i) ends[static_cast<std::size_t>(i)] = r.u16(g + 10 + 2u * i);
    if (contours == 0) return;
    const std::size_t npts = static_cast<std::size_t>(ends.back()) + 1;
    std::uint32_t p = g + 10 + 2u * contours;
    p += 2 + r.u16(p);  // skip instructions
    std::vector<std::uint8_t> flags;
    flags.reserve(npts);
    while (flags.size() < npts) {
      const std::uint8_t f = r.u8(p++);
      flags.push_back(f);
      if (f & kRepeat) {
        const std::uint8_t n = r.u8(p++);
        for (std::uint8_t k = 0; k < n && flags.size() < npts; ++k) flags.push_back(f);
      }
    }
    std::vector<double> xs(npts);
    std::vector<double> ys(npts);
    int v = 0;
    for (std::size_t i = 0; i < npts; ++i) {
      if (flags[i] & kXShort) {
        const int d = r.u8(p++);
        v += (flags[i] & kXSame) ? d : -d;
      } else if (!(flags[i] & kXSame)) {
        v += r.i16(p);
        p += 2;
      }
      xs[i] = v;
    }
    v = 0;
    for (std::size_t i = 0; i < npts; ++i) {
      if (flags[i] & kYShort) {
        const int d = r.u8(p++);
        v += (flags[i] & kYSame) ? d : -d;
      } else if (!(flags[i] & kYSame)) {
        v += r.i16(p);
        p += 2;
      }
      ys[i] = v;
    }
    std::size_t begin = 0;
    for (std::uint16_t end : ends) {
      std::vector<PointF> pts;
      std::vector<bool> on;
      for (std::size_t i = begin; i <= end && i < npts; ++i) {
        pts.push_back(xf(xs[i], ys[i]));
        on.push_back((flags[i] & kOnCurve) != 0);
      }
      begin = static_cast<std::size_t>(end) + 1;
      if (pts.size() >= 2) out.push_back(close_contour(pts, on));
    }
    return;
  }

  std::uint32_t p = g + 10;
  std::uint16_t flags = 0;
  do {
    flags = r.u16(p);
    const std::uint16_t component = r.u16(p + 2);
    p += 4;
    double dx = 0;
    double dy = 0;
    if (flags & kArgWords) {
      dx = r.i16(p);
      dy = r.i16(p + 2);
      p += 4;
    } else {
      dx = static_cast<std::int8_t>(r.u8(p));
      dy = static_cast<std::int8_t>(r.u8(p + 1));
      p += 2;
    }
    // Point-matching anchors are not supported; such components are placed at the origin.
    if (!(flags & kArgsAreXY)) dx = dy = 0;
    double a = 1, b = 0, c = 0, d = 1;
    if (flags & kHaveScale) {
      a = d = r.f2dot14(p);
      p += 2;
    } else if (flags & kHaveXYScale) {
      a = r.f2dot14(p);
      d = r.f2dot14(p + 2);
      p += 4;
    } else if (flags & kHaveTwoByTwo) {
      a = r.f2dot14(p);
      b = r.f2dot14(p + 2);
      c = r.f2dot14(p + 4);
      d = r.f2dot14(p + 6);
      p += 8;
    }
    // Compose: parent(m) after component(a b c d, dx dy).
    const double child[6] = {m[0] * a + m[2] * b,         m[1] * a + m[3] * b,         m[0] * c + m[2] * d,
                             m[1] * c + m[3] * d,         m[0] * dx + m[2] * dy + m[4], m[1] * dx + m[3] * dy + m[5]};
    append_outline(component, child, out, depth + 1);
  } while (flags & kMoreComponents);
}

CoverageRasterizer::CoverageRasterizer(int width, int height)
    : width_(std::max(width, 0)), height_(std::max(height, 0)),
      acc_(static_cast<std::size_t>(width_ + 2) * static_cast<std::size_t>(height_), 0.0) {}

void CoverageRasterizer::line(PointF p0, PointF p1) {
  if (p0.y == p1.y) return;
  double dir = 1.0;
  if (p0.y > p1.y) {
    std::swap(p0, p1);
    dir = -1.0;
  }
  if (p1.y <= 0.0 || p0.y >= height_) return;
  const double dxdy = (p1.x - p0.x) / (p1.y - p0.y);
  double x = p0.x;
  if (p0.y < 0.0) x -= p0.y * dxdy;
  const int y_begin = std::max(0, static_cast<int>(std::floor(p0.y)));
  const int y_end = std::min(height_, static_cast<int>(std::ceil(p1.y)));
  const std::size_t stride = static_cast<std::size_t>(width_) + 2;
  const double xmax = static_cast<double>(width_);
  auto add = [&](std::size_t row, int xi, double v) {
    const int idx = std::clamp(xi, 0, width_ + 1);
    acc_[row + static_cast<std::size_t>(idx)] += v;
  };
  for (int y = y_begin; y < y_end; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * stride;
    const double dy = std::min(y + 1.0, p1.y) - std::max(static_cast<double>(y), p0.y);
    const double xnext = x + dxdy * dy;
    const double d = dy * dir;
    // Clipping x to [0, width] keeps winding correct for every pixel inside the buffer.
    const double x0 = std::clamp(std::min(x, xnext), 0.0, xmax);
    const double x1 = std::clamp(std::max(x, xnext), 0.0, xmax);
    const double x0floor = std::floor(x0);
    const int x0i = static_cast<int>(x0floor);
    const double x1ceil = std::ceil(x1);
    const int x1i = static_cast<int>(x1ceil);
    if (x1i <= x0i + 1) {
      const double xmf = 0.5 * (x0 + x1) - x0floor;
      add(row, x0i, d - d * xmf);
      add(row, x0i + 1, d * xmf);
    } else {
      const double s = 1.0 / (x1 - x0);
      const double x0f = x0 - x0floor;
      const double a0 = 0.5 * s * (1.0 - x0f) * (1.0 - x0f);
      const double x1f = x1 - x1ceil + 1.0;
      const double am = 0.5 * s * x1f * x1f;
      add(row, x0i, d * a0);
      if (x1i == x0i + 2) {
        add(row, x0i + 1, d * (1.0 - a0 - am));
      } else {
        const double a1 = s * (1.5 - x0f);
        add(row, x0i + 1, d * (a1 - a0));
        for (int xi = x0i + 2; xi < x1i - 1; ++xi) add(row, xi, d * s);
        const double a2 = a1 + (x1i - x0i - 3) * s;
        add(row, x1i - 1, d * (1.0 - a2 - am));
      }
      add(row, x1i, d * am);
    }
    x = xnext;
  }
}

void CoverageRasterizer::quad(PointF p0, PointF c, PointF p1) {
  const double dev = std::hypot(p0.x - 2 * c.x + p1.x, p0.y - 2 * c.y + p1.y);
  const int n = std::clamp(static_cast<int>(std::ceil(std::sqrt(dev * 3.0))), 1, 64);
  PointF prev = p0;
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double u = 1.0 - t;
    const PointF next{u * u * p0.x + 2 * u * t * c.x + t * t * p1.x, u * u * p0.y + 2 * u * t * c.y + t * t * p1.y};
    line(prev, next);
    prev = next;
  }
}

void CoverageRasterizer::contour(const Contour& c) {
  const std::size_t n = c.points.size();
  if (n < 2) return;
  std::size_t i = 0;
  PointF cur = c.points[0];
  while (i < n) {
    const std::size_t j = (i + 1) % n;
    if (c.on_curve[j]) {
      line(cur, c.points[j]);
      cur = c.points[j];
      i += 1;
    } else {
      const std::size_t k = (i + 2) % n;
      quad(cur, c.points[j], c.points[k]);
      cur = c.points[k];
      i += 2;
    }
  }
}

Plane CoverageRasterizer::coverage() const {
  Plane out(width_, height_);
  const std::size_t stride = static_cast<std::size_t>(width_) + 2;
  for (int y = 0; y < height_; ++y) {
    double acc = 0.0;
    const std::size_t row = static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < width_; ++x) {
      acc += acc_[row + static_cast<std::size_t>(x)];
      out.at(x, y) = static_cast<float>(std::min(1.0, std::abs(acc)));
    }
  }
  return out;
}

}  // namespace synthpass::text
