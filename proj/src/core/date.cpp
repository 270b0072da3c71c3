#include "synthpass/core/date.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace synthpass {

using namespace std::chrono;

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto parse = [&](std::string_view part, auto& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc{} && ptr == part.data() + part.size();
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse(text.substr(0, 4), y) ||
      !parse(text.substr(5, 2), m) || !parse(text.substr(8, 2), d)) {
    throw std::invalid_argument("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const Date date{year{y}, month{m}, day{d}};
  if (!date.ok()) throw std::invalid_argument("non-existent date '" + std::string(text) + "'");
  return date;
}

std::string to_iso(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

Date add_years(const Date& d, int n) {
  Date out = d + years{n};
  if (!out.ok()) out = out.year() / out.month() / last;
  return out;
}

Date add_days(const Date& d, long n) { return Date{sys_days{d} + days{n}}; }

long days_between(const Date& from, const Date& to) { return (sys_days{to} - sys_days{from}).count(); }

int age_on(const Date& birth, const Date& on) {
  int age = static_cast<int>(on.year()) - static_cast<int>(birth.year());
  if (on.month() < birth.month() || (on.month() == birth.month() && on.day() < birth.day())) --age;
  return age;
}

std::string format_date(const Date& d, std::string_view pattern) {
  static constexpr std::array<const char*, 12> kMonths = {"JAN", "FEB", "MAR", "APR", "MAY", "JUN",
                                                          "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};
  std::string out;
  char buf[8];
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '%' || i + 1 == pattern.size()) {
      out += pattern[i];
      continue;
    }
    switch (pattern[++i]) {
      case 'd':
        std::snprintf(buf, sizeof(buf), "%02u", static_cast<unsigned>(d.day()));
        out += buf;
        break;
      case 'm':
        std::snprintf(buf, sizeof(buf), "%02u", static_cast<unsigned>(d.month()));
        out += buf;
        break;
      case 'Y':
        std::snprintf(buf, sizeof(buf), "%04d", static_cast<int>(d.year()));
        out += buf;
        break;
      case 'y':
        std::snprintf(buf, sizeof(buf), "%02d", static_cast<int>(d.year()) % 100);
        out += buf;
        break;
      case 'b':
        out += kMonths[static_cast<unsigned>(d.month()) - 1];
        break;
      case '%':
        out += '%';
        break;
      default:
        throw std::invalid_argument("unsupported date directive %" + std::string(1, pattern[i]));
    }
  }
  return out;
}

}  // namespace synthpass
