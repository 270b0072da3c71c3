#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace synthpass {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD. Throws std::invalid_argument on malformed or non-existent dates.
Date parse_date(std::string_view text);
std::string to_iso(const Date& d);

/// Adds whole years; 29 February maps to 28 February in non-leap target years.
Date add_years(const Date& d, int years);
Date add_days(const Date& d, long days);
long days_between(const Date& from, const Date& to);

/// Completed years between birth and on.
int age_on(const Date& birth, const Date& on);

/// strftime-like subset: %d %m %Y %y %b (upper-case English month abbreviation), %% literal.
std::string format_date(const Date& d, std::string_view pattern);

}  // namespace synthpass
