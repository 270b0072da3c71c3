#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace synthpass {

/// Decodes UTF-8; throws std::invalid_argument on malformed input.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

/// Upper-cases ASCII and the Latin-1 / Latin Extended-A letters used by the supported countries.
std::u32string to_upper(std::u32string_view text);
std::string to_upper_utf8(std::string_view text);

std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);

}  // namespace synthpass
