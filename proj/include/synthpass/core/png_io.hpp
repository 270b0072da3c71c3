#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "synthpass/core/image.hpp"

namespace synthpass {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads any PNG (gray, palette, RGB, with or without alpha, 8/16 bit) as RGBA8.
Raster read_png(const std::filesystem::path& path);

/// Encodes to PNG bytes. Output is deterministic: fixed compression settings, no time chunk.
std::vector<std::uint8_t> encode_png(const Raster& img);

void write_png(const std::filesystem::path& path, const Raster& img);

}  // namespace synthpass
