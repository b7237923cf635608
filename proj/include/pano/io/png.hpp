#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pano/core/frame.hpp"

namespace pano::io {

/// Decodes any PNG libpng understands into 8-bit RGB (alpha is composited
/// onto black, gray is expanded). Throws Error(io) on malformed data.
Frame decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Frame& frame);

Frame read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Frame& frame);

}  // namespace pano::io
