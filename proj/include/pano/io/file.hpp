#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace pano::io {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// see either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace pano::io
