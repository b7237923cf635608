#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pano/core/clip.hpp"

namespace pano::io {

inline constexpr const char* kManifestName = "manifest.json";

/// frame_00000.png, frame_00001.png, ...
std::string frame_file_name(std::size_t index);

/// Loads a frame sequence: either a directory of frame_*.png files (with an
/// optional manifest.json supplying fps) or a single PNG file, which becomes
/// a one-frame clip at the default rate. Throws Error(io) when unreadable.
Clip read_sequence(const std::filesystem::path& path);

/// The manifest.json of a sequence directory, or an empty object.
nlohmann::json read_sequence_manifest(const std::filesystem::path& dir);

/// Writes every frame plus a manifest holding fps, frame_count, width,
/// height, duration_s and the fields of `extra`. Keys are sorted so the
/// output is stable.
void write_sequence(const std::filesystem::path& dir, const Clip& clip, const nlohmann::json& extra = nlohmann::json::object());

}  // namespace pano::io
