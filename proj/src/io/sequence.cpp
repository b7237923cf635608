#include "pano/io/sequence.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "pano/core/error.hpp"
#include "pano/io/file.hpp"
#include "pano/io/png.hpp"

namespace fs = std::filesystem;

namespace pano::io {

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.png", index);
  return buf;
}

nlohmann::json read_sequence_manifest(const fs::path& dir) {
  const fs::path p = dir / kManifestName;
  if (!fs::exists(p)) return nlohmann::json::object();
  const auto bytes = read_file(p);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::io, "bad manifest " + p.string() + ": " + e.what());
  }
}

Clip read_sequence(const fs::path& path) {
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return Clip(std::vector<Frame>{read_png(path)});
  if (!fs::is_directory(path, ec)) throw Error(Errc::io, "no such file or directory: " + path.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("frame_") && name.ends_with(".png")) files.push_back(entry.path());
  }
  if (files.empty()) throw Error(Errc::io, "no frame_*.png files in " + path.string());
  std::sort(files.begin(), files.end());

  const nlohmann::json manifest = read_sequence_manifest(path);
  const int fps = manifest.value("fps", Clip::kDefaultFps);
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_png(f));
  return Clip(std::move(frames), fps);
}

void write_sequence(const fs::path& dir, const Clip& clip, const nlohmann::json& extra) {
  fs::create_directories(dir);
  // Drop frames left over from a longer sequence written here before.
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("frame_") && name.ends_with(".png")) fs::remove(entry.path());
  }
  for (std::size_t i = 0; i < clip.size(); ++i) write_png(dir / frame_file_name(i), clip.frame(i));
  nlohmann::json manifest = extra;
  manifest["fps"] = clip.fps();
  manifest["frame_count"] = clip.size();
  manifest["width"] = clip.width();
  manifest["height"] = clip.height();
  manifest["duration_s"] = clip.duration_seconds();
  write_file_atomic(dir / kManifestName, manifest.dump(2) + "\n");
}

}  // namespace pano::io
