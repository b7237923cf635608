#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "pano/session/session.hpp"

namespace pano::service {

/// Manifest document for a session: configuration, prompts, yaw, and
/// per-segment status. Frames are referenced by count, not embedded.
nlohmann::json manifest_json(const session::SessionSnapshot& snapshot);

/// On-disk layout, one directory per session:
///
///   <root>/<id>/manifest.json
///   <root>/<id>/segment_000/image_prompt.png
///   <root>/<id>/segment_000/frame_00000.png ...
///
/// Manifests are replaced atomically. Frames of a segment are written
/// before the manifest that marks it ready.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path session_dir(const std::string& id) const { return root_ / id; }
  std::filesystem::path segment_dir(const std::string& id, int index) const;

  /// Writes any image prompts not yet on disk, then the manifest.
  void save(const session::Session& session);

  /// Writes a segment's frames, calling `progress(n)` after each of them.
  void write_frames(const std::string& id, int index, const Clip& clip,
                    const std::function<void(std::size_t)>& progress = {});

  /// Ids of every directory holding a manifest.
  std::vector<std::string> list() const;

  /// Reads a session back. A segment persisted as generating was
  /// interrupted and comes back failed.
  session::SessionSnapshot load(const std::string& id) const;

 private:
  std::mutex& lock_for(const std::string& id);

  std::filesystem::path root_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace pano::service
