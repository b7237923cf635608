#include "pano/service/store.hpp"

#include <algorithm>
#include <cstdio>

#include "pano/core/error.hpp"
#include "pano/io/file.hpp"
#include "pano/io/png.hpp"
#include "pano/io/sequence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pano::service {

namespace {

constexpr const char* kImagePromptName = "image_prompt.png";

json projection_json(const ProjectionParams& p) {
  return {{"out_width", p.out_width},
          {"blur_sigma_frac", p.blur_sigma_frac},
          {"fg_height_frac", p.fg_height_frac},
          {"blend_band_frac", p.blend_band_frac}};
}

ProjectionParams projection_from(const json& j) {
  ProjectionParams p;
  p.out_width = j.at("out_width").get<int>();
  p.blur_sigma_frac = j.at("blur_sigma_frac").get<double>();
  p.fg_height_frac = j.at("fg_height_frac").get<double>();
  p.blend_band_frac = j.at("blend_band_frac").get<double>();
  return p;
}

}  // namespace

json manifest_json(const session::SessionSnapshot& s) {
  json segments = json::array();
  for (const auto& seg : s.segments) {
    json entry = {
        {"index", seg.index},
        {"text", seg.text_prompt.text()},
        {"refined", {{"base", seg.refined.base.text()}, {"descriptors", seg.refined.descriptors}, {"rendered", seg.refined.rendered}}},
        {"yaw_at_generation", seg.yaw_at_generation.degrees()},
        {"status", session::to_string(seg.status)},
        {"frame_count", seg.clip ? seg.clip->size() : 0},
        {"width", seg.image_prompt.width()},
        {"height", seg.image_prompt.height()},
    };
    if (!seg.error.empty()) entry["error"] = seg.error;
    segments.push_back(std::move(entry));
  }
  json out = {
      {"id", s.id},
      {"created_at_ms", s.created_at_ms},
      {"state", session::to_string(s.state)},
      {"current_yaw", s.current_yaw.degrees()},
      {"config",
       {{"target_segments", s.config.target_segments},
        {"segment_duration_s", s.config.segment_duration_s},
        {"fps", s.config.fps},
        {"seed", s.config.seed},
        {"projection", projection_json(s.config.projection)}}},
      {"segments", std::move(segments)},
  };
  if (s.final_clip) {
    out["final"] = {{"frame_count", s.final_clip->size()}, {"duration_s", s.final_clip->duration_seconds()}};
  }
  return out;
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path SessionStore::segment_dir(const std::string& id, int index) const {
  char name[32];
  std::snprintf(name, sizeof name, "segment_%03d", index);
  return session_dir(id) / name;
}

std::mutex& SessionStore::lock_for(const std::string& id) {
  std::lock_guard lock(map_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

void SessionStore::save(const session::Session& session) {
  std::lock_guard lock(lock_for(session.id()));
  // Snapshot under the store lock so the last writer persists the newest state.
  const auto snap = session.snapshot();
  for (const auto& seg : snap.segments) {
    const fs::path dir = segment_dir(snap.id, seg.index);
    fs::create_directories(dir);
    if (!fs::exists(dir / kImagePromptName)) {
      io::write_png(dir / kImagePromptName, seg.image_prompt.frame());
    }
  }
  io::write_file_atomic(session_dir(snap.id) / io::kManifestName, manifest_json(snap).dump(2) + "\n");
}

void SessionStore::write_frames(const std::string& id, int index, const Clip& clip,
                                const std::function<void(std::size_t)>& progress) {
  const fs::path dir = segment_dir(id, index);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < clip.size(); ++i) {
    io::write_png(dir / io::frame_file_name(i), clip.frame(i));
    if (progress) progress(i + 1);
  }
}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / io::kManifestName)) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

session::SessionSnapshot SessionStore::load(const std::string& id) const {
  const json m = io::read_sequence_manifest(session_dir(id));
  if (m.empty()) throw Error(Errc::not_found, "no session " + id);
  try {
    session::SessionSnapshot s;
    s.id = m.at("id").get<std::string>();
    s.created_at_ms = m.at("created_at_ms").get<std::int64_t>();
    s.state = session::parse_session_state(m.at("state").get<std::string>());
    s.current_yaw = normalize_yaw(m.at("current_yaw").get<double>());
    const json& c = m.at("config");
    s.config.target_segments = c.at("target_segments").get<int>();
    s.config.segment_duration_s = c.at("segment_duration_s").get<double>();
    s.config.fps = c.at("fps").get<int>();
    s.config.seed = c.at("seed").get<std::uint64_t>();
    s.config.projection = projection_from(c.at("projection"));

    for (const json& e : m.at("segments")) {
      const int index = e.at("index").get<int>();
      const json& r = e.at("refined");
      session::Segment seg{
          .index = index,
          .text_prompt = agents::TextPrompt::make(e.at("text").get<std::string>()),
          .refined = {agents::TextPrompt::make(r.at("base").get<std::string>()),
                      r.at("descriptors").get<std::vector<std::string>>(), r.at("rendered").get<std::string>()},
          .image_prompt = EquirectFrame(io::read_png(segment_dir(id, index) / kImagePromptName)),
          .yaw_at_generation = normalize_yaw(e.at("yaw_at_generation").get<double>()),
          .status = session::parse_segment_status(e.at("status").get<std::string>()),
          .clip = std::nullopt,
          .error = e.value("error", std::string{}),
      };
      if (seg.status == session::SegmentStatus::generating) {
        seg.status = session::SegmentStatus::failed;
        seg.error = "interrupted: generation did not finish before shutdown";
      }
      if (seg.status == session::SegmentStatus::ready) {
        const std::size_t n = e.at("frame_count").get<std::size_t>();
        std::vector<Frame> frames;
        frames.reserve(n);
        for (std::size_t i = 0; i < n; ++i) frames.push_back(io::read_png(segment_dir(id, index) / io::frame_file_name(i)));
        seg.clip.emplace(std::move(frames), s.config.fps);
      }
      s.segments.push_back(std::move(seg));
    }
    if (s.state == session::SessionState::complete || s.state == session::SessionState::finalizing) {
      std::vector<Clip> clips;
      for (const auto& seg : s.segments) {
        if (!seg.clip) throw Error(Errc::invalid_input, "complete session has a segment without frames");
        clips.push_back(*seg.clip);
      }
      s.final_clip = concat(clips);
      s.state = session::SessionState::complete;
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::io, "corrupt manifest for session " + id + ": " + e.what());
  }
}

}  // namespace pano::service
