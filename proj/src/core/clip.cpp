#include "pano/core/clip.hpp"

#include <algorithm>
#include <string>

#include "pano/core/error.hpp"

namespace pano {

Clip::Clip(std::vector<Frame> frames, int fps) : fps_(fps) {
  frames_.reserve(frames.size());
  for (auto& f : frames) frames_.push_back(std::make_shared<const Frame>(std::move(f)));
  validate();
}

Clip::Clip(std::vector<FramePtr> frames, int fps) : frames_(std::move(frames)), fps_(fps) { validate(); }

void Clip::validate() const {
  if (frames_.empty()) throw Error(Errc::empty_clip, "clip has no frames");
  if (fps_ <= 0) throw Error(Errc::invalid_parameter, "fps must be positive, got " + std::to_string(fps_));
  const int w = frames_.front()->width();
  const int h = frames_.front()->height();
  for (const auto& f : frames_) {
    if (!f) throw Error(Errc::invalid_input, "null frame in clip");
    if (f->width() != w || f->height() != h) throw Error(Errc::invalid_input, "clip frames differ in size");
  }
}

bool operator==(const Clip& a, const Clip& b) {
  if (a.fps_ != b.fps_ || a.frames_.size() != b.frames_.size()) return false;
  return std::equal(a.frames_.begin(), a.frames_.end(), b.frames_.begin(),
                    [](const FramePtr& x, const FramePtr& y) { return x == y || *x == *y; });
}

const Frame& last_frame(const Clip& clip) {
  if (clip.size() == 0) throw Error(Errc::empty_clip, "clip has no frames");
  return clip.frame(clip.size() - 1);
}

Clip concat(std::span<const Clip> clips) {
  if (clips.empty()) throw Error(Errc::empty_clip, "nothing to concatenate");
  const Clip& first = clips.front();
  std::vector<FramePtr> frames;
  std::size_t total = 0;
  for (const auto& c : clips) {
    if (c.width() != first.width() || c.height() != first.height()) {
      throw Error(Errc::incompatible_clips, "clip dimensions differ");
    }
    if (c.fps() != first.fps()) throw Error(Errc::incompatible_clips, "clip frame rates differ");
    total += c.size();
  }
  frames.reserve(total);
  for (const auto& c : clips) frames.insert(frames.end(), c.frames().begin(), c.frames().end());
  return Clip(std::move(frames), first.fps());
}

Clip subclip(const Clip& clip, std::size_t begin, std::size_t end) {
  if (begin >= end || end > clip.size()) {
    throw Error(Errc::invalid_parameter, "bad subclip range [" + std::to_string(begin) + ", " + std::to_string(end) + ")");
  }
  return Clip(std::vector<FramePtr>(clip.frames().begin() + begin, clip.frames().begin() + end), clip.fps());
}

}  // namespace pano
