#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pano/core/frame.hpp"

namespace pano {

using FramePtr = std::shared_ptr<const Frame>;

/// Non-empty ordered sequence of equally sized frames at an integer frame
/// rate. Frames are immutable and shared, so slicing and concatenation do
/// not copy pixel data.
class Clip {
 public:
  static constexpr int kDefaultFps = 24;

  explicit Clip(std::vector<Frame> frames, int fps = kDefaultFps);
  explicit Clip(std::vector<FramePtr> frames, int fps = kDefaultFps);

  std::size_t size() const noexcept { return frames_.size(); }
  int fps() const noexcept { return fps_; }
  int width() const noexcept { return frames_.front()->width(); }
  int height() const noexcept { return frames_.front()->height(); }
  double duration_seconds() const noexcept { return static_cast<double>(frames_.size()) / fps_; }

  const Frame& frame(std::size_t i) const { return *frames_.at(i); }
  const FramePtr& frame_ptr(std::size_t i) const { return frames_.at(i); }
  std::span<const FramePtr> frames() const noexcept { return frames_; }

  /// Content equality: same fps and pixel-identical frames.
  friend bool operator==(const Clip& a, const Clip& b);

 private:
  void validate() const;

  std::vector<FramePtr> frames_;
  int fps_;
};

/// Frame at index size() - 1, unmodified.
const Frame& last_frame(const Clip& clip);

/// Concatenates clips in order. Throws incompatible_clips on differing
/// dimensions or fps, empty_clip for an empty list.
Clip concat(std::span<const Clip> clips);

/// Frames [begin, end) as a new clip sharing storage.
Clip subclip(const Clip& clip, std::size_t begin, std::size_t end);

}  // namespace pano
