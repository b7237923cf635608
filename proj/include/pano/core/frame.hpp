#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pano {

using Rgb = std::array<std::uint8_t, 3>;

/// Dense row-major RGB raster, 8 bits per channel, interleaved.
class Frame {
 public:
  static constexpr int kChannels = 3;

  /// Black frame. Throws invalid_input when either side is < 2.
  Frame(int width, int height);
  /// Adopts `pixels`; its length must be width * height * 3.
  Frame(int width, int height, std::vector<std::uint8_t> pixels);

  static Frame filled(int width, int height, Rgb color);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t stride() const noexcept { return static_cast<std::size_t>(width_) * kChannels; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {pixels_.data() + static_cast<std::size_t>(y) * stride(), stride()};
  }
  std::span<std::uint8_t> row(int y) noexcept {
    return {pixels_.data() + static_cast<std::size_t>(y) * stride(), stride()};
  }

  std::uint8_t at(int x, int y, int c) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * stride() + static_cast<std::size_t>(x) * kChannels + c];
  }
  std::uint8_t& at(int x, int y, int c) noexcept {
    return pixels_[static_cast<std::size_t>(y) * stride() + static_cast<std::size_t>(x) * kChannels + c];
  }

  Rgb pixel(int x, int y) const noexcept { return {at(x, y, 0), at(x, y, 1), at(x, y, 2)}; }
  void set_pixel(int x, int y, Rgb rgb) noexcept {
    for (int c = 0; c < kChannels; ++c) at(x, y, c) = rgb[c];
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// A Frame whose width is exactly twice its height. Column 0 and column
/// width-1 are neighbours on the sphere.
class EquirectFrame {
 public:
  /// Throws invalid_input unless frame.width() == 2 * frame.height().
  explicit EquirectFrame(Frame frame);

  const Frame& frame() const& noexcept { return frame_; }
  Frame&& frame() && noexcept { return std::move(frame_); }

  int width() const noexcept { return frame_.width(); }
  int height() const noexcept { return frame_.height(); }

  friend bool operator==(const EquirectFrame&, const EquirectFrame&) = default;

 private:
  Frame frame_;
};

}  // namespace pano
