#include "pano/core/frame.hpp"

#include <string>

#include "pano/core/error.hpp"

namespace pano {

namespace {

void check_dims(int width, int height) {
  if (width < 2 || height < 2) {
    throw Error(Errc::invalid_input,
                "frame must be at least 2x2, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

Frame::Frame(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height * kChannels, 0);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw Error(Errc::invalid_input, "pixel buffer length does not match " + std::to_string(width) + "x" +
                                         std::to_string(height) + "x3");
  }
}

Frame Frame::filled(int width, int height, Rgb color) {
  Frame f(width, height);
  auto px = f.pixels();
  for (std::size_t i = 0; i < px.size(); i += kChannels) {
    px[i] = color[0];
    px[i + 1] = color[1];
    px[i + 2] = color[2];
  }
  return f;
}

EquirectFrame::EquirectFrame(Frame frame) : frame_(std::move(frame)) {
  if (frame_.width() != 2 * frame_.height()) {
    throw Error(Errc::invalid_input, "equirectangular frame must be 2:1, got " + std::to_string(frame_.width()) +
                                         "x" + std::to_string(frame_.height()));
  }
}

}  // namespace pano
