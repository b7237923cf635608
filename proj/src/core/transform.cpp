#include "pano/core/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "pano/core/error.hpp"

namespace pano {

EquirectFrame recenter(const EquirectFrame& frame, YawAngle yaw) {
  const Frame& src = frame.frame();
  const int w = src.width();
  const int shift = ((yaw_to_shift(yaw, w) % w) + w) % w;
  if (shift == 0) return frame;

  Frame out(w, src.height());
  const auto split = static_cast<std::ptrdiff_t>(shift) * Frame::kChannels;
  for (int y = 0; y < src.height(); ++y) {
    auto in = src.row(y);
    std::rotate_copy(in.begin(), in.begin() + split, in.end(), out.row(y).begin());
  }
  return EquirectFrame(std::move(out));
}

EquirectFrame edge_blend(const EquirectFrame& frame, double band_frac) {
  if (!(band_frac >= 0.0 && band_frac < 0.5)) {
    throw Error(Errc::invalid_parameter, "blend band fraction must be in [0, 0.5)");
  }
  const Frame& src = frame.frame();
  const int w = src.width();
  const int band = static_cast<int>(std::lround(band_frac * w));
  if (band == 0) return frame;

  Frame out = src;
  for (int y = 0; y < src.height(); ++y) {
    for (int i = 0; i < band; ++i) {
      const double t = 0.5 * (band - i) / band;
      const int r = w - 1 - i;
      for (int c = 0; c < Frame::kChannels; ++c) {
        const double left = src.at(i, y, c);
        const double right = src.at(r, y, c);
        out.at(i, y, c) = static_cast<std::uint8_t>(std::floor((1.0 - t) * left + t * right + 0.5));
        out.at(r, y, c) = static_cast<std::uint8_t>(std::floor((1.0 - t) * right + t * left + 0.5));
      }
    }
  }
  return EquirectFrame(std::move(out));
}

double seam_continuity(const EquirectFrame& frame) {
  const Frame& f = frame.frame();
  const int last = f.width() - 1;
  long long total = 0;
  for (int y = 0; y < f.height(); ++y) {
    for (int c = 0; c < Frame::kChannels; ++c) total += std::abs(f.at(0, y, c) - f.at(last, y, c));
  }
  return static_cast<double>(total) / (255.0 * f.height() * Frame::kChannels);
}

}  // namespace pano
