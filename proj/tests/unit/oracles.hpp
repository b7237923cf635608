#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "pano/core/frame.hpp"

namespace pano::testing {

// Independent reference: direct 2D convolution in double with a freshly
// computed truncated Gaussian, wrapping columns and clamping rows.
inline Frame blur_oracle(const Frame& f, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (auto& v : k) v /= sum;

  Frame out(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int dy = -r; dy <= r; ++dy) {
          const int yy = std::clamp(y + dy, 0, f.height() - 1);
          for (int dx = -r; dx <= r; ++dx) {
            const int xx = ((x + dx) % f.width() + f.width()) % f.width();
            acc += k[dy + r] * k[dx + r] * f.at(xx, yy, c);
          }
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(acc));
      }
    }
  }
  return out;
}

inline int max_abs_diff(const Frame& a, const Frame& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

}  // namespace pano::testing
