#include "pano/core/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "pano/core/error.hpp"

namespace pano {

namespace {

constexpr int C = Frame::kChannels;

// Round half up and saturate. Truncation equals floor once the value is
// clamped non-negative, and it vectorizes where std::floor does not.
std::uint8_t to_u8(float v) {
  return static_cast<std::uint8_t>(static_cast<int>(std::min(std::max(v + 0.5f, 0.0f), 255.0f)));
}

std::vector<float> to_float(const Frame& f) {
  auto px = f.pixels();
  return {px.begin(), px.end()};
}

Frame from_float(const std::vector<float>& buf, int width, int height) {
  std::vector<std::uint8_t> out(buf.size());
  std::transform(buf.begin(), buf.end(), out.begin(), to_u8);
  return Frame(width, height, std::move(out));
}

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// Direct separable convolution: wrapped rows, then clamped columns.
std::vector<float> blur_fir(std::vector<float> img, int width, int height, double sigma) {
  const std::vector<float> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const std::size_t stride = static_cast<std::size_t>(width) * C;

  std::vector<float> padded((static_cast<std::size_t>(width) + 2 * radius) * C);
  std::vector<float> tmp(img.size());
  for (int y = 0; y < height; ++y) {
    const float* row = img.data() + y * stride;
    for (int j = 0; j < width + 2 * radius; ++j) {
      const float* p = row + static_cast<std::size_t>(wrap(j - radius, width)) * C;
      std::copy(p, p + C, padded.data() + static_cast<std::size_t>(j) * C);
    }
    float* out = tmp.data() + y * stride;
    std::fill(out, out + stride, 0.0f);
    for (int k = 0; k < 2 * radius + 1; ++k) {
      const float w = kernel[k];
      const float* src = padded.data() + static_cast<std::size_t>(k) * C;
      for (std::size_t i = 0; i < stride; ++i) out[i] += w * src[i];
    }
  }

  for (int y = 0; y < height; ++y) {
    float* out = img.data() + y * stride;
    std::fill(out, out + stride, 0.0f);
    for (int k = -radius; k <= radius; ++k) {
      const float w = kernel[k + radius];
      const float* src = tmp.data() + std::clamp(y + k, 0, height - 1) * stride;
      for (std::size_t i = 0; i < stride; ++i) out[i] += w * src[i];
    }
  }
  return img;
}

// Young & van Vliet (1995) third-order recursive Gaussian.
struct RecursiveCoeffs {
  float B, b1, b2, b3;  // b1..b3 already divided by b0
};

RecursiveCoeffs recursive_coeffs(double sigma) {
  const double q = sigma >= 2.5 ? 0.98711 * sigma - 0.96330 : 3.97156 - 4.14554 * std::sqrt(1.0 - 0.26891 * sigma);
  const double q2 = q * q;
  const double q3 = q2 * q;
  const double b0 = 1.57825 + 2.44413 * q + 1.4281 * q2 + 0.422205 * q3;
  const double b1 = 2.44413 * q + 2.85619 * q2 + 1.26661 * q3;
  const double b2 = -(1.4281 * q2 + 1.26661 * q3);
  const double b3 = 0.422205 * q3;
  return {static_cast<float>(1.0 - (b1 + b2 + b3) / b0), static_cast<float>(b1 / b0), static_cast<float>(b2 / b0),
          static_cast<float>(b3 / b0)};
}

// Forward then backward recursion along `n` samples, each sample being a
// contiguous vector of `width` independent lanes spaced `step` apart.
// Both ends start from steady state.
void recursive_lines(float* data, int n, std::size_t step, std::size_t width, const RecursiveCoeffs& k) {
  auto at = [&](int i) { return data + static_cast<std::size_t>(i) * step; };
  std::vector<float> edge(at(0), at(0) + width);
  for (int i = 0; i < n; ++i) {
    float* cur = at(i);
    const float* p1 = i >= 1 ? at(i - 1) : edge.data();
    const float* p2 = i >= 2 ? at(i - 2) : edge.data();
    const float* p3 = i >= 3 ? at(i - 3) : edge.data();
    for (std::size_t j = 0; j < width; ++j) cur[j] = k.B * cur[j] + k.b1 * p1[j] + k.b2 * p2[j] + k.b3 * p3[j];
  }
  edge.assign(at(n - 1), at(n - 1) + width);
  for (int i = n - 1; i >= 0; --i) {
    float* cur = at(i);
    const float* n1 = i + 1 < n ? at(i + 1) : edge.data();
    const float* n2 = i + 2 < n ? at(i + 2) : edge.data();
    const float* n3 = i + 3 < n ? at(i + 3) : edge.data();
    for (std::size_t j = 0; j < width; ++j) cur[j] = k.B * cur[j] + k.b1 * n1[j] + k.b2 * n2[j] + k.b3 * n3[j];
  }
}

std::vector<float> blur_recursive(const Frame& src, double sigma) {
  const int width = src.width();
  const int height = src.height();
  const RecursiveCoeffs k = recursive_coeffs(sigma);
  const int pad = static_cast<int>(std::ceil(4.0 * sigma));
  const std::size_t stride = static_cast<std::size_t>(width) * C;

  // Rows: extend periodically on both sides, filter, keep the middle. Rows
  // are processed in blocks laid out sample-major so the recursion runs
  // across kBlock rows at once.
  constexpr int kBlock = 16;
  const int plen = width + 2 * pad;
  const std::size_t lane = static_cast<std::size_t>(kBlock) * C;
  std::vector<float> block(static_cast<std::size_t>(plen) * lane);
  std::vector<float> img;
  img.reserve(static_cast<std::size_t>(height + pad) * stride);
  img.resize(static_cast<std::size_t>(height) * stride);
  for (int y0 = 0; y0 < height; y0 += kBlock) {
    const int nrows = std::min(kBlock, height - y0);
    const std::size_t used = static_cast<std::size_t>(nrows) * C;
    for (int j = 0; j < plen; ++j) {
      const std::size_t sx = static_cast<std::size_t>(wrap(j - pad, width)) * C;
      float* dst = block.data() + j * lane;
      for (int r = 0; r < nrows; ++r) std::copy_n(src.row(y0 + r).data() + sx, C, dst + r * C);
    }
    recursive_lines(block.data(), plen, lane, used, k);
    for (int r = 0; r < nrows; ++r) {
      float* row = img.data() + (y0 + r) * stride;
      for (int x = 0; x < width; ++x) {
        std::copy_n(block.data() + (x + pad) * lane + r * C, C, row + static_cast<std::size_t>(x) * C);
      }
    }
  }

  // Columns, vectorized across whole rows. Clamped extension above row 0 is
  // already the forward steady state, so only the bottom needs padding.
  const int rows = height + pad;
  img.resize(static_cast<std::size_t>(rows) * stride);
  for (int y = height; y < rows; ++y) {
    std::copy_n(img.begin() + (height - 1) * stride, stride, img.begin() + y * stride);
  }
  recursive_lines(img.data(), rows, stride, stride, k);
  img.resize(static_cast<std::size_t>(height) * stride);
  return img;
}

}  // namespace

std::vector<float> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::invalid_parameter, "kernel sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    w[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += w[i + radius];
  }
  std::vector<float> out(w.size());
  std::transform(w.begin(), w.end(), out.begin(), [sum](double v) { return static_cast<float>(v / sum); });
  return out;
}

Frame gaussian_blur(const Frame& src, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::invalid_parameter, "sigma must be finite and >= 0, got " + std::to_string(sigma));
  }
  if (sigma == 0.0) return src;
  const auto buf = sigma <= kFirSigmaLimit ? blur_fir(to_float(src), src.width(), src.height(), sigma)
                                           : blur_recursive(src, sigma);
  return from_float(buf, src.width(), src.height());
}

void composite_scaled(const Frame& src, Frame& dst, int x0, int y0, int scaled_width, int scaled_height) {
  if (scaled_width <= 0 || scaled_height <= 0) return;
  const int xb = std::max(x0, 0);
  const int xe = std::min(x0 + scaled_width, dst.width());
  const int yb = std::max(y0, 0);
  const int ye = std::min(y0 + scaled_height, dst.height());
  if (xb >= xe || yb >= ye) return;

  const double sx = static_cast<double>(src.width()) / scaled_width;
  const double sy = static_cast<double>(src.height()) / scaled_height;

  const int n = xe - xb;
  std::vector<std::size_t> left(n), right(n);
  std::vector<float> fx(n);
  for (int i = 0; i < n; ++i) {
    const double u = std::clamp((xb + i - x0 + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
    const int a = static_cast<int>(u);
    const int b = std::min(a + 1, src.width() - 1);
    left[i] = static_cast<std::size_t>(a) * C;
    right[i] = static_cast<std::size_t>(b) * C;
    fx[i] = static_cast<float>(u - a);
  }

  std::vector<float> top(static_cast<std::size_t>(n) * C), bottom(static_cast<std::size_t>(n) * C);
  int cached_a = -1;
  for (int y = yb; y < ye; ++y) {
    const double v = std::clamp((y - y0 + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int a = static_cast<int>(v);
    const int b = std::min(a + 1, src.height() - 1);
    const float fy = static_cast<float>(v - a);
    if (a != cached_a) {
      // Horizontal interpolation of the two source rows; reused while the
      // destination rows map between the same pair.
      auto interp = [&](int sy_row, std::vector<float>& out) {
        const std::uint8_t* r = src.row(sy_row).data();
        for (int i = 0; i < n; ++i) {
          const float f = fx[i];
          for (int c = 0; c < C; ++c) {
            out[i * C + c] = r[left[i] + c] + f * (static_cast<float>(r[right[i] + c]) - r[left[i] + c]);
          }
        }
      };
      if (a == cached_a + 1 && cached_a >= 0) {
        std::swap(top, bottom);
      } else {
        interp(a, top);
      }
      interp(b, bottom);
      cached_a = a;
    }
    std::uint8_t* out = dst.row(y).data() + static_cast<std::size_t>(xb) * C;
    for (std::size_t i = 0; i < top.size(); ++i) out[i] = to_u8(top[i] + fy * (bottom[i] - top[i]));
  }
}

Frame resize_bilinear(const Frame& src, int width, int height) {
  Frame out(width, height);
  composite_scaled(src, out, 0, 0, width, height);
  return out;
}

}  // namespace pano
