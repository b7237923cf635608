#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pano/core/error.hpp"
#include "pano/core/filter.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace pano;
using pano::testing::blur_oracle;
using pano::testing::max_abs_diff;

namespace {

double mean(const Frame& f) {
  double s = 0;
  for (auto v : f.pixels()) s += v;
  return s / f.pixels().size();
}

}  // namespace

TEST_CASE("kernel is normalized and symmetric") {
  for (double sigma : {0.5, 1.0, 2.0, 7.5}) {
    const auto k = gaussian_kernel(sigma);
    CHECK(k.size() == 2 * static_cast<std::size_t>(std::ceil(3 * sigma)) + 1);
    double s = 0;
    for (auto v : k) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
  }
}

TEST_CASE("sigma zero and constant fields are fixed points") {
  std::mt19937_64 rng(1);
  const Frame f = testing::random_frame(rng, 20, 10);
  CHECK(gaussian_blur(f, 0.0) == f);
  const Frame gray = Frame::filled(64, 32, {128, 128, 128});
  for (double sigma : {0.5, 3.0, 12.0, 40.0}) CHECK(gaussian_blur(gray, sigma) == gray);
}

TEST_CASE("negative sigma is rejected") {
  try {
    gaussian_blur(Frame(4, 4), -1.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_parameter);
  }
}

TEST_CASE("impulse row reproduces the sampled kernel") {
  // Two identical rows: the clamped vertical pass is then the identity.
  Frame f(21, 2);
  f.set_pixel(10, 0, {255, 255, 255});
  f.set_pixel(10, 1, {255, 255, 255});
  const Frame out = gaussian_blur(f, 1.0);
  // 255 * exp(-d^2/2) / sum_{|i|<=3} exp(-i^2/2), sum = 2.505898...
  const int expected[] = {102, 62, 14, 1};
  for (int d = 0; d <= 3; ++d) {
    CHECK(out.at(10 + d, 0, 0) == expected[d]);
    CHECK(out.at(10 - d, 0, 1) == expected[d]);
    CHECK(out.at(10 + d, 1, 2) == expected[d]);
  }
  CHECK(out.at(14, 0, 0) == 0);
}

TEST_CASE("horizontal pass wraps around the seam") {
  Frame f(16, 4);
  for (int y = 0; y < 4; ++y) f.set_pixel(0, y, {255, 0, 0});
  const Frame out = gaussian_blur(f, 1.0);
  CHECK(out.at(15, 1, 0) == out.at(1, 1, 0));
  CHECK(out.at(15, 1, 0) > 0);
}

TEST_CASE("separable blur matches the 2D oracle on small frames") {
  std::mt19937_64 rng(2);
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (int h = 2; h <= 16; h += 3) {
      for (int w = 2; w <= 16; w += 5) {
        const Frame f = testing::random_frame(rng, w, h);
        CHECK(max_abs_diff(gaussian_blur(f, sigma), blur_oracle(f, sigma)) <= 1);
      }
    }
  }
}

TEST_CASE("recursive path tracks the FIR path for wide kernels") {
  std::mt19937_64 rng(3);
  const Frame noise = testing::random_frame(rng, 96, 48);
  // A smooth source: wide-kernel blurs are used on stretched, blurry canvases.
  const Frame smooth = gaussian_blur(noise, 2.0);
  for (double sigma : {8.5, 12.0, 20.0}) {
    const Frame iir = gaussian_blur(smooth, sigma);
    const Frame ref = blur_oracle(smooth, sigma);
    CHECK(max_abs_diff(iir, ref) <= 2);
    CHECK(std::fabs(mean(iir) - mean(smooth)) <= 1.0);
  }
}

TEST_CASE("blur preserves the mean") {
  std::mt19937_64 rng(4);
  for (double sigma : {0.7, 2.5, 6.0, 15.0}) {
    const Frame f = testing::random_frame(rng, 256, 128);
    CHECK(std::fabs(mean(gaussian_blur(f, sigma)) - mean(f)) <= 1.0);
  }
}

TEST_CASE("blur is deterministic") {
  std::mt19937_64 rng(5);
  const Frame f = testing::random_frame(rng, 64, 32);
  CHECK(gaussian_blur(f, 10.0) == gaussian_blur(f, 10.0));
  CHECK(gaussian_blur(f, 1.5) == gaussian_blur(f, 1.5));
}

TEST_CASE("bilinear resize") {
  const Frame gray = Frame::filled(7, 5, {33, 66, 99});
  CHECK(resize_bilinear(gray, 40, 20) == Frame::filled(40, 20, {33, 66, 99}));
  std::mt19937_64 rng(6);
  const Frame f = testing::random_frame(rng, 12, 9);
  CHECK(resize_bilinear(f, 12, 9) == f);
  // 2x upscale of a two-pixel ramp: centers map to -0.25, 0.25, 0.75, 1.25.
  Frame ramp(2, 2);
  ramp.set_pixel(1, 0, {200, 200, 200});
  ramp.set_pixel(1, 1, {200, 200, 200});
  const Frame up = resize_bilinear(ramp, 4, 2);
  CHECK(up.at(0, 0, 0) == 0);
  CHECK(up.at(1, 0, 0) == 50);
  CHECK(up.at(2, 0, 0) == 150);
  CHECK(up.at(3, 0, 0) == 200);
}
