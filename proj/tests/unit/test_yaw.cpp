#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "pano/core/error.hpp"
#include "pano/core/yaw.hpp"

using namespace pano;

TEST_CASE("normalize_yaw examples") {
  CHECK(normalize_yaw(0.0).degrees() == 0.0);
  CHECK(normalize_yaw(405.0).degrees() == 45.0);
  CHECK(normalize_yaw(-90.0).degrees() == -90.0);
  CHECK(normalize_yaw(180.0).degrees() == -180.0);
  CHECK(normalize_yaw(-180.0).degrees() == -180.0);
  CHECK(normalize_yaw(360.0).degrees() == 0.0);
  CHECK(normalize_yaw(-540.0).degrees() == -180.0);
}

TEST_CASE("normalize_yaw rejects non-finite input") {
  CHECK_THROWS_AS(normalize_yaw(std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(normalize_yaw(std::numeric_limits<double>::infinity()), Error);
  try {
    normalize_yaw(-std::numeric_limits<double>::infinity());
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_angle);
  }
}

TEST_CASE("normalize_yaw is periodic and lands in [-180, 180)") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    // Multiples of 1/256 degree keep theta + 360k exact in double.
    const double theta = static_cast<double>(static_cast<std::int64_t>(rng() % 400000) - 200000) / 256.0;
    const int k = static_cast<int>(rng() % 41) - 20;
    const double a = normalize_yaw(theta).degrees();
    CHECK(a >= -180.0);
    CHECK(a < 180.0);
    CHECK(normalize_yaw(theta + 360.0 * k).degrees() == a);
    CHECK(std::fmod(std::fabs(a - theta), 360.0) == 0.0);
  }
}

TEST_CASE("yaw_to_shift examples") {
  CHECK(yaw_to_shift(normalize_yaw(0), 2048) == 0);
  CHECK(yaw_to_shift(normalize_yaw(45), 2048) == 256);
  CHECK(yaw_to_shift(normalize_yaw(-90), 1440) == -360);
  CHECK(yaw_to_shift(normalize_yaw(180), 4) == -2);
  CHECK_THROWS_AS(yaw_to_shift(normalize_yaw(10), 1), Error);
}

TEST_CASE("yaw_to_shift is bounded and odd away from half-integral points") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const int width = 2 * (1 + static_cast<int>(rng() % 2048));  // panorama widths are even
    const double theta = (static_cast<double>(rng() % 3600000) / 10000.0) - 180.0;
    const YawAngle yaw = normalize_yaw(theta);
    const int s = yaw_to_shift(yaw, width);
    CHECK(std::abs(s) <= width / 2);
    const double exact = yaw.degrees() / 360.0 * width;
    if (yaw.degrees() != -180.0 && std::fabs(exact - std::floor(exact) - 0.5) > 1e-9) {
      CHECK(yaw_to_shift(normalize_yaw(-yaw.degrees()), width) == -s);
    }
  }
}
