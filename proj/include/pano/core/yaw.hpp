#pragma once

namespace pano {

/// Egocentric horizontal direction in degrees, canonical range [-180, 180).
/// Positive yaw looks to the right of the current frame center.
class YawAngle {
 public:
  constexpr YawAngle() = default;

  double degrees() const noexcept { return degrees_; }

  friend bool operator==(YawAngle, YawAngle) = default;

 private:
  friend YawAngle normalize_yaw(double degrees);
  explicit constexpr YawAngle(double d) : degrees_(d) {}

  double degrees_ = 0.0;
};

/// Wraps `degrees` into [-180, 180). Throws invalid_angle for NaN or infinity.
YawAngle normalize_yaw(double degrees);

inline YawAngle operator+(YawAngle a, YawAngle b) { return normalize_yaw(a.degrees() + b.degrees()); }

/// Signed column offset corresponding to `yaw` on a panorama `width` pixels
/// wide: round(yaw / 360 * width), halves rounded away from zero.
int yaw_to_shift(YawAngle yaw, int width);

}  // namespace pano
