#include "pano/core/yaw.hpp"

#include <cmath>
#include <string>

#include "pano/core/error.hpp"

namespace pano {

YawAngle normalize_yaw(double degrees) {
  if (!std::isfinite(degrees)) throw Error(Errc::invalid_angle, "yaw must be finite");
  double r = std::fmod(degrees + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  r -= 180.0;
  // fmod of values just below a multiple of 360 can land on the excluded end.
  if (r >= 180.0) r -= 360.0;
  if (r < -180.0) r += 360.0;
  return YawAngle(r);
}

int yaw_to_shift(YawAngle yaw, int width) {
  if (width < 2) throw Error(Errc::invalid_parameter, "width must be >= 2, got " + std::to_string(width));
  return static_cast<int>(std::lround(yaw.degrees() / 360.0 * width));
}

}  // namespace pano
