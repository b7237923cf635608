#include "pano/core/projection.hpp"

#include <cmath>
#include <string>

#include "pano/core/error.hpp"
#include "pano/core/filter.hpp"
#include "pano/core/transform.hpp"

namespace pano {

void ProjectionParams::validate() const {
  if (out_width < 4 || out_width % 2 != 0) {
    throw Error(Errc::invalid_parameter, "out_width must be even and >= 4, got " + std::to_string(out_width));
  }
  if (!(blur_sigma_frac >= 0.0) || !std::isfinite(blur_sigma_frac)) {
    throw Error(Errc::invalid_parameter, "blur_sigma_frac must be >= 0");
  }
  if (!(fg_height_frac > 0.0 && fg_height_frac <= 1.0)) {
    throw Error(Errc::invalid_parameter, "fg_height_frac must be in (0, 1]");
  }
  if (!(blend_band_frac >= 0.0 && blend_band_frac < 0.5)) {
    throw Error(Errc::invalid_parameter, "blend_band_frac must be in [0, 0.5)");
  }
}

ForegroundLayout foreground_layout(int src_width, int src_height, const ProjectionParams& params) {
  const int canvas_w = params.out_width;
  const int canvas_h = params.out_height();
  ForegroundLayout fg;
  fg.height = static_cast<int>(std::lround(params.fg_height_frac * canvas_h));
  fg.width = static_cast<int>(std::lround(static_cast<double>(src_width) * fg.height / src_height));
  fg.x = (canvas_w - fg.width) / 2;
  fg.y = (canvas_h - fg.height) / 2;
  return fg;
}

EquirectFrame to_equirect(const Frame& src, const ProjectionParams& params) {
  params.validate();
  const int w = params.out_width;
  const int h = params.out_height();

  Frame canvas = resize_bilinear(src, w, h);
  canvas = gaussian_blur(canvas, params.blur_sigma_frac * h);

  const ForegroundLayout fg = foreground_layout(src.width(), src.height(), params);
  composite_scaled(src, canvas, fg.x, fg.y, fg.width, fg.height);

  return edge_blend(EquirectFrame(std::move(canvas)), params.blend_band_frac);
}

}  // namespace pano
