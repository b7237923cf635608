#pragma once

#include "pano/core/frame.hpp"

namespace pano {

struct ProjectionParams {
  /// Output width in pixels; must be even. Height is out_width / 2.
  int out_width = 2048;
  /// Background blur sigma as a fraction of the output height.
  double blur_sigma_frac = 0.05;
  /// Foreground height as a fraction of the output height.
  double fg_height_frac = 0.75;
  /// Edge-blend band per side as a fraction of the output width.
  double blend_band_frac = 0.05;

  int out_height() const noexcept { return out_width / 2; }

  /// Throws invalid_parameter when a field is out of range.
  void validate() const;

  friend bool operator==(const ProjectionParams&, const ProjectionParams&) = default;
};

/// Placement of the sharp foreground on the canvas. x may be negative when
/// the scaled source is wider than the canvas; it is then center-cropped.
struct ForegroundLayout {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const ForegroundLayout&, const ForegroundLayout&) = default;
};

ForegroundLayout foreground_layout(int src_width, int src_height, const ProjectionParams& params);

/// Flat frame to seamless 2:1 panorama: a stretched, blurred copy of the
/// source fills the canvas, an aspect-preserving sharp copy scaled to
/// fg_height_frac of the height is composited at the center, and the seam
/// is edge-blended.
EquirectFrame to_equirect(const Frame& src, const ProjectionParams& params = {});

}  // namespace pano
