#pragma once

#include "pano/core/frame.hpp"
#include "pano/core/yaw.hpp"

namespace pano {

/// Rotates the panorama about the vertical axis so that `yaw` lands at the
/// horizontal center: output column c is input column
/// (c + yaw_to_shift(yaw, width)) mod width. Lossless; no resampling.
EquirectFrame recenter(const EquirectFrame& frame, YawAngle yaw);

/// Cross-fades a band of round(band_frac * width) columns on each side with
/// the mirrored opposite edge. The weight given to the opposite edge falls
/// linearly from 0.5 at the outermost column to 0 inside the band, so
/// columns 0 and width-1 become identical. Throws invalid_parameter unless
/// 0 <= band_frac < 0.5.
EquirectFrame edge_blend(const EquirectFrame& frame, double band_frac);

/// Mean absolute per-channel difference between column 0 and column
/// width-1, scaled to [0, 1].
double seam_continuity(const EquirectFrame& frame);

}  // namespace pano
