#pragma once

#include <vector>

#include "pano/core/frame.hpp"

namespace pano {

/// Largest sigma (pixels) handled by the direct separable FIR. Wider kernels
/// switch to the recursive Young-van Vliet approximation.
inline constexpr double kFirSigmaLimit = 8.0;

/// Sampled, truncated and normalized Gaussian of radius ceil(3 * sigma).
/// Element k holds the weight for offset k - radius.
std::vector<float> gaussian_kernel(double sigma);

/// Separable Gaussian blur per channel. The horizontal pass wraps around
/// (the frame is treated as a cylinder); the vertical pass clamps.
/// sigma == 0 returns the input unchanged. Throws invalid_parameter for
/// negative or non-finite sigma.
Frame gaussian_blur(const Frame& src, double sigma);

/// Bilinear resize with pixel-center alignment and clamped borders.
Frame resize_bilinear(const Frame& src, int width, int height);

/// Bilinearly scales `src` to a virtual `scaled_width` x `scaled_height`
/// image whose top-left corner sits at (x0, y0) in `dst`, overwriting the
/// part of `dst` it covers. Offsets may be negative (the image is cropped).
void composite_scaled(const Frame& src, Frame& dst, int x0, int y0, int scaled_width, int scaled_height);

}  // namespace pano
