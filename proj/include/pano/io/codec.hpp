#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pano/core/clip.hpp"

namespace pano::io {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

/// Digest over fps, dimensions, and every frame's pixels in order.
std::string clip_digest(const Clip& clip);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws Error(invalid_input) on characters outside the standard alphabet
/// or bad padding. Whitespace is ignored.
std::vector<std::uint8_t> base64_decode(std::string_view text);
/// Decoded length without decoding; used to reject oversize payloads early.
std::size_t base64_decoded_size(std::string_view text);

/// 128 random bits from the OS CSPRNG as 32 hex characters.
std::string random_hex_id();

}  // namespace pano::io
