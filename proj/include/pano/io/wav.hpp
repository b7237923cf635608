#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pano::io {

struct PcmAudio {
  int sample_rate = 16000;
  int channels = 1;
  std::vector<std::int16_t> samples;  // interleaved when channels > 1
};

/// Parses a RIFF/WAVE file holding 16-bit integer PCM. Unknown chunks are
/// skipped. Throws Error(invalid_input) for anything else.
PcmAudio decode_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav(const PcmAudio& audio);

}  // namespace pano::io
