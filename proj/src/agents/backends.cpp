#include "pano/agents/backends.hpp"

#include <cmath>
#include <string>

#include "pano/core/error.hpp"
#include "pano/io/wav.hpp"

namespace pano::agents {

AudioInput::AudioInput(std::vector<std::int16_t> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ != kSampleRate) {
    throw Error(Errc::invalid_input, "audio must be 16 kHz, got " + std::to_string(sample_rate_) + " Hz");
  }
}

AudioInput AudioInput::from_wav(std::span<const std::uint8_t> wav) {
  io::PcmAudio pcm = io::decode_wav(wav);
  if (pcm.channels != 1) throw Error(Errc::invalid_input, "audio must be mono");
  return AudioInput(std::move(pcm.samples), pcm.sample_rate);
}

std::vector<std::uint8_t> AudioInput::pcm_bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(samples_.size() * 2);
  for (auto s : samples_) {
    const auto u = static_cast<std::uint16_t>(s);
    out.push_back(static_cast<std::uint8_t>(u));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return out;
}

std::vector<std::uint8_t> AudioInput::to_wav() const {
  return io::encode_wav({sample_rate_, 1, {samples_.begin(), samples_.end()}});
}

std::size_t GenerationRequest::frame_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * fps));
}

void GenerationRequest::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw Error(Errc::invalid_parameter, "duration must be > 0");
  if (fps <= 0) throw Error(Errc::invalid_parameter, "fps must be > 0");
  if (frame_count() == 0) throw Error(Errc::invalid_parameter, "request yields zero frames");
}

void check_generated_clip(const GenerationRequest& request, const Clip& clip) {
  if (clip.size() != request.frame_count()) {
    throw Error(Errc::backend_contract, "generator returned " + std::to_string(clip.size()) + " frames, expected " +
                                            std::to_string(request.frame_count()));
  }
  if (clip.width() != request.image_prompt.width() || clip.height() != request.image_prompt.height()) {
    throw Error(Errc::backend_contract, "generator returned " + std::to_string(clip.width()) + "x" +
                                            std::to_string(clip.height()) + " frames, expected " +
                                            std::to_string(request.image_prompt.width()) + "x" +
                                            std::to_string(request.image_prompt.height()));
  }
  if (clip.fps() != request.fps) throw Error(Errc::backend_contract, "generator changed the frame rate");
}

}  // namespace pano::agents
