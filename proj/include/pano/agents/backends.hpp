#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pano/agents/prompt.hpp"
#include "pano/core/clip.hpp"
#include "pano/core/frame.hpp"

namespace pano::agents {

/// Mono 16-bit PCM at 16 kHz. May be empty; transcribers report that as
/// empty_transcription.
class AudioInput {
 public:
  static constexpr int kSampleRate = 16000;

  /// Throws invalid_input unless sample_rate == 16000.
  explicit AudioInput(std::vector<std::int16_t> samples, int sample_rate = kSampleRate);
  /// Parses a RIFF WAV; must be PCM16 mono at 16 kHz.
  static AudioInput from_wav(std::span<const std::uint8_t> wav);

  std::span<const std::int16_t> samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  /// Samples serialized little-endian, as stored in the WAV data chunk.
  std::vector<std::uint8_t> pcm_bytes() const;
  std::vector<std::uint8_t> to_wav() const;

 private:
  std::vector<std::int16_t> samples_;
  int sample_rate_;
};

struct GenerationRequest {
  RefinedPrompt refined;
  EquirectFrame image_prompt;
  double duration_s = 10.0;
  int fps = 24;
  std::uint64_t seed = 0;

  /// round(duration_s * fps)
  std::size_t frame_count() const;
  /// Throws invalid_parameter unless duration_s > 0, fps > 0 and at least
  /// one frame results.
  void validate() const;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual TextPrompt transcribe(const AudioInput& audio) const = 0;
};

class PromptRefiner {
 public:
  virtual ~PromptRefiner() = default;
  virtual RefinedPrompt refine(const TextPrompt& raw) const = 0;
};

class VideoGenerator {
 public:
  virtual ~VideoGenerator() = default;
  /// Returns exactly request.frame_count() frames sized like the image
  /// prompt at request.fps.
  virtual Clip generate(const GenerationRequest& request) const = 0;
};

struct BackendSuite {
  std::shared_ptr<const Transcriber> transcriber;
  std::shared_ptr<const PromptRefiner> refiner;
  std::shared_ptr<const VideoGenerator> generator;
};

/// Throws backend_contract if `clip` breaks the VideoGenerator postcondition.
void check_generated_clip(const GenerationRequest& request, const Clip& clip);

}  // namespace pano::agents
