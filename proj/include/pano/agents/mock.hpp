#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pano/agents/backends.hpp"

namespace pano::agents {

/// Looks transcripts up by the SHA-256 of the little-endian PCM samples.
/// Unknown audio transcribes to nothing, which is an empty_transcription.
class MockTranscriber final : public Transcriber {
 public:
  explicit MockTranscriber(std::map<std::string, std::string> by_hash) : by_hash_(std::move(by_hash)) {}

  /// Reads a JSON object mapping sample hashes to transcripts.
  static MockTranscriber from_table(const std::filesystem::path& json_path);

  TextPrompt transcribe(const AudioInput& audio) const override;

  static std::string audio_key(const AudioInput& audio);

 private:
  std::map<std::string, std::string> by_hash_;
};

class MockRefiner final : public PromptRefiner {
 public:
  explicit MockRefiner(std::vector<std::string> descriptors = default_descriptors())
      : descriptors_(std::move(descriptors)) {}

  RefinedPrompt refine(const TextPrompt& raw) const override;

  const std::vector<std::string>& descriptors() const noexcept { return descriptors_; }

 private:
  std::vector<std::string> descriptors_;
};

/// Deterministic stand-in for an image-to-video model. Frame 0 is the image
/// prompt byte for byte; frame k is the image drifted k columns to the left
/// (wrapping) with a per-channel color offset ramping linearly to a
/// prompt- and seed-dependent grade of up to +-24 levels.
class MockGenerator final : public VideoGenerator {
 public:
  Clip generate(const GenerationRequest& request) const override;
};

/// The three mocks together. `transcripts` may be empty.
BackendSuite mock_backends(std::map<std::string, std::string> transcripts = {},
                           std::vector<std::string> descriptors = default_descriptors());

}  // namespace pano::agents
