#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "pano/agents/backends.hpp"

namespace pano::agents {

/// A hosted capability reached over HTTP+JSON. The key, when set, is sent
/// as a bearer token.
struct Endpoint {
  std::string url;  // http://host[:port]/path
  std::string api_key;
  std::chrono::milliseconds timeout{30000};

  /// Reads `url_var` and `key_var`. Throws invalid_parameter when the URL
  /// variable is unset.
  static Endpoint from_env(const char* url_var, const char* key_var, std::chrono::milliseconds timeout);
};

/// POSTs `body` and returns the parsed JSON reply. Network failures,
/// timeouts, 429 and 5xx raise transient; any other non-2xx status or an
/// unparsable body raises backend_contract.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body);

/// Request {"audio_wav_base64"}; reply {"text"}.
class RemoteTranscriber final : public Transcriber {
 public:
  explicit RemoteTranscriber(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  TextPrompt transcribe(const AudioInput& audio) const override;

 private:
  Endpoint endpoint_;
};

/// Request {"prompt", "vocabulary"}; reply {"descriptors": [...]}. The
/// reply's descriptors go through the same dedup and rendering as the mock.
class RemoteRefiner final : public PromptRefiner {
 public:
  RemoteRefiner(Endpoint endpoint, std::vector<std::string> vocabulary = default_descriptors())
      : endpoint_(std::move(endpoint)), vocabulary_(std::move(vocabulary)) {}
  RefinedPrompt refine(const TextPrompt& raw) const override;

 private:
  Endpoint endpoint_;
  std::vector<std::string> vocabulary_;
};

/// Request {"prompt", "image_png_base64", "duration_s", "fps", "seed"};
/// reply {"fps", "frames_png_base64": [...]}.
class RemoteGenerator final : public VideoGenerator {
 public:
  explicit RemoteGenerator(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  Clip generate(const GenerationRequest& request) const override;

 private:
  Endpoint endpoint_;
};

/// Adapters configured from GEN_API_URL/GEN_API_KEY (120 s timeout),
/// ASR_API_URL/ASR_API_KEY and LLM_API_URL/LLM_API_KEY (30 s each).
BackendSuite remote_backends_from_env();

}  // namespace pano::agents
