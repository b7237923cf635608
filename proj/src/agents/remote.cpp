#include "pano/agents/remote.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "pano/agents/retry.hpp"
#include "pano/core/error.hpp"
#include "pano/io/codec.hpp"
#include "pano/io/png.hpp"

namespace pano::agents {

Sleeper thread_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

namespace {

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  constexpr std::string_view kScheme = "http://";
  if (!url.starts_with(kScheme)) throw Error(Errc::invalid_parameter, "only http:// endpoints are supported: " + url);
  const auto slash = url.find('/', kScheme.size());
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

Endpoint Endpoint::from_env(const char* url_var, const char* key_var, std::chrono::milliseconds timeout) {
  const char* url = std::getenv(url_var);
  if (!url || !*url) throw Error(Errc::invalid_parameter, std::string(url_var) + " is not set");
  const char* key = std::getenv(key_var);
  return {url, key ? key : "", timeout};
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body) {
  const SplitUrl target = split_url(endpoint.url);
  httplib::Client client(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

  const auto res = client.Post(target.path, headers, body.dump(), "application/json");
  if (!res) throw Error(Errc::transient, endpoint.url + ": " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500) {
    throw Error(Errc::transient, endpoint.url + " returned HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(Errc::backend_contract, endpoint.url + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::backend_contract, endpoint.url + " returned a non-JSON body");
  }
}

TextPrompt RemoteTranscriber::transcribe(const AudioInput& audio) const {
  if (audio.samples().empty()) throw Error(Errc::empty_transcription, "audio has no samples");
  const auto reply = post_json(endpoint_, {{"audio_wav_base64", io::base64_encode(audio.to_wav())}});
  if (!reply.contains("text") || !reply["text"].is_string()) {
    throw Error(Errc::backend_contract, "transcription reply lacks a text field");
  }
  try {
    return TextPrompt::make(reply["text"].get<std::string>());
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_prompt) throw Error(Errc::empty_transcription, "transcript is empty");
    throw;
  }
}

RefinedPrompt RemoteRefiner::refine(const TextPrompt& raw) const {
  const auto reply = post_json(endpoint_, {{"prompt", raw.text()}, {"vocabulary", vocabulary_}});
  if (!reply.contains("descriptors") || !reply["descriptors"].is_array()) {
    throw Error(Errc::backend_contract, "refinement reply lacks a descriptors array");
  }
  std::vector<std::string> chosen;
  for (const auto& d : reply["descriptors"]) {
    if (!d.is_string()) throw Error(Errc::backend_contract, "descriptor is not a string");
    chosen.push_back(d.get<std::string>());
  }
  return refine_with_descriptors(raw, chosen);
}

Clip RemoteGenerator::generate(const GenerationRequest& request) const {
  request.validate();
  const nlohmann::json body = {
      {"prompt", request.refined.rendered},
      {"image_png_base64", io::base64_encode(io::encode_png(request.image_prompt.frame()))},
      {"duration_s", request.duration_s},
      {"fps", request.fps},
      {"seed", request.seed},
  };
  const auto reply = post_json(endpoint_, body);
  if (!reply.contains("frames_png_base64") || !reply["frames_png_base64"].is_array()) {
    throw Error(Errc::backend_contract, "generation reply lacks frames_png_base64");
  }
  std::vector<Frame> frames;
  try {
    for (const auto& f : reply["frames_png_base64"]) frames.push_back(io::decode_png(io::base64_decode(f.get<std::string>())));
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::backend_contract, "frame entry is not a string");
  } catch (const Error& e) {
    throw Error(Errc::backend_contract, std::string("undecodable frame: ") + e.what());
  }
  if (frames.empty()) throw Error(Errc::backend_contract, "generator returned no frames");
  const int fps = reply.value("fps", request.fps);
  std::optional<Clip> clip;
  try {
    clip.emplace(std::move(frames), fps);
  } catch (const Error& e) {
    throw Error(Errc::backend_contract, e.what());
  }
  check_generated_clip(request, *clip);
  return std::move(*clip);
}

BackendSuite remote_backends_from_env() {
  using std::chrono::seconds;
  return {std::make_shared<RemoteTranscriber>(Endpoint::from_env("ASR_API_URL", "ASR_API_KEY", seconds(30))),
          std::make_shared<RemoteRefiner>(Endpoint::from_env("LLM_API_URL", "LLM_API_KEY", seconds(30))),
          std::make_shared<RemoteGenerator>(Endpoint::from_env("GEN_API_URL", "GEN_API_KEY", seconds(120)))};
}

}  // namespace pano::agents
