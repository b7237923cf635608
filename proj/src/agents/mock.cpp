#include "pano/agents/mock.hpp"

#include <algorithm>
#include <array>
#include <random>

#include <json.hpp>

#include "pano/core/error.hpp"
#include "pano/io/codec.hpp"
#include "pano/io/file.hpp"

namespace pano::agents {

MockTranscriber MockTranscriber::from_table(const std::filesystem::path& json_path) {
  const auto bytes = io::read_file(json_path);
  std::map<std::string, std::string> table;
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    for (const auto& [hash, text] : j.items()) table.emplace(hash, text.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::io, "bad transcript table " + json_path.string() + ": " + e.what());
  }
  return MockTranscriber(std::move(table));
}

std::string MockTranscriber::audio_key(const AudioInput& audio) { return io::sha256_hex(audio.pcm_bytes()); }

TextPrompt MockTranscriber::transcribe(const AudioInput& audio) const {
  if (audio.samples().empty()) throw Error(Errc::empty_transcription, "audio has no samples");
  const auto it = by_hash_.find(audio_key(audio));
  if (it == by_hash_.end()) throw Error(Errc::empty_transcription, "no speech recognized");
  try {
    return TextPrompt::make(it->second);
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_prompt) throw Error(Errc::empty_transcription, "transcript is empty");
    throw;
  }
}

RefinedPrompt MockRefiner::refine(const TextPrompt& raw) const { return refine_with_descriptors(raw, descriptors_); }

Clip MockGenerator::generate(const GenerationRequest& request) const {
  request.validate();
  const std::size_t n = request.frame_count();
  const Frame& first = request.image_prompt.frame();
  const int w = first.width();
  const int h = first.height();

  const std::string digest = io::sha256_hex(request.refined.rendered);
  const std::uint64_t prompt_bits = std::stoull(digest.substr(0, 16), nullptr, 16);
  std::mt19937_64 rng(request.seed ^ prompt_bits);
  std::array<int, 3> grade{};
  for (auto& g : grade) g = static_cast<int>(rng() % 49) - 24;

  std::vector<FramePtr> frames;
  frames.reserve(n);
  frames.push_back(std::make_shared<const Frame>(first));
  for (std::size_t k = 1; k < n; ++k) {
    std::array<std::array<std::uint8_t, 256>, 3> lut{};
    for (int c = 0; c < 3; ++c) {
      const int offset = static_cast<int>(static_cast<long long>(grade[c]) * static_cast<long long>(k) /
                                          static_cast<long long>(n));
      for (int v = 0; v < 256; ++v) lut[c][v] = static_cast<std::uint8_t>(std::clamp(v + offset, 0, 255));
    }
    const int shift = static_cast<int>(k % static_cast<std::size_t>(w));
    Frame f(w, h);
    for (int y = 0; y < h; ++y) {
      const std::uint8_t* src = first.row(y).data();
      std::uint8_t* dst = f.row(y).data();
      for (int x = 0; x < w; ++x) {
        const std::uint8_t* p = src + static_cast<std::size_t>((x + shift) % w) * 3;
        dst[3 * x] = lut[0][p[0]];
        dst[3 * x + 1] = lut[1][p[1]];
        dst[3 * x + 2] = lut[2][p[2]];
      }
    }
    frames.push_back(std::make_shared<const Frame>(std::move(f)));
  }
  return Clip(std::move(frames), request.fps);
}

BackendSuite mock_backends(std::map<std::string, std::string> transcripts, std::vector<std::string> descriptors) {
  return {std::make_shared<MockTranscriber>(std::move(transcripts)), std::make_shared<MockRefiner>(std::move(descriptors)),
          std::make_shared<MockGenerator>()};
}

}  // namespace pano::agents
