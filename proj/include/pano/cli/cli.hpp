#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pano/cli/script.hpp"
#include "pano/core/clip.hpp"
#include "pano/core/projection.hpp"
#include "pano/session/session.hpp"

namespace pano::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int unreadable_input = 2;
inline constexpr int usage = 64;
inline constexpr int script_error = 65;
}  // namespace exit_code

struct ChainOptions {
  std::string prompt = "a 360 degree scene";
  std::optional<Frame> image;
  int segments = 3;
  std::uint64_t seed = 0;
  double duration_s = 10.0;
  int fps = 24;
  ProjectionParams projection;
  /// Parsed script; segments it does not mention reuse the prompt at yaw 0.
  std::map<int, ScriptAction> script;
  /// Holds transcripts.json and <id>.wav for speech actions.
  std::optional<std::filesystem::path> fixtures;
};

struct ChainResult {
  session::SessionSnapshot session;
  Clip final_clip;
  /// clip_digest(final_clip).
  std::string hash;
};

/// Runs the whole co-creation loop headlessly on the mock backends.
ChainResult run_chain(const ChainOptions& options);

/// Frames per second of recenter and to_equirect at 2048x1024.
struct BenchResult {
  double recenter_fps = 0;
  double to_equirect_fps = 0;
  int width = 2048;
  int height = 1024;
};

BenchResult run_bench(int recenter_frames = 240, int convert_frames = 24);

/// Entry point of panoctl; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pano::cli
