#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pano {

/// Failure categories shared by every module. Services and the CLI map these
/// onto HTTP statuses and exit codes.
enum class Errc {
  invalid_angle,
  invalid_parameter,
  invalid_input,
  invalid_prompt,
  prompt_too_long,
  empty_clip,
  incompatible_clips,
  empty_transcription,
  transient,
  backend_contract,
  busy,
  out_of_order,
  session_full,
  incomplete_session,
  not_found,
  io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pano
