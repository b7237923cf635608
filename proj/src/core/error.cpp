#include "pano/core/error.hpp"

namespace pano {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_angle: return "invalid_angle";
    case Errc::invalid_parameter: return "invalid_parameter";
    case Errc::invalid_input: return "invalid_input";
    case Errc::invalid_prompt: return "invalid_prompt";
    case Errc::prompt_too_long: return "prompt_too_long";
    case Errc::empty_clip: return "empty_clip";
    case Errc::incompatible_clips: return "incompatible_clips";
    case Errc::empty_transcription: return "empty_transcription";
    case Errc::transient: return "transient";
    case Errc::backend_contract: return "backend_contract";
    case Errc::busy: return "busy";
    case Errc::out_of_order: return "out_of_order";
    case Errc::session_full: return "session_full";
    case Errc::incomplete_session: return "incomplete_session";
    case Errc::not_found: return "not_found";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace pano
