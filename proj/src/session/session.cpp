#include "pano/session/session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "pano/core/error.hpp"
#include "pano/core/transform.hpp"

namespace pano::session {

namespace {

constexpr std::uint8_t kMidGray = 128;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(SegmentStatus s) noexcept {
  switch (s) {
    case SegmentStatus::pending: return "pending";
    case SegmentStatus::generating: return "generating";
    case SegmentStatus::ready: return "ready";
    case SegmentStatus::failed: return "failed";
  }
  return "unknown";
}

std::string_view to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::active: return "active";
    case SessionState::finalizing: return "finalizing";
    case SessionState::complete: return "complete";
    case SessionState::aborted: return "aborted";
  }
  return "unknown";
}

SegmentStatus parse_segment_status(std::string_view name) {
  for (auto s : {SegmentStatus::pending, SegmentStatus::generating, SegmentStatus::ready, SegmentStatus::failed}) {
    if (to_string(s) == name) return s;
  }
  throw Error(Errc::invalid_input, "unknown segment status '" + std::string(name) + "'");
}

SessionState parse_session_state(std::string_view name) {
  for (auto s : {SessionState::active, SessionState::finalizing, SessionState::complete, SessionState::aborted}) {
    if (to_string(s) == name) return s;
  }
  throw Error(Errc::invalid_input, "unknown session state '" + std::string(name) + "'");
}

bool is_legal_transition(SegmentStatus from, SegmentStatus to) noexcept {
  using S = SegmentStatus;
  return (from == S::pending && to == S::generating) || (from == S::generating && to == S::ready) ||
         (from == S::generating && to == S::failed) || (from == S::failed && to == S::pending);
}

void SessionConfig::validate() const {
  if (target_segments < 1 || target_segments > kMaxSegments) {
    throw Error(Errc::invalid_parameter, "target_segments must be in [1, 32]");
  }
  if (!(segment_duration_s > 0.0)) throw Error(Errc::invalid_parameter, "segment duration must be > 0");
  if (fps <= 0) throw Error(Errc::invalid_parameter, "fps must be > 0");
  if (std::llround(segment_duration_s * fps) < 1) throw Error(Errc::invalid_parameter, "segments would have no frames");
  projection.validate();
}

Session::Session(SessionSnapshot state, agents::BackendSuite backends)
    : id_(state.id), state_(std::move(state)), backends_(std::move(backends)), sleeper_(agents::thread_sleeper()) {}

std::unique_ptr<Session> Session::start(std::string id, std::string_view initial_text,
                                        const std::optional<Frame>& initial_image, SessionConfig config,
                                        agents::BackendSuite backends) {
  config.validate();
  const agents::TextPrompt text = agents::TextPrompt::make(initial_text);
  agents::RefinedPrompt refined = backends.refiner->refine(text);

  const ProjectionParams& params = config.projection;
  const Frame& source = initial_image
                            ? *initial_image
                            : Frame::filled(params.out_width, params.out_height(), {kMidGray, kMidGray, kMidGray});
  EquirectFrame image = to_equirect(source, params);

  SessionSnapshot state;
  state.id = std::move(id);
  state.created_at_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
  state.config = config;
  state.segments.push_back(Segment{.index = 0,
                                   .text_prompt = text,
                                   .refined = std::move(refined),
                                   .image_prompt = std::move(image),
                                   .yaw_at_generation = YawAngle{},
                                   .status = SegmentStatus::pending,
                                   .clip = std::nullopt,
                                   .error = {}});
  return std::unique_ptr<Session>(new Session(std::move(state), std::move(backends)));
}

std::unique_ptr<Session> Session::restore(SessionSnapshot snapshot, agents::BackendSuite backends) {
  snapshot.config.validate();
  if (snapshot.segments.empty()) throw Error(Errc::invalid_input, "session has no segments");
  if (static_cast<int>(snapshot.segments.size()) > snapshot.config.target_segments) {
    throw Error(Errc::invalid_input, "more segments than the target");
  }
  int generating = 0;
  for (std::size_t i = 0; i < snapshot.segments.size(); ++i) {
    const Segment& s = snapshot.segments[i];
    if (s.index != static_cast<int>(i)) throw Error(Errc::invalid_input, "segment indices are not contiguous");
    if ((s.status == SegmentStatus::ready) != s.clip.has_value()) {
      throw Error(Errc::invalid_input, "segment " + std::to_string(i) + " clip does not match its status");
    }
    if (s.status == SegmentStatus::generating) ++generating;
  }
  if (generating > 1) throw Error(Errc::invalid_input, "more than one segment generating");
  return std::unique_ptr<Session>(new Session(std::move(snapshot), std::move(backends)));
}

SessionSnapshot Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Session::set_retry_policy(agents::RetryPolicy policy, agents::Sleeper sleeper) {
  std::lock_guard lock(mutex_);
  retry_ = policy;
  sleeper_ = std::move(sleeper);
}

Segment& Session::segment_at(int index) {
  if (index < 0 || index >= static_cast<int>(state_.segments.size())) {
    throw Error(Errc::not_found, "no segment " + std::to_string(index));
  }
  return state_.segments[static_cast<std::size_t>(index)];
}

void Session::transition(Segment& seg, SegmentStatus to) {
  if (!is_legal_transition(seg.status, to)) {
    throw Error(Errc::out_of_order, "segment " + std::to_string(seg.index) + " cannot go from " +
                                        std::string(to_string(seg.status)) + " to " + std::string(to_string(to)));
  }
  seg.status = to;
}

agents::GenerationRequest Session::begin_generation(int index) {
  std::lock_guard lock(mutex_);
  Segment& seg = segment_at(index);
  for (const auto& other : state_.segments) {
    if (other.status == SegmentStatus::generating) {
      throw Error(Errc::busy, "segment " + std::to_string(other.index) + " is already generating");
    }
  }
  if (state_.state != SessionState::active) throw Error(Errc::out_of_order, "session is not active");
  if (seg.status != SegmentStatus::pending) {
    throw Error(Errc::out_of_order, "segment " + std::to_string(index) + " is " + std::string(to_string(seg.status)));
  }
  transition(seg, SegmentStatus::generating);
  seg.error.clear();
  return agents::GenerationRequest{seg.refined, seg.image_prompt, state_.config.segment_duration_s, state_.config.fps,
                                   state_.config.seed + static_cast<std::uint64_t>(index)};
}

Clip Session::produce(const agents::GenerationRequest& request) const {
  agents::RetryPolicy policy;
  agents::Sleeper sleeper;
  {
    std::lock_guard lock(mutex_);
    policy = retry_;
    sleeper = sleeper_;
  }
  return agents::with_retry(
      [&] {
        Clip clip = backends_.generator->generate(request);
        agents::check_generated_clip(request, clip);
        return clip;
      },
      policy, sleeper);
}

Clip Session::postprocess(const Clip& raw) const {
  double band = 0;
  {
    std::lock_guard lock(mutex_);
    band = state_.config.projection.blend_band_frac;
  }
  std::vector<FramePtr> frames;
  frames.reserve(raw.size());
  for (const auto& f : raw.frames()) {
    frames.push_back(std::make_shared<const Frame>(edge_blend(EquirectFrame(*f), band).frame()));
  }
  return Clip(std::move(frames), raw.fps());
}

void Session::complete_generation(int index, Clip processed) {
  std::lock_guard lock(mutex_);
  Segment& seg = segment_at(index);
  transition(seg, SegmentStatus::ready);
  seg.clip = std::move(processed);
}

void Session::fail_generation(int index, std::string error) {
  std::lock_guard lock(mutex_);
  Segment& seg = segment_at(index);
  transition(seg, SegmentStatus::failed);
  seg.error = std::move(error);
}

void Session::run_generation(int index) {
  const agents::GenerationRequest request = begin_generation(index);
  std::optional<Clip> raw;
  try {
    raw.emplace(produce(request));
  } catch (const Error& e) {
    fail_generation(index, std::string(to_string(e.code())) + ": " + e.what());
    return;
  }
  complete_generation(index, postprocess(*raw));
}

void Session::retry_segment(int index) {
  std::lock_guard lock(mutex_);
  Segment& seg = segment_at(index);
  if (state_.state != SessionState::active) throw Error(Errc::out_of_order, "session is not active");
  transition(seg, SegmentStatus::pending);
}

int Session::apply_feedback(const FeedbackAction& action) {
  std::lock_guard lock(mutex_);
  if (state_.state != SessionState::active) throw Error(Errc::out_of_order, "session is not active");
  if (static_cast<int>(state_.segments.size()) >= state_.config.target_segments) {
    throw Error(Errc::session_full, "session already has " + std::to_string(state_.config.target_segments) + " segments");
  }
  const Segment& prev = state_.segments.back();
  if (prev.status != SegmentStatus::ready) {
    throw Error(Errc::out_of_order, "segment " + std::to_string(prev.index) + " is not ready");
  }

  const agents::TextPrompt text = std::visit(
      overloaded{[&](const ReusePrompt&) { return prev.text_prompt; },
                 [](const NewTextPrompt& p) { return agents::TextPrompt::make(p.text); },
                 [&](const NewSpeechPrompt& p) { return backends_.transcriber->transcribe(p.audio); }},
      action.prompt);
  agents::RefinedPrompt refined = backends_.refiner->refine(text);

  const YawAngle yaw = action.recenter ? state_.current_yaw + *action.recenter : state_.current_yaw;
  EquirectFrame image = recenter(EquirectFrame(last_frame(*prev.clip)), yaw);

  const int index = static_cast<int>(state_.segments.size());
  state_.segments.push_back(Segment{.index = index,
                                    .text_prompt = text,
                                    .refined = std::move(refined),
                                    .image_prompt = std::move(image),
                                    .yaw_at_generation = yaw,
                                    .status = SegmentStatus::pending,
                                    .clip = std::nullopt,
                                    .error = {}});
  state_.current_yaw = yaw;
  return index;
}

Clip Session::finalize() {
  std::lock_guard lock(mutex_);
  if (state_.final_clip) return *state_.final_clip;
  if (state_.state != SessionState::active) throw Error(Errc::out_of_order, "session is not active");
  const bool all_ready = static_cast<int>(state_.segments.size()) == state_.config.target_segments &&
                         std::all_of(state_.segments.begin(), state_.segments.end(),
                                     [](const Segment& s) { return s.status == SegmentStatus::ready; });
  if (!all_ready) throw Error(Errc::incomplete_session, "not every segment is ready");

  state_.state = SessionState::finalizing;
  std::vector<Clip> clips;
  for (const auto& s : state_.segments) clips.push_back(*s.clip);
  state_.final_clip = concat(clips);
  state_.state = SessionState::complete;
  return *state_.final_clip;
}

void Session::abort() {
  std::lock_guard lock(mutex_);
  if (state_.state == SessionState::complete) throw Error(Errc::out_of_order, "session is already complete");
  state_.state = SessionState::aborted;
}

}  // namespace pano::session
