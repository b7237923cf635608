#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pano/agents/backends.hpp"
#include "pano/agents/retry.hpp"
#include "pano/core/clip.hpp"
#include "pano/core/projection.hpp"
#include "pano/core/yaw.hpp"

namespace pano::session {

enum class SegmentStatus { pending, generating, ready, failed };
enum class SessionState { active, finalizing, complete, aborted };

std::string_view to_string(SegmentStatus s) noexcept;
std::string_view to_string(SessionState s) noexcept;
/// Throws invalid_input for unknown names.
SegmentStatus parse_segment_status(std::string_view name);
SessionState parse_session_state(std::string_view name);

/// pending->generating, generating->ready, generating->failed, failed->pending.
bool is_legal_transition(SegmentStatus from, SegmentStatus to) noexcept;

struct Segment {
  int index = 0;
  agents::TextPrompt text_prompt;
  agents::RefinedPrompt refined;
  EquirectFrame image_prompt;
  YawAngle yaw_at_generation;
  SegmentStatus status = SegmentStatus::pending;
  /// Present exactly when status is ready.
  std::optional<Clip> clip;
  /// Last generation failure, if any.
  std::string error;
};

struct SessionConfig {
  static constexpr int kMaxSegments = 32;

  int target_segments = 3;
  double segment_duration_s = 10.0;
  int fps = 24;
  std::uint64_t seed = 0;
  ProjectionParams projection;

  /// Throws invalid_parameter on out-of-range fields.
  void validate() const;
};

struct ReusePrompt {};
struct NewTextPrompt {
  std::string text;
};
struct NewSpeechPrompt {
  agents::AudioInput audio;
};

/// One round of user feedback: a prompt choice, optionally combined with a
/// new focal direction.
struct FeedbackAction {
  std::variant<ReusePrompt, NewTextPrompt, NewSpeechPrompt> prompt = ReusePrompt{};
  std::optional<YawAngle> recenter;
};

/// Plain copy of a session's state; frames are shared, not copied.
struct SessionSnapshot {
  std::string id;
  std::int64_t created_at_ms = 0;
  SessionState state = SessionState::active;
  SessionConfig config;
  YawAngle current_yaw;
  std::vector<Segment> segments;
  std::optional<Clip> final_clip;
};

/// The co-creation loop. All members are safe to call concurrently; every
/// state change is serialized on an internal mutex. Backend calls made by
/// produce() run without holding it.
class Session {
 public:
  /// Segment 0 starts pending with the projected initial image (a mid-gray
  /// canvas when there is none) and the refined initial text.
  static std::unique_ptr<Session> start(std::string id, std::string_view initial_text,
                                        const std::optional<Frame>& initial_image, SessionConfig config,
                                        agents::BackendSuite backends);

  /// Rebuilds a session from persisted state. Throws invalid_input if the
  /// snapshot breaks a session invariant.
  static std::unique_ptr<Session> restore(SessionSnapshot snapshot, agents::BackendSuite backends);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const noexcept { return id_; }
  SessionSnapshot snapshot() const;

  /// pending -> generating, returning the request to send. Throws busy when
  /// any segment is generating, out_of_order unless the segment is pending
  /// in an active session, not_found for a bad index.
  agents::GenerationRequest begin_generation(int index);
  /// Calls the generator with retries and checks its output. Does not touch
  /// session state.
  Clip produce(const agents::GenerationRequest& request) const;
  /// Seam-blends every frame of a generated clip.
  Clip postprocess(const Clip& raw) const;
  /// generating -> ready, storing `processed` (the output of postprocess).
  void complete_generation(int index, Clip processed);
  /// generating -> failed.
  void fail_generation(int index, std::string error);
  /// begin_generation, produce, postprocess, then complete or fail. Backend failures leave the
  /// segment failed rather than throwing.
  void run_generation(int index);
  /// failed -> pending, keeping the prompt.
  void retry_segment(int index);

  /// Appends the next pending segment. Returns its index. Throws
  /// session_full at the target count and out_of_order unless the last
  /// segment is ready.
  int apply_feedback(const FeedbackAction& action);

  /// Concatenation of all segment clips; cached, so repeated calls return
  /// the same clip. Throws incomplete_session unless every target segment
  /// is ready.
  Clip finalize();

  void abort();

  void set_retry_policy(agents::RetryPolicy policy, agents::Sleeper sleeper);

 private:
  Session(SessionSnapshot state, agents::BackendSuite backends);

  Segment& segment_at(int index);
  void transition(Segment& seg, SegmentStatus to);

  mutable std::mutex mutex_;
  std::string id_;
  SessionSnapshot state_;
  agents::BackendSuite backends_;
  agents::RetryPolicy retry_;
  agents::Sleeper sleeper_;
};

}  // namespace pano::session
