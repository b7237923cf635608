#include <doctest.h>

#include <random>
#include <thread>

#include "pano/agents/mock.hpp"
#include "pano/core/error.hpp"
#include "pano/core/transform.hpp"
#include "pano/io/codec.hpp"
#include "pano/io/file.hpp"
#include "pano/session/session.hpp"
#include "test_backends.hpp"
#include "test_util.hpp"

using namespace pano;
using namespace pano::session;

namespace {

const std::string kFixtures = PANO_FIXTURE_DIR;

agents::BackendSuite fixture_backends(std::shared_ptr<const agents::VideoGenerator> gen = nullptr) {
  auto suite = agents::mock_backends();
  suite.transcriber =
      std::make_shared<agents::MockTranscriber>(agents::MockTranscriber::from_table(kFixtures + "/audio/transcripts.json"));
  if (gen) suite.generator = std::move(gen);
  return suite;
}

SessionConfig small_config(int width = 64) {
  SessionConfig c;
  c.projection.out_width = width;
  c.segment_duration_s = 1.0;
  c.fps = 6;
  c.seed = 17;
  return c;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io;
}

Frame source_image(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return testing::random_frame(rng, 40, 24);
}

const agents::Sleeper kNoWait = [](std::chrono::milliseconds) {};

}  // namespace

TEST_CASE("start_session") {
  SUBCASE("text and image") {
    const auto s = Session::start("s1", "a calm beach at dusk", source_image(1), small_config(), fixture_backends());
    const auto snap = s->snapshot();
    CHECK(snap.state == SessionState::active);
    CHECK(snap.current_yaw.degrees() == 0.0);
    REQUIRE(snap.segments.size() == 1);
    CHECK(snap.segments[0].status == SegmentStatus::pending);
    CHECK(snap.segments[0].image_prompt == to_equirect(source_image(1), small_config().projection));
    CHECK(snap.segments[0].refined.rendered ==
          "a calm beach at dusk, 360 degree equirectangular panorama, seamless horizontal wrap, wide field of view");
  }
  SUBCASE("text only bootstraps from a mid-gray canvas") {
    const auto s = Session::start("s2", "fog", std::nullopt, small_config(128), fixture_backends());
    CHECK(s->snapshot().segments[0].image_prompt.frame() == Frame::filled(128, 64, {128, 128, 128}));
  }
  SUBCASE("errors") {
    CHECK(code_of([] { Session::start("x", std::string(2001, 'a'), std::nullopt, small_config(), fixture_backends()); }) ==
          Errc::prompt_too_long);
    CHECK(code_of([] { Session::start("x", "  ", std::nullopt, small_config(), fixture_backends()); }) ==
          Errc::invalid_prompt);
    auto bad = small_config();
    bad.target_segments = 33;
    CHECK(code_of([&] { Session::start("x", "ok", std::nullopt, bad, fixture_backends()); }) == Errc::invalid_parameter);
  }
}

TEST_CASE("run_generation") {
  SUBCASE("ten seconds at 24 fps") {
    auto cfg = small_config();
    cfg.segment_duration_s = 10;
    cfg.fps = 24;
    const auto s = Session::start("g", "a calm beach at dusk", source_image(2), cfg, fixture_backends());
    s->run_generation(0);
    const auto seg = s->snapshot().segments[0];
    CHECK(seg.status == SegmentStatus::ready);
    REQUIRE(seg.clip.has_value());
    CHECK(seg.clip->size() == 240);
    // Stored frames carry the seam blend; the generator's frame 0 is the
    // image prompt itself.
    CHECK(seg.clip->frame(0) == edge_blend(seg.image_prompt, cfg.projection.blend_band_frac).frame());
    for (const auto& f : seg.clip->frames()) CHECK(seam_continuity(EquirectFrame(*f)) == 0.0);
  }
  SUBCASE("backend failure leaves the segment failed and retryable") {
    auto flaky = std::make_shared<testing::FlakyGenerator>(100);
    const auto s = Session::start("f", "storm", source_image(3), small_config(), fixture_backends(flaky));
    s->set_retry_policy({}, kNoWait);
    s->run_generation(0);
    auto snap = s->snapshot();
    CHECK(snap.state == SessionState::active);
    CHECK(snap.segments[0].status == SegmentStatus::failed);
    CHECK(snap.segments[0].error.find("transient") != std::string::npos);
    CHECK(flaky->calls() == 4);
    CHECK(code_of([&] { s->run_generation(0); }) == Errc::out_of_order);
    flaky->fail_next(2);
    s->retry_segment(0);
    s->run_generation(0);
    CHECK(s->snapshot().segments[0].status == SegmentStatus::ready);
  }
  SUBCASE("contract violations are not retried") {
    auto broken = std::make_shared<testing::FlakyGenerator>(1, Errc::backend_contract);
    const auto s = Session::start("c", "storm", source_image(3), small_config(), fixture_backends(broken));
    s->set_retry_policy({}, kNoWait);
    s->run_generation(0);
    CHECK(s->snapshot().segments[0].status == SegmentStatus::failed);
    CHECK(broken->calls() == 1);
  }
  SUBCASE("a second generation while one runs is busy") {
    auto gate = std::make_shared<testing::GatedGenerator>();
    const auto s = Session::start("b", "storm", source_image(4), small_config(), fixture_backends(gate));
    std::thread worker([&] { s->run_generation(0); });
    gate->wait_for_caller();
    CHECK(s->snapshot().segments[0].status == SegmentStatus::generating);
    CHECK(code_of([&] { s->run_generation(0); }) == Errc::busy);
    CHECK(code_of([&] { s->apply_feedback({}); }) == Errc::out_of_order);
    gate->open();
    worker.join();
    CHECK(s->snapshot().segments[0].status == SegmentStatus::ready);
  }
  SUBCASE("bad index") {
    const auto s = Session::start("i", "storm", source_image(4), small_config(), fixture_backends());
    CHECK(code_of([&] { s->run_generation(3); }) == Errc::not_found);
  }
}

TEST_CASE("apply_feedback") {
  const auto s = Session::start("fb", "a calm beach at dusk", source_image(5), small_config(2048), fixture_backends());
  CHECK(code_of([&] { s->apply_feedback({}); }) == Errc::out_of_order);
  s->run_generation(0);
  const auto seg0 = s->snapshot().segments[0];

  SUBCASE("reuse keeps the prompt and the last frame") {
    CHECK(s->apply_feedback({}) == 1);
    const auto seg1 = s->snapshot().segments[1];
    CHECK(seg1.status == SegmentStatus::pending);
    CHECK(seg1.refined.rendered == seg0.refined.rendered);
    CHECK(seg1.image_prompt.frame() == last_frame(*seg0.clip));
  }
  SUBCASE("recenter +45 shifts the image by 256 columns") {
    s->apply_feedback({ReusePrompt{}, normalize_yaw(45)});
    const auto snap = s->snapshot();
    CHECK(snap.current_yaw.degrees() == 45.0);
    const Frame& last = last_frame(*seg0.clip);
    const Frame& img = snap.segments[1].image_prompt.frame();
    for (int y = 0; y < img.height(); y += 97) {
      for (int x = 0; x < img.width(); x += 61) CHECK(img.pixel(x, y) == last.pixel((x + 256) % 2048, y));
    }
  }
  SUBCASE("speech prompt is transcribed") {
    const auto audio = agents::AudioInput::from_wav(io::read_file(kFixtures + "/audio/thunderstorm.wav"));
    s->apply_feedback({NewSpeechPrompt{audio}, std::nullopt});
    CHECK(s->snapshot().segments[1].text_prompt.text() == "a thunderstorm over the sea");
  }
  SUBCASE("typed prompt") {
    s->apply_feedback({NewTextPrompt{"neon city"}, normalize_yaw(-90)});
    const auto seg1 = s->snapshot().segments[1];
    CHECK(seg1.text_prompt.text() == "neon city");
    CHECK(seg1.yaw_at_generation.degrees() == -90.0);
  }
  SUBCASE("unrecognized speech is an error and adds nothing") {
    const auto audio = agents::AudioInput::from_wav(io::read_file(kFixtures + "/audio/unknown.wav"));
    CHECK(code_of([&] { s->apply_feedback({NewSpeechPrompt{audio}, std::nullopt}); }) == Errc::empty_transcription);
    CHECK(s->snapshot().segments.size() == 1);
  }
}

TEST_CASE("finalize") {
  auto cfg = small_config(64);
  cfg.segment_duration_s = 10;
  cfg.fps = 24;
  const auto s = Session::start("fin", "storm", source_image(6), cfg, fixture_backends());
  s->run_generation(0);
  s->apply_feedback({});
  s->run_generation(1);
  s->apply_feedback({});
  CHECK(code_of([&] { s->finalize(); }) == Errc::incomplete_session);
  s->run_generation(2);
  CHECK(code_of([&] { s->apply_feedback({}); }) == Errc::session_full);
  const Clip final_clip = s->finalize();
  CHECK(final_clip.size() == 720);
  CHECK(final_clip.duration_seconds() == doctest::Approx(30.0));
  CHECK(s->snapshot().state == SessionState::complete);
  CHECK(s->finalize() == final_clip);
  CHECK(&s->finalize().frame(0) == &final_clip.frame(0));
}

TEST_CASE("random action scripts keep every invariant") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto flaky = std::make_shared<testing::FlakyGenerator>(0);
    auto cfg = small_config(32);
    cfg.target_segments = testing::uniform_int(rng, 1, 5);
    cfg.segment_duration_s = 0.5;
    cfg.fps = 4;
    const auto s = Session::start("p", "storm", source_image(trial), cfg, fixture_backends(flaky));
    s->set_retry_policy({0, std::chrono::milliseconds(0)}, kNoWait);
    double yaw_sum = 0;
    std::vector<SegmentStatus> last;

    for (int step = 0; step < 30; ++step) {
      const auto before = s->snapshot();
      const int n = static_cast<int>(before.segments.size());
      const int k = testing::uniform_int(rng, 0, n);  // sometimes out of range
      try {
        switch (rng() % 5) {
          case 0: flaky->fail_next(static_cast<int>(rng() % 2)); s->run_generation(k); break;
          case 1: s->retry_segment(k); break;
          case 2: {
            const double yaw = static_cast<double>(testing::uniform_int(rng, -720, 720));
            const bool turn = rng() % 2;
            s->apply_feedback({ReusePrompt{}, turn ? std::optional(normalize_yaw(yaw)) : std::nullopt});
            if (turn) yaw_sum += yaw;
            break;
          }
          case 3: s->finalize(); break;
          default: s->apply_feedback({NewTextPrompt{"step " + std::to_string(step)}, std::nullopt}); break;
        }
      } catch (const Error&) {
        // Rejected actions must not change anything.
        const auto after = s->snapshot();
        CHECK(after.segments.size() == before.segments.size());
        for (std::size_t i = 0; i < after.segments.size(); ++i) CHECK(after.segments[i].status == before.segments[i].status);
      }

      const auto snap = s->snapshot();
      CHECK(snap.current_yaw == normalize_yaw(yaw_sum));
      int generating = 0;
      for (std::size_t i = 0; i < snap.segments.size(); ++i) {
        const auto& seg = snap.segments[i];
        CHECK(seg.index == static_cast<int>(i));
        CHECK((seg.status == SegmentStatus::ready) == seg.clip.has_value());
        generating += seg.status == SegmentStatus::generating;
        if (i < last.size() && last[i] != seg.status) {
          // run_generation passes through generating within one step.
          const bool via_generating = last[i] == SegmentStatus::pending &&
                                      is_legal_transition(SegmentStatus::generating, seg.status);
          CHECK((is_legal_transition(last[i], seg.status) || via_generating));
        }
        if (i >= 1 && seg.status == SegmentStatus::ready) {
          CHECK(seg.image_prompt ==
                recenter(EquirectFrame(last_frame(*snap.segments[i - 1].clip)), seg.yaw_at_generation));
        }
      }
      CHECK(generating == 0);
      CHECK(static_cast<int>(snap.segments.size()) <= cfg.target_segments);
      if (snap.state == SessionState::complete) CHECK(snap.final_clip.has_value());
      last.clear();
      for (const auto& seg : snap.segments) last.push_back(seg.status);
    }
  }
}

TEST_CASE("identical scripts give identical final clips") {
  auto run = [] {
    auto cfg = small_config(96);
    const auto s = Session::start("d", "storm", source_image(7), cfg, fixture_backends());
    s->run_generation(0);
    s->apply_feedback({NewTextPrompt{"calm sea"}, normalize_yaw(30)});
    s->run_generation(1);
    s->apply_feedback({ReusePrompt{}, normalize_yaw(-75)});
    s->run_generation(2);
    return io::clip_digest(s->finalize());
  };
  CHECK(run() == run());
}

TEST_CASE("restore validates invariants") {
  const auto s = Session::start("r", "storm", source_image(8), small_config(), fixture_backends());
  s->run_generation(0);
  auto snap = s->snapshot();
  CHECK(Session::restore(snap, fixture_backends())->snapshot().segments[0].clip == snap.segments[0].clip);
  auto broken = snap;
  broken.segments[0].clip.reset();
  CHECK(code_of([&] { Session::restore(broken, fixture_backends()); }) == Errc::invalid_input);
  CHECK(parse_segment_status("failed") == SegmentStatus::failed);
  CHECK(parse_session_state("complete") == SessionState::complete);
  CHECK(code_of([] { parse_segment_status("done"); }) == Errc::invalid_input);
}
