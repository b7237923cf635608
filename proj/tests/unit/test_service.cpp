#include <doctest.h>

#include <random>

#include "pano/agents/mock.hpp"
#include "pano/core/transform.hpp"
#include "pano/io/file.hpp"
#include "pano/io/png.hpp"
#include "pano/io/sequence.hpp"
#include "pano/io/wav.hpp"
#include "service_harness.hpp"
#include "test_util.hpp"

using namespace pano;
using namespace pano::service;
using nlohmann::json;
using testing::session_path;
using testing::TempDir;
using testing::TestServer;

namespace {

const std::string kFixtures = PANO_FIXTURE_DIR;

agents::BackendSuite backends(std::shared_ptr<const agents::VideoGenerator> gen = nullptr) {
  auto suite = agents::mock_backends();
  suite.transcriber = std::make_shared<agents::MockTranscriber>(
      agents::MockTranscriber::from_table(kFixtures + "/audio/transcripts.json"));
  if (gen) suite.generator = std::move(gen);
  return suite;
}

ServiceOptions options(const std::filesystem::path& root, std::shared_ptr<const agents::VideoGenerator> gen = nullptr) {
  ServiceOptions o;
  o.root = root;
  o.backends = backends(std::move(gen));
  o.sleeper = [](std::chrono::milliseconds) {};
  return o;
}

json small_params(int target = 3) {
  return {{"target_segments", target}, {"out_width", 64}, {"segment_duration_s", 1.0}, {"fps", 6}, {"seed", 5}};
}

std::string create(TestServer& ts, json params = small_params()) {
  auto r = ts.post("/api/v1/sessions", {{"text", "a thunderstorm over the sea"}, {"params", params}});
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return json::parse(r->body)["session_id"];
}

void generate_ready(TestServer& ts, const std::string& id, int k) {
  auto r = ts.post(session_path(id) + "/segments/" + std::to_string(k) + "/generate");
  REQUIRE(r);
  REQUIRE(r->status == 202);
  ts.service().wait_idle();
}

std::string b64(const std::vector<std::uint8_t>& bytes) { return io::base64_encode(bytes); }

Frame png_body(const httplib::Result& r) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(r->body.data());
  return io::decode_png({p, r->body.size()});
}

}  // namespace

TEST_CASE("create session") {
  TempDir dir;
  TestServer ts(options(dir.path()));

  SUBCASE("text only gives 201 and a 128-bit hex id") {
    auto r = ts.post("/api/v1/sessions", {{"text", "a calm beach at dusk"}});
    REQUIRE(r->status == 201);
    const std::string id = json::parse(r->body)["session_id"];
    CHECK(id.size() == 32);
    CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / id / "manifest.json"));
    CHECK(std::filesystem::exists(dir.path() / id / "segment_000" / "image_prompt.png"));
  }
  SUBCASE("malformed JSON is 400") {
    CHECK(ts.post_raw("/api/v1/sessions", "{\"text\": ")->status == 400);
    CHECK(ts.post_raw("/api/v1/sessions", "[1, 2]")->status == 400);
    CHECK(ts.post("/api/v1/sessions", {{"text", 3}})->status == 400);
    CHECK(ts.post("/api/v1/sessions", json::object())->status == 400);
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"params", {{"fps", "fast"}}}})->status == 400);
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"params", {{"colour", 1}}}})->status == 400);
  }
  SUBCASE("out-of-range parameters are 400") {
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"params", {{"target_segments", 0}}}})->status == 400);
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"params", {{"blend_band_frac", 0.6}}}})->status == 400);
  }
  SUBCASE("invalid prompt is 422") {
    CHECK(ts.post("/api/v1/sessions", {{"text", "   "}})->status == 422);
    CHECK(ts.post("/api/v1/sessions", {{"text", std::string(2001, 'a')}})->status == 422);
  }
  SUBCASE("invalid image is 422") {
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"image", "not base64!"}})->status == 422);
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"image", b64({1, 2, 3, 4, 5, 6})}})->status == 422);
  }
  SUBCASE("image over 32 MB decoded is 422") {
    CHECK(ServiceOptions::kMaxImageBytes == 32u * 1024 * 1024);
    // One byte past the limit once decoded; the check runs before decoding.
    const std::size_t bytes = ServiceOptions::kMaxImageBytes + 3;
    auto r = ts.post("/api/v1/sessions", {{"text", "x"}, {"image", std::string(bytes / 3 * 4, 'A')}});
    REQUIRE(r);
    CHECK(r->status == 422);
    CHECK(json::parse(r->body)["error"] == "invalid_input");
  }
  SUBCASE("PNG whose pixels exceed the limit is 422") {
    std::vector<std::uint8_t> png = io::encode_png(Frame(4, 4));
    // Claim 4000x4000 in the header: 48 MB of RGB.
    for (int o : {16, 20}) {
      png[o] = 0, png[o + 1] = 0, png[o + 2] = 0x0f, png[o + 3] = 0xa0;
    }
    CHECK(ts.post("/api/v1/sessions", {{"text", "x"}, {"image", b64(png)}})->status == 422);
  }
  SUBCASE("image is projected to 2:1") {
    std::mt19937_64 rng(3);
    const Frame img = testing::random_frame(rng, 40, 30);
    auto r = ts.post("/api/v1/sessions", {{"text", "x"}, {"image", b64(io::encode_png(img))}, {"params", small_params()}});
    REQUIRE(r->status == 201);
    const std::string id = json::parse(r->body)["session_id"];
    const Frame got = png_body(ts.get(session_path(id) + "/segments/0/image_prompt"));
    ProjectionParams p;
    p.out_width = 64;
    CHECK(got == to_equirect(img, p).frame());
  }
}

TEST_CASE("endpoint examples") {
  TempDir dir;
  TestServer ts(options(dir.path()));
  json params = small_params();
  params["segment_duration_s"] = 10.0;
  params["fps"] = 24;
  const std::string id = create(ts, params);
  const std::string sp = session_path(id);

  auto m = json::parse(ts.get(sp)->body);
  CHECK(m["segments"].size() == 1);
  CHECK(m["segments"][0]["status"] == "pending");
  CHECK(m["state"] == "active");

  CHECK(ts.get(session_path("0123abcd"))->status == 404);
  CHECK(ts.post(session_path("0123abcd") + "/segments/0/generate")->status == 404);
  CHECK(ts.post(sp + "/segments/1/generate")->status == 404);
  CHECK(ts.post(sp + "/segments/99999999999999999999/generate")->status == 404);
  CHECK(ts.post(sp + "/finalize")->status == 409);

  auto r = ts.post(sp + "/segments/0/generate");
  REQUIRE(r->status == 202);
  auto job = json::parse(r->body);
  CHECK(job["phase"] == "queued");
  CHECK(job["segment_index"] == 0);
  CHECK(job["expected_frames"] == 240);
  ts.service().wait_idle();

  auto jobs = json::parse(ts.get(sp + "/jobs")->body)["jobs"];
  REQUIRE(jobs.size() == 1);
  CHECK(jobs[0]["phase"] == "done");
  CHECK(jobs[0]["progress_frames"] == 240);

  m = json::parse(ts.get(sp)->body);
  CHECK(m["segments"][0]["status"] == "ready");
  CHECK(m["segments"][0]["frame_count"] == 240);

  const auto snap = ts.service().session(id)->snapshot();
  auto f239 = ts.get(sp + "/segments/0/frames/239");
  REQUIRE(f239->status == 200);
  CHECK(f239->get_header_value("Content-Type") == "image/png");
  CHECK(png_body(f239) == snap.segments[0].clip->frame(239));
  CHECK(ts.get(sp + "/segments/0/frames/240")->status == 404);
  CHECK(ts.get(sp + "/segments/1/frames/0")->status == 404);

  CHECK(ts.post(sp + "/segments/0/generate")->status == 409);
  CHECK(ts.post(sp + "/segments/0/retry")->status == 409);

  SUBCASE("feedback") {
    CHECK(ts.post(sp + "/feedback", {{"reuse", true}, {"text", "both"}})->status == 400);
    CHECK(ts.post(sp + "/feedback", json::object())->status == 400);
    CHECK(ts.post(sp + "/feedback", {{"text", "x"}, {"yaw_degrees", "east"}})->status == 400);
    CHECK(ts.post(sp + "/feedback", {{"audio_wav_base64", "%%%"}})->status == 422);
    CHECK(ts.post(sp + "/feedback", {{"audio_wav_base64", b64({'R', 'I', 'F', 'F'})}})->status == 422);
    auto unknown = io::read_file(kFixtures + "/audio/unknown.wav");
    CHECK(ts.post(sp + "/feedback", {{"audio_wav_base64", b64(unknown)}})->status == 422);

    auto wav = io::read_file(kFixtures + "/audio/beach.wav");
    auto fr = ts.post(sp + "/feedback", {{"audio_wav_base64", b64(wav)}, {"yaw_degrees", 45}});
    REQUIRE(fr->status == 201);
    auto seg = json::parse(fr->body);
    CHECK(seg["segment_index"] == 1);
    CHECK(seg["text"] == "a calm beach at dusk");
    CHECK(seg["refined"]["base"] == "a calm beach at dusk");
    CHECK(seg["status"] == "pending");
    CHECK(seg["yaw_at_generation"] == 45.0);

    const Frame prompt = png_body(ts.get(sp + "/segments/1/image_prompt"));
    const EquirectFrame last(Frame(last_frame(*snap.segments[0].clip)));
    CHECK(prompt == recenter(last, normalize_yaw(45)).frame());

    // Segment 1 is pending, so more feedback is out of order.
    CHECK(ts.post(sp + "/feedback", {{"reuse", true}})->status == 409);
  }

  SUBCASE("finalize after all segments") {
    for (int k = 1; k < 3; ++k) {
      REQUIRE(ts.post(sp + "/feedback", {{"text", "scene " + std::to_string(k)}, {"yaw_degrees", 30 * k}})->status == 201);
      CHECK(ts.post(sp + "/finalize")->status == 409);
      generate_ready(ts, id, k);
    }
    CHECK(ts.post(sp + "/feedback", {{"reuse", true}})->status == 409);
    CHECK(ts.get(sp + "/final/frames/0")->status == 404);
    auto r2 = ts.post(sp + "/finalize");
    REQUIRE(r2->status == 200);
    auto fin = json::parse(r2->body);
    CHECK(fin["frame_count"] == 720);
    CHECK(fin["duration_s"] == 30.0);
    CHECK(fin["state"] == "complete");
    CHECK(ts.post(sp + "/finalize")->status == 200);

    const auto done = ts.service().session(id)->snapshot();
    CHECK(png_body(ts.get(sp + "/final/frames/0")) == done.segments[0].clip->frame(0));
    CHECK(png_body(ts.get(sp + "/final/frames/480")) == done.segments[2].clip->frame(0));
    CHECK(png_body(ts.get(sp + "/final/frames/719")) == done.segments[2].clip->frame(239));
    CHECK(ts.get(sp + "/final/frames/720")->status == 404);
    CHECK(json::parse(ts.get(sp)->body)["final"]["frame_count"] == 720);
  }
}

TEST_CASE("generation failures surface through jobs and retry") {
  TempDir dir;
  auto gen = std::make_shared<testing::FlakyGenerator>(0, Errc::backend_contract);
  TestServer ts(options(dir.path(), gen));
  const std::string id = create(ts);
  const std::string sp = session_path(id);

  gen->fail_next(1);
  generate_ready(ts, id, 0);
  auto jobs = json::parse(ts.get(sp + "/jobs")->body)["jobs"];
  CHECK(jobs[0]["phase"] == "error");
  CHECK(jobs[0]["error_message"].get<std::string>().find("backend_contract") == 0);
  CHECK(json::parse(ts.get(sp)->body)["segments"][0]["status"] == "failed");
  CHECK(ts.post(sp + "/segments/0/generate")->status == 409);

  auto r = ts.post(sp + "/segments/0/retry");
  REQUIRE(r->status == 200);
  CHECK(json::parse(r->body)["segments"][0]["status"] == "pending");
  generate_ready(ts, id, 0);
  CHECK(json::parse(ts.get(sp)->body)["segments"][0]["status"] == "ready");
}

TEST_CASE("transient failures are retried before a job fails") {
  TempDir dir;
  auto gen = std::make_shared<testing::FlakyGenerator>(0, Errc::transient);
  TestServer ts(options(dir.path(), gen));
  const std::string id = create(ts);

  gen->fail_next(3);
  generate_ready(ts, id, 0);
  CHECK(gen->calls() == 4);
  CHECK(json::parse(ts.get(session_path(id))->body)["segments"][0]["status"] == "ready");
}

TEST_CASE("store round trip") {
  TempDir dir;
  std::string id;
  session::SessionSnapshot before;
  {
    TestServer ts(options(dir.path()));
    id = create(ts);
    generate_ready(ts, id, 0);
    REQUIRE(ts.post(session_path(id) + "/feedback", {{"text", "a calm beach at dusk"}, {"yaw_degrees", -90}})->status ==
            201);
    before = ts.service().session(id)->snapshot();
  }

  SessionStore store(dir.path());
  CHECK(store.list() == std::vector<std::string>{id});
  const auto after = store.load(id);
  CHECK(after.id == before.id);
  CHECK(after.created_at_ms == before.created_at_ms);
  CHECK(after.state == before.state);
  CHECK(after.current_yaw == before.current_yaw);
  CHECK(after.config.seed == before.config.seed);
  CHECK(after.config.projection.out_width == before.config.projection.out_width);
  REQUIRE(after.segments.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = after.segments[i];
    const auto& b = before.segments[i];
    CHECK(a.status == b.status);
    CHECK(a.text_prompt.text() == b.text_prompt.text());
    CHECK(a.refined.rendered == b.refined.rendered);
    CHECK(a.refined.descriptors == b.refined.descriptors);
    CHECK(a.yaw_at_generation == b.yaw_at_generation);
    CHECK(a.image_prompt.frame() == b.image_prompt.frame());
    CHECK(a.clip.has_value() == b.clip.has_value());
    if (a.clip) CHECK(*a.clip == *b.clip);
  }

  SUBCASE("a restarted service continues the session") {
    TestServer ts(options(dir.path()));
    generate_ready(ts, id, 1);
    CHECK(json::parse(ts.get(session_path(id))->body)["segments"][1]["status"] == "ready");
  }
  SUBCASE("unknown id") { CHECK_THROWS_AS(store.load("nope"), Error); }
}

TEST_CASE("restart mid-generation") {
  TempDir live;
  TempDir copy;
  auto gate = std::make_shared<testing::GatedGenerator>();
  std::string id;
  session::SessionSnapshot ready_state;
  {
    ServiceOptions o = options(live.path());
    TestServer ts(o);
    id = create(ts);
    generate_ready(ts, id, 0);
    REQUIRE(ts.post(session_path(id) + "/feedback", {{"reuse", true}, {"yaw_degrees", 90}})->status == 201);
    ready_state = ts.service().session(id)->snapshot();
  }
  {
    // Second process whose generator never returns until released.
    TestServer ts(options(live.path(), gate));
    REQUIRE(ts.post(session_path(id) + "/segments/1/generate")->status == 202);
    gate->wait_for_caller();
    CHECK(json::parse(ts.get(session_path(id))->body)["segments"][1]["status"] == "generating");
    // What a crash would leave behind.
    std::filesystem::copy(live.path(), copy.path(), std::filesystem::copy_options::recursive);
    gate->open();
  }

  TestServer restarted(options(copy.path()));
  const auto snap = restarted.service().session(id)->snapshot();
  REQUIRE(snap.segments.size() == 2);
  CHECK(snap.segments[0].status == session::SegmentStatus::ready);
  CHECK(*snap.segments[0].clip == *ready_state.segments[0].clip);
  CHECK(snap.segments[1].status == session::SegmentStatus::failed);
  CHECK(snap.segments[1].error.find("interrupted") != std::string::npos);
  CHECK(snap.segments[1].image_prompt.frame() == ready_state.segments[1].image_prompt.frame());
  // The reload is persisted, and the failed segment can be retried.
  CHECK(json::parse(restarted.get(session_path(id))->body)["segments"][1]["status"] == "failed");
  CHECK(restarted.post(session_path(id) + "/segments/1/retry")->status == 200);
  generate_ready(restarted, id, 1);
  CHECK(restarted.service().session(id)->snapshot().segments[1].status == session::SegmentStatus::ready);
}

TEST_CASE("ordering fuzz") {
  TempDir dir;
  auto gen = std::make_shared<testing::FlakyGenerator>(0, Errc::backend_contract);
  TestServer ts(options(dir.path(), gen));
  const auto report = testing::run_ordering_fuzz(ts, *gen, 11, 300);
  CHECK(report.calls == 300);
  CHECK(report.out_of_order > 50);
  CHECK(report.answered_409 == report.out_of_order);
  INFO(report.first_mismatch);
  CHECK(report.status_mismatches == 0);
}

TEST_CASE("static UI") {
  TempDir dir;
  TempDir ui;
  io::write_file_atomic(ui.path() / "index.html", "<html>viewer</html>");
  TestServer ts(options(dir.path()), ui.path());
  auto r = ts.get("/");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->body == "<html>viewer</html>");
  CHECK(ts.get("/index.html")->status == 200);
  CHECK(ts.get("/api/v1/sessions")->status == 200);

  httplib::Server s;
  CHECK_FALSE(mount_ui(s, dir.path() / "missing"));
}

TEST_CASE("error statuses") {
  CHECK(http_status(Errc::busy) == 409);
  CHECK(http_status(Errc::out_of_order) == 409);
  CHECK(http_status(Errc::session_full) == 409);
  CHECK(http_status(Errc::incomplete_session) == 409);
  CHECK(http_status(Errc::not_found) == 404);
  CHECK(http_status(Errc::invalid_prompt) == 422);
  CHECK(http_status(Errc::transient) == 503);
  CHECK(http_status(Errc::backend_contract) == 502);
  CHECK(http_status(Errc::invalid_parameter) == 400);
}

TEST_CASE("job runner") {
  SUBCASE("runs everything, in order on one worker") {
    JobRunner runner(1);
    std::vector<int> order;
    for (int i = 0; i < 20; ++i) runner.submit([&order, i] { order.push_back(i); });
    runner.wait_idle();
    std::vector<int> expected(20);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(order == expected);
  }
  SUBCASE("never more than the worker count at once") {
    std::atomic<int> active{0}, peak{0};
    {
      JobRunner runner(2);
      for (int i = 0; i < 12; ++i) {
        runner.submit([&] {
          const int now = ++active;
          int p = peak.load();
          while (now > p && !peak.compare_exchange_weak(p, now)) {
          }
          std::this_thread::sleep_for(std::chrono::milliseconds(5));
          --active;
        });
      }
    }
    CHECK(peak.load() <= 2);
    CHECK(peak.load() >= 1);
  }
  CHECK_THROWS_AS(JobRunner(0), Error);
}
