#include "pano/service/api.hpp"

#include <charconv>
#include <iostream>

#include <httplib.h>

#include "pano/io/codec.hpp"
#include "pano/io/file.hpp"
#include "pano/io/png.hpp"
#include "pano/io/sequence.hpp"

using nlohmann::json;

namespace pano::service {

namespace {

using session::Session;
using session::SegmentStatus;

const json& field(const json& body, const char* key) {
  if (!body.contains(key)) throw BadRequest(std::string("missing field '") + key + "'");
  return body[key];
}

std::string get_string(const json& v, const char* key) {
  if (!v.is_string()) throw BadRequest(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const json& v, const char* key) {
  if (!v.is_number()) throw BadRequest(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

long long get_integer(const json& v, const char* key) {
  if (!v.is_number_integer()) throw BadRequest(std::string("'") + key + "' must be an integer");
  return v.get<long long>();
}

int get_int(const json& v, const char* key) {
  const long long x = get_integer(v, key);
  if (x < INT32_MIN || x > INT32_MAX) throw BadRequest(std::string("'") + key + "' is out of range");
  return static_cast<int>(x);
}

json refined_json(const agents::RefinedPrompt& r) {
  return {{"base", r.base.text()}, {"descriptors", r.descriptors}, {"rendered", r.rendered}};
}

json job_json(const JobStatus& j) {
  json out = {{"session_id", j.session_id},
              {"segment_index", j.segment_index},
              {"phase", to_string(j.phase)},
              {"progress_frames", j.progress_frames},
              {"expected_frames", j.expected_frames}};
  if (!j.error_message.empty()) out["error_message"] = j.error_message;
  return out;
}

std::string describe(const Error& e) { return std::string(to_string(e.code())) + ": " + e.what(); }

// Width and height from the IHDR chunk, if the bytes look like a PNG.
std::optional<std::pair<std::uint32_t, std::uint32_t>> png_size(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (b.size() < 24 || !std::equal(kSig, kSig + 8, b.begin())) return std::nullopt;
  auto be32 = [&](std::size_t o) {
    return std::uint32_t(b[o]) << 24 | std::uint32_t(b[o + 1]) << 16 | std::uint32_t(b[o + 2]) << 8 | b[o + 3];
  };
  return std::pair{be32(16), be32(20)};
}

}  // namespace

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_angle:
    case Errc::invalid_parameter: return 400;
    case Errc::not_found: return 404;
    case Errc::busy:
    case Errc::out_of_order:
    case Errc::session_full:
    case Errc::incomplete_session: return 409;
    case Errc::invalid_input:
    case Errc::invalid_prompt:
    case Errc::prompt_too_long:
    case Errc::empty_transcription:
    case Errc::empty_clip:
    case Errc::incompatible_clips: return 422;
    case Errc::backend_contract: return 502;
    case Errc::transient: return 503;
    case Errc::io: return 500;
  }
  return 500;
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)), store_(options_.root), runner_(options_.workers) {
  if (!options_.backends.transcriber || !options_.backends.refiner || !options_.backends.generator) {
    throw Error(Errc::invalid_parameter, "service needs all three backends");
  }
  if (!options_.sleeper) options_.sleeper = agents::thread_sleeper();
  for (const std::string& id : store_.list()) {
    try {
      session::SessionSnapshot snap = store_.load(id);
      auto s = std::shared_ptr<Session>(Session::restore(std::move(snap), options_.backends));
      configure(*s);
      store_.save(*s);  // persist interrupted -> failed
      sessions_.emplace(id, std::move(s));
    } catch (const std::exception& e) {
      std::cerr << "skipping session " << id << ": " << e.what() << "\n";
    }
  }
}

Service::~Service() { runner_.wait_idle(); }

void Service::configure(Session& s) const { s.set_retry_policy(options_.retry, options_.sleeper); }

std::shared_ptr<Session> Service::session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::not_found, "no session " + id);
  return it->second;
}

json Service::list() const {
  std::shared_lock lock(sessions_mutex_);
  json ids = json::array();
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return {{"sessions", ids}};
}

Frame Service::decode_image(const std::string& base64) const {
  const std::size_t limit = options_.max_image_bytes;
  if (io::base64_decoded_size(base64) > limit) {
    throw Error(Errc::invalid_input, "image exceeds " + std::to_string(limit) + " bytes");
  }
  const std::vector<std::uint8_t> bytes = io::base64_decode(base64);
  const auto size = png_size(bytes);
  if (!size) throw Error(Errc::invalid_input, "image is not a PNG");
  if (std::uint64_t(size->first) * size->second * 3 > limit) {
    throw Error(Errc::invalid_input, "decoded image exceeds " + std::to_string(limit) + " bytes");
  }
  try {
    return io::decode_png(bytes);
  } catch (const Error& e) {
    throw Error(Errc::invalid_input, e.what());
  }
}

json Service::create_session(const json& body) {
  if (!body.is_object()) throw BadRequest("body must be a JSON object");
  const std::string text = get_string(field(body, "text"), "text");

  session::SessionConfig config;
  config.seed = options_.default_seed;
  if (body.contains("params")) {
    const json& p = body["params"];
    if (!p.is_object()) throw BadRequest("'params' must be an object");
    for (const auto& [key, v] : p.items()) {
      const char* k = key.c_str();
      if (key == "target_segments") config.target_segments = get_int(v, k);
      else if (key == "segment_duration_s") config.segment_duration_s = get_number(v, k);
      else if (key == "fps") config.fps = get_int(v, k);
      else if (key == "seed") {
        if (!v.is_number_unsigned()) throw BadRequest("'seed' must be a non-negative integer");
        config.seed = v.get<std::uint64_t>();
      }
      else if (key == "out_width") config.projection.out_width = get_int(v, k);
      else if (key == "blur_sigma_frac") config.projection.blur_sigma_frac = get_number(v, k);
      else if (key == "fg_height_frac") config.projection.fg_height_frac = get_number(v, k);
      else if (key == "blend_band_frac") config.projection.blend_band_frac = get_number(v, k);
      else throw BadRequest("unknown parameter '" + key + "'");
    }
  }
  config.validate();

  std::optional<Frame> image;
  if (body.contains("image") && !body["image"].is_null()) image = decode_image(get_string(body["image"], "image"));

  auto s = std::shared_ptr<Session>(Session::start(io::random_hex_id(), text, image, config, options_.backends));
  configure(*s);
  store_.save(*s);
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_.emplace(s->id(), s);
  }
  return {{"session_id", s->id()}};
}

json Service::generate(const std::string& id, int index) {
  auto s = session(id);
  const agents::GenerationRequest request = s->begin_generation(index);
  store_.save(*s);
  std::size_t job = 0;
  JobStatus status{.session_id = id, .segment_index = index, .phase = JobPhase::queued, .error_message = {},
                   .progress_frames = 0, .expected_frames = request.frame_count()};
  {
    std::lock_guard lock(jobs_mutex_);
    job = jobs_.size();
    jobs_.push_back(status);
  }
  runner_.submit([this, s, request, index, job] { run_job(s, request, index, job); });
  return job_json(status);
}

void Service::update_job(std::size_t job, const std::function<void(JobStatus&)>& f) {
  std::lock_guard lock(jobs_mutex_);
  f(jobs_[job]);
}

void Service::run_job(std::shared_ptr<Session> s, const agents::GenerationRequest& request, int index,
                      std::size_t job) {
  update_job(job, [](JobStatus& j) { j.phase = JobPhase::running; });
  std::string failure;
  try {
    const Clip processed = s->postprocess(s->produce(request));
    store_.write_frames(s->id(), index, processed,
                        [&](std::size_t n) { update_job(job, [n](JobStatus& j) { j.progress_frames = n; }); });
    s->complete_generation(index, processed);
  } catch (const Error& e) {
    failure = describe(e);
  } catch (const std::exception& e) {
    failure = std::string("internal: ") + e.what();
  }
  if (!failure.empty()) {
    try {
      s->fail_generation(index, failure);
    } catch (const std::exception&) {
    }
  }
  try {
    store_.save(*s);
  } catch (const std::exception& e) {
    std::cerr << "saving session " << s->id() << " failed: " << e.what() << "\n";
  }
  update_job(job, [&](JobStatus& j) {
    j.phase = failure.empty() ? JobPhase::done : JobPhase::error;
    j.error_message = failure;
  });
}

json Service::jobs(const std::string& id) const {
  session(id);
  json out = json::array();
  std::lock_guard lock(jobs_mutex_);
  for (const JobStatus& j : jobs_) {
    if (j.session_id == id) out.push_back(job_json(j));
  }
  return {{"jobs", out}};
}

json Service::feedback(const std::string& id, const json& body) {
  if (!body.is_object()) throw BadRequest("body must be a JSON object");
  auto s = session(id);

  session::FeedbackAction action;
  int kinds = 0;
  if (body.contains("reuse")) {
    if (!body["reuse"].is_boolean() || !body["reuse"].get<bool>()) throw BadRequest("'reuse' must be true");
    action.prompt = session::ReusePrompt{};
    ++kinds;
  }
  if (body.contains("text")) {
    action.prompt = session::NewTextPrompt{get_string(body["text"], "text")};
    ++kinds;
  }
  if (body.contains("audio_wav_base64")) {
    const std::string b64 = get_string(body["audio_wav_base64"], "audio_wav_base64");
    action.prompt = session::NewSpeechPrompt{agents::AudioInput::from_wav(io::base64_decode(b64))};
    ++kinds;
  }
  if (kinds != 1) throw BadRequest("give exactly one of 'reuse', 'text', 'audio_wav_base64'");
  if (body.contains("yaw_degrees") && !body["yaw_degrees"].is_null()) {
    action.recenter = normalize_yaw(get_number(body["yaw_degrees"], "yaw_degrees"));
  }

  const int index = s->apply_feedback(action);
  store_.save(*s);
  const auto snap = s->snapshot();
  const session::Segment& seg = snap.segments.at(index);
  return {{"segment_index", index},
          {"text", seg.text_prompt.text()},
          {"refined", refined_json(seg.refined)},
          {"yaw_at_generation", seg.yaw_at_generation.degrees()},
          {"status", session::to_string(seg.status)}};
}

json Service::manifest(const std::string& id) const { return manifest_json(session(id)->snapshot()); }

json Service::retry(const std::string& id, int index) {
  auto s = session(id);
  s->retry_segment(index);
  store_.save(*s);
  return manifest_json(s->snapshot());
}

json Service::finalize(const std::string& id) {
  auto s = session(id);
  const Clip final_clip = s->finalize();
  store_.save(*s);
  const auto snap = s->snapshot();
  json segments = json::array();
  for (const auto& seg : snap.segments) segments.push_back(seg.clip->size());
  return {{"session_id", id},
          {"state", session::to_string(snap.state)},
          {"frame_count", final_clip.size()},
          {"fps", final_clip.fps()},
          {"duration_s", final_clip.duration_seconds()},
          {"width", final_clip.width()},
          {"height", final_clip.height()},
          {"segment_frames", segments}};
}

std::vector<std::uint8_t> Service::frame_png(const std::string& id, int index, long long frame) const {
  const auto snap = session(id)->snapshot();
  if (index < 0 || index >= static_cast<int>(snap.segments.size())) {
    throw Error(Errc::not_found, "no segment " + std::to_string(index));
  }
  const auto& seg = snap.segments[index];
  if (!seg.clip) throw Error(Errc::not_found, "segment " + std::to_string(index) + " has no frames yet");
  if (frame < 0 || frame >= static_cast<long long>(seg.clip->size())) {
    throw Error(Errc::not_found, "no frame " + std::to_string(frame));
  }
  return io::read_file(store_.segment_dir(id, index) / io::frame_file_name(static_cast<std::size_t>(frame)));
}

std::vector<std::uint8_t> Service::image_prompt_png(const std::string& id, int index) const {
  const auto snap = session(id)->snapshot();
  if (index < 0 || index >= static_cast<int>(snap.segments.size())) {
    throw Error(Errc::not_found, "no segment " + std::to_string(index));
  }
  return io::encode_png(snap.segments[index].image_prompt.frame());
}

std::vector<std::uint8_t> Service::final_frame_png(const std::string& id, long long frame) const {
  const auto snap = session(id)->snapshot();
  if (!snap.final_clip) throw Error(Errc::not_found, "session is not finalized");
  if (frame < 0) throw Error(Errc::not_found, "no frame " + std::to_string(frame));
  auto remaining = static_cast<std::size_t>(frame);
  for (const auto& seg : snap.segments) {
    if (remaining < seg.clip->size()) {
      return io::read_file(store_.segment_dir(id, seg.index) / io::frame_file_name(remaining));
    }
    remaining -= seg.clip->size();
  }
  throw Error(Errc::not_found, "no frame " + std::to_string(frame));
}

// HTTP

namespace {

const std::string kIdPattern = "([0-9a-f]+)";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

template <class F>
httplib::Server::Handler guarded(F handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const BadRequest& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON: ") + e.what());
  }
}

long long path_number(const httplib::Request& req, std::size_t group) {
  const std::string s = req.matches[group];
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(Errc::not_found, "bad index " + s);
  return v;
}

int path_index(const httplib::Request& req, std::size_t group) {
  const long long v = path_number(req, group);
  if (v > INT32_MAX) throw Error(Errc::not_found, "no segment " + std::to_string(v));
  return static_cast<int>(v);
}

void send_png(httplib::Response& res, const std::vector<std::uint8_t>& png) {
  res.status = 200;
  res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
}

}  // namespace

void mount_api(httplib::Server& server, Service& service) {
  const std::string base = "/api/v1/sessions";
  const std::string session_path = base + "/" + kIdPattern;
  const std::string segment_path = session_path + "/segments/(\\d+)";
  Service* svc = &service;

  server.set_payload_max_length(64u << 20);

  server.Get(base, guarded([svc](const auto&, auto& res) { send_json(res, 200, svc->list()); }));
  server.Post(base, guarded([svc](const auto& req, auto& res) {
                send_json(res, 201, svc->create_session(parse_body(req)));
              }));
  server.Get(session_path, guarded([svc](const auto& req, auto& res) {
               send_json(res, 200, svc->manifest(req.matches[1]));
             }));
  server.Get(session_path + "/jobs", guarded([svc](const auto& req, auto& res) {
               send_json(res, 200, svc->jobs(req.matches[1]));
             }));
  server.Post(session_path + "/feedback", guarded([svc](const auto& req, auto& res) {
                send_json(res, 201, svc->feedback(req.matches[1], parse_body(req)));
              }));
  server.Post(session_path + "/finalize", guarded([svc](const auto& req, auto& res) {
                send_json(res, 200, svc->finalize(req.matches[1]));
              }));
  server.Get(session_path + "/final/frames/(\\d+)", guarded([svc](const auto& req, auto& res) {
               send_png(res, svc->final_frame_png(req.matches[1], path_number(req, 2)));
             }));
  server.Post(segment_path + "/generate", guarded([svc](const auto& req, auto& res) {
                send_json(res, 202, svc->generate(req.matches[1], path_index(req, 2)));
              }));
  server.Post(segment_path + "/retry", guarded([svc](const auto& req, auto& res) {
                send_json(res, 200, svc->retry(req.matches[1], path_index(req, 2)));
              }));
  server.Get(segment_path + "/image_prompt", guarded([svc](const auto& req, auto& res) {
               send_png(res, svc->image_prompt_png(req.matches[1], path_index(req, 2)));
             }));
  server.Get(segment_path + "/frames/(\\d+)", guarded([svc](const auto& req, auto& res) {
               send_png(res, svc->frame_png(req.matches[1], path_index(req, 2), path_number(req, 3)));
             }));
}

bool mount_ui(httplib::Server& server, const std::filesystem::path& ui_dir) {
  if (!std::filesystem::is_directory(ui_dir)) return false;
  return server.set_mount_point("/", ui_dir.string());
}

}  // namespace pano::service
