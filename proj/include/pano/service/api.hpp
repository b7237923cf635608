#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pano/agents/backends.hpp"
#include "pano/agents/retry.hpp"
#include "pano/core/error.hpp"
#include "pano/service/jobs.hpp"
#include "pano/service/store.hpp"
#include "pano/session/session.hpp"

namespace httplib {
class Server;
}

namespace pano::service {

/// Malformed request body or field; reported as 400.
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// HTTP status for a domain error.
int http_status(Errc code) noexcept;

struct ServiceOptions {
  static constexpr std::size_t kMaxImageBytes = 32u << 20;

  std::filesystem::path root;
  agents::BackendSuite backends;
  int workers = 2;
  /// Used when a create request carries no seed.
  std::uint64_t default_seed = 0;
  /// Limit on both the decoded PNG bytes and its RGB pixel buffer.
  std::size_t max_image_bytes = kMaxImageBytes;
  agents::RetryPolicy retry;
  /// Defaults to a real sleep.
  agents::Sleeper sleeper;
};

/// Sessions, store and job runner behind the JSON API. Each operation
/// either returns the response document or throws Error / BadRequest.
class Service {
 public:
  /// Loads every session already in the store. Segments that were
  /// generating when the previous process died come back failed.
  explicit Service(ServiceOptions options);
  /// Drains the job queue.
  ~Service();

  nlohmann::json create_session(const nlohmann::json& body);
  /// Queues generation of segment `index`; the job status as queued.
  nlohmann::json generate(const std::string& id, int index);
  nlohmann::json jobs(const std::string& id) const;
  nlohmann::json feedback(const std::string& id, const nlohmann::json& body);
  nlohmann::json manifest(const std::string& id) const;
  nlohmann::json retry(const std::string& id, int index);
  nlohmann::json finalize(const std::string& id);
  nlohmann::json list() const;

  std::vector<std::uint8_t> frame_png(const std::string& id, int index, long long frame) const;
  std::vector<std::uint8_t> image_prompt_png(const std::string& id, int index) const;
  std::vector<std::uint8_t> final_frame_png(const std::string& id, long long frame) const;

  std::shared_ptr<session::Session> session(const std::string& id) const;
  SessionStore& store() noexcept { return store_; }
  void wait_idle() { runner_.wait_idle(); }

 private:
  void run_job(std::shared_ptr<session::Session> s, const agents::GenerationRequest& request, int index,
               std::size_t job);
  void update_job(std::size_t job, const std::function<void(JobStatus&)>& f);
  void configure(session::Session& s) const;
  Frame decode_image(const std::string& base64) const;

  ServiceOptions options_;
  SessionStore store_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<session::Session>> sessions_;
  mutable std::mutex jobs_mutex_;
  std::vector<JobStatus> jobs_;
  JobRunner runner_;  // last, so workers stop before the rest is destroyed
};

/// Registers every /api/v1 route on `server`.
void mount_api(httplib::Server& server, Service& service);
/// Serves the viewer bundle in `ui_dir` at /. False if it is not a directory.
bool mount_ui(httplib::Server& server, const std::filesystem::path& ui_dir);

}  // namespace pano::service
