#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pano::service {

enum class JobPhase { queued, running, done, error };

std::string_view to_string(JobPhase phase) noexcept;

struct JobStatus {
  std::string session_id;
  int segment_index = 0;
  JobPhase phase = JobPhase::queued;
  std::string error_message;
  std::size_t progress_frames = 0;
  std::size_t expected_frames = 0;
};

/// Fixed pool of workers draining one FIFO queue.
class JobRunner {
 public:
  explicit JobRunner(int workers = 2);
  /// Finishes queued work, then joins.
  ~JobRunner();

  JobRunner(const JobRunner&) = delete;
  JobRunner& operator=(const JobRunner&) = delete;

  void submit(std::function<void()> job);
  /// Blocks until the queue is empty and no job is running.
  void wait_idle();

 private:
  void work();

  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::deque<std::function<void()>> queue_;
  int running_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace pano::service
