#include "pano/service/jobs.hpp"

#include "pano/core/error.hpp"

namespace pano::service {

std::string_view to_string(JobPhase phase) noexcept {
  switch (phase) {
    case JobPhase::queued: return "queued";
    case JobPhase::running: return "running";
    case JobPhase::done: return "done";
    case JobPhase::error: return "error";
  }
  return "?";
}

JobRunner::JobRunner(int workers) {
  if (workers < 1) throw Error(Errc::invalid_parameter, "job runner needs at least one worker");
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { work(); });
}

JobRunner::~JobRunner() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void JobRunner::submit(std::function<void()> job) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(job));
  }
  wake_.notify_one();
}

void JobRunner::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return queue_.empty() && running_ == 0; });
}

void JobRunner::work() {
  std::unique_lock lock(mutex_);
  for (;;) {
    wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
    if (queue_.empty()) return;
    auto job = std::move(queue_.front());
    queue_.pop_front();
    ++running_;
    lock.unlock();
    job();  // jobs report their own failures
    lock.lock();
    --running_;
    if (queue_.empty() && running_ == 0) idle_.notify_all();
  }
}

}  // namespace pano::service
