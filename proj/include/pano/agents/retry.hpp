#pragma once

#include <chrono>
#include <functional>

#include "pano/core/error.hpp"

namespace pano::agents {

struct RetryPolicy {
  /// Retries after the first attempt; only transient errors are retried.
  int max_retries = 3;
  /// Delay before the first retry; doubles for each following one.
  std::chrono::milliseconds initial_delay{1000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper thread_sleeper();

template <class F>
auto with_retry(F&& attempt, const RetryPolicy& policy, const Sleeper& sleep) -> decltype(attempt()) {
  auto delay = policy.initial_delay;
  for (int retry = 0;; ++retry) {
    try {
      return attempt();
    } catch (const Error& e) {
      if (e.code() != Errc::transient || retry >= policy.max_retries) throw;
    }
    sleep(delay);
    delay *= 2;
  }
}

}  // namespace pano::agents
