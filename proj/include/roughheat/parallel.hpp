#pragma once
// Fan-out of independent jobs (seeds, levels) over a small thread pool.
// Results come back in job order, so reports do not depend on scheduling.

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

namespace roughheat {

/// hardware_concurrency, capped by ROUGHHEAT_THREADS when set (minimum 1).
unsigned worker_count();

/// Runs job(0..n-1) on up to worker_count() threads. The first exception
/// thrown by any job is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job);

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<std::optional<T>> slots(n);
  parallel_for(n, [&](std::size_t i) { slots[i].emplace(fn(i)); });
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace roughheat
