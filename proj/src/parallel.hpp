#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace kk::detail {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

// Runs fn(i, out) for i in [0, count) on a small pool; results merge in index order,
// so the outcome does not depend on the worker count.
template <class T, class Fn>
std::vector<T> run_indexed(long count, int workers, Fn&& fn) {
  std::vector<T> parts(static_cast<std::size_t>(count));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (long i; !failed && (i = next++) < count;) {
      try {
        fn(i, parts[static_cast<std::size_t>(i)]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int n = static_cast<int>(std::min<long>(workers, count));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return parts;
}

}  // namespace kk::detail
