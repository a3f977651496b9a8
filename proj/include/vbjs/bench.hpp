#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace vbjs::bench {

struct Timing {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> samples;  // seconds
};

/// Wall clock around fn only, `reps` repetitions.
Timing time_it(const std::function<void()>& fn, int reps = 5);

double median(std::vector<double> v);

/// fn(0..n-1) on up to `workers` threads. Results come back in index order
/// regardless of completion order; the lowest-index exception is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int workers, F&& fn) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errs(n);
  auto run = [&](std::size_t i) {
    try {
      out[i] = fn(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t w = std::min<std::size_t>(workers, n);
    for (std::size_t t = 0; t < w; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < n;) run(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Worker count for --parallel: 0 means hardware concurrency.
int resolve_workers(int requested);

}  // namespace vbjs::bench
