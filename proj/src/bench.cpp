#include "vbjs/bench.hpp"

#include <algorithm>
#include <chrono>

namespace vbjs::bench {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Timing time_it(const std::function<void()>& fn, int reps) {
  Timing t;
  for (int r = 0; r < std::max(1, reps); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    t.samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  t.median = median(t.samples);
  t.min = *std::min_element(t.samples.begin(), t.samples.end());
  t.max = *std::max_element(t.samples.begin(), t.samples.end());
  return t;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

}  // namespace vbjs::bench
