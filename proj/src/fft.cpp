#include "vbjs/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <tuple>
#include <memory>
#include <mutex>
#include <utility>

namespace vbjs::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Owns an in-place plan and its aligned buffer for one (shape, direction).
class Plan {
 public:
  Plan(int rows, int cols, int sign) : size_(static_cast<std::size_t>(rows) * cols) {
    buf_ = fftw_alloc_complex(size_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW is row-major; a column-major rows x cols matrix is a row-major
    // cols x rows array, and the 2D DFT is symmetric in the two axes.
    if (cols == 1) {
      plan_ = fftw_plan_dft_1d(rows, buf_, buf_, sign, FFTW_ESTIMATE);
    } else {
      plan_ = fftw_plan_dft_2d(cols, rows, buf_, buf_, sign, FFTW_ESTIMATE);
    }
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void run(const Complex* in, Complex* out) {
    auto* b = reinterpret_cast<Complex*>(buf_);
    std::copy(in, in + size_, b);
    fftw_execute(plan_);
    std::copy(b, b + size_, out);
  }

 private:
  std::size_t size_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

Plan& plan_for(int rows, int cols, int sign) {
  thread_local std::map<std::tuple<int, int, int>, std::unique_ptr<Plan>> cache;
  auto key = std::make_tuple(rows, cols, sign);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Plan>(rows, cols, sign)).first;
  }
  return *it->second;
}

}  // namespace

CVector forward(const CVector& x) {
  CVector out(x.size());
  if (x.size() == 0) return out;
  plan_for(static_cast<int>(x.size()), 1, FFTW_FORWARD).run(x.data(), out.data());
  return out;
}

CVector backward(const CVector& x) {
  CVector out(x.size());
  if (x.size() == 0) return out;
  plan_for(static_cast<int>(x.size()), 1, FFTW_BACKWARD).run(x.data(), out.data());
  return out;
}

CMatrix forward2(const CMatrix& x) {
  CMatrix out(x.rows(), x.cols());
  if (x.size() == 0) return out;
  plan_for(static_cast<int>(x.rows()), static_cast<int>(x.cols()), FFTW_FORWARD)
      .run(x.data(), out.data());
  return out;
}

CMatrix backward2(const CMatrix& x) {
  CMatrix out(x.rows(), x.cols());
  if (x.size() == 0) return out;
  plan_for(static_cast<int>(x.rows()), static_cast<int>(x.cols()), FFTW_BACKWARD)
      .run(x.data(), out.data());
  return out;
}

}  // namespace vbjs::fft
