#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>

namespace nlps {

using Complex = std::complex<double>;

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const noexcept { fftw_destroy_plan(plan); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW's planner is not thread-safe; plan execution on new arrays is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline fftw_plan cached_plan(std::size_t size, int sign) {
  static std::map<std::pair<std::size_t, int>, PlanHandle> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(size, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second.get();
  // Planned in place: new-array execution must match the plan's in-place-ness.
  auto* buffer = fftw_alloc_complex(size);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(size), buffer, buffer, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buffer);
  if (!plan) throw std::runtime_error("fft: planner failed");
  cache.emplace(key, PlanHandle(plan));
  return plan;
}

inline void execute(std::span<Complex> data, int sign) {
  if (data.empty()) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(data.size(), sign), ptr, ptr);
}

}  // namespace detail

/// In-place forward DFT, X_k = sum_n x_n exp(-2 pi i k n / N). Unnormalized.
inline void fft_forward(std::span<Complex> data) { detail::execute(data, FFTW_FORWARD); }

/// In-place inverse DFT including the 1/N factor, so ifft(fft(x)) == x.
inline void fft_inverse(std::span<Complex> data) {
  detail::execute(data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

/// Angular frequency (rad per unit time) of DFT bin k for N points at sample spacing dt.
inline double bin_angular_frequency(std::size_t k, std::size_t n, double dt) {
  const auto signed_k = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * 3.14159265358979323846 * signed_k / (static_cast<double>(n) * dt);
}

}  // namespace nlps
