#include "fraclab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace fraclab::fft {
namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex, FftwFree>;

Buffer allocate(std::size_t n) {
  auto* raw = fftw_alloc_complex(n);
  if (raw == nullptr) {
    throw std::bad_alloc();
  }
  return Buffer(raw);
}

// Plans are created once per (dim, points, sign) on fftw_malloc'd scratch and
// executed through the new-array interface, which is thread-safe. FFTW_ESTIMATE
// keeps plan selection (and therefore rounding) independent of timing.
fftw_plan cached_plan(int dim, std::size_t points, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(dim, points, sign);
  if (auto it = plans.find(key); it != plans.end()) {
    return it->second;
  }
  const std::size_t total = dim == 1 ? points : points * points;
  Buffer in = allocate(total);
  Buffer out = allocate(total);
  const int n = static_cast<int>(points);
  fftw_plan plan = dim == 1
                       ? fftw_plan_dft_1d(n, in.get(), out.get(), sign, FFTW_ESTIMATE)
                       : fftw_plan_dft_2d(n, n, in.get(), out.get(), sign, FFTW_ESTIMATE);
  if (plan == nullptr) {
    throw std::runtime_error("fft: plan creation failed");
  }
  plans.emplace(key, plan);
  return plan;
}

std::size_t total_size(int dim, std::size_t points) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("fft: dim must be 1 or 2");
  }
  return dim == 1 ? points : points * points;
}

}  // namespace

Spectrum forward(std::span<const double> values, int dim, std::size_t points) {
  const std::size_t total = total_size(dim, points);
  if (values.size() != total) {
    throw std::invalid_argument("fft::forward: size does not match grid");
  }
  Buffer in = allocate(total);
  Buffer out = allocate(total);
  for (std::size_t i = 0; i < total; ++i) {
    in.get()[i][0] = values[i];
    in.get()[i][1] = 0.0;
  }
  fftw_execute_dft(cached_plan(dim, points, FFTW_FORWARD), in.get(), out.get());
  Spectrum result(total);
  for (std::size_t i = 0; i < total; ++i) {
    result[i] = {out.get()[i][0], out.get()[i][1]};
  }
  return result;
}

std::vector<double> inverse_real(Spectrum spectrum, int dim, std::size_t points, double* max_imag) {
  const std::size_t total = total_size(dim, points);
  if (spectrum.size() != total) {
    throw std::invalid_argument("fft::inverse_real: size does not match grid");
  }
  Buffer in = allocate(total);
  Buffer out = allocate(total);
  for (std::size_t i = 0; i < total; ++i) {
    in.get()[i][0] = spectrum[i].real();
    in.get()[i][1] = spectrum[i].imag();
  }
  fftw_execute_dft(cached_plan(dim, points, FFTW_BACKWARD), in.get(), out.get());
  const double scale = 1.0 / static_cast<double>(total);
  std::vector<double> result(total);
  double worst = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    result[i] = out.get()[i][0] * scale;
    worst = std::max(worst, std::abs(out.get()[i][1] * scale));
  }
  if (max_imag != nullptr) {
    *max_imag = worst;
  }
  return result;
}

std::vector<double> wavenumbers(std::size_t points, double length) {
  std::vector<double> xi(points);
  for (std::size_t i = 0; i < points; ++i) {
    xi[i] = 2.0 * std::numbers::pi * static_cast<double>(mode_index(i, points)) / length;
  }
  return xi;
}

}  // namespace fraclab::fft
