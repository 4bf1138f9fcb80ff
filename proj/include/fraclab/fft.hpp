#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fraclab::fft {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized forward DFT of a real array laid out row-major on a
/// `points`^dim grid (dim 1 or 2).
Spectrum forward(std::span<const double> values, int dim, std::size_t points);

/// Inverse DFT (scaled by 1/points^dim) returning the real part. When
/// `max_imag` is given it receives the largest absolute imaginary residue.
std::vector<double> inverse_real(Spectrum spectrum, int dim, std::size_t points,
                                 double* max_imag = nullptr);

/// Signed integer mode for FFT slot i: 0, 1, ..., P/2-1, -P/2, ..., -1.
inline long mode_index(std::size_t i, std::size_t points) {
  const auto signed_i = static_cast<long>(i);
  const auto p = static_cast<long>(points);
  return signed_i < p / 2 ? signed_i : signed_i - p;
}

/// Angular wavenumbers 2 pi m / length in FFT slot order.
std::vector<double> wavenumbers(std::size_t points, double length);

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace fraclab::fft
