#pragma once

/// \file spectral.hpp
/// \brief Ring-wise real FFTs on the polar grid.
///
/// Coefficients follow the unscaled forward convention of Eigen's FFT:
/// f_hat[k] = sum_j f_j exp(-i k theta_j), k = 0..n/2, and the inverse
/// divides by n.

#include "navslip/geometry.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <span>
#include <vector>

namespace navslip {

using cplx = std::complex<double>;

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return e;
  }();
  return engine;
}
}  // namespace detail

/// Half spectrum per ring, ring-major: modes(j, k) for k = 0..n_theta/2.
class ModeField {
 public:
  ModeField() = default;
  ModeField(int n_r, int n_modes) : n_r_(n_r), n_modes_(n_modes), data_(n_r * n_modes) {}

  int n_r() const { return n_r_; }
  int n_modes() const { return n_modes_; }
  cplx& operator()(int j, int k) { return data_[static_cast<std::size_t>(j) * n_modes_ + k]; }
  const cplx& operator()(int j, int k) const {
    return data_[static_cast<std::size_t>(j) * n_modes_ + k];
  }
  std::span<cplx> ring(int j) { return {data_.data() + static_cast<std::size_t>(j) * n_modes_, static_cast<std::size_t>(n_modes_)}; }
  std::span<const cplx> ring(int j) const {
    return {data_.data() + static_cast<std::size_t>(j) * n_modes_, static_cast<std::size_t>(n_modes_)};
  }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

 private:
  int n_r_ = 0;
  int n_modes_ = 0;
  std::vector<cplx> data_;
};

inline std::vector<cplx> ring_forward(std::span<const double> ring) {
  std::vector<double> in(ring.begin(), ring.end());
  std::vector<cplx> out;
  detail::fft_engine().fwd(out, in);
  return out;
}

inline std::vector<double> ring_inverse(std::span<const cplx> modes, int n_theta) {
  std::vector<cplx> in(modes.begin(), modes.end());
  in.resize(n_theta / 2 + 1);
  // The Nyquist and mean coefficients of a real signal are real.
  in.front().imag(0.0);
  in.back().imag(0.0);
  std::vector<double> out;
  detail::fft_engine().inv(out, in, n_theta);
  return out;
}

inline ModeField to_modes(const PolarGrid& grid, std::span<const double> values) {
  ModeField m(grid.n_r(), grid.n_modes());
  const auto nt = static_cast<std::size_t>(grid.n_theta());
  for (int j = 0; j < grid.n_r(); ++j) {
    auto ring = ring_forward(values.subspan(j * nt, nt));
    std::copy(ring.begin(), ring.end(), m.ring(j).begin());
  }
  return m;
}

inline std::vector<double> from_modes(const PolarGrid& grid, const ModeField& m) {
  std::vector<double> out(grid.size());
  for (int j = 0; j < grid.n_r(); ++j) {
    auto ring = ring_inverse(m.ring(j), grid.n_theta());
    std::copy(ring.begin(), ring.end(), out.begin() + static_cast<std::ptrdiff_t>(j) * grid.n_theta());
  }
  return out;
}

/// Spectral angular derivative of one ring. Odd orders drop the Nyquist mode.
inline std::vector<double> ring_angular_derivative(std::span<const double> ring, int order = 1) {
  const int n = static_cast<int>(ring.size());
  auto modes = ring_forward(ring);
  const int nyq = n / 2;
  for (int k = 0; k <= nyq; ++k) {
    cplx factor = std::pow(cplx(0.0, static_cast<double>(k)), order);
    if (k == nyq && order % 2 == 1) factor = 0.0;
    modes[k] *= factor;
  }
  return ring_inverse(modes, n);
}

/// Zero the upper third of the angular spectrum (2/3 rule).
inline void dealias(ModeField& m, int n_theta) {
  const int kmax = n_theta / 3;
  for (int j = 0; j < m.n_r(); ++j) {
    for (int k = kmax + 1; k < m.n_modes(); ++k) m(j, k) = 0.0;
  }
}

/// Pole filter: ring j keeps modes k <= pi (j + 1/2), i.e. angular spacing no
/// finer than dr. A smooth field has mode k of size r^k there, so the dropped
/// part is far below the truncation error, while explicit RK2 advection of
/// the unresolved modes on the inner rings grows without bound.
inline void pole_filter(ModeField& m) {
  for (int j = 0; j < m.n_r(); ++j) {
    const int kmax = static_cast<int>(std::floor(kPi * (j + 0.5)));
    for (int k = kmax + 1; k < m.n_modes(); ++k) m(j, k) = 0.0;
  }
}

}  // namespace navslip
