#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "lvp/measure.hpp"

namespace lvp::spectral {

using cplx = std::complex<double>;

/// Unnormalized strided batch DFT through a shared plan cache.
/// sign = -1 forward, +1 backward. Plan creation is serialized internally;
/// execution on distinct buffers is safe from several threads.
void dft(cplx* data, int n, int howmany, int stride, int dist, int sign);

inline void dft(std::vector<cplx>& v, int sign) {
  dft(v.data(), static_cast<int>(v.size()), 1, 1, 0, sign);
}

/// Smallest integer >= n of the form 2^a 3^b 5^c.
[[nodiscard]] long nice_size(long n);

/// Values of (1/P) sum_{|k omega| <= xi_max} g(k omega) e^{i k omega x_j}
/// at x_j = x0 + j P / M, j = 0..M-1, where omega = 2 pi / P. Modes beyond
/// the lattice Nyquist frequency are folded, so the result is the exact
/// periodic sum at the nodes. Requires g(-xi) = conj(g(xi)).
[[nodiscard]] std::vector<double> periodic_series(
    const std::function<cplx(double)>& g, double period, long M, double xi_max,
    double x0);

/// Characteristic exponent as a fast callable: closed form for plain stable
/// measures, otherwise a log-log cubic spline over [xi_lo, xi_hi] built from
/// direct evaluations, with power-law extension outside.
class Symbol {
 public:
  Symbol(const JumpMeasure& mu, double xi_lo, double xi_hi, int per_decade = 128);
  [[nodiscard]] double operator()(double xi) const;
  [[nodiscard]] bool exact() const { return exact_; }

 private:
  struct Spline;
  bool exact_ = false;
  double scale_ = 0.0, alpha_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  std::shared_ptr<const Spline> spline_;
};

}  // namespace lvp::spectral
