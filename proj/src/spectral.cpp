#include "lvp/spectral.hpp"

#include <fftw3.h>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace lvp::spectral {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int howmany, int stride, int dist, int sign) {
    const auto key = std::make_tuple(n, howmany, stride, dist, sign);
    std::lock_guard lock(mutex);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    // Plan on a scratch buffer; FFTW_UNALIGNED lets any buffer be executed.
    const long span = static_cast<long>(howmany - 1) * dist +
                      static_cast<long>(n - 1) * stride + 1;
    auto* scratch = fftw_alloc_complex(static_cast<size_t>(span));
    int dims[1] = {n};
    fftw_plan plan = fftw_plan_many_dft(
        1, dims, howmany, scratch, nullptr, stride, dist, scratch, nullptr,
        stride, dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw std::runtime_error("FFT plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dft(cplx* data, int n, int howmany, int stride, int dist, int sign) {
  if (n <= 0 || howmany <= 0) return;
  fftw_plan plan = cache().get(n, howmany, stride, dist, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, buf, buf);
}

long nice_size(long n) {
  if (n <= 1) return 1;
  for (long m = n;; ++m) {
    long r = m;
    for (long f : {2L, 3L, 5L})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

std::vector<double> periodic_series(const std::function<cplx(double)>& g,
                                    double period, long M, double xi_max,
                                    double x0) {
  const double omega = 2.0 * std::numbers::pi / period;
  const long K = static_cast<long>(std::floor(xi_max / omega));
  std::vector<cplx> bins(static_cast<size_t>(M), cplx(0.0));
  bins[0] += g(0.0);
  long pos = 1 % M, neg = (M - 1) % M;
  for (long k = 1; k <= K; ++k) {
    const double xi = k * omega;
    const cplx v = g(xi) * std::polar(1.0, xi * x0);
    bins[static_cast<size_t>(pos)] += v;
    bins[static_cast<size_t>(neg)] += std::conj(v);
    if (++pos == M) pos = 0;
    if (--neg < 0) neg = M - 1;
  }
  dft(bins, +1);
  std::vector<double> out(static_cast<size_t>(M));
  for (long j = 0; j < M; ++j) out[static_cast<size_t>(j)] = bins[static_cast<size_t>(j)].real() / period;
  return out;
}

struct Symbol::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> log_q;
  double log_lo, log_hi;
  double slope_lo, slope_hi;  // power-law extension exponents
  double q_lo, q_hi;
};

Symbol::Symbol(const JumpMeasure& mu, double xi_lo, double xi_hi, int per_decade) {
  if (const auto* s = std::get_if<Stable>(&mu.spec()); s && !mu.weighted()) {
    exact_ = true;
    scale_ = s->scale;
    alpha_ = s->alpha;
    return;
  }
  if (!(xi_lo > 0.0) || !(xi_hi > xi_lo))
    throw std::invalid_argument("Symbol: bad frequency range");
  lo_ = xi_lo;
  hi_ = xi_hi;
  const double a = std::log(xi_lo), b = std::log(xi_hi);
  const int n = std::max(8, static_cast<int>(std::ceil((b - a) / std::log(10.0) * per_decade)) + 1);
  const double h = (b - a) / (n - 1);
  std::vector<double> values(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double q = mu.q(std::exp(a + i * h));
    if (!(q > 0.0)) throw std::invalid_argument("Symbol: exponent vanishes on the tabulated range");
    values[static_cast<size_t>(i)] = std::log(q);
  }
  const double slope_lo = (values[1] - values[0]) / h;
  const double slope_hi = (values[n - 1] - values[n - 2]) / h;
  const double q_lo = std::exp(values.front()), q_hi = std::exp(values.back());
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(
      values.begin(), values.end(), a, h);
  spline_ = std::make_shared<const Spline>(
      Spline{std::move(spline), a, b, slope_lo, slope_hi, q_lo, q_hi});
}

double Symbol::operator()(double xi) const {
  const double ax = std::abs(xi);
  if (ax == 0.0) return 0.0;
  if (exact_) return scale_ * std::pow(ax, alpha_);
  const double lx = std::log(ax);
  const auto& s = *spline_;
  if (lx <= s.log_lo) return s.q_lo * std::exp(s.slope_lo * (lx - s.log_lo));
  if (lx >= s.log_hi) return s.q_hi * std::exp(s.slope_hi * (lx - s.log_hi));
  return std::exp(s.log_q(lx));
}

}  // namespace lvp::spectral
