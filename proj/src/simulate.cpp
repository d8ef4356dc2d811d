#include "lvp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lvp/quad.hpp"

namespace lvp {

void SimulationPlan::validate() const {
  if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
  if (!(t_end > 0.0 && t_end <= 1.0)) throw std::invalid_argument("t_end must lie in (0, 1]");
  if (small_jump_cutoff < 0.0) throw std::invalid_argument("small-jump cutoff must be positive");
  if (const auto* e = std::get_if<EulerChainScheme>(&scheme)) {
    if (!(e->dt > 0.0)) throw std::invalid_argument("EulerChain step must be positive");
    if (e->dt > t_end / 50.0 * (1.0 + 1e-12))
      throw std::invalid_argument("EulerChain step must not exceed t_end / 50");
  }
}

std::mt19937_64 path_stream(std::uint64_t seed, long path) {
  const auto p = static_cast<std::uint64_t>(path);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
  return std::mt19937_64(seq);
}

JumpSampler::JumpSampler(const JumpMeasure& nu, double cutoff) : cutoff_(cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("jump cutoff must be positive");
  variance_ = nu.second_moment(cutoff);
  if (nu.is_atomic()) {
    double acc = 0.0;
    for (auto [u, m] : nu.atoms(cutoff, std::numeric_limits<double>::infinity())) {
      if (m <= 0.0) continue;
      acc += m;
      atom_u_.push_back(u);
      atom_cdf_.push_back(acc);
    }
    for (double& c : atom_cdf_) c /= acc;
    rate_ = 2.0 * acc;
    return;
  }
  rate_ = nu.tail(cutoff);
  if (rate_ <= 0.0) return;
  const double step = std::log(10.0) / 40.0;
  const double top = std::log(std::max(cutoff * 1e8, 1e8));
  for (double lv = std::log(cutoff); lv < top; lv += step) {
    double tl = 0.0;
    try {
      tl = nu.tail(std::exp(lv));
    } catch (const quad::QuadratureError&) {
      break;  // far tail: the power-law extension takes over
    }
    if (!(tl > 0.0)) break;
    log_v_.push_back(lv);
    log_tail_.push_back(std::log(tl));
    if (tl < 1e-14 * rate_) break;
  }
  const size_t n = log_v_.size();
  if (n >= 2)
    top_slope_ = (log_tail_[n - 1] - log_tail_[n - 2]) / (log_v_[n - 1] - log_v_[n - 2]);
  if (!(top_slope_ < 0.0)) top_slope_ = -1.0;
}

double JumpSampler::draw(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
  const double w = unif(rng);
  if (!atom_u_.empty()) {
    const auto it = std::upper_bound(atom_cdf_.begin(), atom_cdf_.end(), w);
    const size_t k = std::min(static_cast<size_t>(it - atom_cdf_.begin()), atom_u_.size() - 1);
    return sign * atom_u_[k];
  }
  // Invert the tail: find v with tail(v) = (1 - w) tail(cutoff).
  const double target = std::log1p(-w) + log_tail_.front();
  if (target <= log_tail_.back())
    return sign * std::exp(log_v_.back() + (target - log_tail_.back()) / top_slope_);
  const auto it = std::lower_bound(log_tail_.begin(), log_tail_.end(), target, std::greater<>());
  const size_t k = std::max<size_t>(static_cast<size_t>(it - log_tail_.begin()), 1);
  const double f = (target - log_tail_[k - 1]) / (log_tail_[k] - log_tail_[k - 1]);
  return sign * std::exp(log_v_[k - 1] + f * (log_v_[k] - log_v_[k - 1]));
}

double JumpSampler::increment(std::mt19937_64& rng, double dt, double intensity) const {
  double x = 0.0;
  if (rate_ > 0.0) {
    std::poisson_distribution<long> count(rate_ * dt * intensity);
    const long jumps = count(rng);
    for (long j = 0; j < jumps; ++j) x += draw(rng);
  }
  if (variance_ > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance_ * dt * intensity));
    x += normal(rng);
  }
  return x;
}

double stable_variate(double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
  std::exponential_distribution<double> expo(1.0);
  const double v = unif(rng);
  const double w = expo(rng);
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

namespace {

// Increments of the base process over arbitrary time steps.
class BaseStepper {
 public:
  BaseStepper(const JumpMeasure& mu, double cutoff, double horizon, double max_rate) {
    if (const auto* s = std::get_if<Stable>(&mu.spec()); s && !mu.weighted()) {
      stable_ = *s;
      exact_ = true;
      return;
    }
    jumps_ = JumpSampler(mu, cutoff);
    if (jumps_.rate() * horizon > max_rate) {
      double v = cutoff;
      while (mu.tail(v) * horizon > max_rate) v *= 2.0;
      std::ostringstream os;
      os << "small-jump cutoff " << cutoff << " gives " << jumps_.rate() * horizon
         << " expected jumps per path; try a cutoff of at least " << v;
      throw SimulationError(os.str());
    }
  }

  double step(std::mt19937_64& rng, double dt) const {
    if (exact_)
      return std::pow(stable_.scale * dt, 1.0 / stable_.alpha) * stable_variate(stable_.alpha, rng);
    return jumps_.increment(rng, dt);
  }

 private:
  bool exact_ = false;
  Stable stable_;
  JumpSampler jumps_;
};

double default_cutoff(const JumpMeasure& mu, const SimulationPlan& plan) {
  if (plan.small_jump_cutoff > 0.0) return plan.small_jump_cutoff;
  return 0.01 / scaling_rho(mu, plan.t_end);
}

}  // namespace

std::vector<double> sample_base(const JumpMeasure& mu, const SimulationPlan& plan) {
  plan.validate();
  const BaseStepper base(mu, default_cutoff(mu, plan), plan.t_end, plan.max_rate);
  std::vector<double> out(static_cast<size_t>(plan.n_paths));
  for (long i = 0; i < plan.n_paths; ++i) {
    auto rng = path_stream(plan.rng_seed, i);
    out[static_cast<size_t>(i)] = plan.x0 + base.step(rng, plan.t_end);
  }
  return out;
}

std::vector<double> sample_perturbed(const ModelSpec& model, const SimulationPlan& plan,
                                     ThinningStats* stats) {
  plan.validate();
  if (model.pert.is_zero()) return sample_base(model.base, plan);
  const double cutoff = default_cutoff(model.base, plan);
  const BaseStepper base(model.base, cutoff, plan.t_end, plan.max_rate);
  std::vector<double> out(static_cast<size_t>(plan.n_paths));

  if (std::holds_alternative<ThinningScheme>(plan.scheme)) {
    if (model.pert_report.divergent_regime)
      throw SimulationError("thinning needs a finite perturbation intensity; use EulerChain");
    const double c = model.pert.envelope_c, eps = model.pert.envelope_eps;
    auto envelope = [&](double u) { return c * std::min(std::pow(std::abs(u), eps), 1.0); };
    // Jumps this small carry no usable intensity for a finite envelope.
    const JumpSampler stream(model.base.reweighted(cap_power(eps, c)), 1e-6 * cutoff);
    ThinningStats local;
    for (long i = 0; i < plan.n_paths; ++i) {
      auto rng = path_stream(plan.rng_seed, i);
      std::exponential_distribution<double> gap(stream.rate());
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double x = plan.x0, now = 0.0;
      while (true) {
        const double next = now + gap(rng);
        if (next >= plan.t_end) break;
        x += base.step(rng, next - now);
        now = next;
        const double u = stream.draw(rng);
        ++local.proposals;
        if (unif(rng) * envelope(u) < model.pert.m(x, u)) {
          x += u;
          ++local.accepted;
        }
      }
      x += base.step(rng, plan.t_end - now);
      out[static_cast<size_t>(i)] = x;
    }
    if (stats) *stats = local;
    return out;
  }

  const auto* euler = std::get_if<EulerChainScheme>(&plan.scheme);
  if (!euler) throw SimulationError("a perturbed model needs the Thinning or EulerChain scheme");
  std::vector<JumpSampler> terms;
  double peak = 0.0;
  for (const auto& term : model.pert.terms) {
    terms.emplace_back(model.base.reweighted(term.k), cutoff);
    peak += terms.back().rate();
  }
  if (peak * plan.t_end * model.pert.envelope_c > plan.max_rate)
    throw SimulationError("perturbation jump rate over budget; raise the small-jump cutoff");
  const long steps = static_cast<long>(std::ceil(plan.t_end / euler->dt - 1e-9));
  const double dt = plan.t_end / static_cast<double>(steps);
  for (long i = 0; i < plan.n_paths; ++i) {
    auto rng = path_stream(plan.rng_seed, i);
    double x = plan.x0;
    for (long k = 0; k < steps; ++k) {
      double dx = base.step(rng, dt);
      for (size_t l = 0; l < terms.size(); ++l) {
        const double a = model.pert.terms[l].a(x);
        if (a < 0.0) throw SimulationError("negative perturbation coefficient");
        if (a > 0.0) dx += terms[l].increment(rng, dt, a);
      }
      x += dx;
    }
    out[static_cast<size_t>(i)] = x;
  }
  return out;
}

DensityComparison compare_density(const std::vector<double>& samples, const KernelGrid& p,
                                  double x0) {
  if (samples.empty()) throw std::invalid_argument("no samples to compare");
  const int row = std::clamp(static_cast<int>(std::lround((x0 - p.x.start) / p.x.step)), 0,
                             p.x.size - 1);
  const int n = p.y.size;
  const double h = p.y.step;
  const double lo = p.y.start - 0.5 * h;
  // Cell-integrated CDF at the cell edges lo + j h.
  std::vector<double> cdf(static_cast<size_t>(n) + 1, 0.0);
  for (int j = 0; j < n; ++j)
    cdf[static_cast<size_t>(j) + 1] = cdf[static_cast<size_t>(j)] + p.values(row, j) * h;
  const double total = cdf.back();
  const double left = p.period > 0.0 ? 0.0 : 0.5 * std::max(0.0, 1.0 - total);
  const double norm = p.period > 0.0 ? total : 1.0;
  auto model_cdf = [&](double y) {
    const double s = (y - lo) / h;
    if (s <= 0.0) return left / norm;
    if (s >= n) return (left + total) / norm;
    const int j = static_cast<int>(s);
    const double f = s - j;
    return (left + cdf[static_cast<size_t>(j)] + f * (cdf[static_cast<size_t>(j) + 1] -
                                                      cdf[static_cast<size_t>(j)])) / norm;
  };

  std::vector<double> ys(samples);
  if (p.period > 0.0)
    for (double& y : ys) y = lo + std::fmod(std::fmod(y - lo, p.period) + p.period, p.period);
  std::sort(ys.begin(), ys.end());
  const double N = static_cast<double>(ys.size());
  DensityComparison out;
  out.samples = static_cast<long>(ys.size());
  out.ks_radius = 1.36 / std::sqrt(N);
  std::vector<double> counts(static_cast<size_t>(n), 0.0);
  for (size_t k = 0; k < ys.size(); ++k) {
    const double F = model_cdf(ys[k]);
    out.ks_distance = std::max({out.ks_distance, std::abs(F - k / N), std::abs((k + 1) / N - F)});
    const long j = static_cast<long>(std::floor((ys[k] - lo) / h));
    if (j >= 0 && j < n) counts[static_cast<size_t>(j)] += 1.0;
  }
  for (int j = 0; j < n; ++j)
    out.l1_distance += std::abs(counts[static_cast<size_t>(j)] / (N * h) - p.values(row, j) / norm) * h;
  return out;
}

}  // namespace lvp
