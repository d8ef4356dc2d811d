#include "lvp/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lvp {

double ModelSpec::delta() const {
  if (series.delta_hint > 0.0) return series.delta_hint;
  const double d = pert.envelope_eps / (2.0 * scaling.sigma_hat);
  return std::clamp(d, 0.05, 1.0);
}

std::vector<JumpMeasure> ModelSpec::term_measures() const {
  std::vector<JumpMeasure> out{base};
  for (const auto& term : pert.terms) out.push_back(base.reweighted(term.k));
  return out;
}

ModelSpec make_model(JumpMeasure base, PerturbationSpec pert, DomainSpec domain,
                     SeriesParams series, Freeze freeze) {
  base.validate();
  if (!(domain.period > 0.0) || domain.n <= 0 || domain.n % 2)
    throw std::invalid_argument("domain needs a positive period and an even grid size");
  ModelSpec model{std::move(base), std::move(pert), {}, series, freeze, domain, {}, {}};
  model.a1 = check_A1(model.base);
  if (!model.a1.pass) throw std::invalid_argument("condition A1 fails for the base measure");
  model.pert_report = check_perturbation(model.pert, model.base, SamplePlan::standard());
  if (!model.pert_report.pass)
    throw std::invalid_argument("perturbation violates symmetry or its envelope");
  model.scaling = make_scaling_table(model.base, default_sigma_nodes());
  return model;
}

namespace {

// Lagrange stencil in u = sqrt(s / T) on the uniform nodes m / M.
struct Stencil {
  int first = 0;
  double w[4] = {0, 0, 0, 0};
};

Stencil stencil(double s, double T, int M) {
  const double u = std::sqrt(std::clamp(s / T, 0.0, 1.0)) * M;
  Stencil st;
  st.first = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, M - 3);
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (u - (st.first + b)) / static_cast<double>(a - b);
    st.w[a] = w;
  }
  return st;
}

double relative_change(const BlockKernel& a, const BlockKernel& b) {
  const double scale = b.max_abs();
  if (scale == 0.0) return 0.0;
  return (a - b).max_abs() / scale;
}

}  // namespace

ParametrixSolver::ParametrixSolver(ModelSpec model, double horizon, SolverOptions opts)
    : model_(std::move(model)), opts_(std::move(opts)), T_(horizon) {
  if (!(T_ > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (opts_.time_nodes < 4) throw std::invalid_argument("need at least 4 time nodes");
  const auto& dom = model_.domain;
  std::vector<std::function<double(double)>> coeffs;
  for (const auto& term : model_.pert.terms) coeffs.push_back(term.a);
  layout_ = BlockLayout::for_coefficients(dom.n, dom.period, coeffs);
  delta_ = model_.delta();

  const int n = dom.n;
  q_.resize(n);
  for (int k = 0; k <= n / 2; ++k) {
    const double v = model_.base.q(layout_.frequency(k));
    q_(k) = v;
    if (k > 0 && k < n / 2) q_(n - k) = v;
  }
  V_ = BlockKernel(layout_);
  for (const auto& term : model_.pert.terms) {
    const JumpMeasure nu = model_.base.reweighted(term.k);
    Eigen::VectorXd qt(n);
    for (int k = 0; k <= n / 2; ++k) {
      const double v = -nu.q(layout_.frequency(k));
      qt(k) = v;
      if (k > 0 && k < n / 2) qt(n - k) = v;
    }
    qterm_.push_back(qt);
    amul_.push_back(BlockKernel::multiplication(layout_, term.a));
    V_.add_scaled(1.0, nullptr, amul_.back(), &qterm_.back());
  }
  const Eigen::VectorXd minus_q = -q_;
  generator_ = BlockKernel::identity(layout_).scaled(&minus_q, nullptr);
  generator_ += V_;

  const int M = opts_.time_nodes;
  for (int m = 0; m <= M; ++m) s_nodes_.push_back(T_ * std::pow(static_cast<double>(m) / M, 2));
  node_quad_.assign(static_cast<size_t>(M + 1), opts_.quad_nodes);

  std::vector<double> diag_times = opts_.diag_times;
  diag_times.push_back(T_);
  for (double t : diag_times) {
    if (t > T_ * (1 + 1e-12) || !(t > 0.0))
      throw std::invalid_argument("diagnostic times must lie in (0, horizon]");
    SeriesDiagnostics d;
    d.t = t;
    measure_term(d, phi_block(t));
    time_diag_[t] = d;
  }
  auto finish = [&](int k, bool converged) {
    terms_ = k;
    for (auto& [t, d] : time_diag_) {
      d.truncation_index = k;
      d.converged = converged;
      const double last = d.norms.back();
      const double r = d.ratios.empty() ? 0.0 : d.ratios.back();
      d.truncation_bound = (r < 1.0) ? last * (r / (1.0 - r)) : INFINITY;
      if (last == 0.0) d.truncation_bound = 0.0;
    }
    horizon_diag_ = time_diag_.at(T_);
  };

  const double phi_norm = time_diag_.at(T_).norms.front();
  if (model_.pert.is_zero() || phi_norm == 0.0 || model_.series.k_max <= 1) {
    finish(1, model_.pert.is_zero() || phi_norm == 0.0);
    return;
  }

  // k = 2 from the exact Phi; node sizes settle here and are reused.
  std::vector<BlockKernel> prev(static_cast<size_t>(M + 1), BlockKernel(layout_));
  std::map<double, int> diag_quad;
  auto adaptive = [&](double s, int start, const std::vector<BlockKernel>* table, int& used) {
    int J = start;
    BlockKernel a = next_term(s, J, table);
    while (2 * J <= opts_.max_quad_nodes) {
      BlockKernel b = next_term(s, 2 * J, table);
      const double change = relative_change(a, b);
      a = std::move(b);
      J *= 2;
      if (change < opts_.quad_tol) break;
    }
    used = J;
    return a;
  };
  for (int m = 1; m <= M; ++m)
    prev[static_cast<size_t>(m)] = next_term(s_nodes_[static_cast<size_t>(m)], 0, nullptr);
  for (auto& [t, d] : time_diag_) measure_term(d, next_term(t, 0, nullptr));
  tail_ = prev;

  auto done = [&](int k) {
    const auto& d = time_diag_.at(T_);
    const double last = d.norms.back();
    const double ratio = d.ratios.back();
    return (last < model_.series.tol * phi_norm && ratio < 1.0) || k >= model_.series.k_max;
  };

  int k = 2;
  while (!done(k)) {
    ++k;
    // Node sizes settle on the first table-based term and are reused.
    const bool settle = (k == 3);
    std::vector<BlockKernel> cur(static_cast<size_t>(M + 1), BlockKernel(layout_));
    for (int m = 1; m <= M; ++m) {
      auto& J = node_quad_[static_cast<size_t>(m)];
      const double s = s_nodes_[static_cast<size_t>(m)];
      cur[static_cast<size_t>(m)] = settle ? adaptive(s, opts_.quad_nodes, &prev, J)
                                           : next_term(s, J, &prev);
    }
    for (auto& [t, d] : time_diag_) {
      int& J = diag_quad[t];
      measure_term(d, settle ? adaptive(t, opts_.quad_nodes, &prev, J) : next_term(t, J, &prev));
    }
    for (int m = 1; m <= M; ++m) tail_[static_cast<size_t>(m)] += cur[static_cast<size_t>(m)];
    prev = std::move(cur);
  }
  const auto& hd = time_diag_.at(T_);
  const bool small = hd.norms.back() < model_.series.tol * phi_norm;
  const bool contracting = hd.ratios.back() < 1.0;
  finish(k, small || contracting);
  if (!contracting && !small)
    throw NonConvergence("parametrix series does not contract at t = " + std::to_string(T_),
                         horizon_diag_);
}

UniformGrid ParametrixSolver::grid() const {
  return UniformGrid{-0.5 * layout_.period, layout_.step(), layout_.n};
}

const quad::Rule& ParametrixSolver::rule(int n) const {
  if (auto it = rules_.find(n); it != rules_.end()) return it->second;
  quad::Rule r = quad::gauss_jacobi01(n, delta_ - 1.0, delta_ - 1.0);
  for (size_t j = 0; j < r.nodes.size(); ++j) {
    const double x = r.nodes[j];
    r.weights[j] *= std::pow(x, 1.0 - delta_) * std::pow(1.0 - x, 1.0 - delta_);
  }
  return rules_.emplace(n, std::move(r)).first->second;
}

Eigen::VectorXd ParametrixSolver::decay(double tau) const {
  return (-tau * q_).array().exp().matrix();
}

BlockKernel ParametrixSolver::free_block(double t) const {
  const Eigen::VectorXd e = decay(t);
  return BlockKernel::identity(layout_).scaled(&e, nullptr);
}

BlockKernel ParametrixSolver::phi_block(double s) const {
  BlockKernel out(layout_);
  const Eigen::VectorXd e = decay(s);
  if (model_.freeze == Freeze::x) {
    out.add_scaled(1.0, nullptr, V_, &e);
  } else {
    for (size_t l = 0; l < amul_.size(); ++l) {
      const Eigen::VectorXd left = qterm_[l].cwiseProduct(e);
      out.add_scaled(1.0, &left, amul_[l], nullptr);
    }
  }
  return out;
}

BlockKernel ParametrixSolver::interpolate(const std::vector<BlockKernel>& table,
                                          double s) const {
  BlockKernel out(layout_);
  if (table.empty() || s <= 0.0) return out;
  const Stencil st = stencil(s, T_, opts_.time_nodes);
  for (int a = 0; a < 4; ++a)
    if (st.first + a > 0) out.axpy(st.w[a], table[static_cast<size_t>(st.first + a)]);
  return out;
}

BlockKernel ParametrixSolver::divided_difference(const BlockKernel& A, double s) const {
  // (A o D_s)_{ab} with D_s = int_0^s e^{-(s - tau) q_a} e^{-tau q_b} d tau.
  BlockKernel out = A;
  const int b = layout_.block_size();
  for (int c = 0; c < layout_.blocks; ++c) {
    auto& blk = out.block(c);
    for (int j = 0; j < b; ++j) {
      const double qb = q_(layout_.mode(c, j));
      for (int i = 0; i < b; ++i) {
        const double qa = q_(layout_.mode(c, i));
        const double lo = std::min(qa, qb), d = std::abs(qa - qb);
        const double f = d * s < 1e-300 ? s : -std::expm1(-s * d) / d;
        blk(i, j) *= std::exp(-s * lo) * f;
      }
    }
  }
  return out;
}

std::map<int, Eigen::VectorXd> ParametrixSolver::grouped_weights(
    double s, int nodes, bool reversed, const Eigen::VectorXd* factor) const {
  // sum_j w_j L_a(s r_j) e^{-s (1 - r_j) Q} grouped by table index; with
  // `reversed` the table is read at s (1 - r_j) and the decay uses s r_j.
  const quad::Rule& R = rule(nodes);
  std::map<int, Eigen::VectorXd> acc;
  for (size_t j = 0; j < R.nodes.size(); ++j) {
    const double r = R.nodes[j], w = R.weights[j];
    const double at = reversed ? s * (1.0 - r) : s * r;
    Eigen::VectorXd e = decay(s - at);
    if (factor) e = e.cwiseProduct(*factor);
    const Stencil st = stencil(at, T_, opts_.time_nodes);
    for (int a = 0; a < 4; ++a) {
      const int m = st.first + a;
      if (m == 0) continue;
      auto [it, fresh] = acc.try_emplace(m, Eigen::VectorXd::Zero(layout_.n));
      it->second += (w * st.w[a]) * e;
    }
  }
  return acc;
}

BlockKernel ParametrixSolver::next_term(double s, int nodes,
                                        const std::vector<BlockKernel>* table) const {
  BlockKernel out(layout_);
  if (model_.freeze == Freeze::x) {
    // V int_0^s e^{-(s - tau) Q} Phi^{*k}_tau d tau
    if (table == nullptr) return V_ * divided_difference(V_, s);
    BlockKernel S(layout_);
    for (const auto& [m, diag] : grouped_weights(s, nodes, false, nullptr))
      S.add_scaled(s, &diag, (*table)[static_cast<size_t>(m)], nullptr);
    return V_ * S;
  }
  // sum_l [int_0^s Phi^{*k}_{s - tau} C_l e^{-tau Q} d tau] D_l
  for (size_t l = 0; l < amul_.size(); ++l) {
    BlockKernel S(layout_);
    if (table == nullptr) {
      for (size_t l2 = 0; l2 < amul_.size(); ++l2) {
        BlockKernel inner = amul_[l2].scaled(nullptr, &qterm_[l]);
        inner = divided_difference(inner, s);
        S.add_scaled(1.0, &qterm_[l2], inner, nullptr);
      }
    } else {
      for (const auto& [m, diag] : grouped_weights(s, nodes, true, &qterm_[l]))
        S.add_scaled(s, nullptr, (*table)[static_cast<size_t>(m)], &diag);
    }
    out += S * amul_[l];
  }
  return out;
}

BlockKernel ParametrixSolver::psi_block(double s) const {
  if (s > T_ * (1 + 1e-12)) throw std::out_of_range("time beyond the solver horizon");
  BlockKernel out = phi_block(s);
  if (!tail_.empty()) out += interpolate(tail_, s);
  return out;
}

BlockKernel ParametrixSolver::correction_block(double t, int nodes) const {
  if (t > T_ * (1 + 1e-12)) throw std::out_of_range("time beyond the solver horizon");
  BlockKernel exact(layout_);
  if (t <= 0.0 || (terms_ == 1 && horizon_diag_.norms.front() == 0.0)) return exact;
  // Phi part integrates in closed form.
  if (model_.freeze == Freeze::x) {
    exact = divided_difference(V_, t);
  } else {
    const Eigen::VectorXd e = decay(t);
    for (size_t l = 0; l < amul_.size(); ++l) {
      const Eigen::VectorXd left = (t * qterm_[l]).cwiseProduct(e);
      exact.add_scaled(1.0, &left, amul_[l], nullptr);
    }
  }
  if (tail_.empty()) return exact;
  auto with = [&](int J) {
    BlockKernel acc = exact;
    for (const auto& [m, diag] : grouped_weights(t, J, false, nullptr))
      acc.add_scaled(t, &diag, tail_[static_cast<size_t>(m)], nullptr);
    return acc;
  };
  if (nodes > 0) return with(nodes);
  return with(correction_nodes(t));
}

int ParametrixSolver::correction_nodes(double t) const {
  if (tail_.empty()) return opts_.quad_nodes;
  int J = opts_.quad_nodes;
  auto with = [&](int n) {
    BlockKernel acc(layout_);
    for (const auto& [m, diag] : grouped_weights(t, n, false, nullptr))
      acc.add_scaled(t, &diag, tail_[static_cast<size_t>(m)], nullptr);
    return acc;
  };
  BlockKernel a = with(J);
  while (2 * J <= opts_.max_quad_nodes) {
    BlockKernel b = with(2 * J);
    const double change = (a - b).max_abs() / std::max(b.max_abs(), 1e-300);
    a = std::move(b);
    J *= 2;
    if (change < opts_.quad_tol) break;
  }
  return J;
}

BlockKernel ParametrixSolver::p_block(double t) const {
  BlockKernel out = free_block(t);
  out += correction_block(t);
  return out;
}

void ParametrixSolver::measure_term(SeriesDiagnostics& diag, const BlockKernel& term) const {
  const Eigen::MatrixXd A = term.to_physical();
  diag.norms.push_back(row_l1_norm(A));
  diag.sup_values.push_back(A.cwiseAbs().maxCoeff() / layout_.step());
  if (diag.norms.size() >= 2) {
    const double prev = diag.norms[diag.norms.size() - 2];
    diag.ratios.push_back(prev > 0.0 ? diag.norms.back() / prev : 0.0);
  }
}

const SeriesDiagnostics& ParametrixSolver::diagnostics_at(double t) const {
  for (const auto& [s, d] : time_diag_)
    if (std::abs(s - t) <= 1e-12 * std::max(1.0, t)) return d;
  throw std::out_of_range("no diagnostics recorded at t = " + std::to_string(t));
}

std::vector<double> ParametrixSolver::free_profile(double t) const {
  InversionOptions opts;
  opts.period = layout_.period;
  opts.assume_A1 = true;
  return fourier_invert_p0(model_.base, t, grid(), opts).value;
}

KernelGrid ParametrixSolver::to_grid(const BlockKernel& b, double t, Provenance prov) const {
  KernelGrid g;
  g.t = t;
  g.x = g.y = grid();
  g.values = b.to_physical() / layout_.step();
  g.provenance = prov;
  g.period = layout_.period;
  return g;
}

KernelGrid ParametrixSolver::p0(double t) const {
  const std::vector<double> prof = free_profile(t);
  const int n = layout_.n;
  KernelGrid g;
  g.t = t;
  g.x = g.y = grid();
  g.values.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      g.values(i, j) = prof[static_cast<size_t>(((j - i + n / 2) % n + n) % n)];
  g.provenance = Provenance::p0;
  g.period = layout_.period;
  return g;
}

KernelGrid ParametrixSolver::phi(double t) const {
  return to_grid(phi_block(t), t, Provenance::phi);
}

KernelGrid ParametrixSolver::psi(double t) const {
  return to_grid(psi_block(t), t, Provenance::psi);
}

namespace {

void clamp_negatives(KernelGrid& g) {
  const double mx = g.values.maxCoeff();
  g.min_value = g.values.minCoeff();
  g.negative_flag = g.min_value < -1e-6 * mx;
  int count = 0;
  for (Eigen::Index j = 0; j < g.values.cols(); ++j)
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
      double& v = g.values(i, j);
      if (v < 0.0 && v >= -1e-6 * mx) {
        v = 0.0;
        ++count;
      }
    }
  g.clamped = count;
  if (g.negative_flag) g.note = "negative values beyond -1e-6 max";
  else if (count > 0) g.note = "small negatives clamped";
}

}  // namespace

KernelGrid ParametrixSolver::p(double t) const {
  KernelGrid g = p0(t);
  g.values += correction_block(t).to_physical() / layout_.step();
  g.provenance = Provenance::p;
  g.err_est = horizon_diag_.truncation_bound;
  clamp_negatives(g);
  return g;
}

KernelGrid ParametrixSolver::p_eps(double t, double eps) const {
  KernelGrid g = p0(t + eps);
  const Eigen::VectorXd e = decay(eps);
  g.values += correction_block(t).scaled(&e, nullptr).to_physical() / layout_.step();
  g.t = t;
  g.provenance = Provenance::p_eps;
  g.note = "eps = " + std::to_string(eps);
  return g;
}

double levy_action(const JumpMeasure& nu, const SmoothFunction& g, double x, double split) {
  const double gx = g.f(x);
  const double g2 = g.d2 ? g.d2(x) : 0.0;
  const double taylor_below = 1e-3 * split;
  auto inner = [&](double u) {
    if (u < taylor_below && g.d2) return 0.5 * u * u * g2;
    return 0.5 * (g.f(x + u) + g.f(x - u)) - gx;
  };
  double acc = nu.integrate(inner, 0.0, split);
  if (g.period > 0.0) {
    // One period per piece keeps the oscillation resolved; the remainder
    // sees only the mean of g.
    const double U = split + 32.0 * g.period;
    for (double lo = split; lo < U; lo += g.period) acc += nu.integrate(inner, lo, lo + g.period);
    double avg = 0.0;
    const int samples = 512;
    for (int i = 0; i < samples; ++i) avg += g.f(x + g.period * i / samples);
    avg /= samples;
    acc += (avg - gx) * nu.tail(U);
  } else {
    const double U = 1e3 * (1.0 + split);
    acc += nu.integrate(inner, split, U);
    acc -= gx * nu.tail(U);
  }
  return acc;
}

double eval_Phi(const ModelSpec& model, const FreeKernelTable& table, double x, double y) {
  if (model.pert.is_zero()) return 0.0;
  const double rho = scaling_rho(model.base, table.t());
  SmoothFunction g;
  g.f = [&](double z) { return table.value(y - z); };
  g.d2 = [&](double z) { return table.d2(y - z); };
  g.period = table.period();
  double acc = 0.0;
  for (const auto& term : model.pert.terms) {
    const double coef = model.freeze == Freeze::x ? term.a(x) : term.a(y);
    if (coef == 0.0) continue;
    acc += coef * levy_action(model.base.reweighted(term.k), g, x, 1.0 / rho);
  }
  return acc;
}

KernelGrid phi_grid(const ParametrixSolver& solver, double t) { return solver.phi(t); }

BlowupFit phi_blowup(const ParametrixSolver& solver, const std::vector<double>& t_nodes) {
  BlowupFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double t : t_nodes) {
    const double nrm = row_l1_norm(solver.phi_block(t).to_physical());
    fit.t.push_back(t);
    fit.norms.push_back(nrm);
    const double lx = std::log(t), ly = std::log(nrm);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double n = static_cast<double>(t_nodes.size());
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.eta_hat = 1.0 + fit.exponent;
  return fit;
}

KernelGrid convolve_timespace(const KernelFamily& A, const KernelFamily& B, double t,
                              const QuadratureSpec& spec) {
  if (spec.nodes < 2) throw std::invalid_argument("time quadrature needs at least 2 nodes");
  if (!(t > 0.0)) throw std::invalid_argument("convolution time must be positive");
  const double d = spec.delta;
  auto with = [&](int J) {
    quad::Rule R = quad::gauss_jacobi01(J, d - 1.0, d - 1.0);
    KernelGrid out;
    for (size_t j = 0; j < R.nodes.size(); ++j) {
      const double r = R.nodes[j];
      const double w = R.weights[j] * std::pow(r, 1.0 - d) * std::pow(1.0 - r, 1.0 - d);
      const KernelGrid a = A(t * (1.0 - r));
      const KernelGrid b = B(t * r);
      if (a.y.size != b.x.size || std::abs(a.y.step - b.x.step) > 1e-12 * a.y.step ||
          std::abs(a.y.start - b.x.start) > 1e-9 * std::max(1.0, std::abs(a.y.start)))
        throw std::invalid_argument("time-space convolution: incompatible grids");
      if (j == 0) {
        out = a;
        out.y = b.y;
        out.values = Eigen::MatrixXd::Zero(a.values.rows(), b.values.cols());
      }
      out.values.noalias() += (w * t * a.y.step) * (a.values * b.values);
    }
    out.t = t;
    return out;
  };
  int J = spec.nodes;
  KernelGrid cur = with(J);
  while (2 * J <= spec.max_nodes) {
    KernelGrid next = with(2 * J);
    const double scale = next.values.cwiseAbs().maxCoeff();
    const double change = (next.values - cur.values).cwiseAbs().maxCoeff();
    cur = std::move(next);
    J *= 2;
    if (change <= spec.tol * scale) break;
  }
  return cur;
}

PsiResult psi_series(const ParametrixSolver& solver, double t) {
  PsiResult res;
  res.psi = solver.psi(t);
  try {
    res.diag = solver.diagnostics_at(t);
  } catch (const std::out_of_range&) {
    res.diag = solver.diagnostics();
  }
  return res;
}

KernelGrid assemble_p(const ParametrixSolver& solver, double t) { return solver.p(t); }

KernelGrid approx_kernel_p_eps(const ParametrixSolver& solver, double t, double eps) {
  return solver.p_eps(t, eps);
}

double residual_q_eps(const ParametrixSolver& solver, double t, double eps,
                      const std::function<double(double)>& f) {
  const double h = 1e-3 * t;
  if (t + h > solver.horizon()) throw std::out_of_range("residual needs t + h within the horizon");
  const int J = solver.correction_nodes(t);
  const Eigen::VectorXd e = solver.decay(eps);
  auto smoothed = [&](double s) {
    BlockKernel b = solver.free_block(s);
    b += solver.correction_block(s, J);
    return b.scaled(&e, nullptr);
  };
  BlockKernel R = solver.generator() * smoothed(t);
  BlockKernel dt = smoothed(t + h);
  dt -= smoothed(t - h);
  R.axpy(-1.0 / (2.0 * h), dt);
  const Eigen::MatrixXd A = R.to_physical();
  const UniformGrid g = solver.grid();
  Eigen::VectorXd fv(g.size);
  for (int i = 0; i < g.size; ++i) fv(i) = f(g.at(i));
  return (A * fv).cwiseAbs().maxCoeff();
}

}  // namespace lvp
