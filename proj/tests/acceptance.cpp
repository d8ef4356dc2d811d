// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-red 7,...] [--only 1,5,...]
//
// Exit status is zero iff the failing criteria are exactly the declared red
// set. A red criterion still prints FAIL with its measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lvp/config.hpp"
#include "lvp/freekernel.hpp"
#include "lvp/parametrix.hpp"
#include "lvp/simulate.hpp"
#include "lvp/validate.hpp"

using namespace lvp;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Gaussian bump of width s centred at c, wrapped onto the circle.
SmoothFunction gaussian_bump(double c, double s, double period) {
  auto wrap = [=](double x) {
    double d = std::fmod(x - c, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
  };
  SmoothFunction f;
  f.f = [=](double x) { const double d = wrap(x); return std::exp(-d * d / (2 * s * s)); };
  f.d2 = [=](double x) {
    const double d = wrap(x);
    return std::exp(-d * d / (2 * s * s)) * (d * d / (s * s * s * s) - 1.0 / (s * s));
  };
  f.period = period;
  return f;
}

// Solvers shared between criteria, built on first use.
class Models {
 public:
  const ParametrixSolver& preset_solver(const std::string& name) {
    auto it = std::find_if(cache_.begin(), cache_.end(), [&](auto& p) { return p.first == name; });
    if (it != cache_.end()) return *it->second;
    SolverOptions so;
    so.diag_times = {0.05, 0.1, 0.2, 0.25, 0.4};
    cache_.emplace_back(name, std::make_unique<ParametrixSolver>(preset(name).build_model(), 0.5, so));
    return *cache_.back().second;
  }

 private:
  std::vector<std::pair<std::string, std::unique_ptr<ParametrixSolver>>> cache_;
};

Outcome closed_form_oracle() {
  const JumpMeasure mu(Stable{1.0, 1.0});
  const UniformGrid g = UniformGrid::centered(0.01, 2001);
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0}) {
    const Slice1D s = fourier_invert_p0(mu, t, g);
    for (int i = 0; i < g.size; ++i) {
      const double x = g.at(i);
      worst = std::max(worst, std::abs(s.value[static_cast<size_t>(i)] - t / (pi * (t * t + x * x))));
    }
  }
  return {worst <= 1e-6, "max abs error " + fmt("%.2e", worst) + " (tol 1e-6)"};
}

Outcome index_recovery() {
  double worst = 0.0;
  std::string detail = "beta_hat:";
  for (double a : {0.5, 1.0, 1.5}) {
    const A1Report r = check_A1(JumpMeasure(Stable{a, 1.0}));
    worst = std::max(worst, std::abs(r.beta_hat - 2.0 / a));
    detail += " " + fmt("%.4f", r.beta_hat);
  }
  return {worst <= 0.02, detail + " max dev " + fmt("%.2e", worst) + " (tol 0.02)"};
}

Outcome zero_collapse() {
  RunConfig c = preset("exa1");
  c.perturbation = {{"terms", nlohmann::json::array()}, {"envelope_c", 0.0}, {"envelope_eps", 1.0}};
  const ParametrixSolver solver(c.build_model(), 0.5);
  double rel = 0.0, closed = 0.0;
  for (double t : {0.1, 0.25, 0.5}) {
    const KernelGrid p = solver.p(t), p0 = solver.p0(t);
    rel = std::max(rel, (p.values - p0.values).cwiseAbs().maxCoeff() / p0.values.maxCoeff());
    // Independent route: wrapped Cauchy in closed form.
    const double P = c.domain.period;
    for (int i = 0; i < p.x.size; i += 37)
      for (int j = 0; j < p.y.size; ++j) {
        const double a = 2 * pi * t / P, b = 2 * pi * (p.y.at(j) - p.x.at(i)) / P;
        const double ref = std::sinh(a) / (P * (std::cosh(a) - std::cos(b)));
        closed = std::max(closed, std::abs(p.values(i, j) - ref) / p0.values.maxCoeff());
      }
  }
  const PsiResult psi = psi_series(solver, 0.25);
  const bool one_term = solver.terms() == 1 && psi.diag.truncation_index <= 1;
  return {rel <= 1e-8 && closed <= 1e-8 && one_term,
          "max|p-p0|/max p0 " + fmt("%.1e", rel) + ", vs closed form " + fmt("%.1e", closed) +
              ", series terms " + std::to_string(solver.terms())};
}

Outcome conservation_positivity(Models& m) {
  const auto& s = m.preset_solver("exa1");
  const std::vector<KernelGrid> fam{s.p(0.1), s.p(0.25)};
  const auto mass = check_conservation(fam, 1e-3);
  const auto pos = check_nonnegativity(fam, 1e-6);
  return {mass.pass() && pos.pass(),
          "mass dev " + fmt("%.2e", mass.residual) + ", negativity " + fmt("%.2e", pos.residual)};
}

Outcome chapman_kolmogorov(Models& m) {
  const auto& s = m.preset_solver("exa1");
  const KernelGrid q = s.p(0.25);
  const auto r = check_chapman_kolmogorov(q, q, s.p(0.5), 2e-2);
  return {r.pass(), "relative mismatch " + fmt("%.2e", r.residual) + " (tol 2e-2)"};
}

Outcome generator_identity(Models& m) {
  const auto& s = m.preset_solver("exa1");
  const double P = s.model().domain.period;
  bool ok = true;
  std::string detail;
  for (auto [c, w] : {std::pair{0.0, 0.6}, std::pair{1.3, 1.0}}) {
    const auto r = check_generator_identity(s.model(), [&](double t) { return s.p(t); },
                                            gaussian_bump(c, w, P), 0.25, 2e-2);
    ok = ok && r.pass();
    detail += (detail.empty() ? "" : ", ") + std::string("residual ") + fmt("%.2e", r.residual) +
              " / " + fmt("%.2e", r.tolerance);
  }
  return {ok, detail};
}

Outcome series_contraction(Models& m) {
  bool ratios_ok = true, scaling_ok = true;
  std::string detail;
  for (const auto& name : preset_names()) {
    const auto& s = m.preset_solver(name);
    double worst = 0.0;
    std::vector<double> ts, first, entry;
    for (double t : {0.1, 0.2, 0.4}) {
      const auto& d = s.diagnostics_at(t);
      for (double r : d.ratios) worst = std::max(worst, r);
      ts.push_back(t);
      first.push_back(d.ratios.empty() ? 0.0 : d.ratios.front());
      // Entrywise maxima, reported alongside the operator-norm ratios.
      entry.push_back(d.sup_values.size() < 2 ? 0.0 : d.sup_values[1] / d.sup_values[0]);
    }
    for (double r : s.diagnostics().ratios) worst = std::max(worst, r);
    ratios_ok = ratios_ok && worst < 1.0;
    const double delta = s.model().delta();
    const double k = *std::min_element(first.begin(), first.end()) > 0.0 ? slope(ts, first) : 0.0;
    scaling_ok = scaling_ok && std::abs(k / delta - 1.0) <= 0.3;
    detail += name + ": max ratio " + fmt("%.3f", worst) + ", slope " + fmt("%.3f", k) +
              " (entrywise " + fmt("%.3f", slope(ts, entry)) + ") vs delta " + fmt("%.3f", delta) + "; ";
  }
  return {ratios_ok && scaling_ok, detail};
}

Outcome blowup_exponent() {
  RunConfig c = preset("exa1");
  // Fine grid; only Phi itself is needed.
  c.domain.n = 3840;
  c.series.k_max = 1;
  const ModelSpec model = c.build_model();
  const double eta = model.pert.envelope_eps / model.scaling.sigma_hat;
  const ParametrixSolver solver(model, 0.1);
  const BlowupFit fit = phi_blowup(solver, {0.1, 0.05, 0.025, 0.0125});
  const double rel = std::abs(fit.eta_hat - eta) / eta;
  return {rel <= 0.25, "eta_hat " + fmt("%.3f", fit.eta_hat) + " vs eps/sigma " + fmt("%.3f", eta) +
                           " (rel " + fmt("%.2f", rel) + ", tol 0.25) on t in {0.1..0.0125}"};
}

// Same fit on the coarse nodes, printed for reference only.
std::string blowup_reference(Models& m) {
  const auto& s = m.preset_solver("exa1");
  const BlowupFit fit = phi_blowup(s, {0.4, 0.2, 0.1});
  return "eta_hat on t in {0.4, 0.2, 0.1}: " + fmt("%.3f", fit.eta_hat);
}

std::pair<std::vector<KernelGrid>, std::vector<double>> family(const ParametrixSolver& s,
                                                               const std::vector<double>& ts) {
  std::vector<KernelGrid> fam;
  std::vector<double> rho;
  for (double t : ts) {
    fam.push_back(s.p(t));
    rho.push_back(s.model().scaling.rho_at(s.model().base, t));
  }
  return {fam, rho};
}

Outcome on_diagonal(Models& m) {
  auto [fam, rho] = family(m.preset_solver("exa1"), {0.05, 0.1, 0.25, 0.5});
  const auto r = check_on_diagonal(fam, rho, 2.0);
  return {r.pass(), "c1 " + fmt("%.4f", r.constants.at("c1")) + ", c2 " +
                        fmt("%.4f", r.constants.at("c2")) + ", drift " + fmt("%.3f", r.residual)};
}

Outcome lower_bound(Models& m) {
  auto [fam, rho] = family(m.preset_solver("exa1"), {0.05, 0.1, 0.25, 0.5});
  const auto r = check_lower_bound(fam, rho);
  return {r.pass(), "d3 " + fmt("%.4f", r.constants.at("d3")) + " at d4 " +
                        fmt("%.3f", r.constants.at("d4"))};
}

Outcome example_bounds(Models& m) {
  const std::vector<double> ts{0.05, 0.1, 0.25, 0.5};
  auto [f1, r1] = family(m.preset_solver("exa1"), ts);
  auto [f2, r2] = family(m.preset_solver("exa2"), ts);
  const auto a = check_example_bounds(f1, ExampleBound::stable, 1.0, 0.5, 3.0);
  const auto b = check_example_bounds(f2, ExampleBound::dyadic, 1.2, 0.5, 3.0);
  return {a.pass() && b.pass(), "exa1 C " + fmt("%.3f", a.constants.at("C")) + " drift " +
                                    fmt("%.2f", a.residual) + "; exa2 C " +
                                    fmt("%.3f", b.constants.at("C")) + " drift " + fmt("%.2f", b.residual)};
}

Outcome monte_carlo(Models& m) {
  std::string detail;
  bool ok = true;
  struct Case {
    const char* name;
    Scheme scheme;
    double tol;
  };
  for (const Case& c : {Case{"appendixB", ThinningScheme{}, 0.02},
                        Case{"exa1", EulerChainScheme{0.25 / 50.0}, 0.03}}) {
    const auto& s = m.preset_solver(c.name);
    SimulationPlan plan;
    plan.n_paths = 100000;
    plan.t_end = 0.25;
    plan.scheme = c.scheme;
    plan.rng_seed = 1;
    const auto samples = sample_perturbed(s.model(), plan);
    const auto cmp = compare_density(samples, s.p(0.25), 0.0);
    ok = ok && cmp.ks_distance <= c.tol;
    detail += std::string(c.name) + " KS " + fmt("%.4f", cmp.ks_distance) + " (tol " +
              fmt("%.2f", c.tol) + ") ";
  }
  return {ok, detail};
}

Outcome approximate_solution(Models& m) {
  const auto& s = m.preset_solver("exa1");
  const double t = 0.25;
  const KernelGrid p = s.p(t);
  const auto bump = gaussian_bump(0.0, 0.6, s.model().domain.period);
  std::vector<double> gaps, res;
  for (double eps : {0.1, 0.05, 0.025}) {
    gaps.push_back((s.p_eps(t, eps).values - p.values).cwiseAbs().maxCoeff());
    res.push_back(residual_q_eps(s, t, eps, bump.f));
  }
  const bool ok = gaps[1] < gaps[0] && gaps[2] < gaps[1] && res[1] < res[0] && res[2] < res[1];
  return {ok, "gap " + fmt("%.2e", gaps[0]) + " > " + fmt("%.2e", gaps[1]) + " > " +
                  fmt("%.2e", gaps[2]) + "; residual " + fmt("%.2e", res[0]) + " > " +
                  fmt("%.2e", res[1]) + " > " + fmt("%.2e", res[2])};
}

Outcome convolution_lemma() {
  const JumpMeasure mu(Stable{1.0, 1.0});
  const ConvolutionLemmaSpec spec;
  const auto r = check_convolution_lemma(mu, make_scaling_table(mu, spec.t_nodes), spec);
  return {r.pass(), "C_g " + fmt("%.3f", r.constants.at("C_g")) + ", C_h " +
                        fmt("%.3f", r.constants.at("C_h")) + ", drift " + fmt("%.3f", r.residual)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> red, only;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--expect-red") red = parse_list(argv[i + 1]);
    else if (flag == "--only") only = parse_list(argv[i + 1]);
    else {
      std::cerr << "unknown flag " << flag << '\n';
      return 2;
    }
  }
  Models models;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form Cauchy oracle", closed_form_oracle},
      {"index recovery", index_recovery},
      {"zero-perturbation collapse", zero_collapse},
      {"conservation and positivity", [&] { return conservation_positivity(models); }},
      {"Chapman-Kolmogorov", [&] { return chapman_kolmogorov(models); }},
      {"generator identity", [&] { return generator_identity(models); }},
      {"series contraction", [&] { return series_contraction(models); }},
      {"Phi blow-up exponent", blowup_exponent},
      {"two-sided on-diagonal", [&] { return on_diagonal(models); }},
      {"lower bound", [&] { return lower_bound(models); }},
      {"example bounds", [&] { return example_bounds(models); }},
      {"Monte Carlo cross-validation", [&] { return monte_carlo(models); }},
      {"approximate solution", [&] { return approximate_solution(models); }},
      {"convolution lemma", convolution_lemma},
  };
  std::set<int> failed;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) failed.insert(id);
    std::printf("[%s] %2d %-30s %s (%.1fs)%s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                o.detail.c_str(), secs, !o.pass && red.count(id) ? " [known red]" : "");
    if (id == 8) std::printf("          reference: %s\n", blowup_reference(models).c_str());
    std::fflush(stdout);
  }
  std::set<int> expected;
  for (int id : red)
    if (only.empty() || only.count(id)) expected.insert(id);
  std::printf("%zu criteria failed", failed.size());
  if (!expected.empty()) std::printf(", %zu declared red", expected.size());
  std::printf("\n");
  return failed == expected ? 0 : 1;
}
