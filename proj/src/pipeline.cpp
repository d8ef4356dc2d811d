#include "lvp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "lvp/io.hpp"
#include "lvp/simulate.hpp"

namespace lvp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string tag(double t) {
  std::ostringstream os;
  os << "t" << t;
  return os.str();
}

SmoothFunction periodic_bump(double center, double width, double period) {
  auto wrap = [=](double x) {
    double d = std::fmod(x - center + 0.5 * period, period);
    if (d < 0.0) d += period;
    return d - 0.5 * period;
  };
  SmoothFunction f;
  f.f = [=](double x) {
    const double d = wrap(x);
    return std::exp(-0.5 * d * d / (width * width));
  };
  f.d2 = [=](double x) {
    const double d = wrap(x), w2 = width * width;
    return std::exp(-0.5 * d * d / w2) * (d * d / (w2 * w2) - 1.0 / w2);
  };
  f.period = period;
  return f;
}

void print_row(std::ostream& log, const ValidationReport& r) {
  log << std::left << std::setw(24) << r.check << std::setw(14) << verdict_name(r.verdict)
      << "residual " << std::setw(12) << std::setprecision(4) << r.residual;
  if (r.tolerance > 0.0) log << " tol " << std::setprecision(4) << r.tolerance;
  if (!r.note.empty()) log << "  (" << r.note << ")";
  log << '\n';
}

json error_json(const std::string& kind, const std::string& what) {
  return {{"error", kind}, {"message", what}};
}

}  // namespace

RunResult run(const RunConfig& cfg, std::ostream& log) {
  RunResult res;
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  const json effective = cfg.to_json();
  io::write_json((out / "effective_config.json").string(), effective);
  res.summary["config"] = cfg.name;
  res.summary["kernel_hash"] = cfg.kernel_hash();
  res.summary["stages"] = cfg.resolved_stages();

  auto fail = [&](int code, const json& err) {
    res.exit_code = code;
    res.summary["error"] = err;
    io::write_json((out / "error.json").string(), err);
    io::write_json((out / "summary.json").string(), res.summary);
    return res;
  };

  // Measure and perturbation parse errors are configuration errors; a model
  // the hypotheses refuse is a validation failure.
  JumpMeasure mu(Stable{});
  PerturbationSpec pert;
  try {
    mu = cfg.build_measure();
    pert = cfg.build_perturbation();
  } catch (const ConfigError& e) {
    return fail(exit_config, error_json("config", e.what()));
  }
  std::optional<ModelSpec> built;
  try {
    built = make_model(mu, pert, cfg.domain, cfg.series, cfg.freeze);
  } catch (const std::invalid_argument& e) {
    return fail(exit_validation, error_json("hypothesis", e.what()));
  }
  const ModelSpec& model = *built;

  // exponent
  {
    json j{{"a1", io::to_json(model.a1)},
           {"scaling", io::to_json(model.scaling)},
           {"perturbation", io::to_json(model.pert_report)},
           {"delta", model.delta()}};
    if (cfg.oscillatory && cfg.measure.value("kind", "") == "oscillating_index") {
      json rows = json::array();
      const double c = cfg.measure.value("center", 1.0), a = cfg.measure.value("amplitude", 0.4),
                   f = cfg.measure.value("frequency", 4.0);
      for (int k = 0; k <= 24; ++k) {
        const double xi = std::pow(10.0, k / 4.0);
        const double index = oscillating_index(std::log(xi), c, a, f);
        rows.push_back({{"xi", xi}, {"q", model.base.q(xi)}, {"index", index},
                        {"ratio", model.base.q(xi) / std::pow(xi, index)}});
      }
      j["sandwich"] = rows;
    }
    io::write_json((out / "exponent.json").string(), j);
    log << "exponent: A1 " << (model.a1.pass ? "pass" : "fail") << ", beta_hat "
        << model.a1.beta_hat << ", sigma_hat " << model.scaling.sigma_hat << '\n';
  }

  // kernel
  if (cfg.runs("kernel")) {
    json j;
    InversionOptions opts;
    opts.period = cfg.domain.period;
    opts.assume_A1 = true;
    const UniformGrid grid{-0.5 * cfg.domain.period, cfg.domain.period / cfg.domain.n, cfg.domain.n};
    for (double t : cfg.t) {
      const Slice1D s = fourier_invert_p0(model.base, t, grid, opts);
      std::ofstream csv(out / ("p0_" + tag(t) + ".csv"));
      csv << "x,value\n";
      for (int i = 0; i < grid.size; ++i)
        csv << io::format_double(grid.at(i), cfg.exact) << ','
            << io::format_double(s.value[static_cast<size_t>(i)], cfg.exact) << '\n';
      j["err_est"][tag(t)] = s.err_est;
    }
    const P0BoundReport bounds = verify_p0_bounds(model.base, cfg.t);
    j["bounds"] = io::to_json(bounds);
    if (cfg.oscillatory) j["bounds"]["flag"] = "oscillatory";
    io::write_json((out / "kernel.json").string(), j);
    log << "kernel: free-kernel bound templates " << (bounds.pass ? "pass" : "fail")
        << (cfg.oscillatory ? " (oscillatory)" : "") << '\n';
  }

  // parametrix
  std::vector<KernelGrid> family;
  std::unique_ptr<ParametrixSolver> solver;
  const double horizon = *std::max_element(cfg.t.begin(), cfg.t.end());
  if (cfg.runs("parametrix")) {
    const bool explicit_stage =
        std::find(cfg.stages.begin(), cfg.stages.end(), "parametrix") != cfg.stages.end();
    if (!explicit_stage) {
      for (double t : cfg.t) {
        auto cached = io::read_kernel_cache((out / ("p_" + tag(t))).string(), cfg.kernel_hash());
        if (!cached) {
          family.clear();
          break;
        }
        family.push_back(std::move(*cached));
      }
      if (!family.empty()) {
        res.summary["cache"] = cfg.kernel_hash();
        log << "parametrix: reusing cached kernels " << cfg.kernel_hash() << '\n';
      }
    }
    if (family.empty()) {
      try {
        SolverOptions so;
        so.diag_times = cfg.t;
        solver = std::make_unique<ParametrixSolver>(model, horizon, so);
      } catch (const NonConvergence& e) {
        json err = error_json("nonconvergence", e.what());
        err["diagnostics"] = io::to_json(e.diagnostics());
        return fail(exit_nonconvergence, err);
      }
      json j{{"terms", solver->terms()},
             {"horizon", io::to_json(solver->diagnostics())},
             {"layout", {{"n", solver->layout().n}, {"blocks", solver->layout().blocks}}}};
      for (double t : cfg.t) {
        family.push_back(solver->p(t));
        const KernelGrid& g = family.back();
        io::write_kernel_csv((out / ("p_" + tag(t) + ".csv")).string(), g, cfg.kernel_stride,
                             cfg.exact);
        io::write_kernel_cache((out / ("p_" + tag(t))).string(), g, cfg.kernel_hash());
        j["series"][tag(t)] = io::to_json(solver->diagnostics_at(t));
        j["kernels"][tag(t)] = io::describe(g);
      }
      std::vector<double> blow_t;
      for (int k = 0; k < 4; ++k) blow_t.push_back(horizon / std::pow(2.0, k));
      j["phi_blowup"] = io::to_json(phi_blowup(*solver, blow_t));
      io::write_json((out / "parametrix.json").string(), j);
      log << "parametrix: " << solver->terms() << " series terms, truncation bound "
          << solver->diagnostics().truncation_bound << '\n';
    }
  }

  // validate
  bool failed = false;
  if (cfg.runs("validate")) {
    std::vector<ValidationReport> reports;
    std::vector<double> rho;
    for (const auto& g : family) rho.push_back(model.scaling.rho_at(model.base, g.t));
    reports.push_back(check_conservation(family, cfg.tol.mass));
    reports.push_back(check_nonnegativity(family));
    reports.push_back(check_on_diagonal(family, rho));
    reports.push_back(check_lower_bound(family, rho));
    if (cfg.example_bound && !cfg.oscillatory)
      reports.push_back(check_example_bounds(family, *cfg.example_bound, model.scaling.alpha,
                                             model.pert.envelope_eps));
    if (solver) {
      const KernelFamily fam = [&](double s) { return solver->p(s); };
      for (const auto& g : family) {
        const KernelGrid half = solver->p(0.5 * g.t);
        reports.push_back(check_chapman_kolmogorov(half, half, g, cfg.tol.composed));
        reports.push_back(check_generator_identity(
            model, fam, periodic_bump(0.0, 0.5, cfg.domain.period), g.t, cfg.tol.composed));
      }
    } else {
      log << "validate: composed checks need the solver and are skipped on cached kernels\n";
    }
    json arr = json::array();
    for (const auto& r : reports) {
      print_row(log, r);
      arr.push_back(io::to_json(r));
      if (!r.pass() && r.verdict != Verdict::inconclusive) failed = true;
    }
    io::write_json((out / "validation.json").string(), arr);
  }

  // simulate
  if (cfg.runs("simulate")) {
    json j = json::array();
    for (const auto& g : family) {
      SimulationPlan plan;
      plan.n_paths = cfg.n_paths;
      plan.t_end = g.t;
      plan.rng_seed = cfg.seed;
      const bool thin = !model.pert.is_zero() && !model.pert_report.divergent_regime;
      if (model.pert.is_zero()) plan.scheme = ExactScheme{};
      else if (thin) plan.scheme = ThinningScheme{};
      else plan.scheme = EulerChainScheme{g.t / 50.0};
      std::vector<double> samples;
      try {
        samples = sample_perturbed(model, plan);
      } catch (const SimulationError& e) {
        return fail(exit_config, error_json("simulation", e.what()));
      }
      io::write_samples_csv((out / ("samples_" + tag(g.t) + ".csv")).string(), samples, cfg.exact);
      const DensityComparison cmp = compare_density(samples, g, plan.x0);
      const bool euler = std::holds_alternative<EulerChainScheme>(plan.scheme);
      const double tol = euler ? cfg.tol.ks_euler : cfg.tol.ks;
      const bool pass = cmp.ks_distance <= tol;
      json row = io::to_json(cmp);
      row["t"] = g.t;
      row["scheme"] = model.pert.is_zero() ? "exact" : (thin ? "thinning" : "euler_chain");
      row["tolerance"] = tol;
      row["pass"] = pass;
      j.push_back(row);
      log << std::left << std::setw(24) << ("monte_carlo " + tag(g.t)) << std::setw(14)
          << (pass ? "pass" : "fail") << "ks " << cmp.ks_distance << " tol " << tol << '\n';
      if (!pass) failed = true;
    }
    io::write_json((out / "simulate.json").string(), j);
  }

  if (failed) res.exit_code = exit_validation;
  res.summary["exit_code"] = res.exit_code;
  io::write_json((out / "summary.json").string(), res.summary);
  return res;
}

}  // namespace lvp
