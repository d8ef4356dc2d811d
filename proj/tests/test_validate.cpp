#include <gtest/gtest.h>

#include <cmath>

#include "lvp/validate.hpp"
#include "support.hpp"

using namespace lvp;
using fixture::pi;

namespace {

constexpr double kPeriod = 6.0 * pi;

const JumpMeasure& cauchy() {
  static const JumpMeasure mu(Stable{1.0, 1.0});
  return mu;
}

// Closed-form wrapped Cauchy kernel sampled on the solver's torus grid.
KernelGrid torus_cauchy(double t, int n) {
  KernelGrid g;
  g.t = t;
  g.period = kPeriod;
  g.x = g.y = UniformGrid{-0.5 * kPeriod, kPeriod / n, n};
  g.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.values(i, j) = fixture::cauchy_torus(t, g.y.at(j) - g.x.at(i), kPeriod);
  return g;
}

// Single row of the line Cauchy kernel from x = 0.
KernelGrid line_cauchy_row(double t, double half_width, double step) {
  KernelGrid g;
  g.t = t;
  g.x = UniformGrid{0.0, 1.0, 1};
  const int n = 2 * static_cast<int>(std::lround(half_width / step)) + 1;
  g.y = UniformGrid::centered(step, n);
  g.values.resize(1, n);
  for (int j = 0; j < n; ++j) g.values(0, j) = fixture::cauchy_kernel(t, g.y.at(j));
  return g;
}

ModelSpec free_cauchy_model(int n) {
  return make_model(cauchy(), zero_perturbation(), fixture::torus(n));
}

// exp(cos(x / 3)), periodic on the torus.
SmoothFunction bump() {
  SmoothFunction f;
  f.f = [](double x) { return std::exp(std::cos(x / 3.0)); };
  f.d2 = [](double x) {
    const double c = std::cos(x / 3.0), s = std::sin(x / 3.0);
    return std::exp(c) * (s * s - c) / 9.0;
  };
  f.period = kPeriod;
  return f;
}

}  // namespace

TEST(Conservation, TorusCauchyRowsHaveUnitMass) {
  const auto rep = check_conservation({torus_cauchy(0.1, 960), torus_cauchy(0.5, 960)}, 1e-6);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_LT(rep.residual, 1e-6);
}

TEST(Conservation, NarrowLineGridIsInconclusive) {
  const KernelGrid g = line_cauchy_row(0.1, 5.0, 0.025);
  EXPECT_EQ(check_conservation({g}, 1e-3, &cauchy()).verdict, Verdict::inconclusive);
  EXPECT_EQ(check_conservation({g}).verdict, Verdict::inconclusive);
}

TEST(Conservation, WideLineGridAddsTailEstimate) {
  // t mu{|u| > 20} = 2 t / (20 pi) is below the inconclusive threshold.
  const KernelGrid g = line_cauchy_row(1e-3, 20.0, 2.5e-4);
  const auto rep = check_conservation({g}, 1e-6, &cauchy());
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_NEAR(rep.constants.at("tail_mass"), 2e-3 / (20.0 * pi), 1e-9);
}

TEST(Conservation, DetectsMassDefect) {
  KernelGrid g = torus_cauchy(0.2, 192);
  g.values *= 0.99;
  const auto rep = check_conservation({g}, 1e-3);
  EXPECT_EQ(rep.verdict, Verdict::fail);
  EXPECT_NEAR(rep.residual, 0.01, 1e-5);
}

TEST(Nonnegativity, ThresholdIsRelativeToPeak) {
  KernelGrid g = torus_cauchy(0.2, 96);
  const double peak = g.values.maxCoeff();
  EXPECT_EQ(check_nonnegativity({g}).verdict, Verdict::pass);
  g.values(3, 50) = -1e-8 * peak;
  EXPECT_EQ(check_nonnegativity({g}).verdict, Verdict::pass);
  g.values(3, 50) = -1e-3 * peak;
  const auto rep = check_nonnegativity({g});
  EXPECT_EQ(rep.verdict, Verdict::fail);
  ASSERT_TRUE(rep.witness);
  EXPECT_DOUBLE_EQ(rep.witness->first, g.x.at(3));
  EXPECT_DOUBLE_EQ(rep.witness->second, g.y.at(50));
}

TEST(Nonnegativity, ReportsClampedNegatives) {
  KernelGrid g = torus_cauchy(0.2, 96);
  g.clamped = 4;
  g.min_value = -0.5 * g.values.maxCoeff();
  const auto rep = check_nonnegativity({g});
  EXPECT_EQ(rep.verdict, Verdict::fail);
  EXPECT_EQ(rep.constants.at("clamped_entries"), 4.0);
}

TEST(ChapmanKolmogorov, ClosedFormCauchyComposes) {
  const auto rep = check_chapman_kolmogorov(torus_cauchy(0.2, 192), torus_cauchy(0.3, 192),
                                            torus_cauchy(0.5, 192), 2e-3);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_LT(rep.residual, 1e-4);
}

TEST(ChapmanKolmogorov, WrongTimesFail) {
  const auto rep = check_chapman_kolmogorov(torus_cauchy(0.2, 192), torus_cauchy(0.3, 192),
                                            torus_cauchy(0.6, 192));
  EXPECT_EQ(rep.verdict, Verdict::fail);
}

TEST(ChapmanKolmogorov, MismatchedGridsThrow) {
  EXPECT_THROW((void)check_chapman_kolmogorov(torus_cauchy(0.2, 192), torus_cauchy(0.3, 96),
                                              torus_cauchy(0.5, 192)),
               std::invalid_argument);
}

TEST(ChapmanKolmogorov, ConcentratedKernelIsInconclusive) {
  // Cell of width 0.098 against t = 1e-3 holds nearly all of p_s.
  const auto rep = check_chapman_kolmogorov(torus_cauchy(1e-3, 192), torus_cauchy(0.3, 192),
                                            torus_cauchy(0.301, 192));
  EXPECT_EQ(rep.verdict, Verdict::inconclusive);
  EXPECT_GT(rep.constants.at("cell_mass"), 0.5);
}

TEST(OnDiagonal, CauchyRatioIsFourOverPiSquared) {
  std::vector<KernelGrid> fam;
  std::vector<double> rho;
  for (double t : {0.02, 0.05, 0.1}) {
    fam.push_back(torus_cauchy(t, 480));
    rho.push_back(scaling_rho(cauchy(), t));
  }
  const auto rep = check_on_diagonal(fam, rho);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  // The wrap-around adds O((t / P)^2) to p_t(x, x) = 1 / (pi t).
  EXPECT_NEAR(rep.constants.at("c1"), 4.0 / (pi * pi), 1e-4);
  EXPECT_NEAR(rep.constants.at("c2"), 4.0 / (pi * pi), 1e-4);
  EXPECT_THROW((void)check_on_diagonal(fam, {1.0}), std::invalid_argument);
}

TEST(OnDiagonal, VanishingDiagonalFails) {
  KernelGrid g = torus_cauchy(0.1, 96);
  g.values(10, 10) = 0.0;
  EXPECT_EQ(check_on_diagonal({g}, {scaling_rho(cauchy(), 0.1)}).verdict, Verdict::fail);
}

TEST(LowerBound, CauchyHasPositiveConstant) {
  std::vector<KernelGrid> fam;
  std::vector<double> rho;
  for (double t : {0.05, 0.1, 0.2}) {
    fam.push_back(torus_cauchy(t, 192));
    rho.push_back(scaling_rho(cauchy(), t));
  }
  const auto rep = check_lower_bound(fam, rho);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  // Line value at the cone edge |x - y| rho_t = 1 / d4 bounds d3 from above.
  const double d4 = rep.constants.at("d4");
  EXPECT_GT(rep.constants.at("d3"), 0.0);
  EXPECT_LE(rep.constants.at("d3"), 4.0 / (pi * pi) + 1e-4);
  EXPECT_GT(d4, 0.0);
}

TEST(ExampleBounds, RightHandSideBranches) {
  // Inside the scale ball only the leading term remains.
  EXPECT_DOUBLE_EQ(example_rhs(ExampleBound::stable, 1.0, 0.5, 0.04, 0.01), 25.0);
  const double t = 0.04, d = 0.2, a = 1.5, eps = 0.5;
  const double s = std::pow(t, 1.0 / a), r = s / d;
  EXPECT_NEAR(example_rhs(ExampleBound::stable, a, eps, t, d),
              (1.0 + std::pow(r, 1.0 + a) + std::pow(t, eps / a) * std::pow(r, 1.0 + a - eps)) / s,
              1e-12);
  EXPECT_NEAR(example_rhs(ExampleBound::dyadic, a, eps, t, d),
              (1.0 + std::pow(r, a) + std::pow(t, eps / a) * std::pow(r, a - eps)) / s, 1e-12);
}

TEST(ExampleBounds, FreeCauchyFitsStableTemplate) {
  const auto rep = check_example_bounds({torus_cauchy(0.05, 192), torus_cauchy(0.1, 192),
                                         torus_cauchy(0.2, 192)},
                                        ExampleBound::stable, 1.0, 0.5);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_LT(rep.constants.at("C"), 1.0);
  EXPECT_GT(rep.constants.at("C"), 1.0 / (2.0 * pi));
}

TEST(Semigroup, PreservesConstantsAndContracts) {
  const KernelGrid g = torus_cauchy(0.3, 192);
  // Sampling aliases the row sum by about 2 exp(-2 pi t / h).
  for (double v : apply_semigroup(g, [](double) { return 1.0; })) EXPECT_NEAR(v, 1.0, 1e-7);
  const auto out = apply_semigroup(g, [](double y) { return std::sin(y / 3.0) + std::cos(y); });
  for (double v : out) EXPECT_LE(std::abs(v), 2.0);
  // Fourier modes decay by exp(-t |k|).
  const auto mode = apply_semigroup(g, [](double y) { return std::cos(y / 3.0); });
  for (int i = 0; i < g.x.size; i += 17)
    EXPECT_NEAR(mode[static_cast<size_t>(i)], std::exp(-0.1) * std::cos(g.x.at(i) / 3.0), 1e-7);
}

TEST(Semigroup, ApproachesIdentityAsTimeShrinks) {
  const auto f = bump();
  double prev = 1e9;
  for (double t : {0.4, 0.2, 0.1, 0.05}) {
    const KernelGrid g = torus_cauchy(t, 960);
    const auto out = apply_semigroup(g, f.f);
    double err = 0.0;
    for (int i = 0; i < g.x.size; ++i)
      err = std::max(err, std::abs(out[static_cast<size_t>(i)] - f.f(g.x.at(i))));
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(GeneratorIdentity, ActionOnFourierMode) {
  const ModelSpec model = free_cauchy_model(192);
  SmoothFunction f;
  f.f = [](double x) { return std::cos(x / 3.0); };
  f.d2 = [](double x) { return -std::cos(x / 3.0) / 9.0; };
  f.period = kPeriod;
  const std::vector<double> xs{0.0, 0.7, 2.0, 5.0};
  const auto out = generator_action(model, f, xs);
  for (size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(out[i], -std::cos(xs[i] / 3.0) / 3.0, 1e-6);
}

TEST(GeneratorIdentity, ConstantIsExact) {
  const ModelSpec model = free_cauchy_model(192);
  SmoothFunction one{[](double) { return 1.0; }, [](double) { return 0.0; }, kPeriod};
  const auto rep = check_generator_identity(model, [](double t) { return torus_cauchy(t, 192); },
                                            one, 0.25);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_LT(rep.residual, 1e-6);
}

TEST(GeneratorIdentity, ClosedFormCauchyPassesTightTolerance) {
  const ModelSpec model = free_cauchy_model(192);
  const auto rep = check_generator_identity(model, [](double t) { return torus_cauchy(t, 192); },
                                            bump(), 0.25, 2e-3);
  EXPECT_EQ(rep.verdict, Verdict::pass) << rep.residual;
}

TEST(GeneratorIdentity, WrongKernelFails) {
  // Kernels run at twice the model speed.
  const ModelSpec model = free_cauchy_model(192);
  const auto rep = check_generator_identity(
      model, [](double t) { return torus_cauchy(2.0 * t, 192); }, bump(), 0.25);
  EXPECT_EQ(rep.verdict, Verdict::fail);
}

TEST(GeneratorIdentity, RequiresSecondDerivative) {
  const ModelSpec model = free_cauchy_model(96);
  SmoothFunction f = bump();
  f.d2 = nullptr;
  auto fam = [](double t) { return torus_cauchy(t, 96); };
  EXPECT_THROW((void)check_generator_identity(model, fam, f, 0.1), std::invalid_argument);
  f = bump();
  f.f = nullptr;
  EXPECT_THROW((void)check_generator_identity(model, fam, f, 0.1), std::invalid_argument);
}

TEST(ConvolutionLemma, CauchyConstantsAreStable) {
  const ScalingTable table = make_scaling_table(cauchy(), {0.1, 0.25, 0.5});
  ConvolutionLemmaSpec spec;
  spec.points = 21;
  const auto rep = check_convolution_lemma(cauchy(), table, spec);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_TRUE(std::isfinite(rep.constants.at("C_g")));
  EXPECT_TRUE(std::isfinite(rep.constants.at("C_h")));
  EXPECT_GT(rep.constants.at("C_h"), 0.0);
}

TEST(CompoundBound, PerturbedPhiHasFiniteConstant) {
  const ModelSpec model = make_model(cauchy(), fixture::example_perturbation(), fixture::torus(192));
  const ParametrixSolver solver(model, 0.5);
  std::vector<KernelGrid> phis;
  for (double t : {0.1, 0.25, 0.5}) phis.push_back(phi_grid(solver, t));
  const auto rep = check_compound_bound(phis, cauchy(), 0.5, 0.5);
  EXPECT_EQ(rep.verdict, Verdict::pass) << rep.residual;
  // Every node, including the one whose scale is far below the period.
  for (const char* node : {"C@0.1", "C@0.25", "C@0.5"}) {
    const double C = rep.constants.at(node);
    EXPECT_GT(C, 0.1);
    EXPECT_LT(C, 2.0);
  }
}

TEST(CompoundBound, RejectsLineKernels) {
  EXPECT_THROW((void)check_compound_bound({line_cauchy_row(0.1, 5.0, 0.05)}, cauchy(), 0.5, 0.5),
               std::invalid_argument);
}

TEST(Verdicts, Names) {
  EXPECT_EQ(verdict_name(Verdict::pass), "pass");
  EXPECT_EQ(verdict_name(Verdict::fail), "fail");
  EXPECT_EQ(verdict_name(Verdict::inconclusive), "inconclusive");
  EXPECT_EQ(verdict_name(Verdict::unstable), "unstable");
}
