#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lvp/exponent.hpp"
#include "lvp/measure.hpp"
#include "support.hpp"

using namespace lvp;
using lvp::fixture::pi;

namespace {

JumpMeasure cauchy_line() { return JumpMeasure(cauchy_density()); }
JumpMeasure atom_pair() { return JumpMeasure(Atoms{{{1.0, 1.0}}}); }

// Direct summation over k; both ends decay geometrically well below 1e-15
// inside the range. 1 - cos is written as 2 sin^2 to keep tiny arguments exact.
double dyadic_q_oracle(double theta, double upsilon, double xi) {
  double sum = 0.0;
  for (int k = -200; k <= 400; ++k) {
    const double s = std::sin(0.5 * xi * std::exp2(-k * upsilon));
    sum += 4.0 * std::exp2(k * theta) * s * s;
  }
  return sum;
}

}  // namespace

TEST(Exponent, CauchySymbolIsAbsoluteFrequency) {
  EXPECT_NEAR(cauchy_line().q(2.0), 2.0, 1e-8);
  EXPECT_NEAR(JumpMeasure(Stable{1.0, 1.0}).q(2.0), 2.0, 1e-14);
}

TEST(Exponent, AtomPairSymbol) {
  EXPECT_NEAR(atom_pair().q(pi), 4.0, 1e-14);
}

TEST(Exponent, DyadicSymbolMatchesDirectSum) {
  const JumpMeasure mu(DyadicDiscrete{1.0, 1.0});
  for (double xi : {1.0, 3.7, 250.0})
    EXPECT_NEAR(mu.q(xi), dyadic_q_oracle(1.0, 1.0, xi), 1e-9 * dyadic_q_oracle(1.0, 1.0, xi));
}

TEST(Exponent, AtomPairTruncatedMoments) {
  const JumpMeasure mu = atom_pair();
  for (double xi : {0.3, 0.9, 1.0, 1.5, 7.0}) {
    EXPECT_NEAR(mu.qU(xi), 2.0 * std::min(xi * xi, 1.0), 1e-14);
    EXPECT_NEAR(mu.qL(xi), xi <= 1.0 ? 2.0 * xi * xi : 0.0, 1e-14);
  }
}

TEST(Exponent, CauchyTruncatedMomentsClosedForm) {
  const JumpMeasure mu = cauchy_line();
  for (double xi : {0.5, 1.0, 13.0}) {
    EXPECT_NEAR(mu.qU(xi), 4.0 / pi * xi, 1e-8 * xi);
    EXPECT_NEAR(mu.qL(xi), 2.0 / pi * xi, 1e-8 * xi);
  }
}

TEST(Exponent, StableMomentRatioIsTwoOverAlpha) {
  for (double a : {0.5, 1.0, 1.5}) {
    const JumpMeasure mu(Stable{a, 1.0});
    for (double xi : {0.1, 1.0, 42.0}) EXPECT_NEAR(mu.qU(xi) / mu.qL(xi), 2.0 / a, 1e-10);
  }
}

TEST(Exponent, ScalingRhoCauchy) {
  const double rho = scaling_rho(cauchy_line(), 0.5);
  EXPECT_NEAR(rho, pi / 2.0, 1e-8);
}

TEST(Exponent, ScalingRhoUndefinedForBoundedMoments) {
  EXPECT_THROW((void)scaling_rho(atom_pair(), 0.1), ScalingUndefined);
}

TEST(Exponent, StableScalingRatio) {
  const JumpMeasure mu(Stable{0.5, 1.0});
  for (double t : {0.8, 0.3, 0.05})
    EXPECT_NEAR(scaling_rho(mu, t / 2.0) / scaling_rho(mu, t), 4.0, 1e-6);
}

TEST(Exponent, A1StableRecoversIndex) {
  const A1Report r = check_A1(JumpMeasure(Stable{1.0, 1.0}));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.beta_hat, 2.0, 0.02);
  EXPECT_NEAR(r.alpha_hat, 1.0, 0.01);
}

TEST(Exponent, A1FailsForAtomPair) {
  const A1Report r = check_A1(atom_pair());
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.witness_xi.has_value());
  EXPECT_GT(*r.witness_xi, 1.0);
}

TEST(Exponent, A1PassesForDyadic) {
  const A1Report r = check_A1(JumpMeasure(DyadicDiscrete{1.2, 1.0}));
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.beta_hat, 1.0);
}

TEST(Exponent, SigmaEstimates) {
  const auto nodes = default_sigma_nodes();
  EXPECT_NEAR(estimate_sigma(JumpMeasure(Stable{1.5, 1.0}), nodes, 1.5), 1.5, 1e-3);
  EXPECT_NEAR(estimate_sigma(cauchy_line(), nodes, 1.0), 1.0, 1e-3);
  const JumpMeasure dy(DyadicDiscrete{1.0, 1.0});
  const A1Report a1 = check_A1(dy);
  EXPECT_NEAR(estimate_sigma(dy, nodes, a1.alpha_hat), 1.0, 0.1);
}

TEST(Exponent, SigmaNeedsFourNodes) {
  EXPECT_THROW((void)estimate_sigma(cauchy_line(), {0.1, 0.05, 0.02}, 1.0), InsufficientData);
}

TEST(Exponent, PerturbationRegimes) {
  const JumpMeasure cauchy(Stable{1.0, 1.0});
  const SamplePlan plan = SamplePlan::standard();

  const PerturbationReport zero = check_perturbation(zero_perturbation(), cauchy, plan);
  EXPECT_TRUE(zero.pass);
  EXPECT_FALSE(zero.divergent_regime);
  EXPECT_EQ(zero.intensity, 0.0);

  const PerturbationReport main = check_perturbation(fixture::example_perturbation(), cauchy, plan);
  EXPECT_TRUE(main.pass);
  EXPECT_TRUE(main.divergent_regime);

  PerturbationSpec bounded;
  bounded.terms.push_back({[](double) { return 1.0; }, cap_power(2.0), "1 ^ u^2"});
  bounded.envelope_c = 1.0;
  bounded.envelope_eps = 2.0;
  const PerturbationReport b = check_perturbation(bounded, cauchy, plan);
  EXPECT_TRUE(b.pass);
  EXPECT_FALSE(b.divergent_regime);
  // int (1 ^ u^2) du / (pi u^2) = 4 / pi
  EXPECT_NEAR(b.intensity, 4.0 / pi, 1e-6);
}

TEST(Exponent, PerturbationEnvelopeViolation) {
  PerturbationSpec p = fixture::example_perturbation();
  p.envelope_c = 0.1;
  const PerturbationReport r =
      check_perturbation(p, JumpMeasure(Stable{1.0, 1.0}), SamplePlan::standard());
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.enveloped);
  EXPECT_TRUE(r.witness.has_value());
}

TEST(Exponent, TailHypothesesStable) {
  for (double a : {0.7, 1.0, 1.5}) {
    const JumpMeasure mu(Stable{a, 1.0});
    const ScalingTable s = make_scaling_table(mu, {0.5, 0.25, 0.1, 0.05, 0.01});
    TailFunctionSpec tail{[a](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -1.0 - a); },
                          0.25 * a, TailFunctionSpec::Kind::density, "stable"};
    const TailReport r = check_tail_hypotheses(mu, tail, s);
    EXPECT_TRUE(r.pass) << "alpha " << a << ": " << r.failure;
    EXPECT_GT(r.fitted_C, 0.0);
  }
}

TEST(Exponent, TailHypothesesDyadic) {
  const JumpMeasure mu(DyadicDiscrete{1.2, 1.0});
  const ScalingTable s = make_scaling_table(mu, {0.5, 0.25, 0.1, 0.05, 0.01});
  TailFunctionSpec tail{[](double x) { return x < 1.0 ? 1.0 : std::pow(x, -1.2); }, 0.3,
                        TailFunctionSpec::Kind::survival, "dyadic"};
  const TailReport r = check_tail_hypotheses(mu, tail, s);
  EXPECT_TRUE(r.pass) << r.failure;
}

TEST(Exponent, ExponentialTailIsNotLongTailed) {
  const JumpMeasure mu(Stable{1.0, 1.0});
  const ScalingTable s = make_scaling_table(mu, {0.5, 0.25, 0.1, 0.05, 0.01});
  TailFunctionSpec tail{[](double x) { return std::exp(-x); }, 0.25,
                        TailFunctionSpec::Kind::density, "exp"};
  const TailReport r = check_tail_hypotheses(mu, tail, s);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.long_tailed);
}

TEST(Exponent, SubexponentialClassification) {
  TailFunctionSpec pareto{[](double x) { return x < 1.0 ? 1.0 : 1.0 / (x * x); }, 0.5,
                          TailFunctionSpec::Kind::survival, "pareto"};
  EXPECT_EQ(check_subexponential(pareto).verdict, SubexpReport::Verdict::pass);

  TailFunctionSpec expo{[](double x) { return std::exp(-x); }, 0.5,
                        TailFunctionSpec::Kind::survival, "exp"};
  EXPECT_EQ(check_subexponential(expo).verdict, SubexpReport::Verdict::fail);

  TailFunctionSpec h{[](double x) { return x <= 1.0 ? 1.0 : 1.0 / (x * x); }, 0.5,
                     TailFunctionSpec::Kind::density, "1 ^ x^-2"};
  const SubexpReport r = check_subexponential(h);
  EXPECT_EQ(r.verdict, SubexpReport::Verdict::pass);
  ASSERT_FALSE(r.ratio.empty());
  EXPECT_NEAR(r.ratio.back(), 2.0, 0.05);
}

// Properties over randomized probes.

class SymbolProperties : public ::testing::TestWithParam<int> {
 protected:
  static JumpMeasure measure(int which) {
    switch (which) {
      case 0: return JumpMeasure(Stable{0.7, 1.3});
      case 1: return JumpMeasure(cauchy_density());
      case 2: return JumpMeasure(DyadicDiscrete{1.2, 1.0});
      default: return JumpMeasure(Atoms{{{0.5, 2.0}, {3.0, 0.25}}});
    }
  }
};

TEST_P(SymbolProperties, EvenAndSandwiched) {
  const JumpMeasure mu = measure(GetParam());
  std::mt19937_64 rng(17 + GetParam());
  std::uniform_real_distribution<double> logxi(-2.0, 4.0);
  for (int i = 0; i < 40; ++i) {
    const double xi = std::pow(10.0, logxi(rng));
    const double q = mu.q(xi);
    EXPECT_EQ(q, mu.q(-xi));
    EXPECT_GE(q, (1.0 - std::cos(1.0)) * mu.qL(xi) * (1.0 - 1e-8));
    EXPECT_LE(q, 2.0 * mu.qU(xi) * (1.0 + 1e-8));
  }
  EXPECT_EQ(mu.q(0.0), 0.0);
}

TEST_P(SymbolProperties, UpperMomentIsContinuous) {
  const JumpMeasure mu = measure(GetParam());
  for (double xi : {0.7, 2.0, 30.0}) {
    const double d1 = std::abs(mu.qU(xi + 1e-4) - mu.qU(xi));
    const double d2 = std::abs(mu.qU(xi + 1e-7) - mu.qU(xi));
    EXPECT_LE(d2, d1 + 1e-12);
    EXPECT_LT(d2, 1e-5 * (1.0 + mu.qU(xi)));
  }
}

INSTANTIATE_TEST_SUITE_P(Measures, SymbolProperties, ::testing::Range(0, 4));

TEST(ExponentProperty, ScalingIsMonotoneAndInverse) {
  for (const JumpMeasure& mu :
       {JumpMeasure(Stable{1.3, 1.0}), JumpMeasure(cauchy_density()),
        JumpMeasure(DyadicDiscrete{1.2, 1.0})}) {
    double prev = 0.0;
    for (double t : {1.0, 0.5, 0.2, 0.1, 0.03, 0.01}) {
      const double rho = scaling_rho(mu, t);
      EXPECT_GT(rho, prev);
      EXPECT_NEAR(mu.qU(rho) * t, 1.0, 1e-9);
      prev = rho;
    }
  }
}

TEST(ExponentProperty, StableScalingLaw) {
  for (double a : {0.5, 1.0, 1.7}) {
    const JumpMeasure mu(Stable{a, 0.8});
    for (double t : {0.4, 0.1})
      EXPECT_NEAR(scaling_rho(mu, t) / scaling_rho(mu, 2.0 * t), std::pow(2.0, 1.0 / a), 1e-6);
  }
}

TEST(Measure, ValidationRejectsBadParameters) {
  EXPECT_THROW(JumpMeasure(Stable{2.0, 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW(JumpMeasure(DyadicDiscrete{2.5, 1.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(JumpMeasure(DyadicDiscrete{1.2, 1.0}).validate());
}

TEST(Measure, CauchyTailAndMoments) {
  const JumpMeasure mu = cauchy_line();
  // mu{|u| > v} = 2 / (pi v), int_{|u|<=v} u^2 = 2 v / pi
  for (double v : {0.1, 1.0, 20.0}) {
    EXPECT_NEAR(mu.tail(v), 2.0 / (pi * v), 1e-8 / v);
    EXPECT_NEAR(mu.second_moment(v), 2.0 * v / pi, 1e-8 * v);
  }
  EXPECT_TRUE(std::isinf(mu.abs_moment(0.5, 1.0)));
}
