#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ltail/aggregate.hpp"
#include "ltail/distributions.hpp"
#include "ltail/errors.hpp"
#include "ltail/expansion.hpp"

using namespace ltail;

namespace {

ExpansionContext ctx_for(const char* spec, std::vector<double> w, FnMethod method = FnMethod::exact_n2,
                         std::optional<MonteCarloConfig> mc = {}) {
  return ExpansionContext(parse_model(spec), make_weights(std::move(w)), method, mc);
}

}  // namespace

TEST(Constants, KappaAndPhi) {
  const auto half = ctx_for("std_pareto:alpha=0.5", {1, 1});
  EXPECT_NEAR(half.kappa(), 0.0, 1e-10);
  EXPECT_NEAR(half.phi_alpha(), 0.0, 1e-10);
  EXPECT_EQ(half.l(), 0);

  const auto one = ctx_for("std_pareto:alpha=1", {1, 1});
  EXPECT_TRUE(one.integer_case());
  EXPECT_NEAR(one.kappa(), 2.0, 1e-14);
  EXPECT_EQ(one.l(), 0);
  EXPECT_THROW(one.phi_alpha(), DomainError);

  EXPECT_EQ(ctx_for("burr:a=0.8,b=2.5", {1, 1}).l(), 1);
  EXPECT_EQ(ctx_for("frechet:alpha=1.5", {1, 1}).l(), 1);
  EXPECT_EQ(ctx_for("pareto:alpha=4,theta=1", {1, 1}).l(), 3);
}

TEST(Constants, KappaPhiIdentityGrid) {
  for (int k = 1; k <= 9; ++k) {
    if (k == 5) continue;
    const double a = k / 10.0;
    const ExpansionContext c(TailModel(family::StdPareto{a}), make_weights({1, 1}), FnMethod::exact_n2);
    const double target = -(1.0 - 2.0 * a) * beta_fn(1.0 - a, 1.0 - a);
    EXPECT_NEAR(c.kappa(), target, 1e-8 * std::abs(target)) << a;
    EXPECT_NEAR(c.phi_alpha(), target, 1e-8 * std::abs(target)) << a;
  }
}

TEST(Constants, HAndStars) {
  const auto b = ctx_for("burr:a=0.8,b=2.5", {1, 1});
  EXPECT_DOUBLE_EQ(b.h_alpha(), 2.0);
  EXPECT_DOUBLE_EQ(b.rho_star(), -1.0);
  EXPECT_DOUBLE_EQ(b.alpha_star(), 1.0);
  const auto f = ctx_for("frechet:alpha=0.5", {1, 1});
  EXPECT_NEAR(f.h_alpha(), std::sqrt(2.0) - 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(f.rho_star(), -0.5);
  EXPECT_DOUBLE_EQ(f.alpha_star(), 0.5);
  EXPECT_DOUBLE_EQ(ctx_for("g_and_h:g=2,h=0.5", {1, 1}).rho_star(), 0.0);
}

TEST(DCoeff, Behaviour) {
  const auto small = ctx_for("frechet:alpha=0.5", {1, 1});
  for (double x : {2.0, 50.0}) EXPECT_EQ(small.d_coeff(x), 1.0);

  // l = 1: 1 - F'(x)/F(x) E[X] = 1 + 1.5 * 3 / x
  const auto p15 = ctx_for("std_pareto:alpha=1.5", {1, 1});
  for (double x : {10.0, 100.0, 1e3, 1e4}) EXPECT_NEAR(p15.d_coeff(x), 1.0 + 4.5 / x, 1e-13);
  const double c = (p15.d_coeff(100.0) - 1.0) * 100.0;
  for (double x : {1e3, 1e4}) EXPECT_LE(std::abs(p15.d_coeff(x) - 1.0), c / x * (1.0 + 1e-12));

  // Moments beyond the first are unavailable for n > 2 without Monte Carlo.
  const auto n3 = ctx_for("burr:a=1,b=2.5", {1, 1, 1}, FnMethod::asymptotic);
  EXPECT_EQ(n3.l(), 2);
  EXPECT_THROW(n3.d_coeff(10.0), MethodError);
  EXPECT_THROW(n3.tail_approx(10.0, TailOrder::higher), MethodError);
  const auto n3mc = ctx_for("burr:a=1,b=2.5", {1, 1, 1}, FnMethod::asymptotic, MonteCarloConfig{200000, 3, 0});
  EXPECT_GT(n3mc.moment(2), 0.0);
  EXPECT_NO_THROW(n3mc.tail_approx(10.0, TailOrder::higher));
}

TEST(RemainderScale, Branches) {
  const auto f = ctx_for("frechet:alpha=1.5", {1, 1});
  EXPECT_FALSE(f.integer_case());
  EXPECT_EQ(f.remainder_scale(5.0), f.model().survival(5.0));
  EXPECT_TRUE(ctx_for("burr:a=0.8,b=2.5", {1, 1}).integer_case());
  // Integer case std_pareto(1), c~ = 1/2: x^-1 int_1^{x/2} u dF = ln(x/2)/x.
  const auto p1 = ctx_for("std_pareto:alpha=1", {1, 1});
  for (double x : {10.0, 1000.0}) EXPECT_NEAR(p1.remainder_scale(x), std::log(x / 2.0) / x, 1e-10);
  EXPECT_EQ(p1.remainder_scale(1.5), 0.0);
  EXPECT_THROW(ctx_for("std_pareto:alpha=2", {1, 1, 1}, FnMethod::asymptotic).remainder_scale(10.0), MethodError);
}

TEST(EpsX, ParetoClosedForms) {
  const auto p1 = ctx_for("std_pareto:alpha=1", {1, 1});
  for (double x : {10.0, 100.0, 1e4}) EXPECT_NEAR(p1.eps_x(x), std::log(x) / x, 1e-10);
  const auto p1a = ctx_for("std_pareto:alpha=1", {1, 1}, FnMethod::asymptotic);
  EXPECT_NEAR(p1a.eps_x(100.0), std::log(100.0) / 100.0, 1e-10);

  // The exact correction and E(x) agree to first order.
  double prev = 1.0;
  for (double x = 1e2; x <= 1e5; x *= 2.0) {
    const double gap = std::abs(pareto_exact_eps(1.0, 1.0, x) / p1.eps_x(x) - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 0.01);

  // 0 < a < 1 with asymptotic F_n: E(x) ~ (n - 1) phi F(x) / 2.
  const auto f = ctx_for("frechet:alpha=0.25", {1, 1}, FnMethod::asymptotic);
  const double x = 1e12;
  EXPECT_NEAR(f.eps_x(x) / (0.5 * f.phi_alpha() * f.model().survival(x)), 1.0, 1e-3);
}

TEST(EpsX, RegularVariationIndex) {
  for (const char* spec : {"burr:a=0.8,b=2.5", "frechet:alpha=0.75", "std_pareto:alpha=1.5"}) {
    const auto c = ctx_for(spec, {1, 1});
    const double x = 1e4;
    EXPECT_NEAR(c.eps_x(2 * x) / c.eps_x(x), std::pow(2.0, -c.alpha_star()), 0.05 * std::pow(2.0, -c.alpha_star()))
        << spec;
  }
}

TEST(TailApprox, ParetoValues) {
  const auto p1 = ctx_for("std_pareto:alpha=1", {1, 1});
  EXPECT_DOUBLE_EQ(p1.tail_approx(100.0, TailOrder::first).value, 0.02);
  EXPECT_NEAR(p1.tail_approx(100.0, TailOrder::second).value, 0.02 * (1.0 + std::log(100.0) / 100.0), 1e-12);
  EXPECT_NEAR(p1.tail_approx(100.0, TailOrder::second).value, 0.0209210340, 1e-10);
  // c1 only rescales the threshold.
  const auto scaled = ctx_for("burr:a=0.8,b=2.5", {2, 2});
  const auto unit = ctx_for("burr:a=0.8,b=2.5", {1, 1});
  for (auto order : {TailOrder::first, TailOrder::second, TailOrder::higher}) {
    EXPECT_NEAR(scaled.tail_approx(20.0, order).value, unit.tail_approx(10.0, order).value, 1e-15);
  }
}

TEST(TailApprox, FlagsAndDegenerateCase) {
  const auto half = ctx_for("std_pareto:alpha=0.5", {1, 1});
  EXPECT_TRUE(half.tail_approx(100.0, TailOrder::higher).degenerate);
  EXPECT_FALSE(half.tail_approx(100.0, TailOrder::first).degenerate);
  EXPECT_TRUE(half.tail_approx(1.5, TailOrder::first).exceeds_one);
  EXPECT_FALSE(ctx_for("std_pareto:alpha=0.75", {1, 1}).tail_approx(100.0, TailOrder::higher).degenerate);
}

TEST(TailApprox, SecondOrderBeatsFirstOnPareto) {
  const auto p1 = ctx_for("std_pareto:alpha=1", {1, 1});
  for (double x : {10.0, 100.0, 1000.0, 1e4}) {
    const double exact = exact_tail_n2(p1.model(), p1.weights(), x);
    EXPECT_LT(std::abs(p1.tail_approx(x, TailOrder::second).value - exact),
              std::abs(p1.tail_approx(x, TailOrder::first).value - exact))
        << x;
  }
}

TEST(TailApprox, HigherOrderConvergesOnBurr) {
  const auto b = ctx_for("burr:a=0.8,b=2.5", {1, 1});
  double prev = 1.0;
  for (double x : {10.0, 100.0, 1000.0}) {
    const double exact = exact_tail_n2(b.model(), b.weights(), x);
    const double err = std::abs(b.tail_approx(x, TailOrder::higher).value / exact - 1.0);
    EXPECT_LT(err, prev) << x;
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(DeltaMax, MatchesExactGapForSmallAlpha) {
  // Delta(x) = P(S > x) - P(X_{2,2} > x); Delta / F(x)^2 stays bounded for a < 1.
  const auto c = ctx_for("frechet:alpha=0.75", {1, 1});
  for (double x : {1e2, 1e3, 1e4, 1e5}) {
    const double f = c.model().survival(x);
    const double exact_gap = exact_tail_n2(c.model(), c.weights(), x) - (1.0 - (1.0 - f) * (1.0 - f));
    EXPECT_LT(std::abs(exact_gap) / (f * f), 10.0) << x;
    EXPECT_LT(std::abs(c.delta_max(x) - exact_gap) / (f * f), 10.0) << x;
  }
}

TEST(Proxy, SelfProxyReducesToHigherOrder) {
  const auto b = ctx_for("burr:a=0.8,b=2.5", {1, 1});
  for (double x : {5.0, 50.0}) {
    EXPECT_NEAR(b.tail_with_proxy(b.model(), x), b.tail_approx(x, TailOrder::higher).value, 1e-15);
  }
  EXPECT_THROW(b.tail_with_proxy(parse_model("std_pareto:alpha=1.5"), 10.0), DomainError);
  // Power-law proxy with matching k1 tracks the exact tail.
  const double x = 100.0;
  const double exact = exact_tail_n2(b.model(), b.weights(), x);
  EXPECT_NEAR(b.tail_with_proxy(power_proxy(b.model()), x) / exact, 1.0, 1e-3);
}

TEST(AStar, ExactFormVersusAsymptotic) {
  const auto b = ctx_for("burr:a=0.8,b=2.5", {1, 1});
  double prev = 1.0;
  for (double x : {10.0, 100.0, 1000.0, 1e4}) {
    const double gap = std::abs(b.aux_A_star(x, AStarMode::exact_form) / b.aux_A_star(x, AStarMode::asymptotic) - 1.0);
    EXPECT_LT(gap, prev) << x;
    prev = gap;
  }
  EXPECT_LT(prev, 1e-3);
  // rho > -alpha*: A* is A itself.
  const auto gh = ctx_for("g_and_h:g=2,h=0.5", {1, 1});
  EXPECT_DOUBLE_EQ(gh.aux_A_star(50.0, AStarMode::asymptotic), gh.model().aux_A(50.0));
  // a >= 1, rho < -1: -a mu_F.
  EXPECT_NEAR(b.aux_A_star(100.0, AStarMode::asymptotic), -2.0 * b.law().mu_f(100.0, MuMode::asymptotic), 1e-15);
}
