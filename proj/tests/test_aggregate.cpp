#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ltail/aggregate.hpp"
#include "ltail/distributions.hpp"
#include "ltail/errors.hpp"

using namespace ltail;

namespace {

bool inside(double v, const Interval& ci) { return v >= ci.low && v <= ci.high; }

}  // namespace

TEST(Weights, Normalization) {
  const auto a = make_weights({1.0, 1.0});
  EXPECT_EQ(a.n, 2);
  EXPECT_DOUBLE_EQ(a.c_tilde, 0.5);

  const auto b = make_weights({0.5, 1.0});
  EXPECT_DOUBLE_EQ(b.c1, 0.5);
  EXPECT_EQ(b.normalized, (std::vector<double>{1.0, 2.0}));
  EXPECT_DOUBLE_EQ(b.c_tilde, 2.0 / 3.0);

  const auto c = make_weights({2.0, 1.0, 0.0});
  EXPECT_EQ(c.normalized, (std::vector<double>{1.0, 0.5, 0.0}));
  EXPECT_NEAR(c.c_tilde, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(c.sub_weights().size(), 2u);

  EXPECT_THROW(make_weights({0.0, 1.0}), DomainError);
  EXPECT_THROW(make_weights({1.0, 0.0}), DomainError);
  EXPECT_THROW(make_weights({1.0, 1.0, -0.1}), DomainError);
  EXPECT_THROW(make_weights({1.0}), DomainError);
}

TEST(Sampler, BitIdenticalAcrossRunsAndWorkers) {
  const TailModel m = parse_model("frechet:alpha=1.5");
  const auto w = make_weights({1.0, 0.7, 0.2});
  const auto a = sample_lstat_values(m, w.raw, 30001, 5, 1);
  const auto b = sample_lstat_values(m, w.raw, 30001, 5, 4);
  const auto c = sample_lstat_values(m, w.raw, 30001, 5, 0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a, sample_lstat_values(m, w.raw, 30001, 6, 1));
  // A prefix of a longer run is the shorter run.
  const auto d = sample_lstat_values(m, w.raw, 1000, 5, 2);
  EXPECT_TRUE(std::equal(d.begin(), d.end(), a.begin()));
}

TEST(Sampler, MaximumOfTwo) {
  const TailModel m = parse_model("burr:a=0.8,b=2.5");
  const std::vector<double> w = {1.0, 0.0};
  const std::size_t n = 1'000'000;
  const EmpiricalSummary s(sample_lstat_values(m, w, n, 17), 17);
  // Three correlated checks; a 4-sigma band keeps the family-wise false alarm rate negligible.
  for (double x : {1.0, 3.0, 10.0}) {
    const double f = 1.0 - m.survival(x);
    const double p = 1.0 - f * f;
    EXPECT_NEAR(s.tail(x).value, p, 4.0 * std::sqrt(p * (1.0 - p) / n)) << x;
  }
}

TEST(Sampler, ParetoSumAgainstConvolution) {
  const TailModel m = parse_model("std_pareto:alpha=1");
  const auto s = sample_lstat(m, make_weights({1.0, 1.0}), 10'000'000, 2024);
  EXPECT_TRUE(inside(0.2439444915, s.tail(10.0)));
}

TEST(Empirical, SmallSample) {
  const EmpiricalSummary s({5.0, 1.0, 4.0, 2.0, 3.0}, 0);
  EXPECT_EQ(s.sorted_values(), (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_EQ(s.tail(0.5).value, 1.0);
  EXPECT_EQ(s.tail(6.0).value, 0.0);
  EXPECT_EQ(s.tail(3.0).value, 0.4);
  EXPECT_EQ(s.var_rank(0.6), 3u);
  EXPECT_EQ(s.var(0.6), 3.0);
  EXPECT_EQ(s.var(0.61), 4.0);
  EXPECT_DOUBLE_EQ(s.cte(0.6).value, 4.5);
  EXPECT_TRUE(s.cte(0.6).low_precision);
  // VaR_r is 4 on (0.6, 0.8] and 5 on (0.8, 1): TVaR_0.6 = (0.2*4 + 0.2*5)/0.4.
  EXPECT_DOUBLE_EQ(s.tvar(0.6), 4.5);
  // Weight ln((1-p)/(1-r)) integrates to 0.2(1 - ln 2) on (0.6,0.8] and 0.2(1 + ln 2) on (0.8,1).
  const double expected = (4.0 * 0.2 * (1.0 - std::log(2.0)) + 5.0 * 0.2 * (1.0 + std::log(2.0))) / 0.4;
  EXPECT_NEAR(s.tcte(0.6), expected, 1e-14);
  EXPECT_DOUBLE_EQ(s.stop_loss(3.5).value, (0.5 + 1.5) / 5.0);
  EXPECT_DOUBLE_EQ(s.moment(2), 11.0);
  EXPECT_THROW(EmpiricalSummary({}, 0), DomainError);
  EXPECT_THROW(s.tvar(1.0), DomainError);
}

TEST(Empirical, BootstrapIsSeededAndCoversPoint) {
  const TailModel m = parse_model("burr:a=0.8,b=2.5");
  const auto s = sample_lstat(m, make_weights({1.0, 1.0}), 200000, 3);
  const auto a = bootstrap_var_cte(s, 0.99, 100, 11);
  const auto b = bootstrap_var_cte(s, 0.99, 100, 11);
  EXPECT_EQ(a.var.low, b.var.low);
  EXPECT_EQ(a.cte.high, b.cte.high);
  EXPECT_EQ(a.var.value, s.var(0.99));
  EXPECT_LE(a.var.low, a.var.value);
  EXPECT_GE(a.var.high, a.var.value);
  EXPECT_LE(a.cte.low, a.cte.value);
  EXPECT_GE(a.cte.high, a.cte.value);
}

TEST(Moments, SubAggregate) {
  const TailModel p2 = parse_model("std_pareto:alpha=2");
  EXPECT_DOUBLE_EQ(moment_s_prev(p2, make_weights({1.0, 2.0}), 1, ClosedN2{}), 4.0);
  EXPECT_DOUBLE_EQ(moment_s_prev(p2, make_weights({1.0, 2.0}), 0, ClosedN2{}), 1.0);
  EXPECT_THROW(moment_s_prev(p2, make_weights({1.0, 1.0}), 2, ClosedN2{}), DomainError);
  EXPECT_THROW(moment_s_prev(p2, make_weights({1.0, 1.0, 1.0}), 1, ClosedN2{}), MethodError);

  // Pareto order statistics: E of the k-th largest of m is m! G(k - 1/a) / ((k-1)! G(m + 1 - 1/a)).
  EXPECT_NEAR(expected_order_stat(p2, 2, 1), 8.0 / 3.0, 1e-9);
  EXPECT_NEAR(expected_order_stat(p2, 2, 2), 4.0 / 3.0, 1e-9);
  const auto w3 = make_weights({1.0, 1.0, 1.0});
  EXPECT_NEAR(moment_s_prev(p2, w3, 1, OrderStatistics{}), 4.0, 1e-8);
  const double mc = moment_s_prev(p2, w3, 1, MonteCarloConfig{1'000'000, 8, 0});
  EXPECT_NEAR(mc, 4.0, 0.05);

  const TailModel burr = parse_model("burr:a=0.8,b=2.5");
  EXPECT_NEAR(expected_order_stat(burr, 3, 2), 1.30666273660454, 1e-9);
}

TEST(SubAggregateLaw, SurvivalBranches) {
  const TailModel p1 = parse_model("std_pareto:alpha=1");
  EXPECT_DOUBLE_EQ(SubAggregateLaw(p1, make_weights({1.0, 1.0}), FnMethod::exact_n2).survival(10.0), 0.1);
  EXPECT_DOUBLE_EQ(SubAggregateLaw(p1, make_weights({1.0, 2.0}), FnMethod::exact_n2).survival(10.0), 0.2);
  EXPECT_DOUBLE_EQ(SubAggregateLaw(p1, make_weights({1.0, 1.0, 1.0}), FnMethod::asymptotic).survival(50.0), 0.04);
  EXPECT_THROW(SubAggregateLaw(p1, make_weights({1.0, 1.0, 1.0}), FnMethod::exact_n2), MethodError);
  EXPECT_THROW(SubAggregateLaw(p1, make_weights({1.0, 1.0}), FnMethod::monte_carlo), MethodError);

  // First-order relation P(S_{n-1} > x) ~ (n-1) c2^a F(x) in the deep tail.
  const TailModel burr = parse_model("burr:a=0.8,b=2.5");
  const auto w = make_weights({1.0, 1.0, 0.5});
  const SubAggregateLaw mc(burr, w, FnMethod::monte_carlo, MonteCarloConfig{2'000'000, 4, 0});
  const double x = 30.0;
  const auto ci = mc.sample().tail(x);
  const double first = 2.0 * burr.survival(x);
  EXPECT_NEAR(ci.value / first, 1.0, 0.1);
}

TEST(SubAggregateLaw, MuF) {
  const TailModel p1 = parse_model("std_pareto:alpha=1");
  const SubAggregateLaw law(p1, make_weights({1.0, 1.0}), FnMethod::exact_n2);
  for (double x : {10.0, 1000.0}) {
    EXPECT_NEAR(law.mu_f(x, MuMode::asymptotic), std::log(x) / x, 1e-9);
    EXPECT_NEAR(law.mu_f(x, MuMode::definition), std::log(x) / x, 1e-9);
  }
  const TailModel f05 = parse_model("frechet:alpha=0.5");
  const SubAggregateLaw l05(f05, make_weights({1.0, 2.0}), FnMethod::exact_n2);
  EXPECT_NEAR(l05.mu_f(100.0, MuMode::asymptotic), std::sqrt(2.0) * f05.survival(100.0), 1e-15);
  EXPECT_DOUBLE_EQ(l05.mu_f(100.0, MuMode::definition), f05.survival(50.0));
  EXPECT_EQ(law.v_alpha(0.0), 0.0);
}

TEST(SubAggregateLaw, VAlphaLimit) {
  const auto w = make_weights({1.0, 1.0});
  // h_a = c^-a (1 - (1-c)^-a) + a I(a, c) for a < 1; a for a >= 1.
  const SubAggregateLaw l05(parse_model("std_pareto:alpha=0.5"), w, FnMethod::exact_n2);
  const double h05 = std::sqrt(2.0) * (1.0 - std::sqrt(2.0)) + 0.5 * integral_I(0.5, 0.5);
  EXPECT_NEAR(h05, std::sqrt(2.0) - 1.0, 1e-9);
  EXPECT_NEAR(l05.v_alpha(1e4) / l05.mu_f(1e4, MuMode::definition), h05, 0.05 * h05);
  const SubAggregateLaw l15(parse_model("std_pareto:alpha=1.5"), w, FnMethod::exact_n2);
  EXPECT_NEAR(l15.v_alpha(1e4) / l15.mu_f(1e4, MuMode::definition), 1.5, 0.05 * 1.5);
}

TEST(ExactOracles, TailN2) {
  const auto w11 = make_weights({1.0, 1.0});
  const TailModel p1 = parse_model("std_pareto:alpha=1");
  EXPECT_NEAR(exact_tail_n2(p1, w11, 10.0), 0.2439444915, 1e-9);
  EXPECT_NEAR(exact_tail_n2(p1, w11, 100.0), 0.0209190240, 1e-10);
  EXPECT_EQ(exact_tail_n2(p1, w11, 1.5), 1.0);
  const TailModel burr = parse_model("burr:a=0.8,b=2.5");
  EXPECT_NEAR(exact_tail_n2(burr, w11, 10.0), 0.0282735319732723, 1e-12);
  EXPECT_NEAR(exact_tail_n2(burr, make_weights({1.0, 0.5}), 10.0), 0.0233655001172233, 1e-12);
  // Weight scaling: c1 = 2 doubles the threshold.
  EXPECT_NEAR(exact_tail_n2(burr, make_weights({2.0, 1.0}), 20.0), exact_tail_n2(burr, make_weights({1.0, 0.5}), 10.0),
              1e-13);
  EXPECT_THROW(exact_tail_n2(burr, make_weights({1.0, 1.0, 1.0}), 10.0), MethodError);
}

TEST(ExactOracles, StopLossAndEps) {
  const auto w = make_weights({1.0, 1.0});
  EXPECT_NEAR(exact_stop_loss_n2(parse_model("std_pareto:alpha=2"), w, 100.0), 0.0204183804794005, 1e-10);
  EXPECT_NEAR(pareto_exact_eps(1.0, 1.0, 100.0), std::log(99.0) / 100.0, 1e-13);
  EXPECT_THROW(pareto_exact_eps(1.0, 1.0, 2.0), DomainError);
  for (double x : {5.0, 50.0, 500.0}) {
    const double via_eps = 2.0 / x * (1.0 + pareto_exact_eps(1.0, 1.0, x));
    EXPECT_NEAR(via_eps, exact_tail_n2(parse_model("std_pareto:alpha=1"), w, x), 1e-12);
  }
}
