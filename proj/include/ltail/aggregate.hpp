#pragma once

// The L-statistic S_n(c) = c1 X_{n,n} + c2 X_{n-1,n} + ... and its
// sub-aggregate S_{n-1}(c) = c2 X_{n-1,n-1} + ... : weights, seeded sampling,
// empirical summaries, the law F_n and the exact n = 2 oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ltail/distributions.hpp"
#include "ltail/errors.hpp"
#include "ltail/numerics.hpp"
#include "ltail/random.hpp"

namespace ltail {

struct WeightScheme {
  std::vector<double> raw;
  std::vector<double> normalized;  // raw / c1
  int n = 0;
  double c1 = 1.0;
  double c2 = 1.0;  // normalized second weight
  double c_tilde = 0.5;

  /// Weights of S_{n-1}(c): normalized (c2, ..., cn).
  std::span<const double> sub_weights() const { return std::span<const double>(normalized).subspan(1); }
};

inline WeightScheme make_weights(std::vector<double> raw) {
  if (raw.size() < 2) throw DomainError("weights: need at least two entries");
  if (!(raw[0] > 0.0)) throw DomainError("weights: c1 must be positive");
  if (!(raw[1] > 0.0)) throw DomainError("weights: c2 must be positive");
  for (std::size_t k = 2; k < raw.size(); ++k) {
    if (!(raw[k] >= 0.0) || !std::isfinite(raw[k])) throw DomainError("weights: entries must be non-negative");
  }
  WeightScheme w;
  w.n = static_cast<int>(raw.size());
  w.c1 = raw[0];
  w.normalized.reserve(raw.size());
  for (double c : raw) w.normalized.push_back(c / w.c1);
  w.c2 = w.normalized[1];
  w.c_tilde = w.c2 / (1.0 + w.c2);
  w.raw = std::move(raw);
  return w;
}

// ---------------------------------------------------------------------------
// Sampling

/// Draws `count` values of sum_k weights[k] * (k-th largest of weights.size()
/// iid variates). Risk i of draw k uses the stream (seed, k * n + i), so the
/// output does not depend on `workers` (0 = hardware concurrency).
inline std::vector<double> sample_lstat_values(const TailModel& model, std::span<const double> weights,
                                               std::size_t count, std::uint64_t seed, unsigned workers = 0) {
  if (weights.empty()) throw DomainError("sample_lstat: empty weight vector");
  const std::size_t n = weights.size();
  std::vector<double> out(count);
  auto fill = [&](std::size_t begin, std::size_t end) {
    std::vector<double> draw(n);
    for (std::size_t k = begin; k < end; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        VariateStream stream(seed, static_cast<std::uint64_t>(k * n + i));
        draw[i] = model.sample(stream);
      }
      std::sort(draw.begin(), draw.end(), std::greater<>());
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += weights[i] * draw[i];
      out[k] = s;
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, count / 4096)));
  if (workers <= 1) {
    fill(0, count);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t b = std::min(count, t * chunk);
    const std::size_t e = std::min(count, b + chunk);
    pool.emplace_back(fill, b, e);
  }
  for (auto& th : pool) th.join();
  return out;
}

struct Interval {
  double value;
  double low;
  double high;
};

struct CteEstimate {
  double value;
  std::size_t exceedances;
  bool low_precision;  // fewer than 100 exceedances
};

inline constexpr double kZ95 = 1.959963984540054;

/// Sorted sample of an L-statistic plus the seed that produced it.
class EmpiricalSummary {
 public:
  EmpiricalSummary(std::vector<double> values, std::uint64_t seed) : values_(std::move(values)), seed_(seed) {
    if (values_.empty()) throw DomainError("EmpiricalSummary: empty sample");
    std::sort(values_.begin(), values_.end());
  }

  std::size_t count() const { return values_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& sorted_values() const { return values_; }

  /// Fraction of the sample above x with a 95% Wilson interval.
  Interval tail(double x) const {
    const auto above = static_cast<double>(values_.end() - std::upper_bound(values_.begin(), values_.end(), x));
    const double nn = static_cast<double>(values_.size());
    const double ph = above / nn;
    const double z2 = kZ95 * kZ95;
    const double centre = (ph + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = kZ95 / (1.0 + z2 / nn) * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn));
    return {ph, std::max(0.0, centre - half), std::min(1.0, centre + half)};
  }

  /// 1-based rank ceil(p N), clamped to [1, N].
  std::size_t var_rank(double p) const {
    const double nn = static_cast<double>(values_.size());
    const double r = std::ceil(p * nn);
    return static_cast<std::size_t>(std::clamp(r, 1.0, nn));
  }

  double var(double p) const { return values_[var_rank(p) - 1]; }

  CteEstimate cte(double p) const {
    const double threshold = var(p);
    const auto first = std::upper_bound(values_.begin(), values_.end(), threshold);
    const auto k = static_cast<std::size_t>(values_.end() - first);
    if (k == 0) return {threshold, 0, true};
    const double sum = std::accumulate(first, values_.end(), 0.0);
    return {sum / static_cast<double>(k), k, k < 100};
  }

  /// (1-p)^-1 times the integral of the empirical VaR_r over r in (p, 1).
  double tvar(double p) const {
    return tail_integral(p, [](double, double r0, double r1) { return r1 - r0; });
  }

  /// (1-p)^-1 times the integral of the empirical CTE_r over r in (p, 1),
  /// rewritten as the integral of VaR_r ln((1-p)/(1-r)).
  double tcte(double p) const {
    auto weight = [](double p0, double r0, double r1) {
      auto antideriv = [p0](double r) {
        const double u = 1.0 - r;
        return u <= 0.0 ? 0.0 : -u * (std::log((1.0 - p0) / u) + 1.0);
      };
      return antideriv(r1) - antideriv(r0);
    };
    return tail_integral(p, weight);
  }

  /// Mean of max(S - d, 0) with a normal 95% interval.
  Interval stop_loss(double d) const {
    const auto first = std::upper_bound(values_.begin(), values_.end(), d);
    double sum = 0.0;
    double sum2 = 0.0;
    for (auto it = first; it != values_.end(); ++it) {
      const double e = *it - d;
      sum += e;
      sum2 += e * e;
    }
    const double nn = static_cast<double>(values_.size());
    const double mean = sum / nn;
    const double var = std::max(0.0, sum2 / nn - mean * mean) * nn / std::max(1.0, nn - 1.0);
    const double half = kZ95 * std::sqrt(var / nn);
    return {mean, mean - half, mean + half};
  }

  double moment(int j) const {
    double s = 0.0;
    for (double v : values_) s += std::pow(v, j);
    return s / static_cast<double>(values_.size());
  }

 private:
  template <class W>
  double tail_integral(double p, W weight) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("empirical tail measure: p must lie in (0, 1)");
    const double nn = static_cast<double>(values_.size());
    double acc = 0.0;
    for (std::size_t k = var_rank(p); k <= values_.size(); ++k) {
      const double r0 = std::max(p, (static_cast<double>(k) - 1.0) / nn);
      const double r1 = static_cast<double>(k) / nn;
      if (r1 > r0) acc += values_[k - 1] * weight(p, r0, r1);
    }
    return acc / (1.0 - p);
  }

  std::vector<double> values_;
  std::uint64_t seed_;
};

inline EmpiricalSummary sample_lstat(const TailModel& model, const WeightScheme& w, std::size_t count,
                                     std::uint64_t seed, unsigned workers = 0) {
  if (count < 1) throw DomainError("sample_lstat: count must be at least 1");
  return EmpiricalSummary(sample_lstat_values(model, w.raw, count, seed, workers), seed);
}

struct BootstrapResult {
  Interval var;
  Interval cte;
};

/// Percentile bootstrap for the empirical VaR_p and CTE_p. Only the top
/// block of the sorted sample can influence either statistic, so each
/// resample draws how many of its N picks land in that block and then picks
/// only those.
inline BootstrapResult bootstrap_var_cte(const EmpiricalSummary& s, double p, int resamples, std::uint64_t seed) {
  if (resamples < 10) throw DomainError("bootstrap: need at least 10 resamples");
  const auto& v = s.sorted_values();
  const std::size_t n = v.size();
  const std::size_t r = n - s.var_rank(p) + 1;  // VaR is the r-th largest
  const std::size_t block = std::min<std::size_t>(
      n, 2 * r + 50 + 10 * static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(r)))));
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::size_t> in_block(n, static_cast<double>(block) / static_cast<double>(n));
  std::uniform_int_distribution<std::size_t> pick_block(n - block, n - 1);
  std::uniform_int_distribution<std::size_t> pick_any(0, n - 1);
  std::vector<double> vars;
  std::vector<double> ctes;
  std::vector<double> draw;
  for (int b = 0; b < resamples; ++b) {
    const std::size_t k = in_block(rng);
    draw.clear();
    if (k >= r) {
      for (std::size_t i = 0; i < k; ++i) draw.push_back(v[pick_block(rng)]);
    } else {
      for (std::size_t i = 0; i < n; ++i) draw.push_back(v[pick_any(rng)]);
    }
    std::nth_element(draw.begin(), draw.begin() + static_cast<std::ptrdiff_t>(r - 1), draw.end(), std::greater<>());
    const double q = draw[r - 1];
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i + 1 < r; ++i) {
      if (draw[i] > q) {
        sum += draw[i];
        ++cnt;
      }
    }
    vars.push_back(q);
    ctes.push_back(cnt ? sum / static_cast<double>(cnt) : q);
  }
  auto percentile = [](std::vector<double>& xs, double point) {
    std::sort(xs.begin(), xs.end());
    const double pos = 0.025 * static_cast<double>(xs.size() - 1);
    const double pos_hi = 0.975 * static_cast<double>(xs.size() - 1);
    auto at = [&xs](double q) {
      const auto lo = static_cast<std::size_t>(std::floor(q));
      const auto hi = std::min(xs.size() - 1, lo + 1);
      return xs[lo] + (q - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
    };
    return Interval{point, at(pos), at(pos_hi)};
  };
  return {percentile(vars, s.var(p)), percentile(ctes, s.cte(p).value)};
}

// ---------------------------------------------------------------------------
// The law F_n of S_{n-1}(c)

enum class FnMethod { exact_n2, monte_carlo, asymptotic };
enum class MuMode { definition, asymptotic };

inline std::string_view fn_method_name(FnMethod m) {
  switch (m) {
    case FnMethod::exact_n2: return "exact_n2";
    case FnMethod::monte_carlo: return "monte_carlo";
    case FnMethod::asymptotic: return "asymptotic";
  }
  return "?";
}

struct MonteCarloConfig {
  std::size_t count = 1000000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct ClosedN2 {};
/// E[S_{n-1}(c)] from order-statistic quadrature (exact, j = 1 only).
struct OrderStatistics {};
using MomentMethod = std::variant<ClosedN2, OrderStatistics, MonteCarloConfig>;

/// E[k-th largest of m iid draws].
inline double expected_order_stat(const TailModel& model, int m, int k) {
  if (!(model.alpha() > 1.0)) throw DomainError("expected_order_stat: infinite mean");
  if (k < 1 || k > m) throw DomainError("expected_order_stat: rank out of range");
  // Density of the survival level s of the k-th largest: Beta(k, m - k + 1).
  const double log_c = ln_gamma(m + 1.0) - ln_gamma(k) - ln_gamma(m - k + 1.0);
  auto weight = [=](double s) {
    return std::exp(log_c + (k - 1) * std::log(s) + (m - k) * std::log1p(-s));
  };
  const QuadratureSpec spec{1e-300, 1e-11, 60};
  if (const auto* gh = std::get_if<family::GAndH>(&model.params())) {
    const double reach = std::sqrt(1500.0 / (1.0 - gh->h));
    auto f = [&](double z) { return gh->transform(z) * weight(normal_survival(z)) *
                                    std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
    return integrate(f, -reach, 0.0, spec) + integrate(f, 0.0, reach, spec);
  }
  auto f = [&](double s) { return model.tail_quantile(s) * weight(s); };
  return integrate(f, 0.0, 1.0, spec, EndpointSingularities{model.tail_singularity(1.0), std::nullopt});
}

/// E[S_{n-1}(c)^j].
inline double moment_s_prev(const TailModel& model, const WeightScheme& w, int j, const MomentMethod& method) {
  if (j < 0) throw DomainError("moment_s_prev: negative order");
  if (j == 0) return 1.0;
  if (!(j < model.alpha())) throw DomainError("moment_s_prev: moment of order " + std::to_string(j) + " is infinite");
  const auto sub = w.sub_weights();
  if (std::holds_alternative<ClosedN2>(method)) {
    if (w.n != 2) throw MethodError("moment_s_prev: closed form needs n = 2");
    return std::pow(w.c2, j) * model.raw_moment(j);
  }
  if (std::holds_alternative<OrderStatistics>(method)) {
    if (j != 1) throw MethodError("moment_s_prev: order-statistic quadrature only gives the first moment");
    const int m = w.n - 1;
    double mean = 0.0;
    for (int k = 1; k <= m; ++k) {
      if (sub[k - 1] != 0.0) mean += sub[k - 1] * expected_order_stat(model, m, k);
    }
    return mean;
  }
  const auto& mc = std::get<MonteCarloConfig>(method);
  const auto values = sample_lstat_values(model, sub, mc.count, mc.seed, mc.workers);
  double acc = 0.0;
  for (double v : values) acc += std::pow(v, j);
  return acc / static_cast<double>(values.size());
}

/// Distribution facilities for S_{n-1}(c) under a chosen evaluation method.
class SubAggregateLaw {
 public:
  SubAggregateLaw(TailModel model, WeightScheme w, FnMethod method, std::optional<MonteCarloConfig> mc = {})
      : model_(std::move(model)), w_(std::move(w)), method_(method), mc_(mc) {
    if (method_ == FnMethod::exact_n2 && w_.n != 2) {
      throw MethodError("exact_n2 evaluation requested with n = " + std::to_string(w_.n));
    }
    if (method_ == FnMethod::monte_carlo) {
      if (!mc_) throw MethodError("monte_carlo evaluation needs a Monte Carlo configuration");
      sample();
    }
  }

  const TailModel& model() const { return model_; }
  const WeightScheme& weights() const { return w_; }
  FnMethod method() const { return method_; }
  const std::optional<MonteCarloConfig>& mc() const { return mc_; }

  /// P(S_{n-1}(c) > x).
  double survival(double x) const {
    switch (method_) {
      case FnMethod::exact_n2:
        return model_.survival(x / w_.c2);
      case FnMethod::monte_carlo:
        return sample().tail(x).value;
      case FnMethod::asymptotic:
        return std::clamp((w_.n - 1) * std::pow(w_.c2, model_.alpha()) * model_.survival(x), 0.0, 1.0);
    }
    return 0.0;
  }

  /// Integral of u^r dF_n(u) over [0, y].
  double truncated_power(double y, double r) const {
    if (!(y > 0.0)) return 0.0;
    if (w_.n == 2 && method_ != FnMethod::monte_carlo) {
      return std::pow(w_.c2, r) * model_.truncated_power_moment(y / w_.c2, r);
    }
    if (method_ != FnMethod::monte_carlo) {
      throw MethodError("truncated moments of F_n need exact_n2 or monte_carlo evaluation");
    }
    const auto& v = sample().sorted_values();
    double acc = 0.0;
    for (auto it = std::lower_bound(v.begin(), v.end(), 0.0); it != v.end() && *it <= y; ++it) {
      acc += std::pow(*it, r);
    }
    return acc / static_cast<double>(v.size());
  }

  double mu_f(double x, MuMode mode) const {
    const double alpha = model_.alpha();
    if (mode == MuMode::definition) {
      if (alpha < 1.0) return survival(x);
      return truncated_power(x, 1.0) / x;
    }
    const int m = w_.n - 1;
    if (alpha < 1.0) return m * std::pow(w_.c2, alpha) * model_.survival(x);
    if (model_.has_finite_mean()) return mean() / x;
    return m * w_.c2 * model_.truncated_first_moment(x) / x;
  }

  /// integral over [0, c~ x] of ((1 - u/x)^-alpha - 1) dF_n(u).
  double v_alpha(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double alpha = model_.alpha();
    const double top = w_.c_tilde * x;
    if (method_ == FnMethod::monte_carlo) {
      const auto& v = sample().sorted_values();
      double acc = 0.0;
      for (auto it = std::lower_bound(v.begin(), v.end(), 0.0); it != v.end() && *it <= top; ++it) {
        acc += std::pow(1.0 - *it / x, -alpha) - 1.0;
      }
      return acc / static_cast<double>(v.size());
    }
    if (method_ != FnMethod::exact_n2) throw MethodError("v_alpha needs exact_n2 or monte_carlo evaluation");
    // By parts: alpha/x * int F_n(u)(1-u/x)^-(alpha+1) du + (1 - (1-c~)^-alpha) F_n(c~ x).
    // F_n = 1 below the support floor b, where the integral is closed form.
    const double floor = std::max(0.0, model_.lower_bound()) * w_.c2;
    const double b = std::min(top, floor);
    double integral = std::pow(1.0 - b / x, -alpha) - 1.0;
    auto g = [&](double u) { return alpha / x * survival(u) * std::pow(1.0 - u / x, -(alpha + 1.0)); };
    const QuadratureSpec spec{1e-300, 1e-11, 60};
    const double start = b > 0.0 ? b : std::min(top, 1.0);
    if (b <= 0.0) integral += integrate(g, 0.0, start, spec);
    if (top > start) {
      auto gl = [&](double t) {
        const double u = std::exp(t);
        return g(u) * u;
      };
      integral += integrate(gl, std::log(start), std::log(top), spec);
    }
    return integral + (1.0 - std::pow(1.0 - w_.c_tilde, -alpha)) * survival(top);
  }

  /// E[S_{n-1}(c)].
  double mean() const {
    if (!mean_) {
      if (w_.n == 2) {
        mean_ = w_.c2 * model_.mean();
      } else if (method_ == FnMethod::monte_carlo) {
        mean_ = moment_s_prev(model_, w_, 1, *mc_);
      } else {
        mean_ = moment_s_prev(model_, w_, 1, OrderStatistics{});
      }
    }
    return *mean_;
  }

  const EmpiricalSummary& sample() const {
    if (!sample_) {
      if (!mc_) throw MethodError("no Monte Carlo configuration for F_n");
      sample_ = std::make_shared<EmpiricalSummary>(
          sample_lstat_values(model_, w_.sub_weights(), mc_->count, mc_->seed, mc_->workers), mc_->seed);
    }
    return *sample_;
  }

 private:
  TailModel model_;
  WeightScheme w_;
  FnMethod method_;
  std::optional<MonteCarloConfig> mc_;
  mutable std::shared_ptr<EmpiricalSummary> sample_;
  mutable std::optional<double> mean_;
};

// ---------------------------------------------------------------------------
// Exact n = 2 oracles

inline constexpr QuadratureSpec kOracleSpec{1e-300, 1e-11, 60};

/// P(c1 X_{2,2} + c2 X_{1,2} > x), written over the survival level s of the
/// smaller risk: F(y*)^2 + 2 * int_{s*}^1 F(x' - c2' U(s)) ds with
/// y* = x'/(1+c2') the kink and s* = F(y*).
inline double exact_tail_n2(const TailModel& model, const WeightScheme& w, double x,
                            const QuadratureSpec& spec = kOracleSpec) {
  if (w.n != 2) throw MethodError("exact_tail_n2 needs n = 2");
  const double xp = x / w.c1;
  const double c2 = w.c2;
  const double y_star = xp / (1.0 + c2);
  const double lower = model.lower_bound();
  if (y_star <= lower) return 1.0;
  const double s_star = model.survival(y_star);
  if (!(s_star > 0.0)) return 0.0;
  auto f = [&](double t) {
    const double s = std::exp(t);
    double u = 0.0;
    if (s >= 1.0) {
      if (!std::isfinite(lower)) return 0.0;
      u = lower;
    } else {
      u = model.tail_quantile(s);
    }
    return model.survival(xp - c2 * u) * s;
  };
  const double body = integrate(f, std::log(s_star), 0.0, spec);
  return std::min(1.0, 2.0 * body + s_star * s_star);
}

/// E[max(S_2 - d, 0)] as the integral of the exact tail over (d, inf),
/// mapped to (0, 1] by x = d/t.
inline double exact_stop_loss_n2(const TailModel& model, const WeightScheme& w, double d,
                                 const QuadratureSpec& spec = {1e-300, 1e-9, 60}) {
  if (!(model.alpha() > 1.0)) throw DomainError("exact_stop_loss_n2: requires alpha > 1");
  if (!(d > 0.0)) throw DomainError("exact_stop_loss_n2: retention must be positive");
  const QuadratureSpec inner{1e-300, 1e-12, 60};
  auto f = [&](double t) { return exact_tail_n2(model, w, d / t, inner) * d / (t * t); };
  const double order = 2.0 - model.alpha();
  EndpointSingularities sing;
  if (order > 0.0) sing.left = order;
  return integrate(f, 0.0, 1.0, spec, sing);
}

/// The closed-form relative correction eps* with
/// P(S_2 > x) = 2 F(x) (1 + eps*(x)) for standard Pareto risks and c1 = 1.
inline double pareto_exact_eps(double alpha, double c2, double x) {
  if (!(alpha > 0.0) || !(c2 > 0.0)) throw DomainError("pareto_exact_eps: alpha and c2 must be positive");
  if (!(x > 1.0 + c2)) throw DomainError("pareto_exact_eps: needs x > 1 + c2");
  const double ct = c2 / (1.0 + c2);
  auto fbar2 = [&](double y) { return std::min(1.0, std::pow(y / c2, -alpha)); };
  auto g = [alpha](double t) {
    const double u = std::exp(t);
    return std::pow(u, 1.0 - alpha) * std::pow(1.0 - u, -(alpha + 1.0));
  };
  const double tail_int = integrate(g, std::log(c2 / x), std::log(ct), QuadratureSpec{1e-300, 1e-12, 60});
  const double bracket = std::pow(ct, -alpha) * (1.0 - std::pow(1.0 - ct, -alpha)) + alpha * tail_int;
  return (std::pow(1.0 + c2, alpha) / 2.0 - 1.0) * fbar2(ct * x) + (std::pow(1.0 - c2 / x, -alpha) - 1.0) +
         bracket * fbar2(x);
}

}  // namespace ltail
