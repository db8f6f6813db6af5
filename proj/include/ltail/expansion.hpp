#pragma once

// Tail expansions of P(S_n(c) > x): first order n F(x), the second-order
// correction E(x) and the order l+1 expansion built from Taylor moments.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ltail/aggregate.hpp"
#include "ltail/distributions.hpp"
#include "ltail/errors.hpp"
#include "ltail/numerics.hpp"

namespace ltail {

enum class TailOrder { first, second, higher };
enum class AStarMode { exact_form, asymptotic };

struct TailApprox {
  double value;
  bool exceeds_one;  // not a probability
  bool degenerate;   // the correction vanishes identically (alpha = 1/2, c2 = 1)
};

inline constexpr double kIndicatorTol = 1e-12;

inline bool same_rho(double a, double b) { return std::abs(a - b) <= kIndicatorTol; }

/// Model, weights and F_n method with every expansion constant precomputed.
/// All internal formulas use weights normalized to c1 = 1; a general c1
/// enters only through x' = x / c1.
class ExpansionContext {
 public:
  ExpansionContext(TailModel model, WeightScheme w, FnMethod method, std::optional<MonteCarloConfig> mc = {})
      : model_(model), w_(w), law_(model, w, method, mc), mc_(mc) {
    alpha_ = model_.alpha();
    n_ = w_.n;
    integer_case_ = near_integer(alpha_);
    l_ = static_cast<int>(integer_case_ ? std::round(alpha_) : std::ceil(alpha_)) - 1;
    const double c2 = w_.c2;
    const double ct = w_.c_tilde;
    if (integer_case_) {
      const double a = std::round(alpha_);
      kappa_ = 2.0 / (n_ - 1) * std::exp(ln_gamma(2.0 * a) - ln_gamma(a) - ln_gamma(a + 1.0));
      kappa_tilde_ = kappa_;
    } else {
      const double p = std::pow(1.0 + c2, alpha_);
      kappa_ = p * (p + 2.0 * kappa_series(alpha_, ct));
      kappa_tilde_ = kappa_ - 1.0;
    }
    if (alpha_ < 1.0) {
      const double i_val = integral_I(alpha_, ct);
      h_alpha_ = std::pow(ct, -alpha_) * (1.0 - std::pow(1.0 - ct, -alpha_)) + alpha_ * i_val;
      phi_alpha_ = 2.0 * alpha_ * std::pow(c2, alpha_) * i_val - std::pow(1.0 + c2, 2.0 * alpha_);
    } else {
      h_alpha_ = alpha_;
    }
    rho_star_ = std::max({-1.0, -alpha_, model_.rho()});
    alpha_star_ = std::min(1.0, alpha_);
    fill_moments();
  }

  const TailModel& model() const { return model_; }
  const WeightScheme& weights() const { return w_; }
  const SubAggregateLaw& law() const { return law_; }
  FnMethod method() const { return law_.method(); }
  int n() const { return n_; }
  int l() const { return l_; }
  bool integer_case() const { return integer_case_; }
  double alpha() const { return alpha_; }
  double kappa() const { return kappa_; }
  double kappa_tilde() const { return kappa_tilde_; }
  double h_alpha() const { return h_alpha_; }
  /// Only defined for alpha < 1.
  double phi_alpha() const {
    if (!phi_alpha_) throw DomainError("phi_alpha is only defined for alpha < 1");
    return *phi_alpha_;
  }
  double rho_star() const { return rho_star_; }
  double alpha_star() const { return alpha_star_; }
  MuMode mu_mode() const { return method() == FnMethod::asymptotic ? MuMode::asymptotic : MuMode::definition; }

  /// E[S_{n-1}(c)^j] for j = 0..l.
  double moment(int j) const {
    if (j < 0 || j > l_) throw DomainError("moment: order outside 0..l");
    if (!moments_[static_cast<std::size_t>(j)]) {
      throw MethodError("moment E[S_{n-1}^" + std::to_string(j) + "] needs n = 2 or a Monte Carlo configuration");
    }
    return *moments_[static_cast<std::size_t>(j)];
  }

  /// sum_{j<=l} (-1)^j F^(j)(x) / j! * E[S_{n-1}^j] / F(x).
  double d_coeff(double x) const { return d_coeff_for(model_, x); }

  /// F(x) off the integer case, else x^-alpha * int_0^{c~x} u^alpha dF_n(u).
  double remainder_scale(double x) const {
    if (!integer_case_) return model_.survival(x);
    if (!(x > 0.0)) return 0.0;
    const double a = std::round(alpha_);
    return std::pow(x, -a) * law_.truncated_power(w_.c_tilde * x, a);
  }

  /// E(x) = ((1+c2)^alpha / 2 - 1) F_n(c~ x) + h_alpha mu_F(x).
  double eps_x(double x) const {
    return (std::pow(1.0 + w_.c2, alpha_) / 2.0 - 1.0) * law_.survival(w_.c_tilde * x) +
           h_alpha_ * law_.mu_f(x, mu_mode());
  }

  TailApprox tail_approx(double x, TailOrder order) const {
    const double xp = x / w_.c1;
    const double fbar = model_.survival(xp);
    double value = n_ * fbar;
    bool degenerate = false;
    switch (order) {
      case TailOrder::first:
        break;
      case TailOrder::second:
        value *= 1.0 + eps_x(xp);
        degenerate = degenerate_correction();
        break;
      case TailOrder::higher:
        value *= d_coeff(xp) + 0.5 * (n_ - 1) * kappa_ * remainder_scale(xp);
        degenerate = degenerate_correction();
        break;
    }
    return {value, value > 1.0, degenerate};
  }

  /// P(S_n(c) > x) - P(c1 X_{n,n} > x) to order l+1.
  double delta_max(double x) const {
    const double xp = x / w_.c1;
    return n_ * model_.survival(xp) * (d_coeff(xp) - 1.0 + 0.5 * (n_ - 1) * kappa_tilde_ * remainder_scale(xp));
  }

  /// Order l+1 expansion with the Taylor terms taken from a proxy H that has
  /// the same tail index.
  double tail_with_proxy(const TailModel& proxy, double x) const {
    if (std::abs(proxy.alpha() - alpha_) > 1e-12) throw DomainError("tail_with_proxy: proxy tail index differs");
    const double xp = x / w_.c1;
    return n_ * model_.survival(xp) +
           n_ * proxy.survival(xp) *
               (d_coeff_for(proxy, xp) - 1.0 + 0.5 * (n_ - 1) * kappa_ * remainder_scale(xp));
  }

  /// Induced auxiliary function A* of the aggregate.
  double aux_A_star(double x, AStarMode mode) const {
    const double a = model_.aux_A_or_zero(x);
    const double rho = model_.rho();
    if (mode == AStarMode::exact_form) {
      return a + alpha_ * (1.0 - std::pow(1.0 + w_.c2, alpha_) / 2.0) * law_.survival(w_.c_tilde * x) -
             alpha_star_ * h_alpha_ * law_.mu_f(x, mu_mode());
    }
    if (alpha_ < 1.0 && rho <= -alpha_ + kIndicatorTol) {
      return -0.5 * (n_ - 1) * alpha_ * *phi_alpha_ * model_.survival(x) + (same_rho(rho, -alpha_) ? a : 0.0);
    }
    if (alpha_ >= 1.0 && rho <= -1.0 + kIndicatorTol) {
      return -alpha_ * law_.mu_f(x, MuMode::asymptotic) + (same_rho(rho, -1.0) ? a : 0.0);
    }
    return a;
  }

 private:
  bool degenerate_correction() const { return alpha_ < 1.0 && std::abs(kappa_) < 1e-10; }

  double d_coeff_for(const TailModel& m, double x) const {
    const double fbar = m.survival(x);
    double sum = 1.0;
    double fact = 1.0;
    for (int j = 1; j <= l_; ++j) {
      fact *= j;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      sum += sign * m.survival_deriv(j, x) / fact * moment(j) / fbar;
    }
    return sum;
  }

  void fill_moments() {
    moments_.assign(static_cast<std::size_t>(l_ + 1), std::nullopt);
    moments_[0] = 1.0;
    for (int j = 1; j <= l_; ++j) {
      if (n_ == 2) {
        moments_[static_cast<std::size_t>(j)] = moment_s_prev(model_, w_, j, ClosedN2{});
      } else if (j == 1) {
        moments_[1] = law_.mean();
      } else if (mc_) {
        moments_[static_cast<std::size_t>(j)] = moment_s_prev(model_, w_, j, *mc_);
      }
    }
  }

  TailModel model_;
  WeightScheme w_;
  SubAggregateLaw law_;
  std::optional<MonteCarloConfig> mc_;
  double alpha_ = 0.0;
  int n_ = 0;
  int l_ = 0;
  bool integer_case_ = false;
  double kappa_ = 0.0;
  double kappa_tilde_ = 0.0;
  double h_alpha_ = 0.0;
  std::optional<double> phi_alpha_;
  double rho_star_ = 0.0;
  double alpha_star_ = 0.0;
  std::vector<std::optional<double>> moments_;
};

inline ExpansionContext make_context(const TailModel& model, const WeightScheme& w, FnMethod method,
                                     std::optional<MonteCarloConfig> mc = {}) {
  return ExpansionContext(model, w, method, mc);
}

}  // namespace ltail
