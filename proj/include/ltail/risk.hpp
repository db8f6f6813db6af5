#pragma once

// Risk measures of S_n(c) to second order: VaR/CTE concentrations, the
// TVaR/VaR and TCTE/CTE ratios, stop-loss and ROC premiums.

#include <algorithm>
#include <cmath>
#include <string_view>

#include "ltail/distributions.hpp"
#include "ltail/errors.hpp"
#include "ltail/expansion.hpp"

namespace ltail {

enum class Measure { var, cte };

inline std::string_view measure_name(Measure m) { return m == Measure::var ? "var" : "cte"; }

namespace detail {

inline void require_alpha_above_one(const ExpansionContext& ctx, const char* what) {
  if (!(ctx.alpha() > 1.0)) throw DomainError(std::string(what) + ": requires alpha > 1");
}

inline void require_level(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability level must lie in (0, 1)");
}

/// max(rho, -1), which is -1 when the model has no second-order term.
inline double rho_floor(const TailModel& m) { return std::max(m.rho(), -1.0); }

/// A(F^{-1}(p)) / denom, zero without a second-order term.
inline double a_over(const TailModel& m, double a, double denom) {
  return m.has_second_order() ? a / denom : 0.0;
}

}  // namespace detail

/// Second-order correction E(p) of the VaR concentration.
inline double eps_p(const ExpansionContext& ctx, double p) {
  detail::require_level(p);
  const TailModel& m = ctx.model();
  const double alpha = ctx.alpha();
  const double rho = m.rho();
  const double n = ctx.n();
  const double x = m.quantile(p);
  const double a = m.aux_A_or_zero(x);
  if (alpha < 1.0 && rho <= -alpha + kIndicatorTol) {
    return (1.0 - 1.0 / n) * ctx.phi_alpha() / (2.0 * alpha) * (1.0 - p) +
           (same_rho(rho, -alpha) ? (1.0 - 1.0 / n) / (alpha * alpha) * a : 0.0);
  }
  if (alpha >= 1.0 && rho <= -1.0 + kIndicatorTol) {
    return ctx.law().mu_f(x, MuMode::asymptotic) / std::pow(n, 1.0 / alpha) +
           (same_rho(rho, -1.0) ? (1.0 - std::pow(n, -1.0 / alpha)) / alpha * a : 0.0);
  }
  // (n^{rho/alpha} - 1)/(alpha rho), whose rho -> 0 limit is ln n / alpha^2.
  const double coef = rho == 0.0 ? std::log(n) / (alpha * alpha) : std::expm1(rho / alpha * std::log(n)) / (alpha * rho);
  return coef * a;
}

/// First-order concentration c1 n^{1/alpha - 1}.
inline double concentration_first_order(const ExpansionContext& ctx) {
  return ctx.weights().c1 * std::pow(ctx.n(), 1.0 / ctx.alpha() - 1.0);
}

/// First-order limit alpha / (alpha - 1) of both tail ratios.
inline double ratio_first_order(const ExpansionContext& ctx) {
  detail::require_alpha_above_one(ctx, "ratio");
  return ctx.alpha() / (ctx.alpha() - 1.0);
}

inline double c_var(const ExpansionContext& ctx, double p) {
  return concentration_first_order(ctx) * (1.0 + eps_p(ctx, p));
}

inline double c_cte(const ExpansionContext& ctx, double p) {
  detail::require_alpha_above_one(ctx, "c_cte");
  const double alpha = ctx.alpha();
  const double factor = (alpha - 1.0) / (alpha - 1.0 - detail::rho_floor(ctx.model()));
  return concentration_first_order(ctx) * (1.0 + factor * eps_p(ctx, p));
}

/// TVaR_p / VaR_p of S_n(c).
inline double r_var(const ExpansionContext& ctx, double p) {
  detail::require_alpha_above_one(ctx, "r_var");
  const TailModel& m = ctx.model();
  const double alpha = ctx.alpha();
  const double mr = detail::rho_floor(m);
  const double a = m.aux_A_or_zero(m.quantile(p));
  const double corr = detail::a_over(m, a, alpha * (alpha - 1.0 - m.rho())) + mr / (alpha - 1.0 - mr) * eps_p(ctx, p);
  return alpha / (alpha - 1.0) * (1.0 + corr);
}

/// TCTE_p / CTE_p of S_n(c). The correction is additive.
inline double r_cte(const ExpansionContext& ctx, double p) {
  detail::require_alpha_above_one(ctx, "r_cte");
  const TailModel& m = ctx.model();
  const double alpha = ctx.alpha();
  const double mr = detail::rho_floor(m);
  const double a = m.aux_A_or_zero(m.quantile(p));
  const double denom = alpha - 1.0 - m.rho();
  return alpha / (alpha - 1.0) + detail::a_over(m, a, denom * denom) +
         alpha * mr / ((alpha - 1.0 - mr) * (alpha - 1.0 - mr)) * eps_p(ctx, p);
}

/// E[max(S_n(c) - d, 0)] to second order.
inline double stop_loss(const ExpansionContext& ctx, double d) {
  detail::require_alpha_above_one(ctx, "stop_loss");
  if (!(d > 0.0)) throw DomainError("stop_loss: retention must be positive");
  const double alpha = ctx.alpha();
  const double dp = d / ctx.weights().c1;
  const double lead = ctx.n() * d / (alpha - 1.0) * ctx.model().survival(dp);
  return lead * (1.0 + ctx.eps_x(dp) + ctx.aux_A_star(dp, AStarMode::exact_form) / (alpha - 1.0 - ctx.rho_star()));
}

/// Leading term n d F(d') / (alpha - 1) of the stop-loss premium.
inline double stop_loss_first_order(const ExpansionContext& ctx, double d) {
  detail::require_alpha_above_one(ctx, "stop_loss");
  return ctx.n() * d / (ctx.alpha() - 1.0) * ctx.model().survival(d / ctx.weights().c1);
}

/// Reinsurance premium at ROC level tau for the VaR or CTE capital rule.
inline double premium(const ExpansionContext& ctx, double p, double tau, Measure measure) {
  detail::require_alpha_above_one(ctx, "premium");
  detail::require_level(p);
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("premium: tau must lie in (0, 1)");
  const TailModel& m = ctx.model();
  const double alpha = ctx.alpha();
  const double mr = detail::rho_floor(m);
  const double q = m.quantile(p);
  const double a = m.aux_A_or_zero(q);
  const double eps = eps_p(ctx, p);
  const double a_ratio = detail::a_over(m, a, alpha * (alpha - 1.0 - m.rho()));
  const double base = (alpha - tau) / (alpha - 1.0);
  if (measure == Measure::var) {
    return ctx.n() * q * c_var(ctx, p) *
           (base + alpha * (1.0 - tau) / (alpha - 1.0) * (a_ratio + mr / (alpha - 1.0 - mr) * eps));
  }
  const double denom = alpha - 1.0 - m.rho();
  const double second = detail::a_over(m, a, denom * denom) + alpha * mr / ((alpha - 1.0 - mr) * (alpha - 1.0 - mr)) * eps;
  return ctx.n() * q * c_cte(ctx, p) * (1.0 + a_ratio) * (base + (1.0 - tau) * second);
}

/// E(p) from the Hall-class asymptotics F^{-1}(p) ~ ((1-p)/k1)^{-1/alpha}.
inline double hall_eps_p(const ExpansionContext& ctx, double p) {
  detail::require_level(p);
  const TailModel& m = ctx.model();
  if (!m.is_hall_class()) throw DomainError("hall_eps_p: model is not Hall-class");
  const double k1 = m.hall()->k1;
  const double k2 = m.hall()->k2;
  const double alpha = ctx.alpha();
  const double rho = m.rho();
  const double n = ctx.n();
  const double c2 = ctx.weights().c2;
  if (alpha < 1.0 && rho <= -alpha + kIndicatorTol) {
    return (1.0 - 1.0 / n) / alpha * (ctx.phi_alpha() / 2.0 - (same_rho(rho, -alpha) ? k2 / k1 : 0.0)) * (1.0 - p);
  }
  if (rho <= -1.0 + kIndicatorTol && near_integer(alpha) && std::round(alpha) == 1.0) {
    return c2 * (1.0 / n - 1.0) * (1.0 - p) * std::log1p(-p);
  }
  if (alpha > 1.0 && rho <= -1.0 + kIndicatorTol) {
    return (ctx.law().mean() / std::pow(n, 1.0 / alpha) +
            (same_rho(rho, -1.0) ? k2 * (std::pow(n, -1.0 / alpha) - 1.0) / alpha : 0.0)) *
           std::pow((1.0 - p) / k1, 1.0 / alpha);
  }
  return k2 * std::expm1(rho / alpha * std::log(n)) / alpha * std::pow((1.0 - p) / k1, -rho / alpha);
}

}  // namespace ltail
