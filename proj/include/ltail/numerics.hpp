#pragma once

// Special functions, series summation and adaptive quadrature shared by the
// rest of the library. Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ltail/errors.hpp"

namespace ltail {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 60;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth < 1) {
      throw DomainError("QuadratureSpec: tolerances must be positive and max_depth >= 1");
    }
  }
};

/// Declared integrable singularities at the interval ends. Each value is the
/// exponent s in [0, 1) of a blow-up like |u - endpoint|^(-s).
struct EndpointSingularities {
  std::optional<double> left;
  std::optional<double> right;
};

inline double ln_gamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DomainError("ln_gamma: argument must be positive and finite");
  }
  // Boost's lgamma is a fixed-coefficient Lanczos rational approximation and,
  // unlike std::lgamma, does not write the global signgam.
  return boost::math::lgamma(z);
}

inline double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("beta_fn: arguments must be positive");
  }
  return std::exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
}

inline double reg_inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("reg_inc_beta: x must lie in [0, 1]");
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("reg_inc_beta: shape parameters must be positive");
  }
  return boost::math::ibeta(a, b, x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_survival(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: p must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Phi^{-1}(1 - s), accurate for tiny s.
inline double normal_upper_quantile(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError("normal_upper_quantile: s must lie in (0, 1)");
  }
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * s);
}

inline double t_quantile(double p, double v) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("t_quantile: p must lie in (0, 1)");
  }
  if (!(v > 0.0)) {
    throw DomainError("t_quantile: degrees of freedom must be positive");
  }
  const boost::math::students_t dist(v);
  if (p > 0.5) {
    return boost::math::quantile(boost::math::complement(dist, 1.0 - p));
  }
  return boost::math::quantile(dist, p);
}

namespace detail {

struct GkSegment {
  double a;
  double b;
  double value;
  double error;
  int depth;
};

struct WorseSegment {
  bool operator()(const GkSegment& lhs, const GkSegment& rhs) const { return lhs.error < rhs.error; }
};

// 15-point Kronrod rule with embedded 7-point Gauss rule; error heuristic as
// in QUADPACK's qk15.
template <class F>
GkSegment gauss_kronrod_15(F& f, double a, double b, int depth) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 3; ++j) {
    const int k = 2 * j + 1;
    const double dx = half * xgk[k];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[k] = f1;
    fv2[k] = f2;
    resg += wg[j] * (f1 + f2);
    resk += wgk[k] * (f1 + f2);
    resabs += wgk[k] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int k = 2 * j;
    const double dx = half * xgk[k];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[k] = f1;
    fv2[k] = f2;
    resk += wgk[k] * (f1 + f2);
    resabs += wgk[k] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int k = 0; k < 7; ++k) {
    resasc += wgk[k] * (std::abs(fv1[k] - reskh) + std::abs(fv2[k] - reskh));
  }
  const double scale = std::abs(half);
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > uflow / (50.0 * epmach)) {
    err = std::max(50.0 * epmach * resabs, err);
  }
  return {a, b, resk * half, err, depth};
}

inline constexpr std::size_t kMaxSegments = 20000;

// Global adaptive bisection: always split the segment with the largest error.
template <class F>
double adaptive_gk(F& f, double a, double b, const QuadratureSpec& spec) {
  std::priority_queue<GkSegment, std::vector<GkSegment>, WorseSegment> heap;
  GkSegment first = gauss_kronrod_15(f, a, b, 0);
  if (!std::isfinite(first.value)) {
    throw ConvergenceError("integrate: integrand is not finite on the interval", first.value,
                           std::numeric_limits<double>::infinity());
  }
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    const GkSegment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= spec.max_depth || mid <= worst.a || mid >= worst.b ||
        heap.size() >= kMaxSegments) {
      throw ConvergenceError("integrate: tolerance not reached", total, total_err);
    }
    heap.pop();
    const GkSegment left = gauss_kronrod_15(f, worst.a, mid, worst.depth + 1);
    const GkSegment right = gauss_kronrod_15(f, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    if (!std::isfinite(total)) {
      throw ConvergenceError("integrate: integrand is not finite on the interval", total,
                             std::numeric_limits<double>::infinity());
    }
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

inline int substitution_power(double singularity_order) {
  if (!(singularity_order >= 0.0 && singularity_order < 1.0)) {
    throw DomainError("integrate: endpoint singularity order must lie in [0, 1)");
  }
  return static_cast<int>(std::ceil(1.0 / (1.0 - singularity_order) - 1e-12));
}

// u = a + t^k on [0, (b - a)^(1/k)]; the Jacobian k t^(k-1) cancels the
// declared singularity at a.
template <class F>
double integrate_left_singular(F& f, double a, double b, double order, const QuadratureSpec& spec) {
  const int k = substitution_power(order);
  if (k == 1) {
    return adaptive_gk(f, a, b, spec);
  }
  auto g = [&f, a, k](double t) {
    const double u = a + std::pow(t, k);
    if (u == a) {
      return 0.0;
    }
    return f(u) * k * std::pow(t, k - 1);
  };
  return adaptive_gk(g, 0.0, std::pow(b - a, 1.0 / k), spec);
}

// f only sees u, so b - u carries few bits near b. The result is accurate to
// roughly eps^(1 - s) / (1 - s); put singular endpoints at 0 when possible.
template <class F>
double integrate_right_singular(F& f, double a, double b, double order, const QuadratureSpec& spec) {
  const int k = substitution_power(order);
  if (k == 1) {
    return adaptive_gk(f, a, b, spec);
  }
  auto g = [&f, b, k](double t) {
    const double u = b - std::pow(t, k);
    if (u == b) {
      return 0.0;
    }
    return f(u) * k * std::pow(t, k - 1);
  };
  return adaptive_gk(g, 0.0, std::pow(b - a, 1.0 / k), spec);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b]. Endpoints flagged in
/// `singular` are removed by the substitution u = a + t^k with
/// k = ceil(1 / (1 - s)) before refinement.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                 EndpointSingularities singular = {}) {
  spec.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate: interval ends must be finite");
  }
  if (a == b) {
    return 0.0;
  }
  if (a > b) {
    return -integrate(f, b, a, spec, EndpointSingularities{singular.right, singular.left});
  }
  auto& fn = f;
  if (singular.left && singular.right) {
    const double mid = 0.5 * (a + b);
    QuadratureSpec half = spec;
    half.abs_tol *= 0.5;
    return detail::integrate_left_singular(fn, a, mid, *singular.left, half) +
           detail::integrate_right_singular(fn, mid, b, *singular.right, half);
  }
  if (singular.left) {
    return detail::integrate_left_singular(fn, a, b, *singular.left, spec);
  }
  if (singular.right) {
    return detail::integrate_right_singular(fn, a, b, *singular.right, spec);
  }
  return detail::adaptive_gk(fn, a, b, spec);
}

/// Integral of u^(-alpha) (1 - u)^(-(alpha + 1)) over (0, upper).
inline double integral_I(double alpha, double upper, const QuadratureSpec& spec = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("integral_I: alpha must lie in (0, 1)");
  }
  if (!(upper >= 0.0 && upper < 1.0)) {
    throw DomainError("integral_I: upper limit must lie in [0, 1)");
  }
  if (upper == 0.0) {
    return 0.0;
  }
  auto integrand = [alpha](double u) { return std::pow(u, -alpha) * std::pow(1.0 - u, -(alpha + 1.0)); };
  return integrate(integrand, 0.0, upper, spec, EndpointSingularities{alpha, std::nullopt});
}

inline bool near_integer(double value, double tol = 1e-9) {
  return std::abs(value - std::round(value)) <= tol;
}

/// Sum over j >= 0 of Gamma(alpha + j) / (Gamma(alpha) j!) * alpha c^j / (j - alpha).
inline double kappa_series(double alpha, double c_tilde, double tol = 1e-14) {
  if (!(alpha > 0.0) || near_integer(alpha)) {
    throw DomainError("kappa_series: alpha must be positive and non-integer");
  }
  if (!(c_tilde > 0.0 && c_tilde < 1.0)) {
    throw DomainError("kappa_series: c_tilde must lie in (0, 1)");
  }
  if (!(tol > 0.0)) {
    throw DomainError("kappa_series: tolerance must be positive");
  }
  constexpr long kMaxTerms = 1000000;
  double term = -1.0;  // j = 0: alpha / (0 - alpha)
  double sum = term;
  int small_run = std::abs(term) < tol * std::max(1.0, std::abs(sum)) ? 1 : 0;
  for (long j = 0; j < kMaxTerms; ++j) {
    const double jd = static_cast<double>(j);
    term *= ((alpha + jd) / (jd + 1.0)) * c_tilde * ((jd - alpha) / (jd + 1.0 - alpha));
    sum += term;
    if (std::abs(term) < tol * std::max(1.0, std::abs(sum))) {
      if (++small_run >= 3) {
        return sum;
      }
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("kappa_series: no convergence within 1e6 terms", sum, std::abs(term));
}

}  // namespace ltail
