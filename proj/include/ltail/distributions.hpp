#pragma once

// Heavy-tailed marginal models: survival, quantile, derivatives, moments and
// second-order (2RV) metadata.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include <boost/math/distributions/students_t.hpp>

#include "ltail/detail/jet.hpp"
#include "ltail/errors.hpp"
#include "ltail/numerics.hpp"
#include "ltail/random.hpp"

namespace ltail {

enum class Family { std_pareto, pareto, burr, frechet, hall_weiss, abs_student_t, g_and_h };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::std_pareto: return "std_pareto";
    case Family::pareto: return "pareto";
    case Family::burr: return "burr";
    case Family::frechet: return "frechet";
    case Family::hall_weiss: return "hall_weiss";
    case Family::abs_student_t: return "abs_student_t";
    case Family::g_and_h: return "g_and_h";
  }
  return "?";
}

/// F(x) = k1 x^-alpha (1 + k2 x^rho (1 + o(1))).
struct HallConstants {
  double k1;
  double k2;
};

inline constexpr double kNoSecondOrder = -std::numeric_limits<double>::infinity();

namespace family {

using detail::Jet;

// x^-alpha on [scale, inf). The scale only exists so that the power proxy
// k1 x^-alpha of a Hall model can be expressed as a model.
struct StdPareto {
  double alpha;
  double scale = 1.0;

  static constexpr Family kind = Family::std_pareto;
  void validate() const {
    if (!(alpha > 0.0) || !(scale > 0.0)) throw DomainError("std_pareto: alpha and scale must be positive");
  }
  double tail_index() const { return alpha; }
  double rho() const { return kNoSecondOrder; }
  double lower() const { return scale; }
  std::optional<HallConstants> hall() const { return HallConstants{std::pow(scale, alpha), 0.0}; }
  double survival(double x) const { return x <= scale ? 1.0 : std::pow(x / scale, -alpha); }
  double tail_quantile(double s) const { return scale * std::pow(s, -1.0 / alpha); }
  Jet survival_jet(double x, std::size_t order) const {
    return pow(Jet::variable(x, order) * (1.0 / scale), -alpha);
  }
  std::optional<double> raw_moment(int j) const { return std::pow(scale, j) * alpha / (alpha - j); }
  double log_remainder(double) const { return 0.0; }
};

struct Pareto {
  double alpha;
  double theta;

  static constexpr Family kind = Family::pareto;
  void validate() const {
    if (!(alpha > 0.0) || !(theta > 0.0)) throw DomainError("pareto: alpha and theta must be positive");
  }
  double tail_index() const { return alpha; }
  double rho() const { return -1.0; }
  double lower() const { return 0.0; }
  std::optional<HallConstants> hall() const { return HallConstants{std::pow(theta, alpha), -alpha * theta}; }
  double survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-alpha * std::log1p(x / theta)); }
  double tail_quantile(double s) const { return theta * std::expm1(-std::log(s) / alpha); }
  Jet survival_jet(double x, std::size_t order) const {
    return pow(Jet::variable(x, order) * (1.0 / theta) + 1.0, -alpha);
  }
  std::optional<double> raw_moment(int j) const {
    return std::pow(theta, j) * std::exp(ln_gamma(j + 1.0) + ln_gamma(alpha - j) - ln_gamma(alpha));
  }
  double log_remainder(double x) const { return -alpha * std::log1p(theta / x); }
};

struct Burr {
  double a;
  double b;

  static constexpr Family kind = Family::burr;
  void validate() const {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("burr: a and b must be positive");
  }
  double tail_index() const { return a * b; }
  double rho() const { return -b; }
  double lower() const { return 0.0; }
  std::optional<HallConstants> hall() const { return HallConstants{1.0, -a}; }
  double survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-a * std::log1p(std::pow(x, b))); }
  double tail_quantile(double s) const { return std::pow(std::expm1(-std::log(s) / a), 1.0 / b); }
  Jet survival_jet(double x, std::size_t order) const {
    return pow(pow(Jet::variable(x, order), b) + 1.0, -a);
  }
  std::optional<double> raw_moment(int j) const {
    const double jb = j / b;
    return std::exp(ln_gamma(a - jb) + ln_gamma(1.0 + jb) - ln_gamma(a));
  }
  double log_remainder(double x) const { return -a * std::log1p(std::pow(x, -b)); }
};

struct Frechet {
  double alpha;

  static constexpr Family kind = Family::frechet;
  void validate() const {
    if (!(alpha > 0.0)) throw DomainError("frechet: alpha must be positive");
  }
  double tail_index() const { return alpha; }
  double rho() const { return -alpha; }
  double lower() const { return 0.0; }
  std::optional<HallConstants> hall() const { return HallConstants{1.0, -0.5}; }
  double survival(double x) const { return x <= 0.0 ? 1.0 : -std::expm1(-std::pow(x, -alpha)); }
  double tail_quantile(double s) const { return std::pow(-std::log1p(-s), -1.0 / alpha); }
  Jet survival_jet(double x, std::size_t order) const {
    Jet out = -exp(-pow(Jet::variable(x, order), -alpha)) + 1.0;
    out.coeff(0) = survival(x);
    return out;
  }
  std::optional<double> raw_moment(int j) const { return std::exp(ln_gamma(1.0 - j / alpha)); }
  double log_remainder(double x) const {
    const double w = std::pow(x, -alpha);
    if (w < 1e-3) {
      // log((1 - e^-w) / w) = -w/2 + w^2/24 - w^4/2880 + ...
      return w * (-0.5 + w * (1.0 / 24.0 - w * w / 2880.0));
    }
    return std::log(-std::expm1(-w) / w);
  }
};

// x^-alpha (1 + x^rho) / 2 on [1, inf).
struct HallWeiss {
  double alpha;
  double rho_;

  static constexpr Family kind = Family::hall_weiss;
  void validate() const {
    if (!(alpha > 0.0) || !(rho_ < 0.0)) throw DomainError("hall_weiss: need alpha > 0 and rho < 0");
  }
  double tail_index() const { return alpha; }
  double rho() const { return rho_; }
  double lower() const { return 1.0; }
  std::optional<HallConstants> hall() const { return HallConstants{0.5, 1.0}; }
  double survival(double x) const {
    return x <= 1.0 ? 1.0 : 0.5 * std::pow(x, -alpha) * (1.0 + std::pow(x, rho_));
  }
  double tail_quantile(double s) const {
    if (s >= 1.0) return 1.0;
    // Solve -alpha y + log1p(e^{rho y}) = log(2 s) for y = log x.
    const double target = std::log(2.0 * s);
    auto g = [&](double y) { return -alpha * y + std::log1p(std::exp(rho_ * y)) - target; };
    double lo = std::max(0.0, -target / alpha);
    double hi = std::max(lo, (std::log(2.0) - target) / alpha);
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double gy = g(y);
      if (gy > 0.0) lo = y; else hi = y;
      const double e = std::exp(rho_ * y);
      const double slope = -alpha + rho_ * e / (1.0 + e);
      double next = y - gy / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - y) <= 1e-15 * std::max(1.0, std::abs(y))) return std::exp(next);
      y = next;
    }
    return std::exp(y);
  }
  Jet survival_jet(double x, std::size_t order) const {
    const Jet v = Jet::variable(x, order);
    return (pow(v, -alpha) + pow(v, rho_ - alpha)) * 0.5;
  }
  std::optional<double> raw_moment(int j) const {
    return 1.0 + 0.5 * j * (1.0 / (alpha - j) + 1.0 / (alpha - rho_ - j));
  }
  double log_remainder(double x) const { return std::log1p(std::pow(x, rho_)); }
};

// |T| for T Student-t with v degrees of freedom.
struct AbsStudentT {
  double v;

  static constexpr Family kind = Family::abs_student_t;
  void validate() const {
    if (!(v > 0.0)) throw DomainError("abs_student_t: v must be positive");
  }
  double tail_index() const { return v; }
  double rho() const { return -2.0; }
  double lower() const { return 0.0; }
  double density_constant() const {
    return 2.0 * std::exp(ln_gamma(0.5 * (v + 1.0)) - ln_gamma(0.5 * v)) / std::sqrt(v * std::numbers::pi);
  }
  std::optional<HallConstants> hall() const {
    return HallConstants{density_constant() * std::pow(v, 0.5 * (v - 1.0)), -v * v * (v + 1.0) / (2.0 * (v + 2.0))};
  }
  double survival(double x) const {
    if (x <= 0.0) return 1.0;
    // P(|T| > x) = I_w(v/2, 1/2) with w = v / (v + x^2).
    const double w = v / (v + x * x);
    return reg_inc_beta(w, 0.5 * v, 0.5);
  }
  double tail_quantile(double s) const {
    if (v == 1.0) return 1.0 / std::tan(0.5 * std::numbers::pi * s);
    if (v == 2.0) return std::numbers::sqrt2 * (1.0 - s) / std::sqrt(s * (2.0 - s));
    const boost::math::students_t_distribution<double> dist(v);
    return boost::math::quantile(boost::math::complement(dist, 0.5 * s));
  }
  Jet survival_jet(double x, std::size_t order) const {
    const Jet u = Jet::variable(x, order);
    const Jet dens = pow(u * u * (1.0 / v) + 1.0, -0.5 * (v + 1.0)) * density_constant();
    return integral(-dens, survival(x));
  }
  std::optional<double> raw_moment(int j) const {
    return std::pow(v, 0.5 * j) *
           std::exp(ln_gamma(0.5 * (j + 1.0)) + ln_gamma(0.5 * (v - j)) - ln_gamma(0.5 * v)) /
           std::sqrt(std::numbers::pi);
  }
  double log_remainder(double x) const {
    const double w = v / (v + x * x);
    if (w < 0.5) {
      // I_w(a, b) = w^a (1-w)^b / (a B(a,b)) * sum_k (a+b)_k / (a+1)_k w^k.
      const double a = 0.5 * v;
      const double b = 0.5;
      double term = 1.0;
      double tail = 0.0;
      for (int k = 0; k < 2000; ++k) {
        term *= (a + b + k) / (a + 1.0 + k) * w;
        tail += term;
        if (term < 1e-17 * tail) break;
      }
      return -a * std::log1p(v / (x * x)) + b * std::log1p(-w) + std::log1p(tail);
    }
    return std::log(survival(x) * std::pow(x, v) / hall()->k1);
  }
};

// X = (e^{gZ} - 1)/g * e^{h Z^2 / 2}, Z standard normal.
struct GAndH {
  double g;
  double h;

  static constexpr Family kind = Family::g_and_h;
  void validate() const {
    if (!(g > 0.0) || !(h > 0.0)) throw DomainError("g_and_h: g and h must be positive");
  }
  double tail_index() const { return 1.0 / h; }
  double rho() const { return 0.0; }
  double lower() const { return -std::numeric_limits<double>::infinity(); }
  std::optional<HallConstants> hall() const { return std::nullopt; }

  double transform(double z) const { return std::expm1(g * z) / g * std::exp(0.5 * h * z * z); }
  double transform_slope(double z) const {
    return std::exp(g * z + 0.5 * h * z * z) + h * z * transform(z);
  }
  /// The unique z with transform(z) = x.
  double z_of(double x) const {
    if (x == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 0.0;
    if (x > 0.0) {
      hi = 1.0;
      while (transform(hi) < x) {
        lo = hi;
        hi *= 2.0;
      }
    } else {
      lo = -1.0;
      while (transform(lo) > x) {
        hi = lo;
        lo *= 2.0;
      }
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
      const double fz = transform(z) - x;
      if (fz < 0.0) lo = z; else hi = z;
      double next = z - fz / transform_slope(z);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - z) <= 1e-12) return next;
      z = next;
    }
    return z;
  }
  double survival(double x) const { return normal_survival(z_of(x)); }
  double tail_quantile(double s) const {
    // normal_upper_quantile covers (0, 1) without cancellation near s = 0.
    return transform(normal_upper_quantile(s));
  }
  double density(double x) const {
    const double z = z_of(x);
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / transform_slope(z);
  }
  std::optional<double> raw_moment(int j) const {
    // E[(e^{gZ}-1)^j e^{j h Z^2 / 2}] by the binomial theorem and Gaussian integrals.
    const double denom = 1.0 - j * h;
    double sum = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= j; ++i) {
      const double k = j - i;
      sum += ((i % 2 == 0) ? 1.0 : -1.0) * binom * std::exp(k * k * g * g / (2.0 * denom));
      binom = binom * (j - i) / (i + 1.0);
    }
    return sum / (std::pow(g, j) * std::sqrt(denom));
  }
};

}  // namespace family

class TailModel {
 public:
  using Params = std::variant<family::StdPareto, family::Pareto, family::Burr, family::Frechet,
                              family::HallWeiss, family::AbsStudentT, family::GAndH>;

  explicit TailModel(Params params) : params_(params) {
    std::visit([](const auto& p) { p.validate(); }, params_);
    alpha_ = std::visit([](const auto& p) { return p.tail_index(); }, params_);
    rho_ = std::visit([](const auto& p) { return p.rho(); }, params_);
    hall_ = std::visit([](const auto& p) { return p.hall(); }, params_);
    family_ = std::visit([](const auto& p) { return std::decay_t<decltype(p)>::kind; }, params_);
    smooth_order_ = family_ == Family::g_and_h ? 0 : static_cast<int>(std::ceil(alpha_ - 1e-9)) + 2;
    mean_ = alpha_ > 1.0 ? raw_moment(1) : std::numeric_limits<double>::infinity();
  }

  Family family() const { return family_; }
  const Params& params() const { return params_; }
  double alpha() const { return alpha_; }
  /// -inf for std_pareto (no second-order term).
  double rho() const { return rho_; }
  bool has_second_order() const { return std::isfinite(rho_); }
  int smooth_order() const { return smooth_order_; }
  const std::optional<HallConstants>& hall() const { return hall_; }
  bool is_hall_class() const { return hall_.has_value() && family_ != Family::std_pareto; }
  double mean() const { return mean_; }
  bool has_finite_mean() const { return std::isfinite(mean_); }
  double lower_bound() const {
    return std::visit([](const auto& p) { return p.lower(); }, params_);
  }

  double survival(double x) const {
    return std::visit([x](const auto& p) { return p.survival(x); }, params_);
  }

  /// j-th derivative of the survival function.
  double survival_deriv(int j, double x) const {
    if (j < 0) throw DomainError("survival_deriv: negative order");
    if (j > smooth_order_) {
      throw UnsupportedError("survival_deriv: order " + std::to_string(j) + " exceeds smoothness of " +
                             std::string(family_name(family_)));
    }
    if (j == 0) return survival(x);
    if (!(x > lower_bound())) throw DomainError("survival_deriv: x must lie inside the support");
    return std::visit(
        [&](const auto& p) -> double {
          if constexpr (requires { p.survival_jet(x, std::size_t{1}); }) {
            return p.survival_jet(x, static_cast<std::size_t>(j)).derivative(static_cast<std::size_t>(j));
          } else {
            throw UnsupportedError("survival_deriv: no derivatives for this family");
          }
        },
        params_);
  }

  double density(double x) const {
    if (const auto* gh = std::get_if<family::GAndH>(&params_)) return gh->density(x);
    if (!(x > lower_bound())) return 0.0;
    return -survival_deriv(1, x);
  }

  /// Generalized inverse of the survival function, s in (0, 1).
  double tail_quantile(double s) const {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("tail_quantile: s must lie in (0, 1)");
    return std::visit([s](const auto& p) { return p.tail_quantile(s); }, params_);
  }

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
    if (family_ == Family::g_and_h && !(p > 0.5)) {
      throw DomainError("quantile: g_and_h requires p > 1/2");
    }
    if (const auto* fr = std::get_if<family::Frechet>(&params_)) {
      return std::pow(-std::log(p), -1.0 / fr->alpha);
    }
    return tail_quantile(1.0 - p);
  }

  double sample(VariateStream& stream) const { return tail_quantile(stream.next()); }

  /// Auxiliary function of second-order regular variation.
  double aux_A(double x) const {
    if (const auto* gh = std::get_if<family::GAndH>(&params_)) {
      return gh->g / (gh->h * gh->h * gh->z_of(x));
    }
    if (!has_second_order()) {
      throw UnsupportedError("aux_A: model has no second-order term");
    }
    return hall_->k2 * rho_ * std::pow(x, rho_);
  }

  /// A(x), or 0 when the model has no second-order term.
  double aux_A_or_zero(double x) const { return has_second_order() ? aux_A(x) : 0.0; }

  double raw_moment(int j) const {
    if (j < 0) throw DomainError("raw_moment: negative order");
    if (j == 0) return 1.0;
    if (!(j < alpha_)) throw DomainError("raw_moment: moment of order " + std::to_string(j) + " is infinite");
    return std::visit([j](const auto& p) { return *p.raw_moment(j); }, params_);
  }

  /// E X^j as the integral of U(s)^j over s in (0, 1).
  double raw_moment_numeric(int j, const QuadratureSpec& spec = {1e-13, 1e-11, 60}) const {
    if (j < 0) throw DomainError("raw_moment_numeric: negative order");
    if (j == 0) return 1.0;
    if (!(j < alpha_)) throw DomainError("raw_moment_numeric: infinite moment");
    if (const auto* gh = std::get_if<family::GAndH>(&params_)) {
      // The quantile is not power-like near s = 0, so integrate over z instead.
      const double reach = std::sqrt(1500.0 / (1.0 - j * gh->h));
      auto f = [gh, j](double z) {
        if (z == 0.0) return 0.0;
        const double q = gh->transform(z);
        const double log_term = j * (std::log(std::abs(std::expm1(gh->g * z)) / gh->g) + 0.5 * gh->h * z * z) -
                                0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
        return (q < 0.0 && j % 2 == 1 ? -1.0 : 1.0) * std::exp(log_term);
      };
      return integrate(f, -reach, 0.0, spec) + integrate(f, 0.0, reach, spec);
    }
    auto f = [this, j](double s) { return std::pow(tail_quantile(s), j); };
    return integrate(f, 0.0, 1.0, spec, EndpointSingularities{tail_singularity(j), std::nullopt});
  }

  /// Integral of u^r dF(u) over (max(lower, 0), x].
  double truncated_power_moment(double x, double r, const QuadratureSpec& spec = {1e-300, 1e-11, 60}) const {
    const double lo = std::max(lower_bound(), 0.0);
    if (!(x > lo)) return 0.0;
    const double t_hi = std::log(survival(lo));
    const double t_lo = std::log(survival(x));
    if (!(t_hi > t_lo)) return 0.0;
    auto f = [this, r](double t) {
      const double s = std::exp(t);
      const double q = tail_quantile(s);
      return q <= 0.0 ? 0.0 : std::pow(q, r) * s;
    };
    return integrate(f, t_lo, t_hi, spec);
  }

  double truncated_first_moment(double x) const { return truncated_power_moment(x, 1.0); }

  /// E[X | X > VaR_p(X)].
  double tail_mean(double p, const QuadratureSpec& spec = {1e-300, 1e-11, 60}) const {
    if (!(alpha_ > 1.0)) throw DomainError("tail_mean: requires alpha > 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("tail_mean: p must lie in (0, 1)");
    const double s0 = 1.0 - p;
    auto f = [this](double s) { return tail_quantile(s); };
    return integrate(f, 0.0, s0, spec, EndpointSingularities{tail_singularity(1), std::nullopt}) / s0;
  }

  /// log(F(x) x^alpha / k1), the relative deviation from the pure power law.
  double hall_log_remainder(double x) const {
    if (!hall_) throw UnsupportedError("hall_log_remainder: not a Hall-class model");
    return std::visit(
        [x](const auto& p) -> double {
          if constexpr (requires { p.log_remainder(x); }) {
            return p.log_remainder(x);
          } else {
            return 0.0;
          }
        },
        params_);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(10);
    os << family_name(family_) << ':';
    std::visit(
        [&os](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, family::StdPareto>) {
            os << "alpha=" << p.alpha;
            if (p.scale != 1.0) os << ",scale=" << p.scale;
          } else if constexpr (std::is_same_v<T, family::Pareto>) {
            os << "alpha=" << p.alpha << ",theta=" << p.theta;
          } else if constexpr (std::is_same_v<T, family::Burr>) {
            os << "a=" << p.a << ",b=" << p.b;
          } else if constexpr (std::is_same_v<T, family::Frechet>) {
            os << "alpha=" << p.alpha;
          } else if constexpr (std::is_same_v<T, family::HallWeiss>) {
            os << "alpha=" << p.alpha << ",rho=" << p.rho_;
          } else if constexpr (std::is_same_v<T, family::AbsStudentT>) {
            os << "v=" << p.v;
          } else {
            os << "g=" << p.g << ",h=" << p.h;
          }
        },
        params_);
    return os.str();
  }

  /// Blow-up exponent of U(s)^r as s -> 0, used to pick a quadrature substitution.
  double tail_singularity(double r) const {
    if (family_ == Family::g_and_h) {
      return 0.5 * (r / alpha_ + 1.0);
    }
    return r / alpha_;
  }

 private:
  Params params_;
  Family family_;
  double alpha_;
  double rho_;
  int smooth_order_;
  std::optional<HallConstants> hall_;
  double mean_;
};

inline TailModel make_model(TailModel::Params params) { return TailModel(params); }

/// Pure power law k1 x^-alpha sharing the model's first-order tail.
inline TailModel power_proxy(const TailModel& model) {
  if (!model.hall()) throw DomainError("power_proxy: model is not Hall-class");
  return TailModel(family::StdPareto{model.alpha(), std::pow(model.hall()->k1, 1.0 / model.alpha())});
}

/// H_{-alpha,rho}(x) = x^-alpha * integral_1^x u^{rho-1} du.
inline double h_limit(double alpha, double rho, double x) {
  if (!(x > 0.0)) throw DomainError("h_limit: x must be positive");
  if (!std::isfinite(rho)) return 0.0;
  if (rho == 0.0) return std::pow(x, -alpha) * std::log(x);
  return std::pow(x, -alpha) * (std::pow(x, rho) - 1.0) / rho;
}

namespace detail {

inline std::string lower_trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline double parse_real(std::string_view text, std::string_view what) {
  const std::string t = lower_trim(text);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ParseError("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses "family:key=value,..." (case-insensitive), e.g. "burr:a=0.8,b=2.5".
inline TailModel parse_model(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ParseError("model spec needs 'family:key=value,...'");
  const std::string fam = detail::lower_trim(spec.substr(0, colon));
  std::map<std::string, double> kv;
  std::string_view rest = spec.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("model parameter '" + std::string(item) + "' lacks '='");
    const std::string key = detail::lower_trim(item.substr(0, eq));
    if (kv.count(key)) throw ParseError("duplicate model parameter '" + key + "'");
    kv[key] = detail::parse_real(item.substr(eq + 1), key);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(fam + ": missing parameter '" + key + "'");
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  auto finish = [&](TailModel::Params p) {
    if (!kv.empty()) throw ParseError(fam + ": unknown parameter '" + kv.begin()->first + "'");
    return TailModel(p);
  };
  if (fam == "std_pareto") {
    const double alpha = take("alpha");
    const double scale = kv.count("scale") ? take("scale") : 1.0;
    return finish(family::StdPareto{alpha, scale});
  }
  if (fam == "pareto") {
    const double alpha = take("alpha");
    return finish(family::Pareto{alpha, take("theta")});
  }
  if (fam == "burr") {
    const double a = take("a");
    return finish(family::Burr{a, take("b")});
  }
  if (fam == "frechet") return finish(family::Frechet{take("alpha")});
  if (fam == "hall_weiss") {
    const double alpha = take("alpha");
    return finish(family::HallWeiss{alpha, take("rho")});
  }
  if (fam == "abs_student_t") return finish(family::AbsStudentT{take("v")});
  if (fam == "g_and_h") {
    const double g = take("g");
    return finish(family::GAndH{g, take("h")});
  }
  throw ParseError("unknown model family '" + fam + "'");
}

}  // namespace ltail
