#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ltail::detail {

// Truncated Taylor expansion f(x0 + h) = sum_k c[k] h^k. Composing the
// closed-form survival functions in this arithmetic yields their derivatives
// without finite differences or symbolic expansion.
class Jet {
 public:
  explicit Jet(std::size_t order) : c_(order + 1, 0.0) {}

  static Jet variable(double x0, std::size_t order) {
    Jet j(order);
    j.c_[0] = x0;
    if (order >= 1) {
      j.c_[1] = 1.0;
    }
    return j;
  }

  static Jet constant(double value, std::size_t order) {
    Jet j(order);
    j.c_[0] = value;
    return j;
  }

  std::size_t order() const { return c_.size() - 1; }
  double coeff(std::size_t k) const { return c_[k]; }
  double& coeff(std::size_t k) { return c_[k]; }

  /// k-th derivative at x0.
  double derivative(std::size_t k) const {
    double factorial = 1.0;
    for (std::size_t i = 2; i <= k; ++i) {
      factorial *= static_cast<double>(i);
    }
    return c_[k] * factorial;
  }

  Jet& operator+=(const Jet& rhs) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += rhs.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& rhs) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= rhs.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, double s) { return lhs *= s; }
  friend Jet operator*(double s, Jet rhs) { return rhs *= s; }
  friend Jet operator+(Jet lhs, double s) { return lhs += s; }
  friend Jet operator-(Jet j) { return j *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= k; ++i) acc += a.c_[i] * b.c_[k - i];
      out.c_[k] = acc;
    }
    return out;
  }

  /// a^r for a(x0) > 0.
  friend Jet pow(const Jet& a, double r) {
    Jet out(a.order());
    const double a0 = a.c_[0];
    out.c_[0] = std::pow(a0, r);
    for (std::size_t k = 1; k <= a.order(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 1; i <= k; ++i) {
        acc += ((r + 1.0) * static_cast<double>(i) - static_cast<double>(k)) * a.c_[i] * out.c_[k - i];
      }
      out.c_[k] = acc / (static_cast<double>(k) * a0);
    }
    return out;
  }

  friend Jet exp(const Jet& a) {
    Jet out(a.order());
    out.c_[0] = std::exp(a.c_[0]);
    for (std::size_t k = 1; k <= a.order(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 1; i <= k; ++i) {
        acc += static_cast<double>(i) * a.c_[i] * out.c_[k - i];
      }
      out.c_[k] = acc / static_cast<double>(k);
    }
    return out;
  }

  /// Antiderivative shifted so that the constant term is `value_at_x0`.
  /// The top coefficient of the input is dropped.
  friend Jet integral(const Jet& a, double value_at_x0) {
    Jet out(a.order());
    out.c_[0] = value_at_x0;
    for (std::size_t k = 1; k <= a.order(); ++k) {
      out.c_[k] = a.c_[k - 1] / static_cast<double>(k);
    }
    return out;
  }

 private:
  std::vector<double> c_;
};

}  // namespace ltail::detail
