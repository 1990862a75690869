#pragma once

#include <array>
#include <cassert>

#include "bet/linalg.hpp"

namespace bet {

/// Second-order Taylor data of a scalar field at a point: value, gradient and Hessian
/// with respect to the n chart coordinates. The Hessian is stored packed (upper triangle
/// only), so it is symmetric by construction.
class Jet2 {
 public:
  static constexpr int kPacked = kMaxDim * (kMaxDim + 1) / 2;

  Jet2() = default;
  Jet2(int dim, double value) : dim_(dim), value_(value) { assert(dim >= 0 && dim <= kMaxDim); }

  /// The coordinate function x_index at a point whose index-th coordinate is `value`.
  static Jet2 variable(int dim, int index, double value) {
    Jet2 j(dim, value);
    j.grad_[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  int dim() const noexcept { return dim_; }
  double value() const noexcept { return value_; }
  double grad(int i) const noexcept { return grad_[static_cast<std::size_t>(i)]; }
  double hess(int i, int j) const noexcept { return hess_[packed(i, j)]; }

  void set_value(double v) noexcept { value_ = v; }
  void set_grad(int i, double v) noexcept { grad_[static_cast<std::size_t>(i)] = v; }
  void set_hess(int i, int j, double v) noexcept { hess_[packed(i, j)] = v; }

  Vec gradient() const;
  Mat hessian() const;

  Jet2& operator+=(const Jet2& o) noexcept;
  Jet2& operator-=(const Jet2& o) noexcept;
  Jet2& operator*=(double s) noexcept;

 private:
  static std::size_t packed(int i, int j) noexcept {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(j * (j + 1) / 2 + i);
  }

  int dim_ = 0;
  double value_ = 0.0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, kPacked> hess_{};
};

/// Chain rule: the jet of F(a) given F(a.value()), F' and F''.
Jet2 compose(const Jet2& a, double f, double df, double d2f) noexcept;

Jet2 operator+(Jet2 a, const Jet2& b) noexcept;
Jet2 operator-(Jet2 a, const Jet2& b) noexcept;
Jet2 operator-(const Jet2& a) noexcept;
Jet2 operator*(const Jet2& a, const Jet2& b) noexcept;
Jet2 operator*(Jet2 a, double s) noexcept;
Jet2 operator*(double s, Jet2 a) noexcept;
Jet2 operator+(Jet2 a, double s) noexcept;
Jet2 operator/(const Jet2& a, const Jet2& b) noexcept;

Jet2 reciprocal(const Jet2& a) noexcept;
Jet2 sin(const Jet2& a) noexcept;
Jet2 cos(const Jet2& a) noexcept;
Jet2 tan(const Jet2& a) noexcept;
Jet2 sinh(const Jet2& a) noexcept;
Jet2 cosh(const Jet2& a) noexcept;
Jet2 tanh(const Jet2& a) noexcept;
Jet2 exp(const Jet2& a) noexcept;
Jet2 log(const Jet2& a) noexcept;
Jet2 sqrt(const Jet2& a) noexcept;
Jet2 abs(const Jet2& a) noexcept;
/// a^c for a constant exponent; terms whose coefficient vanishes are skipped so that
/// integer powers of zero stay finite.
Jet2 pow(const Jet2& a, double c) noexcept;
/// a^b = exp(b log a), a > 0.
Jet2 pow(const Jet2& a, const Jet2& b) noexcept;

}  // namespace bet
