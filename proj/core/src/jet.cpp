#include "bet/jet.hpp"

#include <cmath>

namespace bet {

Vec Jet2::gradient() const {
  Vec g(dim_);
  for (int i = 0; i < dim_; ++i) g(i) = grad(i);
  return g;
}

Mat Jet2::hessian() const {
  Mat h(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) h(i, j) = hess(i, j);
  return h;
}

Jet2& Jet2::operator+=(const Jet2& o) noexcept {
  value_ += o.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += o.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += o.hess_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) noexcept {
  value_ -= o.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= o.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= o.hess_[i];
  return *this;
}

Jet2& Jet2::operator*=(double s) noexcept {
  value_ *= s;
  for (auto& g : grad_) g *= s;
  for (auto& h : hess_) h *= s;
  return *this;
}

Jet2 compose(const Jet2& a, double f, double df, double d2f) noexcept {
  const int n = a.dim();
  Jet2 out(n, f);
  for (int i = 0; i < n; ++i) out.set_grad(i, df * a.grad(i));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      double h = d2f * a.grad(i) * a.grad(j);
      // 0 * inf must not poison the Hessian when a direction carries no dependence
      if (df != 0.0) h += df * a.hess(i, j);
      out.set_hess(i, j, h);
    }
  return out;
}

Jet2 operator+(Jet2 a, const Jet2& b) noexcept { return a += b; }
Jet2 operator-(Jet2 a, const Jet2& b) noexcept { return a -= b; }
Jet2 operator-(const Jet2& a) noexcept { return a * -1.0; }
Jet2 operator*(Jet2 a, double s) noexcept { return a *= s; }
Jet2 operator*(double s, Jet2 a) noexcept { return a *= s; }

Jet2 operator+(Jet2 a, double s) noexcept {
  a.set_value(a.value() + s);
  return a;
}

Jet2 operator*(const Jet2& a, const Jet2& b) noexcept {
  const int n = a.dim();
  Jet2 out(n, a.value() * b.value());
  for (int i = 0; i < n; ++i) out.set_grad(i, a.value() * b.grad(i) + b.value() * a.grad(i));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      out.set_hess(i, j,
                   a.value() * b.hess(i, j) + b.value() * a.hess(i, j) + a.grad(i) * b.grad(j) +
                       a.grad(j) * b.grad(i));
  return out;
}

Jet2 reciprocal(const Jet2& a) noexcept {
  const double v = a.value();
  return compose(a, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

Jet2 operator/(const Jet2& a, const Jet2& b) noexcept { return a * reciprocal(b); }

Jet2 sin(const Jet2& a) noexcept {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, s, c, -s);
}

Jet2 cos(const Jet2& a) noexcept {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, c, -s, -c);
}

Jet2 tan(const Jet2& a) noexcept {
  const double t = std::tan(a.value());
  const double sec2 = 1.0 + t * t;
  return compose(a, t, sec2, 2.0 * t * sec2);
}

Jet2 sinh(const Jet2& a) noexcept {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, s, c, s);
}

Jet2 cosh(const Jet2& a) noexcept {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, c, s, c);
}

Jet2 tanh(const Jet2& a) noexcept {
  const double t = std::tanh(a.value());
  const double sech2 = 1.0 - t * t;
  return compose(a, t, sech2, -2.0 * t * sech2);
}

Jet2 exp(const Jet2& a) noexcept {
  const double e = std::exp(a.value());
  return compose(a, e, e, e);
}

Jet2 log(const Jet2& a) noexcept {
  const double v = a.value();
  return compose(a, std::log(v), 1.0 / v, -1.0 / (v * v));
}

Jet2 sqrt(const Jet2& a) noexcept {
  const double s = std::sqrt(a.value());
  return compose(a, s, 0.5 / s, -0.25 / (s * a.value()));
}

Jet2 abs(const Jet2& a) noexcept {
  const double v = a.value();
  const double sign = v > 0 ? 1.0 : (v < 0 ? -1.0 : std::nan(""));
  return compose(a, std::fabs(v), sign, 0.0);
}

Jet2 pow(const Jet2& a, double c) noexcept {
  const double v = a.value();
  if (c == 0.0) return Jet2(a.dim(), 1.0);
  const double f = std::pow(v, c);
  const double df = c * std::pow(v, c - 1.0);
  const double d2f = (c == 1.0) ? 0.0 : c * (c - 1.0) * std::pow(v, c - 2.0);
  return compose(a, f, df, d2f);
}

Jet2 pow(const Jet2& a, const Jet2& b) noexcept { return exp(b * log(a)); }

}  // namespace bet
