#pragma once

#include <vector>

#include "bet/space.hpp"

namespace bet {

/// A symmetric bilinear form at a point. `asymmetry` records how far the raw tensor was
/// from symmetric before symmetrization (a diagnostic for index bugs).
struct SymBilinear {
  Vec point;
  Mat matrix;
  double asymmetry = 0.0;
};

/// A 1-form given by component expressions omega_i.
struct OneFormField {
  std::vector<Expression> components;
};

/// Everything second-order about the metric at one point: g, g^{-1}, their first and
/// second coordinate derivatives, Christoffel symbols and their first derivatives.
/// Construction does not check the sample box; the public free functions below do.
class LocalGeometry {
 public:
  LocalGeometry(const ManifoldSpec& space, const Vec& x);

  int dim() const noexcept { return n_; }
  const Vec& point() const noexcept { return x_; }
  const Mat& g() const noexcept { return g_; }
  const Mat& ginv() const noexcept { return ginv_; }

  /// d_k g_ij
  double dg(int k, int i, int j) const { return dg_[idx3(k, i, j)]; }
  /// d_k d_l g_ij
  double ddg(int k, int l, int i, int j) const { return ddg_[idx4(k, l, i, j)]; }
  /// d_k g^ij
  double dginv(int k, int i, int j) const { return dginv_[idx3(k, i, j)]; }
  /// d_k d_l g^ij
  double ddginv(int k, int l, int i, int j) const { return ddginv_[idx4(k, l, i, j)]; }
  /// Gamma^k_ij
  double gamma(int k, int i, int j) const { return gamma_[idx3(k, i, j)]; }
  /// d_l Gamma^k_ij
  double dgamma(int l, int k, int i, int j) const { return dgamma_[idx4(l, k, i, j)]; }

  /// R^a_bcd, with R(d_c, d_d) d_b = R^a_bcd d_a.
  double riemann(int a, int b, int c, int d) const;
  /// Raw (unsymmetrized) Ricci contraction R_bd = R^a_bad.
  Mat ricci_raw() const;
  /// g(R(X, Y) Y, Z).
  double curvature_xyyz(const Vec& x, const Vec& y, const Vec& z) const;

  /// Covariant Hessian of a scalar from its coordinate jet.
  Mat hessian(const Jet2& f) const;

 private:
  std::size_t idx3(int a, int b, int c) const {
    return static_cast<std::size_t>((a * n_ + b) * n_ + c);
  }
  std::size_t idx4(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
  }

  int n_;
  Vec x_;
  Mat g_, ginv_;
  std::vector<double> dg_, ddg_, dginv_, ddginv_, gamma_, dgamma_;
};

struct ChristoffelData {
  int dim = 0;
  std::vector<double> gamma;   // [k][i][j]
  std::vector<double> dgamma;  // [l][k][i][j]
  double at(int k, int i, int j) const {
    return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)];
  }
  double derivative(int l, int k, int i, int j) const {
    return dgamma[static_cast<std::size_t>(((l * dim + k) * dim + i) * dim + j)];
  }
};

ChristoffelData christoffel_at(const ManifoldSpec& space, const Vec& point);
SymBilinear ricci_at(const ManifoldSpec& space, const Vec& point);
SymBilinear hessian_scalar_at(const ManifoldSpec& space, const Expression& f, const Vec& point);
/// (nabla omega)_ij = d_i omega_j - Gamma^k_ij omega_k
Mat covariant_derivative_oneform_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point);

/// Parse n component strings against the space's coordinates.
OneFormField make_oneform(const ManifoldSpec& space, const std::vector<std::string>& components);

}  // namespace bet
