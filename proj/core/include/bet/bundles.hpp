#pragma once

#include <string>
#include <vector>

#include "bet/bakry_emery.hpp"

namespace bet {

enum class FiberKind { Sphere, Torus };

struct Fiber {
  FiberKind kind = FiberKind::Sphere;
  int q = 2;

  /// "S^q" or "T^q".
  static Fiber parse(const std::string& text);
  std::string str() const;
  /// Volume of the unit round sphere or of the standard torus (2 pi)^q.
  double volume() const;
};

/// B x F with metric g^B + (f/i)^2 g^F and density phi_M_base lifted from B. The base
/// spec's own density is phi_M_base.
struct WarpedSubmersion {
  ManifoldSpec base;
  Fiber fiber;
  Expression warp;  // f, in base coordinates
  double scale_i = 1.0;

  static WarpedSubmersion make(ManifoldSpec base, Fiber fiber, Expression warp, double scale_i);
  static WarpedSubmersion make(ManifoldSpec base, Fiber fiber, const std::string& warp, double scale_i);
  WarpedSubmersion with_scale(double i) const;

  int base_dim() const { return base.dimension(); }
  int total_dim() const { return base.dimension() + fiber.q; }
};

ManifoldSpec total_space(const WarpedSubmersion& sub);

/// Base point followed by fiber chart coordinates.
Vec lift_point(const WarpedSubmersion& sub, const Vec& base_point, const Vec& fiber_point);
/// A few fixed interior fiber points used for lifting samples.
std::vector<Vec> fiber_sample_points(const Fiber& fiber);

struct WarpedResidual {
  double horizontal = 0.0;
  double mixed = 0.0;
  double vertical = 0.0;
  Mat ricci;     // directly computed Ricci of the total space
  Mat expected;  // block formula
};

/// Ricci of the warped product against the block formula: horizontal Ric^B - q Hess f / f,
/// mixed 0, vertical Ric^F - (Delta f / f + (q - 1)|grad f|^2 / f^2) g.
WarpedResidual warped_ricci_residual(const WarpedSubmersion& sub, const Vec& total_point);
/// S^q x M with metric g^M + i^{-2} phi^{2/q} g^{S^q}.
WarpedResidual warped_ricci_residual(const ManifoldSpec& space_m, const Expression& phi, int q, double i,
                                     const Vec& total_point);

double base_pushforward_density(const WarpedSubmersion& sub, const Vec& base_point);
/// (B, phi^B) as a weighted space.
ManifoldSpec pushforward_space(const WarpedSubmersion& sub);

struct SubmersionTensors {
  // computed from the total-space metric jets
  double n_term = 0.0;  // (X, nabla_X N)
  double t_sq = 0.0;    // (T X, T X)
  double a_sq = 0.0;    // (A_X, A_X)
  double x_dot_n = 0.0; // (X, N), the fiber trace of the second fundamental form
  Vec mean_curvature;   // N in base coordinates, from d ln sqrt det g_F
  // closed forms for warped products
  double n_term_closed = 0.0;  // -q Hess ln f (X, X)
  double t_sq_closed = 0.0;    // q (X ln f)^2
  Vec mean_curvature_closed;   // -q grad ln f
  double phi_b = 0.0;
};

SubmersionTensors submersion_tensors(const WarpedSubmersion& sub, const Vec& base_point, const Vec& x,
                                     const Vec& fiber_point);

enum class Theorem2Mode { Infty, Q };

struct Theorem2Report {
  double worst = 0.0;        // min over samples and unit X of Ric~^B(X,X) - r g^B(X,X)
  Vec worst_point;
  double hypothesis_margin = 0.0;  // lower_bound_margin on lifted samples
  double min_discarded = 0.0;      // min of 2 (A,A) + (T X, T X)
  double min_cauchy_schwarz = 0.0; // min of (T X, T X) - (X, N)^2 / q
  double fiber_constancy = 0.0;    // spread of X phi/phi - (X, N) over fiber points
  int sample_count = 0;
};

Theorem2Report theorem2_margins(const WarpedSubmersion& sub, double q_for_bound, double r,
                                const std::vector<Vec>& base_samples, Theorem2Mode mode);

struct CollapseRow {
  double i = 0.0;
  double horizontal = 0.0;  // |Ric_eps(X,X) - (Ric^B - (TX,TX) + (X, nabla_X N))|
  double vertical = 0.0;    // |Ric_eps(U,U) - Ric^F(U,U)|, U of unit length in g_1
};

struct CollapseReport {
  std::vector<CollapseRow> rows;
  std::vector<double> vertical_ratios;    // vertical(i_{k+1}) / vertical(i_k)
  std::vector<double> horizontal_ratios;
};

CollapseReport collapse_residual(const WarpedSubmersion& sub, const Vec& x, const Vec& base_point,
                                 const std::vector<double>& i_values);

}  // namespace bet
