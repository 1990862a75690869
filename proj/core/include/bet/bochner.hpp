#pragma once

#include <cstdint>
#include <vector>

#include "bet/bakry_emery.hpp"

namespace bet {

// Norm conventions on 2-tensors: (nabla w, nabla w) is the full contraction with both
// indices raised; (dw, dw) and (L g, L g) carry a factor 1/2 on top of that. With these
// the algebraic identity (dw,dw) + (L g, L g) = 2 (nabla w, nabla w) and the integrated
// Bochner formula hold simultaneously.

struct BochnerTerms {
  double omega_sq = 0.0;            // (w, w)
  double codiff = 0.0;              // weighted codifferential of w
  double codiff_sq = 0.0;
  double d_omega_sq = 0.0;
  double nabla_sq = 0.0;
  double ric_term = 0.0;            // (w, Ric~_inf w)
  double lie_sq = 0.0;              // (L_{w#} g, L_{w#} g)
  double omega_laplacian = 0.0;     // (w, weighted Laplacian of w)
  double lhs_half_laplacian = 0.0;  // 1/2 weighted delta d (w, w)
  double drift_sq = 0.0;            // (w(grad ln phi))^2
  double residual = 0.0;
};

/// Weighted codifferential: delta w - w(grad ln phi).
double weighted_codifferential_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point);

/// All pointwise Bochner quantities; the weighted Laplacian is assembled as Delta - L_X
/// with X = grad ln phi.
BochnerTerms bochner_residual_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point);

/// Same, from precomputed local data (no domain checks).
BochnerTerms bochner_terms_local(const LocalGeometry& geo, const Jet2& phi, const std::vector<Jet2>& omega);

struct KillingIdentity {
  double d_omega_sq = 0.0;
  double lie_sq = 0.0;
  double nabla_sq = 0.0;
  double lhs = 0.0;  // (dw, dw) + (L g, L g)
  double rhs = 0.0;  // 2 (nabla w, nabla w)
};

KillingIdentity killing_identity_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point);

/// The integrals (2.1-style, against phi dvol) of every Bochner term.
struct IntegratedBochner {
  double omega_sq = 0.0;
  double codiff_sq = 0.0;
  double d_omega_sq = 0.0;
  double nabla_sq = 0.0;
  double ric_term = 0.0;
  double lie_sq = 0.0;
  double omega_laplacian = 0.0;
  double drift_sq = 0.0;
  double residual = 0.0;  // integral of the pointwise residual
  bool boundary_truncated = false;
};

IntegratedBochner integrate_bochner(const ManifoldSpec& space, const OneFormField& omega, int order);

struct Definition1Result {
  double worst = 0.0;
  int worst_index = -1;
  std::vector<double> margins;  // one per test form
};

/// <dw,dw> + <d~w,d~w> - <nabla w,nabla w> - (1/q) int (w(grad ln phi))^2 phi - r <w,w>, minimized
/// over the test forms. A negative value refutes Ric~_q >= r g.
Definition1Result definition1_margin(const ManifoldSpec& space, QParam q, double r,
                                     const std::vector<OneFormField>& test_forms, int order);

/// Seeded random trigonometric 1-forms, degree <= 3 per axis. On non-periodic axes each
/// component is multiplied by sin(pi t)^4, t the affine coordinate of the sample box, so
/// the forms vanish to fourth order on the box boundary.
std::vector<OneFormField> trig_test_forms(const ManifoldSpec& space, int count, std::uint64_t seed);

}  // namespace bet
