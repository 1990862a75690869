#pragma once

#include <string>
#include <vector>

#include "bet/geometry.hpp"

namespace bet {

/// The dimension parameter q in (0, inf]. Infinity is its own state, not a large number.
class QParam {
 public:
  static QParam infinite() noexcept { return QParam(); }
  static QParam finite(double q);
  /// Accepts "inf", "infty", "infinity" or a positive real.
  static QParam parse(const std::string& text);

  bool is_infinite() const noexcept { return infinite_; }
  double value() const noexcept { return q_; }
  /// 1/q, zero at infinity.
  double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / q_; }
  std::string str() const;

 private:
  QParam() = default;
  bool infinite_ = true;
  double q_ = 0.0;
};

/// The three algebraic forms of the weighted Ricci tensor at a point, with the pieces
/// they are assembled from.
struct BeForms {
  Mat ricci;
  Mat hess_log_phi;
  Vec dlog_phi;
  Mat form_log;    // Ric - Hess ln phi - (1/q) dln phi (x) dln phi
  Mat form_phi;    // Ric - Hess phi / phi + (1 - 1/q) (dphi/phi) (x) (dphi/phi)
  Mat form_root;   // Ric - q Hess(phi^{1/q}) / phi^{1/q}; empty for q = inf
  double spread = 0.0;  // max disagreement, relative to the size of the terms
};

BeForms be_forms_local(const LocalGeometry& geo, const Jet2& phi, QParam q);
BeForms be_forms_at(const ManifoldSpec& space, QParam q, const Vec& point);

/// Throws FormMismatch if the three forms disagree by more than this relative spread.
inline constexpr double kFormTolerance = 1e-9;

SymBilinear be_tensor_at(const ManifoldSpec& space, QParam q, const Vec& point);

struct BoundReport {
  QParam q = QParam::infinite();
  double r = 0.0;
  double r_star = 0.0;  // min over samples of the smallest eigenvalue of Ric~ relative to g
  Vec worst_point;
  double worst_margin = 0.0;  // r_star - r
  int sample_count = 0;
};

BoundReport lower_bound_margin(const ManifoldSpec& space, QParam q, double r, const std::vector<Vec>& samples);

}  // namespace bet
