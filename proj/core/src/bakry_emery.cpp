#include "bet/bakry_emery.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "bet/error.hpp"

namespace bet {

QParam QParam::finite(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidArgument, "q must be a positive real or inf");
  QParam p;
  p.infinite_ = false;
  p.q_ = q;
  return p;
}

QParam QParam::parse(const std::string& text) {
  if (text == "inf" || text == "infty" || text == "infinity" || text == "Inf") return infinite();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw Error(ErrorCode::InvalidArgument, "cannot read q from '" + text + "'");
  return finite(v);
}

std::string QParam::str() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", q_);
  return buf;
}

BeForms be_forms_local(const LocalGeometry& geo, const Jet2& phi, QParam q) {
  if (!(phi.value() > 0.0)) throw Error(ErrorCode::NonpositiveDensity, "density is not positive at this point");
  BeForms f;
  f.ricci = symmetrized(geo.ricci_raw());
  const Jet2 log_phi = log(phi);
  f.hess_log_phi = geo.hessian(log_phi);
  f.dlog_phi = log_phi.gradient();
  const double inv_q = q.reciprocal();

  f.form_log = f.ricci - f.hess_log_phi - inv_q * f.dlog_phi * f.dlog_phi.transpose();

  const Mat hess_phi_over = geo.hessian(phi) / phi.value();
  const Vec dphi_over = phi.gradient() / phi.value();
  f.form_phi = f.ricci - hess_phi_over + (1.0 - inv_q) * dphi_over * dphi_over.transpose();

  double scale = std::max({1.0, f.ricci.cwiseAbs().maxCoeff(), f.hess_log_phi.cwiseAbs().maxCoeff(),
                           hess_phi_over.cwiseAbs().maxCoeff(), (dphi_over * dphi_over.transpose()).cwiseAbs().maxCoeff()});
  double diff = (f.form_log - f.form_phi).cwiseAbs().maxCoeff();
  if (!q.is_infinite()) {
    const Jet2 root = pow(phi, inv_q);
    const Mat root_term = q.value() * geo.hessian(root) / root.value();
    f.form_root = f.ricci - root_term;
    scale = std::max(scale, root_term.cwiseAbs().maxCoeff());
    diff = std::max({diff, (f.form_log - f.form_root).cwiseAbs().maxCoeff(),
                     (f.form_phi - f.form_root).cwiseAbs().maxCoeff()});
  } else {
    f.form_root.resize(0, 0);
  }
  f.spread = diff / scale;
  return f;
}

BeForms be_forms_at(const ManifoldSpec& space, QParam q, const Vec& point) {
  space.require_in_box(point);
  const LocalGeometry geo(space, point);
  return be_forms_local(geo, space.density().evaluate_jet(point), q);
}

SymBilinear be_tensor_at(const ManifoldSpec& space, QParam q, const Vec& point) {
  const BeForms f = be_forms_at(space, q, point);
  if (f.spread > kFormTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "algebraic forms disagree (relative spread %.3g)", f.spread);
    throw Error(ErrorCode::FormMismatch, buf);
  }
  return {point, symmetrized(f.form_log), asymmetry(f.form_log)};
}

BoundReport lower_bound_margin(const ManifoldSpec& space, QParam q, double r, const std::vector<Vec>& samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no sample points");
  BoundReport rep;
  rep.q = q;
  rep.r = r;
  rep.r_star = std::numeric_limits<double>::infinity();
  for (const Vec& x : samples) {
    const SymBilinear t = be_tensor_at(space, q, x);
    const double lam = min_generalized_eigenvalue(t.matrix, space.metric_at(x));
    if (lam < rep.r_star) {
      rep.r_star = lam;
      rep.worst_point = x;
    }
  }
  rep.sample_count = static_cast<int>(samples.size());
  rep.worst_margin = rep.r_star - r;
  return rep;
}

}  // namespace bet
