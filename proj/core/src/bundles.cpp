#include "bet/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bet/error.hpp"

namespace bet {

namespace {

constexpr double kHypothesisTol = 1e-8;
constexpr double kFiberMargin = 0.02;  // fraction of [0, pi] excluded at the fiber poles

bool is_polar_axis(const Fiber& f, int k) { return f.kind == FiberKind::Sphere && k < f.q - 1; }

// Metric of the unit fiber at a fiber point (diagonal in the polar/angle chart).
Vec fiber_metric_diagonal(const Fiber& f, const Vec& y) {
  Vec d = Vec::Ones(f.q);
  if (f.kind == FiberKind::Sphere) {
    double s = 1.0;
    for (int k = 0; k < f.q; ++k) {
      d(k) = s;
      if (k < f.q - 1) s *= std::sin(y(k)) * std::sin(y(k));
    }
  }
  return d;
}

void check_poles(const WarpedSubmersion& sub, const Vec& p) {
  const int nb = sub.base_dim();
  for (int k = 0; k < sub.fiber.q; ++k) {
    if (!is_polar_axis(sub.fiber, k)) continue;
    const double t = p(nb + k);
    if (std::min(t, std::numbers::pi - t) < kFiberMargin * std::numbers::pi)
      throw Error(ErrorCode::PoleProximity, "fiber coordinate " + std::to_string(k) + " is too close to a pole");
  }
}

bool is_constant_one(const Expression& e) {
  if (e.depends_on_coordinates()) return false;
  Vec dummy = Vec::Zero(e.dimension());
  return std::fabs(e.evaluate(dummy) - 1.0) <= 1e-15;
}

}  // namespace

Fiber Fiber::parse(const std::string& text) {
  if (text.size() < 3 || text[1] != '^' || (text[0] != 'S' && text[0] != 'T'))
    throw Error(ErrorCode::UnsupportedFiber, "fiber must be written S^q or T^q, got '" + text + "'");
  Fiber f;
  f.kind = text[0] == 'S' ? FiberKind::Sphere : FiberKind::Torus;
  char* end = nullptr;
  const long q = std::strtol(text.c_str() + 2, &end, 10);
  if (*end != '\0' || q < 1) throw Error(ErrorCode::UnsupportedFiber, "bad fiber dimension in '" + text + "'");
  f.q = static_cast<int>(q);
  if (f.kind == FiberKind::Sphere && f.q < 2)
    throw Error(ErrorCode::UnsupportedFiber, "sphere fibers need q >= 2 (use T^1 for a circle)");
  return f;
}

std::string Fiber::str() const { return std::string(kind == FiberKind::Sphere ? "S^" : "T^") + std::to_string(q); }

double Fiber::volume() const {
  if (kind == FiberKind::Torus) return std::pow(2.0 * std::numbers::pi, q);
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (q + 1)) / std::tgamma(0.5 * (q + 1));
}

WarpedSubmersion WarpedSubmersion::make(ManifoldSpec base, Fiber fiber, Expression warp, double scale_i) {
  if (fiber.kind == FiberKind::Sphere && fiber.q < 2)
    throw Error(ErrorCode::UnsupportedFiber, "sphere fibers need q >= 2");
  if (fiber.q < 1 || base.dimension() + fiber.q > kMaxDim)
    throw Error(ErrorCode::UnsupportedFiber, "total dimension exceeds " + std::to_string(kMaxDim));
  if (!(scale_i > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale i must be positive");
  if (warp.dimension() != base.dimension())
    throw Error(ErrorCode::DimensionMismatch, "warp function must live on the base");
  for (const Vec& b : base.lattice(8))
    if (!(warp.evaluate(b) > 0.0)) throw Error(ErrorCode::DomainError, "warp function is not positive on the base");
  return WarpedSubmersion{std::move(base), fiber, std::move(warp), scale_i};
}

WarpedSubmersion WarpedSubmersion::make(ManifoldSpec base, Fiber fiber, const std::string& warp, double scale_i) {
  Expression w = parse_expression(warp, base.dimension(), base.coordinate_names());
  return make(std::move(base), fiber, std::move(w), scale_i);
}

WarpedSubmersion WarpedSubmersion::with_scale(double i) const {
  if (!(i > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale i must be positive");
  WarpedSubmersion s = *this;
  s.scale_i = i;
  return s;
}

ManifoldSpec total_space(const WarpedSubmersion& sub) {
  const int nb = sub.base_dim(), q = sub.fiber.q;
  std::vector<std::string> names = sub.base.coordinate_names();
  for (int k = 0; k < q; ++k) {
    std::string name = "fib_" + std::to_string(k);
    while (std::find(names.begin(), names.end(), name) != names.end()) name += "_";
    names.push_back(name);
  }
  std::vector<Interval> domain;
  std::vector<bool> periodic;
  for (int a = 0; a < nb; ++a) {
    domain.push_back(sub.base.domain(a));
    periodic.push_back(sub.base.periodic(a));
  }
  for (int k = 0; k < q; ++k) {
    const bool polar = is_polar_axis(sub.fiber, k);
    domain.push_back(polar ? Interval{0.0, std::numbers::pi} : Interval{0.0, 2.0 * std::numbers::pi});
    periodic.push_back(!polar);
  }

  // Base expressions keep their coordinate indices 0..nb-1 in the product chart, so the
  // trees can be reused as they are.
  const NodePtr scale2 = ast::binary(
      BinaryOp::Pow, ast::binary(BinaryOp::Div, sub.warp.root_ptr(), ast::constant(sub.scale_i)), ast::constant(2.0));
  const int n = nb + q;
  std::vector<Expression> metric;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (i < nb && j < nb) {
        metric.emplace_back(sub.base.metric(i, j).root_ptr(), names);
      } else if (i == j) {
        NodePtr e = scale2;
        if (sub.fiber.kind == FiberKind::Sphere)
          for (int k = 0; k < i - nb; ++k)
            e = ast::binary(BinaryOp::Mul, e,
                            ast::binary(BinaryOp::Pow, ast::call(Function::Sin, ast::coordinate(nb + k)),
                                        ast::constant(2.0)));
        metric.emplace_back(e, names);
      } else {
        metric.push_back(Expression::constant(0.0, names));
      }
    }
  Expression density(sub.base.density().root_ptr(), names);
  return ManifoldSpec::from_expressions(sub.base.name() + "/total", names, domain, periodic, std::move(metric),
                                        std::move(density), sub.base.sample_margin(), sub.base.noncompact());
}

Vec lift_point(const WarpedSubmersion& sub, const Vec& base_point, const Vec& fiber_point) {
  sub.base.require_dimension(base_point);
  if (fiber_point.size() != sub.fiber.q)
    throw Error(ErrorCode::DimensionMismatch, "fiber point must have " + std::to_string(sub.fiber.q) + " coordinates");
  Vec p(sub.total_dim());
  p << base_point, fiber_point;
  return p;
}

std::vector<Vec> fiber_sample_points(const Fiber& fiber) {
  const double polar[] = {std::numbers::pi / 3, std::numbers::pi / 2, 2 * std::numbers::pi / 3};
  const double angle[] = {0.5, 2.0, 4.0};
  std::vector<Vec> out;
  for (int s = 0; s < 3; ++s) {
    Vec y(fiber.q);
    for (int k = 0; k < fiber.q; ++k) y(k) = is_polar_axis(fiber, k) ? polar[s] : angle[(s + k) % 3];
    out.push_back(y);
  }
  return out;
}

WarpedResidual warped_ricci_residual(const WarpedSubmersion& sub, const Vec& p) {
  const ManifoldSpec total = total_space(sub);
  total.require_dimension(p);
  check_poles(sub, p);
  total.require_in_box(p);
  const int nb = sub.base_dim(), q = sub.fiber.q, n = nb + q;
  const Vec b = p.head(nb);

  const LocalGeometry geo(total, p);
  WarpedResidual res;
  res.ricci = symmetrized(geo.ricci_raw());

  const LocalGeometry base_geo(sub.base, b);
  const Jet2 f = sub.warp.evaluate_jet(b);
  const Mat ric_b = symmetrized(base_geo.ricci_raw());
  const Mat hess_f = base_geo.hessian(f);
  const double lap_f = base_geo.ginv().cwiseProduct(hess_f).sum();
  const Vec df = f.gradient();
  const double grad_f_sq = df.dot(base_geo.ginv() * df);

  res.expected = Mat::Zero(n, n);
  res.expected.topLeftCorner(nb, nb) = ric_b - q * hess_f / f.value();
  const Mat g_fiber = geo.g().bottomRightCorner(q, q);
  const double vertical_factor = lap_f / f.value() + (q - 1) * grad_f_sq / (f.value() * f.value());
  Mat ric_fiber = Mat::Zero(q, q);
  if (sub.fiber.kind == FiberKind::Sphere) {
    const double unscale = sub.scale_i / f.value();
    ric_fiber = (q - 1) * g_fiber * unscale * unscale;
  }
  res.expected.bottomRightCorner(q, q) = ric_fiber - vertical_factor * g_fiber;

  const Mat diff = res.ricci - res.expected;
  res.horizontal = diff.topLeftCorner(nb, nb).cwiseAbs().maxCoeff();
  res.mixed = diff.topRightCorner(nb, q).cwiseAbs().maxCoeff();
  res.vertical = diff.bottomRightCorner(q, q).cwiseAbs().maxCoeff();
  return res;
}

WarpedResidual warped_ricci_residual(const ManifoldSpec& space_m, const Expression& phi, int q, double i,
                                     const Vec& total_point) {
  if (q < 2) throw Error(ErrorCode::UnsupportedFiber, "sphere fibers need q >= 2");
  if (phi.dimension() != space_m.dimension())
    throw Error(ErrorCode::DimensionMismatch, "density must live on M");
  Expression warp(ast::binary(BinaryOp::Pow, phi.root_ptr(), ast::constant(1.0 / q)), space_m.coordinate_names());
  const WarpedSubmersion sub = WarpedSubmersion::make(space_m, Fiber{FiberKind::Sphere, q}, std::move(warp), i);
  return warped_ricci_residual(sub, total_point);
}

double base_pushforward_density(const WarpedSubmersion& sub, const Vec& b) {
  sub.base.require_in_box(b);
  return sub.base.density_at(b) * sub.fiber.volume() * std::pow(sub.warp.evaluate(b) / sub.scale_i, sub.fiber.q);
}

ManifoldSpec pushforward_space(const WarpedSubmersion& sub) {
  const int nb = sub.base_dim();
  const auto& names = sub.base.coordinate_names();
  NodePtr density = ast::binary(
      BinaryOp::Mul, ast::binary(BinaryOp::Mul, sub.base.density().root_ptr(), ast::constant(sub.fiber.volume())),
      ast::binary(BinaryOp::Pow, ast::binary(BinaryOp::Div, sub.warp.root_ptr(), ast::constant(sub.scale_i)),
                  ast::constant(sub.fiber.q)));
  std::vector<Expression> metric;
  std::vector<Interval> domain;
  std::vector<bool> periodic;
  for (int i = 0; i < nb; ++i) {
    domain.push_back(sub.base.domain(i));
    periodic.push_back(sub.base.periodic(i));
    for (int j = i; j < nb; ++j) metric.push_back(sub.base.metric(i, j));
  }
  return ManifoldSpec::from_expressions(sub.base.name() + "/pushforward", names, domain, periodic, std::move(metric),
                                        Expression(density, names), sub.base.sample_margin(), sub.base.noncompact());
}

namespace {

SubmersionTensors tensors_on(const WarpedSubmersion& sub, const LocalGeometry& geo, const LocalGeometry& base_geo,
                             const Vec& x) {
  const int nb = sub.base_dim(), q = sub.fiber.q;
  const Vec b = base_geo.point();
  SubmersionTensors t;

  // S_ab(X) = g(II(d_a, d_b), X) = -1/2 X^c d_c g_ab on fiber indices.
  Mat s(q, q);
  for (int al = 0; al < q; ++al)
    for (int be = 0; be < q; ++be) {
      double v = 0.0;
      for (int c = 0; c < nb; ++c) v -= 0.5 * x(c) * geo.dg(c, nb + al, nb + be);
      s(al, be) = v;
    }
  const Mat gf_inv = geo.ginv().bottomRightCorner(q, q);
  t.t_sq = (gf_inv * s * gf_inv).cwiseProduct(s).sum();
  t.x_dot_n = gf_inv.cwiseProduct(s).sum();

  // N_c = -1/2 g^{ab} d_c g_ab over fiber indices, and its base covariant derivative.
  Vec n_low(nb);
  Mat dn(nb, nb);  // dn(c, d) = d_c N_d
  for (int d = 0; d < nb; ++d) {
    double v = 0.0;
    for (int al = 0; al < q; ++al)
      for (int be = 0; be < q; ++be) v -= 0.5 * geo.ginv()(nb + al, nb + be) * geo.dg(d, nb + al, nb + be);
    n_low(d) = v;
    for (int c = 0; c < nb; ++c) {
      double w = 0.0;
      for (int al = 0; al < q; ++al)
        for (int be = 0; be < q; ++be)
          w -= 0.5 * (geo.dginv(c, nb + al, nb + be) * geo.dg(d, nb + al, nb + be) +
                      geo.ginv()(nb + al, nb + be) * geo.ddg(c, d, nb + al, nb + be));
      dn(c, d) = w;
    }
  }
  const Mat gb_inv = geo.ginv().topLeftCorner(nb, nb);
  t.mean_curvature = gb_inv * n_low;
  double n_term = 0.0;
  for (int c = 0; c < nb; ++c)
    for (int d = 0; d < nb; ++d) {
      double cov = dn(c, d);
      for (int e = 0; e < nb; ++e) cov -= geo.gamma(e, c, d) * n_low(e);
      n_term += x(c) * x(d) * cov;
    }
  t.n_term = n_term;

  // A: vertical part of nabla_X E over a g^B-orthonormal horizontal frame, counted twice
  // for the skew partner.
  const Mat gb = geo.g().topLeftCorner(nb, nb);
  Eigen::SelfAdjointEigenSolver<Mat> es(gb);
  const Mat frame = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  double a_sq = 0.0;
  for (int k = 0; k < nb; ++k) {
    Vec v = Vec::Zero(q);
    for (int al = 0; al < q; ++al)
      for (int c = 0; c < nb; ++c)
        for (int d = 0; d < nb; ++d) v(al) += geo.gamma(nb + al, c, d) * x(c) * frame(d, k);
    a_sq += v.dot(geo.g().bottomRightCorner(q, q) * v);
  }
  t.a_sq = 2.0 * a_sq;

  // closed forms
  const Jet2 f = sub.warp.evaluate_jet(b);
  const Jet2 lnf = log(f);
  const double x_lnf = lnf.gradient().dot(x);
  t.t_sq_closed = q * x_lnf * x_lnf;
  t.mean_curvature_closed = -q * (base_geo.ginv() * lnf.gradient());
  t.n_term_closed = -q * x.dot(base_geo.hessian(lnf) * x);
  t.phi_b = sub.base.density_at(b) * sub.fiber.volume() * std::pow(f.value() / sub.scale_i, q);
  return t;
}

}  // namespace

SubmersionTensors submersion_tensors(const WarpedSubmersion& sub, const Vec& base_point, const Vec& x,
                                     const Vec& fiber_point) {
  const ManifoldSpec total = total_space(sub);
  const Vec p = lift_point(sub, base_point, fiber_point);
  check_poles(sub, p);
  total.require_in_box(p);
  if (x.size() != sub.base_dim()) throw Error(ErrorCode::DimensionMismatch, "direction must be a base vector");
  const LocalGeometry geo(total, p);
  const LocalGeometry base_geo(sub.base, base_point);
  return tensors_on(sub, geo, base_geo, x);
}

Theorem2Report theorem2_margins(const WarpedSubmersion& sub, double q_for_bound, double r,
                                const std::vector<Vec>& base_samples, Theorem2Mode mode) {
  if (base_samples.empty()) throw Error(ErrorCode::InvalidArgument, "no base samples");
  if (mode == Theorem2Mode::Q) {
    if (!is_constant_one(sub.base.density()))
      throw Error(ErrorCode::ModeMismatch, "mode q requires the total-space density to be 1");
    if (q_for_bound != static_cast<double>(sub.fiber.q))
      throw Error(ErrorCode::ModeMismatch, "mode q requires q = dim F = " + std::to_string(sub.fiber.q));
  }
  const ManifoldSpec total = total_space(sub);
  const ManifoldSpec pushed = pushforward_space(sub);
  const auto fiber_points = fiber_sample_points(sub.fiber);

  std::vector<Vec> lifted;
  for (const Vec& b : base_samples)
    for (const Vec& y : fiber_points) lifted.push_back(lift_point(sub, b, y));
  const BoundReport hyp = lower_bound_margin(total, QParam::infinite(), r, lifted);

  Theorem2Report rep;
  rep.hypothesis_margin = hyp.worst_margin;
  rep.sample_count = static_cast<int>(base_samples.size());
  if (hyp.worst_margin < -kHypothesisTol)
    throw Error(ErrorCode::HypothesisFailed,
                "total-space bound Ric~ >= r g fails on lifted samples (margin " + std::to_string(hyp.worst_margin) + ")");

  const QParam q = mode == Theorem2Mode::Q ? QParam::finite(q_for_bound) : QParam::infinite();
  rep.worst = std::numeric_limits<double>::infinity();
  rep.min_discarded = std::numeric_limits<double>::infinity();
  rep.min_cauchy_schwarz = std::numeric_limits<double>::infinity();
  const int nb = sub.base_dim();
  for (const Vec& b : base_samples) {
    const SymBilinear ric_b = be_tensor_at(pushed, q, b);
    const Mat gb = pushed.metric_at(b);
    // worst unit direction of Ric~^B - r g^B relative to g^B
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ric_b.matrix, gb);
    const double m = es.eigenvalues()(0) - r;
    if (m < rep.worst) {
      rep.worst = m;
      rep.worst_point = b;
    }
    Vec x = es.eigenvectors().col(0);
    x /= std::sqrt(x.dot(gb * x));

    const LocalGeometry base_geo(sub.base, b);
    const Jet2 phi_m = sub.base.density().evaluate_jet(b);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec& y : fiber_points) {
      const LocalGeometry geo(total, lift_point(sub, b, y));
      const SubmersionTensors t = tensors_on(sub, geo, base_geo, x);
      rep.min_discarded = std::min(rep.min_discarded, 2.0 * t.a_sq + t.t_sq);
      rep.min_cauchy_schwarz = std::min(rep.min_cauchy_schwarz, t.t_sq - t.x_dot_n * t.x_dot_n / sub.fiber.q);
      const double c = phi_m.gradient().head(nb).dot(x) / phi_m.value() - t.x_dot_n;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    rep.fiber_constancy = std::max(rep.fiber_constancy, hi - lo);
  }
  return rep;
}

CollapseReport collapse_residual(const WarpedSubmersion& sub, const Vec& x, const Vec& base_point,
                                 const std::vector<double>& i_values) {
  if (i_values.empty()) throw Error(ErrorCode::InvalidArgument, "no scale values");
  for (std::size_t k = 1; k < i_values.size(); ++k)
    if (!(i_values[k] > i_values[k - 1])) throw Error(ErrorCode::InvalidArgument, "scale values must increase");
  if (x.size() != sub.base_dim()) throw Error(ErrorCode::DimensionMismatch, "direction must be a base vector");
  sub.base.require_in_box(base_point);

  const int nb = sub.base_dim(), q = sub.fiber.q;
  const Vec y = fiber_sample_points(sub.fiber)[1];
  const Vec p = lift_point(sub, base_point, y);

  // Right-hand sides use the i = 1 metric.
  const WarpedSubmersion unit = sub.with_scale(1.0);
  const ManifoldSpec total1 = total_space(unit);
  const LocalGeometry geo1(total1, p);
  const LocalGeometry base_geo(sub.base, base_point);
  const SubmersionTensors t = tensors_on(unit, geo1, base_geo, x);
  const double ric_b = x.dot(symmetrized(base_geo.ricci_raw()) * x);
  const double horizontal_rhs = ric_b - t.t_sq + t.n_term;

  // Vertical test vector: the last fiber coordinate field, unit in g_1.
  const int alpha = nb + q - 1;
  Vec u = Vec::Zero(nb + q);
  u(alpha) = 1.0 / std::sqrt(geo1.g()(alpha, alpha));
  double ric_f = 0.0;
  if (sub.fiber.kind == FiberKind::Sphere) {
    const Vec gf = fiber_metric_diagonal(sub.fiber, y);
    ric_f = (q - 1) * gf(q - 1) * u(alpha) * u(alpha);
  }

  CollapseReport rep;
  for (double i : i_values) {
    const ManifoldSpec total = total_space(sub.with_scale(i));
    const LocalGeometry geo(total, p);
    const Mat ric = symmetrized(geo.ricci_raw());
    Vec xbar = Vec::Zero(nb + q);
    xbar.head(nb) = x;
    CollapseRow row;
    row.i = i;
    row.horizontal = std::fabs(xbar.dot(ric * xbar) - horizontal_rhs);
    row.vertical = std::fabs(u.dot(ric * u) - ric_f);
    rep.rows.push_back(row);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    const auto& a = rep.rows[k - 1];
    const auto& b = rep.rows[k];
    rep.vertical_ratios.push_back(a.vertical > 0 ? b.vertical / a.vertical : nan);
    rep.horizontal_ratios.push_back(a.horizontal > 0 ? b.horizontal / a.horizontal : nan);
  }
  return rep;
}

}  // namespace bet
