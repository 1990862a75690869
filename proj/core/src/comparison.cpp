#include "bet/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bet/error.hpp"
#include "bet/geodesic.hpp"
#include "bet/quadrature.hpp"

namespace bet {

namespace {

using std::numbers::pi;

template <typename F>
double integrate(F f, double a, double b) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &err);
}

void check_q(double q) {
  if (std::isinf(q) && q > 0)
    throw Error(ErrorCode::UnsupportedQ, "no model space for q = inf; Bishop-Gromov comparison needs finite q");
  if (!(q >= 0.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidArgument, "q must be finite and >= 0");
}

// Cubic Lagrange interpolation on a uniform grid.
double interpolate_uniform(const std::vector<double>& u, const std::vector<double>& y, double at) {
  const std::size_t n = u.size();
  if (n < 4) throw Error(ErrorCode::ProfileTooShort, "fan profile has too few points");
  const double du = u[1] - u[0];
  auto k = static_cast<std::size_t>(std::clamp((at - u[0]) / du, 0.0, static_cast<double>(n - 2)));
  std::size_t lo = k > 0 ? k - 1 : 0;
  if (lo + 4 > n) lo = n - 4;
  double sum = 0.0;
  for (std::size_t i = lo; i < lo + 4; ++i) {
    double w = 1.0;
    for (std::size_t j = lo; j < lo + 4; ++j)
      if (j != i) w *= (at - u[j]) / (u[i] - u[j]);
    sum += w * y[i];
  }
  return sum;
}

double metric_root_1d(const ManifoldSpec& space, double x) {
  Vec p(1);
  p(0) = x;
  return std::sqrt(space.metric_at(p)(0, 0));
}

double density_1d(const ManifoldSpec& space, double x) {
  Vec p(1);
  p(0) = x;
  return space.density_at(p) * metric_root_1d(space, x);
}

double circumference_1d(const ManifoldSpec& space) {
  const Interval iv = space.domain(0);
  return integrate([&](double x) { return metric_root_1d(space, x); }, iv.lo, iv.hi);
}

// Point at arclength u from c in direction sign along a 1-D chart.
double walk_1d(const ManifoldSpec& space, double c, double u, int sign) {
  const Interval iv = space.domain(0);
  double lo = c, hi;
  if (space.periodic(0)) {
    hi = c + sign * iv.length();
  } else {
    hi = sign > 0 ? iv.hi : iv.lo;
    if (std::fabs(integrate([&](double x) { return metric_root_1d(space, x); }, std::min(c, hi), std::max(c, hi))) <
        u)
      throw Error(ErrorCode::DomainExit, "ball leaves the chart");
  }
  for (int it = 0; it < 200 && std::fabs(hi - lo) > 1e-15 * (1.0 + std::fabs(c)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double len = std::fabs(integrate([&](double x) { return metric_root_1d(space, x); }, std::min(c, mid),
                                           std::max(c, mid)));
    (len < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> ball_volumes_1d(const ManifoldSpec& space, double c, const std::vector<double>& radii) {
  if (space.periodic(0) && 2.0 * radii.back() >= circumference_1d(space))
    throw Error(ErrorCode::CutReached, "ball radius reaches the cut locus of the circle");
  std::vector<double> out;
  for (double u : radii) {
    const double a = walk_1d(space, c, u, -1), b = walk_1d(space, c, u, +1);
    out.push_back(integrate([&](double x) { return density_1d(space, x); }, a, b));
  }
  return out;
}

struct Direction {
  Vec v;
  double weight;
};

std::vector<Direction> fan_directions(const ManifoldSpec& space, const Vec& center, int ray_count) {
  const int n = space.dimension();
  const Mat g = space.metric_at(center);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMetric, "metric not positive definite");
  // Columns of B are g-orthonormal.
  const Mat b = llt.matrixU().solve(Mat::Identity(n, n));
  std::vector<Direction> out;
  if (n == 2) {
    for (int j = 0; j < ray_count; ++j) {
      const double t = 2.0 * pi * j / ray_count;
      Vec w(2);
      w << std::cos(t), std::sin(t);
      out.push_back({b * w, 2.0 * pi / ray_count});
    }
  } else if (n == 3) {
    const int polar = std::max(4, static_cast<int>(std::lround(std::sqrt(ray_count / 2.0))));
    const int azimuth = 2 * polar;
    const auto [nodes, weights] = gauss_legendre(polar);
    for (int i = 0; i < polar; ++i) {
      const double z = nodes[static_cast<std::size_t>(i)], rho = std::sqrt(1.0 - z * z);
      for (int j = 0; j < azimuth; ++j) {
        const double t = 2.0 * pi * (j + 0.5) / azimuth;
        Vec w(3);
        w << rho * std::cos(t), rho * std::sin(t), z;
        out.push_back({b * w, weights[static_cast<std::size_t>(i)] * 2.0 * pi / azimuth});
      }
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "ball fans are implemented for dimensions 1 to 3");
  }
  return out;
}

}  // namespace

ModelSpace ModelSpace::make(int n, double q, double r) {
  check_q(q);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (!std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "r must be finite");
  const double total = n + q;
  return from_curvature(total, total > 1.0 ? r / (total - 1.0) : 0.0);
}

ModelSpace ModelSpace::from_curvature(double total_dim, double k) {
  if (!(total_dim >= 1.0)) throw Error(ErrorCode::InvalidArgument, "model dimension must be >= 1");
  ModelSpace m;
  m.n_ = total_dim;
  m.k_ = k;
  return m;
}

double ModelSpace::cut() const noexcept {
  return k_ > 0.0 ? pi / std::sqrt(k_) : std::numeric_limits<double>::infinity();
}

double ModelSpace::sn(double t) const {
  if (k_ > 0.0) return std::sin(std::sqrt(k_) * t) / std::sqrt(k_);
  if (k_ < 0.0) return std::sinh(std::sqrt(-k_) * t) / std::sqrt(-k_);
  return t;
}

double ModelSpace::volume(double u) const {
  if (!(u >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
  const double top = std::min(u, cut());
  const double p = n_ - 1.0;
  if (p == 0.0) return top;
  return integrate([&](double t) { return std::pow(std::max(sn(t), 0.0), p); }, 0.0, top);
}

std::vector<double> weighted_ball_volumes(const ManifoldSpec& space, const Vec& center,
                                          const std::vector<double>& radii, int ray_count) {
  space.require_in_box(center);
  if (radii.empty()) return {};
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw Error(ErrorCode::InvalidArgument, "radii must be positive and increasing");
  if (space.dimension() == 1) return ball_volumes_1d(space, center(0), radii);
  if (ray_count < 16) throw Error(ErrorCode::InvalidArgument, "ray_count must be at least 16");

  const double u_max = radii.back();
  const int steps = std::max(200, static_cast<int>(std::ceil(u_max / 0.0025)));
  ShootOptions opts;
  opts.point_source = true;
  std::vector<double> out(radii.size(), 0.0);
  for (const Direction& d : fan_directions(space, center, ray_count)) {
    const GeodesicProfile prof =
        shoot_segment(space, center, d.v, Mat::Zero(space.dimension() - 1, space.dimension() - 1), u_max, steps, opts);
    if (prof.u.size() < static_cast<std::size_t>(steps) + 1) {
      if (prof.domain_exit) throw Error(ErrorCode::DomainExit, "a ray of the ball fan left the chart");
      throw Error(ErrorCode::CutReached, "a ray of the ball fan reached a conjugate point");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) out[i] += d.weight * interpolate_uniform(prof.u, prof.mass, radii[i]);
  }
  return out;
}

double weighted_ball_volume(const ManifoldSpec& space, const Vec& center, double u, int ray_count) {
  return weighted_ball_volumes(space, center, {u}, ray_count).front();
}

BishopGromovReport bishop_gromov_margin(const ManifoldSpec& space, double q, double r, const Vec& center, double u1,
                                        double u2, int ray_count) {
  const ModelSpace model = ModelSpace::make(space.dimension(), q, r);
  if (!(0.0 < u1 && u1 < u2)) throw Error(ErrorCode::InvalidInterval, "need 0 < u1 < u2");
  if (u2 >= model.cut()) throw Error(ErrorCode::CutReached, "u2 lies beyond the model cut radius");
  const std::vector<double> vols = weighted_ball_volumes(space, center, {u1, u2}, ray_count);
  BishopGromovReport rep;
  rep.total_dim = model.total_dim();
  rep.curvature = model.curvature();
  rep.model_ratio = model.ratio(u1, u2);
  rep.volume_u1 = vols[0];
  rep.volume_u2 = vols[1];
  rep.actual_ratio = vols[1] / vols[0];
  rep.margin = rep.model_ratio - rep.actual_ratio;
  return rep;
}

double geodesic_distance_2d(const ManifoldSpec& space, const Vec& p, const Vec& q) {
  const Mat g = space.metric_at(p);
  Eigen::LLT<Mat> llt(g);
  const Mat b = llt.matrixU().solve(Mat::Identity(2, 2));
  const Mat binv = llt.matrixU();

  std::vector<Vec> targets{q};
  for (int axis = 0; axis < 2; ++axis) {
    if (!space.periodic(axis)) continue;
    const double period = space.domain(axis).length();
    std::vector<Vec> more;
    for (const Vec& t : targets)
      for (int s : {-1, 1}) {
        Vec tt = t;
        tt(axis) += s * period;
        more.push_back(tt);
      }
    targets.insert(targets.end(), more.begin(), more.end());
  }

  double best = -1.0;
  for (const Vec& target : targets) {
    const Vec d = target - p;
    double len = std::sqrt(d.dot(g * d));
    if (len < 1e-12) return 0.0;
    const Vec y = binv * (d / len);
    double theta = std::atan2(y(1), y(0));
    const int steps = std::max(50, static_cast<int>(std::ceil(2.0 * len / 0.02)));
    auto residual = [&](double th, double l) -> std::optional<Vec> {
      Vec w(2);
      w << std::cos(th), std::sin(th);
      auto end = geodesic_endpoint(space, p, b * w, l, steps);
      if (!end) return std::nullopt;
      return Vec(*end - target);
    };
    auto f = residual(theta, len);
    bool ok = false;
    for (int it = 0; it < 40 && f; ++it) {
      if (f->norm() < 1e-10) {
        ok = true;
        break;
      }
      const double h = 1e-6;
      auto ft = residual(theta + h, len), fl = residual(theta, len + h);
      if (!ft || !fl) break;
      Eigen::Matrix2d jac;
      jac.col(0) = (*ft - *f) / h;
      jac.col(1) = (*fl - *f) / h;
      const Eigen::Vector2d rhs(-(*f)(0), -(*f)(1));
      const Eigen::Vector2d step = jac.fullPivLu().solve(rhs);
      if (!step.allFinite()) break;
      double lambda = 1.0;
      std::optional<Vec> next;
      for (int k = 0; k < 12; ++k, lambda *= 0.5) {
        if (len + lambda * step(1) <= 0.0) continue;
        next = residual(theta + lambda * step(0), len + lambda * step(1));
        if (next && next->norm() < f->norm()) break;
        next.reset();
      }
      if (!next) break;
      theta += lambda * step(0);
      len += lambda * step(1);
      f = next;
    }
    if (ok && (best < 0.0 || len < best)) best = len;
  }
  return best;
}

MyersReport myers_diameter_check(const ManifoldSpec& space, double q, double r, std::uint64_t seed, int pair_count) {
  if (std::isinf(q) && q > 0) throw Error(ErrorCode::UnsupportedQ, "the diameter bound needs finite q");
  if (!(q >= 0.0)) throw Error(ErrorCode::InvalidArgument, "q must be >= 0");
  if (!(r > 0.0)) throw Error(ErrorCode::RequiresPositiveR, "Myers' bound needs r > 0");
  if (space.noncompact()) throw Error(ErrorCode::NonCompactDomain, "diameter bound needs a compact space");
  const int n = space.dimension();
  MyersReport rep;
  rep.bound = pi * std::sqrt((n + q - 1.0) / r);
  if (n == 1) {
    const double length = circumference_1d(space);
    rep.diameter_estimate = space.periodic(0) ? 0.5 * length : length;
    rep.exact_1d = true;
  } else if (n == 2) {
    std::mt19937_64 rng(seed);
    const std::vector<Vec> pts = space.random_points(2 * pair_count, rng);
    for (int i = 0; i < pair_count; ++i) {
      const double d = geodesic_distance_2d(space, pts[2 * static_cast<std::size_t>(i)],
                                            pts[2 * static_cast<std::size_t>(i) + 1]);
      if (d < 0.0) continue;
      ++rep.pairs_used;
      rep.diameter_estimate = std::max(rep.diameter_estimate, d);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "diameter estimates are implemented for dimensions 1 and 2");
  }
  rep.holds = rep.diameter_estimate <= rep.bound + rep.tolerance;
  return rep;
}

}  // namespace bet
