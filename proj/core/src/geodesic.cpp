#include "bet/geodesic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "bet/error.hpp"

namespace bet {

namespace {

constexpr double kDefectTol = 1e-7;
constexpr double kSpeedTol = 1e-8;

struct State {
  Vec x, t;
  Mat e;       // n x m parallel frame
  Mat p;       // m x m Riccati matrix
  Mat j, jd;   // m x m Jacobi fields and derivatives
  double log_area = 0.0;
  double mass = 0.0;
};

State axpy(const State& s, double h, const State& k) {
  State r;
  r.x = s.x + h * k.x;
  r.t = s.t + h * k.t;
  r.e = s.e + h * k.e;
  r.p = s.p + h * k.p;
  r.j = s.j + h * k.j;
  r.jd = s.jd + h * k.jd;
  r.log_area = s.log_area + h * k.log_area;
  r.mass = s.mass + h * k.mass;
  return r;
}

Vec acceleration(const LocalGeometry& geo, const Vec& t) {
  const int n = geo.dim();
  Vec a = Vec::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(k) -= geo.gamma(k, i, j) * t(i) * t(j);
  return a;
}

// R_ab = g(R(E_a, T) T, E_b)
Mat curvature_operator(const LocalGeometry& geo, const Mat& e, const Vec& t) {
  const int n = geo.dim(), m = static_cast<int>(e.cols());
  Mat w(n, m);
  for (int a = 0; a < m; ++a)
    for (int s = 0; s < n; ++s) {
      double v = 0.0;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) v += geo.riemann(s, b, c, d) * t(b) * e(c, a) * t(d);
      w(s, a) = v;
    }
  return symmetrized(w.transpose() * geo.g() * e);
}

struct Rhs {
  const ManifoldSpec& space;
  bool point_source;

  State operator()(const State& s) const {
    const LocalGeometry geo(space, s.x);
    const int n = geo.dim(), m = static_cast<int>(s.e.cols());
    State d;
    d.x = s.t;
    d.t = acceleration(geo, s.t);
    d.e.resize(n, m);
    for (int a = 0; a < m; ++a) {
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v -= geo.gamma(k, i, j) * s.t(i) * s.e(j, a);
        d.e(k, a) = v;
      }
    }
    const Mat r = curvature_operator(geo, s.e, s.t);
    d.j = s.jd;
    d.jd = -r * s.j;
    const double phi = space.density_at(s.x);
    if (point_source) {
      d.p = Mat::Zero(m, m);
      d.log_area = 0.0;
      d.mass = phi * (m == 0 ? 1.0 : s.j.determinant());
    } else {
      d.p = -s.p * s.p - r;
      d.log_area = s.p.trace();
      d.mass = phi * std::exp(s.log_area);
    }
    return d;
  }
};

State rk4(const Rhs& f, const State& s, double h) {
  const State k1 = f(s);
  const State k2 = f(axpy(s, 0.5 * h, k1));
  const State k3 = f(axpy(s, 0.5 * h, k2));
  const State k4 = f(axpy(s, h, k3));
  State r = s;
  r.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  r.t += h / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t);
  r.e += h / 6.0 * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);
  r.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
  r.j += h / 6.0 * (k1.j + 2.0 * k2.j + 2.0 * k3.j + k4.j);
  r.jd += h / 6.0 * (k1.jd + 2.0 * k2.jd + 2.0 * k3.jd + k4.jd);
  r.log_area += h / 6.0 * (k1.log_area + 2.0 * k2.log_area + 2.0 * k3.log_area + k4.log_area);
  r.mass += h / 6.0 * (k1.mass + 2.0 * k2.mass + 2.0 * k3.mass + k4.mass);
  return r;
}

double min_eigenvalue(const Mat& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

Mat normal_frame(const Mat& g, const Vec& v) {
  const int n = static_cast<int>(g.rows());
  Mat frame(n, std::max(n - 1, 0));
  int found = 0;
  std::vector<Vec> basis{v / std::sqrt(v.dot(g * v))};
  for (int c = 0; c < n && found < n - 1; ++c) {
    Vec w = Vec::Unit(n, c);
    for (const Vec& b : basis) w -= b.dot(g * w) * b;
    for (const Vec& b : basis) w -= b.dot(g * w) * b;  // second pass for stability
    const double norm = std::sqrt(std::max(w.dot(g * w), 0.0));
    if (norm < 1e-8) continue;
    w /= norm;
    basis.push_back(w);
    frame.col(found++) = w;
  }
  return frame;
}

GeodesicProfile shoot_segment(const ManifoldSpec& space, const Vec& t0, const Vec& v, const Mat& base_curvature,
                              double u_max, int steps, const ShootOptions& options) {
  space.require_in_box(t0);
  const int n = space.dimension(), m = n - 1;
  if (v.size() != n) throw Error(ErrorCode::DimensionMismatch, "direction has the wrong dimension");
  if (!(u_max > 0.0) || steps < 1) throw Error(ErrorCode::InvalidArgument, "need u_max > 0 and steps >= 1");
  const Mat g0 = space.metric_at(t0);
  if (std::fabs(std::sqrt(v.dot(g0 * v)) - 1.0) > 1e-8)
    throw Error(ErrorCode::InvalidArgument, "initial direction must be a unit vector");
  if (!options.point_source) {
    if (base_curvature.rows() != m || base_curvature.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "base curvature must be (n-1) x (n-1)");
    if (m > 0 && asymmetry(base_curvature) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "base curvature must be symmetric");
  }
  if (!(options.initial_area > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial area must be positive");

  State s;
  s.x = t0;
  s.t = v;
  s.e = normal_frame(g0, v);
  if (options.point_source) {
    s.p = Mat::Zero(m, m);
    s.j = Mat::Zero(m, m);
    s.jd = Mat::Identity(m, m);
  } else {
    s.p = base_curvature;
    s.j = Mat::Identity(m, m);
    s.jd = base_curvature;
  }
  s.log_area = options.point_source ? 0.0 : std::log(options.initial_area);
  s.mass = 0.0;

  const Rhs rhs{space, options.point_source};
  const double du = u_max / steps;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  GeodesicProfile prof;
  std::vector<Vec> accel;

  auto record = [&](const State& st, double u) {
    const LocalGeometry geo(space, st.x);
    prof.u.push_back(u);
    prof.position.push_back(st.x);
    prof.tangent.push_back(st.t);
    accel.push_back(acceleration(geo, st.t));
    prof.max_speed_error = std::max(prof.max_speed_error, std::fabs(std::sqrt(st.t.dot(geo.g() * st.t)) - 1.0));
    const double det_j = m == 0 ? 1.0 : st.j.determinant();
    const double hj = (m == 0) ? 0.0 : (det_j > 0 ? (st.jd * st.j.inverse()).trace() : nan);
    double log_area;
    double h;
    if (options.point_source) {
      log_area = det_j > 0 ? std::log(det_j * options.initial_area) : -std::numeric_limits<double>::infinity();
      h = hj;
    } else {
      log_area = st.log_area;
      h = st.p.trace();
    }
    const double log_phi = std::log(space.density_at(st.x));
    prof.h.push_back(h);
    prof.h_jacobi.push_back(hj);
    prof.log_area.push_back(log_area);
    prof.log_phi.push_back(log_phi);
    prof.a.push_back(std::exp(log_phi + log_area));
    prof.mass.push_back(st.mass * (options.point_source ? options.initial_area : 1.0));
  };

  record(s, options.origin_offset);
  for (int k = 1; k <= steps; ++k) {
    State next = rk4(rhs, s, du);
    const double u = options.origin_offset + k * du;
    if (!space.in_sample_box(next.x)) {
      prof.domain_exit = true;
      break;
    }
    const bool riccati_blowup = !options.point_source && min_eigenvalue(next.p) < -1.0 / du;
    const bool jacobi_fold = m > 0 && next.j.determinant() <= 0.0;
    if (riccati_blowup || jacobi_fold) {
      prof.cut = u;
      break;
    }
    s = std::move(next);
    record(s, u);
  }

  // Step-size self check: the recorded tangent must differentiate to -Gamma(T, T).
  const std::size_t count = prof.u.size();
  for (std::size_t k = 2; k + 2 < count; ++k) {
    const Vec deriv = (prof.tangent[k - 2] - 8.0 * prof.tangent[k - 1] + 8.0 * prof.tangent[k + 1] -
                       prof.tangent[k + 2]) / (12.0 * du);
    const double scale = 1.0 + accel[k].cwiseAbs().maxCoeff();
    prof.max_geodesic_defect = std::max(prof.max_geodesic_defect, (deriv - accel[k]).cwiseAbs().maxCoeff() / scale);
  }
  if (options.check_defects && (prof.max_geodesic_defect > kDefectTol || prof.max_speed_error > kSpeedTol)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "geodesic defect %.3g, speed error %.3g; use more steps",
                  prof.max_geodesic_defect, prof.max_speed_error);
    throw Error(ErrorCode::StepTooCoarse, buf);
  }
  return prof;
}

std::optional<Vec> geodesic_endpoint(const ManifoldSpec& space, const Vec& x0, const Vec& v0, double length,
                                     int steps) {
  Vec x = x0, t = v0;
  const double h = length / steps;
  auto f = [&](const Vec& xx, const Vec& tt, Vec& dx, Vec& dt) {
    const LocalGeometry geo(space, xx);
    dx = tt;
    dt = acceleration(geo, tt);
  };
  for (int k = 0; k < steps; ++k) {
    Vec k1x, k1t, k2x, k2t, k3x, k3t, k4x, k4t;
    f(x, t, k1x, k1t);
    f(x + 0.5 * h * k1x, t + 0.5 * h * k1t, k2x, k2t);
    f(x + 0.5 * h * k2x, t + 0.5 * h * k2t, k3x, k3t);
    f(x + h * k3x, t + h * k3t, k4x, k4t);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    t += h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
    if (!space.in_sample_box(x)) return std::nullopt;
  }
  return x;
}

}  // namespace bet
