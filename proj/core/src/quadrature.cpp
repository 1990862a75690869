#include "bet/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "bet/error.hpp"

namespace bet {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "quadrature order must be positive");
  std::vector<double> x(static_cast<std::size_t>(order)), w(static_cast<std::size_t>(order));
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= order; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = order * (z * p0 - p1) / (z * z - 1.0);
    const std::size_t lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(order - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

std::vector<QuadratureNode> chart_quadrature(const ManifoldSpec& space, int order) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "quadrature order must be at least 2");
  const int n = space.dimension();
  const auto [gx, gw] = gauss_legendre(order);
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const Interval iv = space.sample_interval(a);
    auto& xs = nodes[static_cast<std::size_t>(a)];
    auto& ws = weights[static_cast<std::size_t>(a)];
    for (int k = 0; k < order; ++k) {
      if (space.periodic(a)) {
        xs.push_back(iv.lo + k * iv.length() / order);
        ws.push_back(iv.length() / order);
      } else {
        xs.push_back(iv.lo + 0.5 * (gx[static_cast<std::size_t>(k)] + 1.0) * iv.length());
        ws.push_back(0.5 * gw[static_cast<std::size_t>(k)] * iv.length());
      }
    }
  }
  std::vector<QuadratureNode> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const std::size_t total = static_cast<std::size_t>(std::pow(order, n));
  out.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    QuadratureNode q{Vec(n), 1.0};
    for (int a = 0; a < n; ++a) {
      const auto k = static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
      q.x(a) = nodes[static_cast<std::size_t>(a)][k];
      q.weight *= weights[static_cast<std::size_t>(a)][k];
    }
    out.push_back(std::move(q));
    for (int a = 0; a < n; ++a) {
      if (++idx[static_cast<std::size_t>(a)] < order) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return out;
}

IntegralResult weighted_integral(const ManifoldSpec& space, const std::function<double(const Vec&)>& f, int order) {
  if (space.noncompact())
    throw Error(ErrorCode::NonCompactDomain, "'" + space.name() + "' is a window onto a noncompact manifold");
  IntegralResult r;
  r.boundary_truncated = !space.fully_periodic();
  double sum = 0.0, comp = 0.0;
  for (const auto& q : chart_quadrature(space, order)) {
    const double vol = std::sqrt(space.metric_at(q.x).determinant());
    const double term = q.weight * f(q.x) * space.density_at(q.x) * vol - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  r.value = sum;
  return r;
}

IntegralResult weighted_integral(const ManifoldSpec& space, const Expression& f, int order) {
  if (f.dimension() != space.dimension())
    throw Error(ErrorCode::DimensionMismatch, "integrand dimension differs from the space");
  return weighted_integral(space, [&](const Vec& x) { return f.evaluate(x); }, order);
}

}  // namespace bet
