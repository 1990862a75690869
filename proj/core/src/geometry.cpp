#include "bet/geometry.hpp"

#include <cmath>
#include <Eigen/Cholesky>

#include "bet/error.hpp"

namespace bet {

LocalGeometry::LocalGeometry(const ManifoldSpec& space, const Vec& x) : n_(space.dimension()), x_(x) {
  space.require_dimension(x);
  const int n = n_;
  const std::size_t n3 = static_cast<std::size_t>(n * n * n), n4 = n3 * static_cast<std::size_t>(n);
  dg_.assign(n3, 0.0);
  ddg_.assign(n4, 0.0);
  dginv_.assign(n3, 0.0);
  ddginv_.assign(n4, 0.0);
  gamma_.assign(n3, 0.0);
  dgamma_.assign(n4, 0.0);
  g_.resize(n, n);

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Jet2 e = space.metric(i, j).evaluate_jet(x);
      g_(i, j) = g_(j, i) = e.value();
      for (int k = 0; k < n; ++k) {
        dg_[idx3(k, i, j)] = dg_[idx3(k, j, i)] = e.grad(k);
        for (int l = 0; l < n; ++l) ddg_[idx4(k, l, i, j)] = ddg_[idx4(k, l, j, i)] = e.hess(k, l);
      }
    }

  Eigen::LLT<Mat> llt(g_);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularMetric, "metric of '" + space.name() + "' is not invertible here");
  ginv_ = llt.solve(Mat::Identity(n, n));
  ginv_ = symmetrized(ginv_);

  std::vector<Mat> dgk(static_cast<std::size_t>(n), Mat(n, n)), dginvk(static_cast<std::size_t>(n), Mat(n, n));
  for (int k = 0; k < n; ++k) {
    Mat& d = dgk[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = dg(k, i, j);
    dginvk[static_cast<std::size_t>(k)] = -ginv_ * d * ginv_;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dginv_[idx3(k, i, j)] = dginvk[static_cast<std::size_t>(k)](i, j);
  }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      Mat dd(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dd(i, j) = ddg(k, l, i, j);
      const Mat r = -(dginvk[static_cast<std::size_t>(l)] * dgk[static_cast<std::size_t>(k)] * ginv_ +
                      ginv_ * dd * ginv_ + ginv_ * dgk[static_cast<std::size_t>(k)] * dginvk[static_cast<std::size_t>(l)]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ddginv_[idx4(k, l, i, j)] = 0.5 * (r(i, j) + r(j, i));
    }

  // Christoffel symbols of the first kind and their derivatives, then raise.
  std::vector<double> first(n3), dfirst(n4);  // first[l][i][j], dfirst[m][l][i][j]
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        first[idx3(l, i, j)] = 0.5 * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
        for (int m = 0; m < n; ++m)
          dfirst[idx4(m, l, i, j)] = 0.5 * (ddg(m, i, l, j) + ddg(m, j, l, i) - ddg(m, l, i, j));
      }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv_(k, l) * first[idx3(l, i, j)];
        gamma_[idx3(k, i, j)] = gamma_[idx3(k, j, i)] = s;
        for (int m = 0; m < n; ++m) {
          double ds = 0.0;
          for (int l = 0; l < n; ++l)
            ds += dginv(m, k, l) * first[idx3(l, i, j)] + ginv_(k, l) * dfirst[idx4(m, l, i, j)];
          dgamma_[idx4(m, k, i, j)] = dgamma_[idx4(m, k, j, i)] = ds;
        }
      }
}

double LocalGeometry::riemann(int a, int b, int c, int d) const {
  double r = dgamma(c, a, d, b) - dgamma(d, a, c, b);
  for (int e = 0; e < n_; ++e) r += gamma(a, c, e) * gamma(e, d, b) - gamma(a, d, e) * gamma(e, c, b);
  return r;
}

Mat LocalGeometry::ricci_raw() const {
  const int n = n_;
  Mat ric = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double r = 0.0;
      for (int k = 0; k < n; ++k) {
        r += dgamma(k, k, i, j) - dgamma(i, k, k, j);
        for (int l = 0; l < n; ++l) r += gamma(k, k, l) * gamma(l, i, j) - gamma(k, i, l) * gamma(l, k, j);
      }
      ric(i, j) = r;
    }
  return ric;
}

double LocalGeometry::curvature_xyyz(const Vec& x, const Vec& y, const Vec& z) const {
  const int n = n_;
  Vec w = Vec::Zero(n);  // R(X,Y)Y
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int b = 0; b < n; ++b) {
      if (y(b) == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        if (x(c) == 0.0) continue;
        for (int d = 0; d < n; ++d) s += riemann(a, b, c, d) * y(b) * x(c) * y(d);
      }
    }
    w(a) = s;
  }
  return w.dot(g_ * z);
}

Mat LocalGeometry::hessian(const Jet2& f) const {
  const int n = n_;
  Mat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = f.hess(i, j);
      for (int k = 0; k < n; ++k) v -= gamma(k, i, j) * f.grad(k);
      h(i, j) = h(j, i) = v;
    }
  return h;
}

ChristoffelData christoffel_at(const ManifoldSpec& space, const Vec& point) {
  space.require_in_box(point);
  const LocalGeometry geo(space, point);
  const int n = geo.dim();
  ChristoffelData out;
  out.dim = n;
  out.gamma.resize(static_cast<std::size_t>(n * n * n));
  out.dgamma.resize(static_cast<std::size_t>(n * n * n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.gamma[static_cast<std::size_t>((k * n + i) * n + j)] = geo.gamma(k, i, j);
        for (int l = 0; l < n; ++l)
          out.dgamma[static_cast<std::size_t>(((l * n + k) * n + i) * n + j)] = geo.dgamma(l, k, i, j);
      }
  return out;
}

SymBilinear ricci_at(const ManifoldSpec& space, const Vec& point) {
  space.require_in_box(point);
  const LocalGeometry geo(space, point);
  const Mat raw = geo.ricci_raw();
  return {point, symmetrized(raw), asymmetry(raw)};
}

SymBilinear hessian_scalar_at(const ManifoldSpec& space, const Expression& f, const Vec& point) {
  space.require_in_box(point);
  if (f.dimension() != space.dimension())
    throw Error(ErrorCode::DimensionMismatch, "scalar field dimension differs from the space");
  const LocalGeometry geo(space, point);
  return {point, geo.hessian(f.evaluate_jet(point)), 0.0};
}

Mat covariant_derivative_oneform_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point) {
  space.require_in_box(point);
  const int n = space.dimension();
  if (static_cast<int>(omega.components.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "1-form must have one component per coordinate");
  const LocalGeometry geo(space, point);
  std::vector<Jet2> w;
  for (const auto& c : omega.components) w.push_back(c.evaluate_jet(point));
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = w[static_cast<std::size_t>(j)].grad(i);
      for (int k = 0; k < n; ++k) v -= geo.gamma(k, i, j) * w[static_cast<std::size_t>(k)].value();
      a(i, j) = v;
    }
  return a;
}

OneFormField make_oneform(const ManifoldSpec& space, const std::vector<std::string>& components) {
  if (static_cast<int>(components.size()) != space.dimension())
    throw Error(ErrorCode::DimensionMismatch, "1-form must have one component per coordinate");
  OneFormField w;
  for (const auto& c : components)
    w.components.push_back(parse_expression(c, space.dimension(), space.coordinate_names()));
  return w;
}

}  // namespace bet
