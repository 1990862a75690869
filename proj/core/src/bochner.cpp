#include "bet/bochner.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "bet/error.hpp"
#include "bet/quadrature.hpp"

namespace bet {

namespace {

std::vector<Jet2> form_jets(const ManifoldSpec& space, const OneFormField& omega, const Vec& x) {
  if (static_cast<int>(omega.components.size()) != space.dimension())
    throw Error(ErrorCode::DimensionMismatch, "1-form must have one component per coordinate");
  std::vector<Jet2> w;
  w.reserve(omega.components.size());
  for (const auto& c : omega.components) w.push_back(c.evaluate_jet(x));
  return w;
}

// Full contraction of two covariant 2-tensors with indices raised by g.
double contract(const Mat& ginv, const Mat& a, const Mat& b) { return (ginv * a * ginv).cwiseProduct(b).sum(); }

Mat nabla(const LocalGeometry& geo, const std::vector<Jet2>& w) {
  const int n = geo.dim();
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = w[static_cast<std::size_t>(j)].grad(i);
      for (int k = 0; k < n; ++k) v -= geo.gamma(k, i, j) * w[static_cast<std::size_t>(k)].value();
      a(i, j) = v;
    }
  return a;
}

Jet2 ginv_jet(const LocalGeometry& geo, int i, int j) {
  const int n = geo.dim();
  Jet2 out(n, geo.ginv()(i, j));
  for (int k = 0; k < n; ++k) {
    out.set_grad(k, geo.dginv(k, i, j));
    for (int l = k; l < n; ++l) out.set_hess(k, l, geo.ddginv(k, l, i, j));
  }
  return out;
}

}  // namespace

BochnerTerms bochner_terms_local(const LocalGeometry& geo, const Jet2& phi, const std::vector<Jet2>& w) {
  const int n = geo.dim();
  const Mat& ginv = geo.ginv();
  const auto W = [&](int i) -> const Jet2& { return w[static_cast<std::size_t>(i)]; };
  if (!(phi.value() > 0.0)) throw Error(ErrorCode::NonpositiveDensity, "density is not positive at this point");
  const Jet2 log_phi = log(phi);

  Vec wv(n);
  for (int i = 0; i < n; ++i) wv(i) = W(i).value();
  const Mat a = nabla(geo, w);

  // d_k A_ij
  std::vector<Mat> da(static_cast<std::size_t>(n), Mat(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = W(j).hess(k, i);
        for (int l = 0; l < n; ++l) v -= geo.dgamma(k, l, i, j) * W(l).value() + geo.gamma(l, i, j) * W(l).grad(k);
        da[static_cast<std::size_t>(k)](i, j) = v;
      }

  const double delta = -ginv.cwiseProduct(a).sum();
  Vec d_delta(n);
  for (int k = 0; k < n; ++k) {
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v -= geo.dginv(k, i, j) * a(i, j) + ginv(i, j) * da[static_cast<std::size_t>(k)](i, j);
    d_delta(k) = v;
  }

  // beta = dw and its covariant derivative; (delta beta)_j = -g^{ki} nabla_k beta_ij
  Mat beta(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) beta(i, j) = W(j).grad(i) - W(i).grad(j);
  Vec delta_beta = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double nb = W(j).hess(k, i) - W(i).hess(k, j);
        for (int l = 0; l < n; ++l) nb -= geo.gamma(l, k, i) * beta(l, j) + geo.gamma(l, k, j) * beta(i, l);
        v -= ginv(k, i) * nb;
      }
    delta_beta(j) = v;
  }
  const Vec laplacian = d_delta + delta_beta;

  // X = grad ln phi and the Lie derivative of w along it
  const Vec dlog = log_phi.gradient();
  const Vec x = ginv * dlog;
  Mat dx(n, n);  // dx(k, i) = d_k X^i
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += geo.dginv(k, i, j) * dlog(j) + ginv(i, j) * log_phi.hess(k, j);
      dx(k, i) = v;
    }
  Vec lie_w(n);
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += x(i) * W(j).grad(i) + wv(i) * dx(j, i);
    lie_w(j) = v;
  }
  const Vec weighted_laplacian = laplacian - lie_w;

  BochnerTerms t;
  t.omega_sq = wv.dot(ginv * wv);
  const double drift = wv.dot(x);
  t.codiff = delta - drift;
  t.codiff_sq = t.codiff * t.codiff;
  t.drift_sq = drift * drift;
  t.nabla_sq = contract(ginv, a, a);
  t.d_omega_sq = 0.5 * contract(ginv, beta, beta);
  const Mat lie_g = a + a.transpose();
  t.lie_sq = 0.5 * contract(ginv, lie_g, lie_g);
  const Mat ric_be = symmetrized(geo.ricci_raw()) - geo.hessian(log_phi);
  const Vec w_sharp = ginv * wv;
  t.ric_term = w_sharp.dot(ric_be * w_sharp);
  t.omega_laplacian = w_sharp.dot(weighted_laplacian);

  // f = |w|^2 as a jet, through the jets of g^{ij}
  Jet2 f(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f += ginv_jet(geo, i, j) * W(i) * W(j);
  const Mat hess_f = geo.hessian(f);
  t.lhs_half_laplacian = 0.5 * (-ginv.cwiseProduct(hess_f).sum() - f.gradient().dot(x));
  t.residual = t.lhs_half_laplacian - t.omega_laplacian + t.nabla_sq + t.ric_term;
  return t;
}

double weighted_codifferential_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point) {
  space.require_in_box(point);
  const LocalGeometry geo(space, point);
  const auto w = form_jets(space, omega, point);
  const Jet2 phi = space.density().evaluate_jet(point);
  if (!(phi.value() > 0.0)) throw Error(ErrorCode::NonpositiveDensity, "density is not positive at this point");
  const int n = geo.dim();
  const Mat a = nabla(geo, w);
  Vec wv(n);
  for (int i = 0; i < n; ++i) wv(i) = w[static_cast<std::size_t>(i)].value();
  const Vec x = geo.ginv() * (phi.gradient() / phi.value());
  return -geo.ginv().cwiseProduct(a).sum() - wv.dot(x);
}

BochnerTerms bochner_residual_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point) {
  space.require_in_box(point);
  const LocalGeometry geo(space, point);
  return bochner_terms_local(geo, space.density().evaluate_jet(point), form_jets(space, omega, point));
}

KillingIdentity killing_identity_at(const ManifoldSpec& space, const OneFormField& omega, const Vec& point) {
  space.require_in_box(point);
  const LocalGeometry geo(space, point);
  const auto w = form_jets(space, omega, point);
  const Mat a = nabla(geo, w);
  const Mat& ginv = geo.ginv();
  const Mat d = a - a.transpose();
  const Mat l = a + a.transpose();
  KillingIdentity k;
  k.d_omega_sq = 0.5 * contract(ginv, d, d);
  k.lie_sq = 0.5 * contract(ginv, l, l);
  k.nabla_sq = contract(ginv, a, a);
  k.lhs = k.d_omega_sq + k.lie_sq;
  k.rhs = 2.0 * k.nabla_sq;
  return k;
}

namespace {

struct NodeData {
  Vec x;
  double measure;  // quadrature weight * phi * sqrt det g
  LocalGeometry geo;
  Jet2 phi;
};

std::vector<NodeData> prepare_nodes(const ManifoldSpec& space, int order) {
  if (space.noncompact())
    throw Error(ErrorCode::NonCompactDomain, "'" + space.name() + "' is a window onto a noncompact manifold");
  std::vector<NodeData> out;
  for (const auto& q : chart_quadrature(space, order)) {
    LocalGeometry geo(space, q.x);
    const Jet2 phi = space.density().evaluate_jet(q.x);
    const double m = q.weight * phi.value() * std::sqrt(geo.g().determinant());
    out.push_back({q.x, m, std::move(geo), phi});
  }
  return out;
}

IntegratedBochner integrate_on(const ManifoldSpec& space, const std::vector<NodeData>& nodes, const OneFormField& omega) {
  IntegratedBochner s;
  s.boundary_truncated = !space.fully_periodic();
  for (const auto& nd : nodes) {
    const BochnerTerms t = bochner_terms_local(nd.geo, nd.phi, form_jets(space, omega, nd.x));
    s.omega_sq += nd.measure * t.omega_sq;
    s.codiff_sq += nd.measure * t.codiff_sq;
    s.d_omega_sq += nd.measure * t.d_omega_sq;
    s.nabla_sq += nd.measure * t.nabla_sq;
    s.ric_term += nd.measure * t.ric_term;
    s.lie_sq += nd.measure * t.lie_sq;
    s.omega_laplacian += nd.measure * t.omega_laplacian;
    s.drift_sq += nd.measure * t.drift_sq;
    s.residual += nd.measure * t.residual;
  }
  return s;
}

}  // namespace

IntegratedBochner integrate_bochner(const ManifoldSpec& space, const OneFormField& omega, int order) {
  return integrate_on(space, prepare_nodes(space, order), omega);
}

Definition1Result definition1_margin(const ManifoldSpec& space, QParam q, double r,
                                     const std::vector<OneFormField>& test_forms, int order) {
  if (test_forms.empty()) throw Error(ErrorCode::InvalidArgument, "no test forms");
  const auto nodes = prepare_nodes(space, order);
  Definition1Result res;
  res.worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < test_forms.size(); ++k) {
    const IntegratedBochner s = integrate_on(space, nodes, test_forms[k]);
    const double m = s.d_omega_sq + s.codiff_sq - s.nabla_sq - q.reciprocal() * s.drift_sq - r * s.omega_sq;
    res.margins.push_back(m);
    if (m < res.worst) {
      res.worst = m;
      res.worst_index = static_cast<int>(k);
    }
  }
  return res;
}

std::vector<OneFormField> trig_test_forms(const ManifoldSpec& space, int count, std::uint64_t seed) {
  const int n = space.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::uniform_int_distribution<int> degree(0, 3);
  std::uniform_int_distribution<int> parity(0, 1);
  constexpr int kTerms = 3;

  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  // affine phase for each axis: periodic axes use 2 pi (x - lo)/L, others pi t
  std::vector<std::string> phase(static_cast<std::size_t>(n));
  std::string bump = "1";
  for (int a = 0; a < n; ++a) {
    const Interval iv = space.sample_interval(a);
    const std::string& name = space.coordinate_names()[static_cast<std::size_t>(a)];
    const double scale = (space.periodic(a) ? 2.0 : 1.0) * std::numbers::pi / iv.length();
    phase[static_cast<std::size_t>(a)] = "(" + num(scale) + " * (" + name + " - " + num(iv.lo) + "))";
    if (!space.periodic(a)) bump += " * sin(" + phase[static_cast<std::size_t>(a)] + ")^4";
  }

  std::vector<OneFormField> out;
  for (int f = 0; f < count; ++f) {
    std::vector<std::string> comps;
    for (int i = 0; i < n; ++i) {
      std::string c = "0";
      for (int t = 0; t < kTerms; ++t) {
        std::string term = num(coeff(rng));
        for (int a = 0; a < n; ++a) {
          const int k = degree(rng);
          if (k == 0) continue;
          term += std::string(" * ") + (parity(rng) ? "sin(" : "cos(") + num(k) + " * " +
                  phase[static_cast<std::size_t>(a)] + ")";
        }
        c += " + " + term;
      }
      comps.push_back("(" + c + ") * " + bump);
    }
    out.push_back(make_oneform(space, comps));
  }
  return out;
}

}  // namespace bet
