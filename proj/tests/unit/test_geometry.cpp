#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bet/catalog.hpp"
#include "bet/error.hpp"
#include "bet/geometry.hpp"
#include "bet/quadrature.hpp"
#include "test_support.hpp"

namespace {

using bet::testing::vec;
constexpr double kPi = std::numbers::pi;

bet::ManifoldSpec space(const std::string& key) { return bet::lookup_catalog(key).space(); }

bet::ManifoldSpec make(std::vector<std::string> coords, std::vector<bet::Interval> dom, std::vector<bool> per,
                       std::vector<std::vector<std::string>> metric, std::string density, double margin = 0.02) {
  bet::SpaceDefinition d;
  d.name = "test";
  d.coordinates = std::move(coords);
  d.domain = std::move(dom);
  d.periodic = std::move(per);
  d.metric = std::move(metric);
  d.density = std::move(density);
  d.margin = margin;
  return bet::ManifoldSpec::build(d);
}

// Christoffel symbols from central differences of the metric, an oracle independent
// of the jet machinery.
double fd_christoffel(const bet::ManifoldSpec& s, const bet::Vec& x, int k, int i, int j) {
  const int n = s.dimension();
  const double h = 1e-5;
  auto dg = [&](int l, int a, int b) {
    bet::Vec p = x, m = x;
    p(l) += h;
    m(l) -= h;
    return (s.metric_at(p)(a, b) - s.metric_at(m)(a, b)) / (2 * h);
  };
  const bet::Mat ginv = s.metric_at(x).inverse();
  double out = 0;
  for (int l = 0; l < n; ++l) out += 0.5 * ginv(k, l) * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
  return out;
}

TEST(Christoffel, SphereClosedForm) {
  const auto s = space("sphere2");
  const auto x = vec({kPi / 3, 0.5});
  const auto c = bet::christoffel_at(s, x);
  EXPECT_NEAR(c.at(0, 1, 1), -std::sqrt(3.0) / 4, 1e-14);
  EXPECT_NEAR(c.at(1, 0, 1), 1.0 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(c.at(1, 1, 0), 1.0 / std::sqrt(3.0), 1e-14);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(c.at(k, i, j), fd_christoffel(s, x, k, i, j), 1e-9);
  // d_th Gamma^th_phph = -cos(2 th)
  EXPECT_NEAR(c.derivative(0, 0, 1, 1), -std::cos(2 * kPi / 3), 1e-13);
}

TEST(Christoffel, FlatSpacesVanish) {
  for (const auto& x : {vec({0.3, 1.7}), vec({5.0, 0.1})}) {
    const auto c = bet::christoffel_at(space("flat_torus_2"), x);
    for (double v : c.gamma) EXPECT_EQ(v, 0.0);
    for (double v : c.dgamma) EXPECT_EQ(v, 0.0);
  }
  const auto c = bet::christoffel_at(space("gauss1"), vec({0.3}));
  EXPECT_EQ(c.at(0, 0, 0), 0.0);
}

TEST(Christoffel, RandomMetricAgainstDifferences) {
  const auto s = space("lumpy_torus");
  std::mt19937_64 rng(3);
  for (const auto& x : s.random_points(10, rng)) {
    const auto c = bet::christoffel_at(s, x);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          EXPECT_NEAR(c.at(k, i, j), fd_christoffel(s, x, k, i, j), 1e-8);
          EXPECT_EQ(c.at(k, i, j), c.at(k, j, i));
        }
  }
}

TEST(Ricci, Sphere) {
  const auto r = bet::ricci_at(space("sphere2"), vec({kPi / 3, 0.5}));
  EXPECT_NEAR(r.matrix(0, 0), 1.0, 1e-13);
  EXPECT_NEAR(r.matrix(1, 1), 0.75, 1e-13);
  EXPECT_NEAR(r.matrix(0, 1), 0.0, 1e-13);
}

TEST(Ricci, FlatTorusIsExactlyZero) {
  const auto r = bet::ricci_at(space("flat_torus_2"), vec({1.0, 2.0}));
  EXPECT_EQ(r.matrix.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ricci, HyperbolicHalfPlane) {
  const auto r = bet::ricci_at(space("hyperbolic2"), vec({0.0, 2.0}));
  EXPECT_NEAR(r.matrix(0, 0), -0.25, 1e-13);
  EXPECT_NEAR(r.matrix(1, 1), -0.25, 1e-13);
  EXPECT_NEAR(r.matrix(0, 1), 0.0, 1e-13);
}

TEST(Ricci, ConstantCoefficientMetricIsFlat) {
  const auto s = make({"x", "y", "z"}, {{0, 1}, {0, 1}, {0, 1}}, {false, false, false},
                      {{"2", "0.3", "0.1"}, {"1.5", "-0.2"}, {"3"}}, "1");
  const auto r = bet::ricci_at(s, vec({0.5, 0.5, 0.5}));
  EXPECT_EQ(r.matrix.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ricci, ThreeSphereWarpedChart) {
  // db^2 + sin^2 b (dt^2 + sin^2 t dp^2): Ric = 2 g
  const auto s = make({"b", "t", "p"}, {{0, kPi}, {0, kPi}, {0, 2 * kPi}}, {false, false, true},
                      {{"1", "0", "0"}, {"sin(b)^2", "0"}, {"sin(b)^2*sin(t)^2"}}, "1");
  const auto x = vec({1.1, 0.7, 2.0});
  const auto r = bet::ricci_at(s, x);
  const auto g = s.metric_at(x);
  EXPECT_LT((r.matrix - 2.0 * g).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ricci, SymmetricAtRandomPoints) {
  for (const char* key : {"lumpy_torus", "sphere2", "hyperbolic2", "weighted_torus"}) {
    const auto s = space(key);
    std::mt19937_64 rng(11);
    for (const auto& x : s.random_points(20, rng)) {
      const auto r = bet::ricci_at(s, x);
      EXPECT_LE(r.asymmetry, 1e-12) << key;
      EXPECT_LE((r.matrix - r.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Hessian, GaussianLogDensity) {
  const auto s = space("gauss1");
  const auto f = bet::parse_expression("-x^2", 1, {"x"});
  EXPECT_NEAR(bet::hessian_scalar_at(s, f, vec({0.7})).matrix(0, 0), -2.0, 1e-15);
}

TEST(Hessian, ConstantIsZero) {
  const auto s = space("lumpy_torus");
  const auto f = bet::parse_expression("3.5", 2, {"x", "y"});
  EXPECT_EQ(bet::hessian_scalar_at(s, f, vec({0.4, 1.9})).matrix.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hessian, FirstSphericalHarmonic) {
  const auto s = space("sphere2");
  const auto f = bet::parse_expression("cos(th)", 2, {"th", "ph"});
  const auto H = bet::hessian_scalar_at(s, f, vec({kPi / 3, 0.5})).matrix;
  EXPECT_NEAR(H(0, 0), -0.5, 1e-14);
  EXPECT_NEAR(H(1, 1), -0.375, 1e-14);
  EXPECT_NEAR(H(0, 1), 0.0, 1e-14);
}

TEST(CovariantDerivative, FlatTorusSine) {
  const auto s = space("flat_torus_2");
  const auto w = bet::make_oneform(s, {"sin(x)", "0"});
  const auto D = bet::covariant_derivative_oneform_at(s, w, vec({0.8, 2.0}));
  EXPECT_NEAR(D(0, 0), std::cos(0.8), 1e-15);
  EXPECT_EQ(D(0, 1), 0.0);
  EXPECT_EQ(D(1, 0), 0.0);
  EXPECT_EQ(D(1, 1), 0.0);
}

TEST(CovariantDerivative, ZeroForm) {
  const auto s = space("lumpy_torus");
  const auto w = bet::make_oneform(s, {"0", "0"});
  EXPECT_EQ(bet::covariant_derivative_oneform_at(s, w, vec({1.0, 1.0})).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CovariantDerivative, SphereExactFormMatchesHessian) {
  const auto s = space("sphere2");
  const auto w = bet::make_oneform(s, {"-sin(th)", "0"});
  const auto f = bet::parse_expression("cos(th)", 2, {"th", "ph"});
  const auto x = vec({kPi / 3, 0.5});
  const auto D = bet::covariant_derivative_oneform_at(s, w, x);
  const auto H = bet::hessian_scalar_at(s, f, x).matrix;
  EXPECT_LE((D - H).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CovariantDerivative, NablaDfEqualsHessAtRandomTriples) {
  const std::vector<std::string> keys = {"lumpy_torus", "sphere2", "hyperbolic2", "weighted_torus", "gauss2"};
  std::mt19937_64 rng(50);
  int count = 0;
  for (int t = 0; t < 50; ++t) {
    const auto s = space(keys[static_cast<std::size_t>(t) % keys.size()]);
    const int n = s.dimension();
    const auto x = s.random_points(1, rng).front();
    // f = sin(c x0) x1^2 with df written out by hand.
    const std::string a = "sin(" + std::to_string(0.3 + 0.1 * t) + "*" + s.coordinate_names()[0] + ")";
    std::string fx = a;
    std::vector<std::string> comps(static_cast<std::size_t>(n), "0");
    comps[0] = std::to_string(0.3 + 0.1 * t) + "*cos(" + std::to_string(0.3 + 0.1 * t) + "*" +
               s.coordinate_names()[0] + ")";
    if (n > 1) {
      fx += "*" + s.coordinate_names()[1] + "^2";
      comps[0] += "*" + s.coordinate_names()[1] + "^2";
      comps[1] = "2*" + s.coordinate_names()[1] + "*" + a;
    }
    const auto fe = bet::parse_expression(fx, n, s.coordinate_names());
    const auto D = bet::covariant_derivative_oneform_at(s, bet::make_oneform(s, comps), x);
    const auto H = bet::hessian_scalar_at(s, fe, x).matrix;
    EXPECT_LE((D - H).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + H.cwiseAbs().maxCoeff())) << fx;
    ++count;
  }
  EXPECT_EQ(count, 50);
}

TEST(Quadrature, FlatTorusVolume) {
  const auto s = space("flat_torus_2");
  const auto one = bet::parse_expression("1", 2, {"x", "y"});
  EXPECT_NEAR(bet::weighted_integral(s, one, 16).value, 4 * kPi * kPi, 1e-10);
}

TEST(Quadrature, SineSquaredConvergesByOrder64) {
  const auto s = space("flat_torus_2");
  const auto f = bet::parse_expression("sin(x)^2", 2, {"x", "y"});
  const auto r = bet::weighted_integral(s, f, 64);
  EXPECT_NEAR(r.value, 2 * kPi * kPi, 1e-10);
  EXPECT_FALSE(r.boundary_truncated);
}

TEST(Quadrature, CosSquaredInterval) {
  const auto s = make({"x"}, {{-kPi / 2, kPi / 2}}, {false}, {{"1"}}, "cos(x)^2", 1e-4);
  const auto one = bet::parse_expression("1", 1, {"x"});
  const auto r = bet::weighted_integral(s, one, 64);
  EXPECT_NEAR(r.value, kPi / 2, 1e-9);
  EXPECT_TRUE(r.boundary_truncated);
}

TEST(Quadrature, GaussLegendreNodesIntegratePolynomials) {
  for (int order : {2, 5, 8, 16, 32}) {
    const auto [x, w] = bet::gauss_legendre(order);
    for (int p = 0; p < 2 * order; ++p) {
      double sum = 0;
      for (std::size_t k = 0; k < x.size(); ++k) sum += w[k] * std::pow(x[k], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << order << " " << p;
    }
  }
}

TEST(Space, RejectsBadInput) {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const bet::Error& e) {
      return e.code();
    }
    return bet::ErrorCode::NotFound;
  };
  EXPECT_EQ(code_of([] { make({"x"}, {{0, 1}}, {false}, {{"-1"}}, "1"); }), bet::ErrorCode::SingularMetric);
  EXPECT_EQ(code_of([] { make({"x"}, {{0, 1}}, {false}, {{"1"}}, "-1"); }), bet::ErrorCode::NonpositiveDensity);
  EXPECT_EQ(code_of([] { make({"x"}, {{0, 1}}, {true}, {{"1"}}, "2 + sin(x)"); }),
            bet::ErrorCode::InvalidArgument);
  const auto s = space("sphere2");
  EXPECT_EQ(code_of([&] { bet::ricci_at(s, vec({0.001, 1.0})); }), bet::ErrorCode::DomainError);
  EXPECT_EQ(code_of([&] { bet::ricci_at(s, vec({1.0})); }), bet::ErrorCode::DimensionMismatch);
}

TEST(Space, LatticeRespectsMargin) {
  const auto s = space("sphere2");
  for (const auto& x : s.lattice(8)) EXPECT_TRUE(s.in_sample_box(x));
  EXPECT_EQ(s.lattice(8).size(), 64u);
}

}  // namespace
