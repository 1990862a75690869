#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bet/catalog.hpp"
#include "bet/comparison.hpp"
#include "bet/error.hpp"
#include "test_support.hpp"

namespace {

using bet::ModelSpace;
using bet::testing::vec;
constexpr double kPi = std::numbers::pi;

bet::ManifoldSpec space(const std::string& key) { return bet::lookup_catalog(key).space(); }

bet::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const bet::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return bet::ErrorCode::NotFound;
}

TEST(Model, CurvatureAndDimension) {
  const auto m = ModelSpace::make(1, 2, 2);
  EXPECT_EQ(m.total_dim(), 3.0);
  EXPECT_EQ(m.curvature(), 1.0);
  EXPECT_NEAR(m.cut(), kPi, 1e-15);
  EXPECT_EQ(code_of([] { ModelSpace::make(1, INFINITY, 2); }), bet::ErrorCode::UnsupportedQ);
}

TEST(Model, ClosedFormVolumes) {
  // N = 3, k = 1: integral of sin^2 = (u - sin u cos u) / 2
  const auto m = ModelSpace::make(1, 2, 2);
  for (double u : {0.3, 1.0, 2.0}) EXPECT_NEAR(m.volume(u), (u - std::sin(u) * std::cos(u)) / 2, 1e-13);
  // N = 2, k = 0: u^2 / 2
  EXPECT_NEAR(ModelSpace::make(2, 0, 0).volume(0.7), 0.245, 1e-14);
  // N = 3, k = -1: integral of sinh^2 = (sinh u cosh u - u) / 2
  const auto h = ModelSpace::from_curvature(3, -1);
  EXPECT_NEAR(h.volume(1.5), (std::sinh(1.5) * std::cosh(1.5) - 1.5) / 2, 1e-12);
}

TEST(Model, MonotoneWithEuclideanSmallBallLimit) {
  for (double k : {-1.0, 0.0, 1.0})
    for (double N : {2.0, 3.0, 4.5}) {
      const auto m = ModelSpace::from_curvature(N, k);
      double prev = 0;
      for (int j = 1; j <= 50; ++j) {
        const double u = 0.05 * j;
        const double v = m.volume(u);
        EXPECT_GT(v, prev);
        prev = v;
      }
      const double u = 1e-4;
      EXPECT_NEAR(m.volume(u) / std::pow(u, N), 1.0 / N, 1e-8);
    }
}

TEST(Model, RatioIncreasesWithClaimedBound) {
  double prev = INFINITY;
  for (double r : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    const double ratio = ModelSpace::make(1, 2, r).ratio(0.5, 1.0);
    EXPECT_LE(ratio, prev + 1e-10);
    prev = ratio;
  }
}

TEST(BallVolume, CosqInterval) {
  const auto s = space("cosq_interval(2)");
  EXPECT_NEAR(bet::weighted_ball_volume(s, vec({0.0}), 1.0), 1 + std::sin(1.0) * std::cos(1.0), 1e-9);
  EXPECT_NEAR(bet::weighted_ball_volume(s, vec({0.0}), 0.5), 0.5 + std::sin(0.5) * std::cos(0.5), 1e-9);
}

TEST(BallVolume, FlatTorusDisc) {
  const auto s = space("flat_torus_2");
  for (double u : {0.3, 0.5, 1.0}) EXPECT_NEAR(bet::weighted_ball_volume(s, vec({3.0, 3.0}), u), kPi * u * u, 1e-4);
}

TEST(BallVolume, SphereCap) {
  const auto s = space("sphere2");
  for (double u : {0.4, 0.9}) {
    EXPECT_NEAR(bet::weighted_ball_volume(s, vec({kPi / 2, 1.0}), u), 2 * kPi * (1 - std::cos(u)), 1e-4);
  }
}

TEST(BallVolume, GaussianDisc) {
  // integral over |x| < u of exp(-|x|^2) = pi (1 - exp(-u^2))
  const auto s = space("gauss2");
  EXPECT_NEAR(bet::weighted_ball_volume(s, vec({0.0, 0.0}), 1.0), kPi * (1 - std::exp(-1.0)), 1e-4);
}

TEST(BallVolume, PeriodicCircleCut) {
  bet::SpaceDefinition d;
  d.name = "circle";
  d.coordinates = {"x"};
  d.domain = {{0, 2 * kPi}};
  d.periodic = {true};
  d.metric = {{"1"}};
  const auto s = bet::ManifoldSpec::build(d);
  EXPECT_NEAR(bet::weighted_ball_volume(s, vec({1.0}), 1.0), 2.0, 1e-10);
  EXPECT_EQ(code_of([&] { bet::weighted_ball_volume(s, vec({1.0}), 3.5); }), bet::ErrorCode::CutReached);
  EXPECT_EQ(code_of([&] { bet::weighted_ball_volume(space("gauss1"), vec({2.5}), 1.0); }), bet::ErrorCode::DomainExit);
}

TEST(BishopGromov, CosqClosedForm) {
  const auto rep = bet::bishop_gromov_margin(space("cosq_interval(2)"), 2, 2, vec({0.0}), 0.5, 1.0);
  const double model = (1 - std::sin(1.0) * std::cos(1.0)) / (0.5 - std::sin(0.5) * std::cos(0.5));
  const double actual = (1 + std::sin(1.0) * std::cos(1.0)) / (0.5 + std::sin(0.5) * std::cos(0.5));
  EXPECT_NEAR(rep.model_ratio, model, 1e-9);
  EXPECT_NEAR(rep.actual_ratio, actual, 1e-9);
  EXPECT_NEAR(rep.model_ratio, 6.880, 1e-3);
  EXPECT_NEAR(rep.actual_ratio, 1.580, 1e-3);
  EXPECT_NEAR(rep.margin, model - actual, 1e-9);
}

TEST(BishopGromov, FlatEqualityCase) {
  const auto rep = bet::bishop_gromov_margin(space("flat_torus_2"), 0, 0, vec({2.0, 2.0}), 0.4, 0.9);
  EXPECT_NEAR(rep.margin, 0.0, 1e-4);
}

TEST(BishopGromov, GaussianInfiniteQRejected) {
  EXPECT_EQ(code_of([] { bet::bishop_gromov_margin(space("gauss1"), INFINITY, 2, vec({0.0}), 0.5, 1.0); }),
            bet::ErrorCode::UnsupportedQ);
}

TEST(BishopGromov, CertifiedCatalog) {
  for (int q : {2, 3, 4}) {
    const auto s = space("cosq_interval(" + std::to_string(q) + ")");
    for (const auto& [u1, u2] : std::vector<std::pair<double, double>>{{0.2, 0.6}, {0.5, 1.2}, {1.0, 1.5}})
      EXPECT_GE(bet::bishop_gromov_margin(s, q, q, vec({0.0}), u1, u2).margin, -1e-4) << q;
    EXPECT_GE(bet::bishop_gromov_margin(s, q, q, vec({0.4}), 0.3, 0.9).margin, -1e-4) << q;
  }
  const auto sphere = space("sphere2");
  EXPECT_GE(bet::bishop_gromov_margin(sphere, 0, 1, vec({kPi / 2, 0.5}), 0.4, 1.2).margin, -1e-4);
  const auto base = bet::pushforward_space(bet::lookup_catalog("s3_as_submersion").submersion());
  EXPECT_GE(bet::bishop_gromov_margin(base, 2, 2, vec({kPi / 2}), 0.3, 1.0).margin, -1e-4);
}

TEST(Myers, CosqIntervalIsSharp) {
  for (int q : {2, 3}) {
    const auto rep = bet::myers_diameter_check(space("cosq_interval(" + std::to_string(q) + ")"), q, q);
    EXPECT_NEAR(rep.bound, kPi, 1e-12);
    EXPECT_NEAR(rep.diameter_estimate, rep.bound, 1e-3);
    EXPECT_TRUE(rep.holds);
    EXPECT_TRUE(rep.exact_1d);
  }
}

TEST(Myers, Errors) {
  EXPECT_EQ(code_of([] { bet::myers_diameter_check(space("flat_torus_2"), 0, 0); }),
            bet::ErrorCode::RequiresPositiveR);
  EXPECT_EQ(code_of([] { bet::myers_diameter_check(space("gauss2"), 2, 1); }), bet::ErrorCode::NonCompactDomain);
  EXPECT_EQ(code_of([] { bet::myers_diameter_check(space("cosq_interval"), INFINITY, 1); }),
            bet::ErrorCode::UnsupportedQ);
}

TEST(Distance, SphereGreatCircle) {
  const auto s = space("sphere2");
  const double d = bet::geodesic_distance_2d(s, vec({kPi / 2, 0.0}), vec({kPi / 2, 1.0}));
  EXPECT_NEAR(d, 1.0, 1e-6);
  const double e = bet::geodesic_distance_2d(s, vec({1.0, 0.3}), vec({2.0, 0.3}));
  EXPECT_NEAR(e, 1.0, 1e-6);
}

TEST(Distance, FlatTorusUsesShortestImage) {
  const auto s = space("flat_torus_2");
  const double d = bet::geodesic_distance_2d(s, vec({0.2, 0.2}), vec({6.0, 0.2}));
  EXPECT_NEAR(d, 2 * kPi - 5.8, 1e-6);
}

}  // namespace
