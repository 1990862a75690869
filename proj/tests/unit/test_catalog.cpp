#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bet/bakry_emery.hpp"
#include "bet/bundles.hpp"
#include "bet/catalog.hpp"
#include "bet/comparison.hpp"
#include "bet/error.hpp"
#include "test_support.hpp"

namespace {

using bet::testing::vec;

// Extreme generalized eigenvalues of a tensor field relative to g over a lattice.
std::pair<double, double> eigen_range(const bet::ManifoldSpec& s, const std::function<bet::Mat(const bet::Vec&)>& t,
                                      int per_axis) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& x : s.lattice(per_axis)) {
    Eigen::GeneralizedSelfAdjointEigenSolver<bet::Mat> es(t(x), s.metric_at(x));
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  return {lo, hi};
}

double param(const bet::CatalogEntry& e, const std::string& name) { return e.document.space.parameters.at(name); }

// Recomputes one reference fact from the generic modules.
std::vector<double> rederive(const bet::CatalogEntry& e, const std::string& fact) {
  if (fact == "ricci_constant") {
    const auto s = e.space();
    const auto [lo, hi] = eigen_range(s, [&](const bet::Vec& x) { return bet::ricci_at(s, x).matrix; }, 9);
    return {lo, hi};
  }
  if (fact == "be_infty_constant" || fact == "be_q_constant") {
    const auto s = e.space();
    const auto q = fact == "be_q_constant" ? bet::QParam::finite(param(e, "q")) : bet::QParam::infinite();
    const auto [lo, hi] = eigen_range(s, [&](const bet::Vec& x) { return bet::be_tensor_at(s, q, x).matrix; }, 9);
    return {lo, hi};
  }
  if (fact == "ball_volume_0.5") return {bet::weighted_ball_volume(e.space(), vec({3.0, 3.0}), 0.5)};
  if (fact == "myers_bound" || fact == "diameter") {
    const bool weighted = e.document.space.parameters.count("q") > 0;
    const double q = weighted ? param(e, "q") : 0.0;
    const double r = weighted ? q : 1.0;
    const auto rep = bet::myers_diameter_check(e.space(), q, r);
    return {fact == "myers_bound" ? rep.bound : rep.diameter_estimate};
  }
  if (fact == "total_ricci_constant") {
    const auto sub = e.submersion();
    const auto total = bet::total_space(sub);
    std::vector<bet::Vec> pts;
    for (const auto& b : sub.base.lattice(9))
      for (const auto& y : bet::fiber_sample_points(sub.fiber)) pts.push_back(bet::lift_point(sub, b, y));
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& p : pts) {
      Eigen::GeneralizedSelfAdjointEigenSolver<bet::Mat> es(bet::ricci_at(total, p).matrix, total.metric_at(p));
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
    return {lo, hi};
  }
  if (fact == "theorem2_margin") {
    const auto sub = e.submersion();
    return {bet::theorem2_margins(sub, sub.fiber.q, 2, sub.base.lattice(21), bet::Theorem2Mode::Q).worst};
  }
  if (fact == "collapse_ratio") {
    const auto sub = e.submersion();
    const auto rep = bet::collapse_residual(sub, vec({1.0}), vec({1.0}), {4, 8, 16});
    return rep.vertical_ratios;
  }
  ADD_FAILURE() << "no re-derivation for fact " << fact;
  return {};
}

TEST(Catalog, ContainsRequiredEntries) {
  std::set<std::string> names;
  for (const auto& e : bet::load_catalog()) names.insert(e.name);
  for (const char* n : {"flat_torus_2", "sphere2", "hyperbolic2", "gauss1", "gauss2", "cosq_interval",
                        "s3_as_submersion", "warp_demo"})
    EXPECT_TRUE(names.count(n)) << n;
}

TEST(Catalog, LookupExamples) {
  const auto g = bet::lookup_catalog("gauss1");
  EXPECT_DOUBLE_EQ(g.reference.at("be_infty_constant").value, 2.0);
  const auto c = bet::lookup_catalog("cosq_interval(2)");
  EXPECT_DOUBLE_EQ(c.reference.at("be_q_constant").value, 2.0);
  EXPECT_NEAR(c.reference.at("myers_bound").value, std::numbers::pi, 1e-15);
  EXPECT_EQ(c.label(), "cosq_interval(q=2)");
  const auto c3 = bet::lookup_catalog("cosq_interval(3)");
  EXPECT_DOUBLE_EQ(c3.reference.at("be_q_constant").value, 3.0);
  EXPECT_DOUBLE_EQ(bet::lookup_catalog("gauss2(4)").reference.at("be_infty_constant").value, 4.0);
  try {
    bet::lookup_catalog("nonexistent");
    FAIL();
  } catch (const bet::Error& e) {
    EXPECT_EQ(e.code(), bet::ErrorCode::NotFound);
  }
  EXPECT_THROW(bet::lookup_catalog("gauss1(1,2)"), bet::Error);
  EXPECT_THROW(bet::lookup_catalog("gauss1(abc)"), bet::Error);
}

TEST(Catalog, EveryEntryBuilds) {
  for (const auto& e : bet::load_catalog()) {
    EXPECT_NO_THROW(e.space()) << e.name;
    if (e.is_submersion()) EXPECT_NO_THROW(bet::total_space(e.submersion())) << e.name;
  }
}

TEST(Catalog, SelfValidating) {
  int checked = 0;
  for (const auto& e : bet::load_catalog()) {
    for (const auto& [fact, ref] : e.reference) {
      for (double v : rederive(e, fact)) {
        EXPECT_NEAR(v, ref.value, ref.tolerance) << e.label() << " " << fact;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(Catalog, ParameterizedFamiliesStayValid) {
  for (int q : {3, 4}) {
    const auto e = bet::lookup_catalog("cosq_interval(" + std::to_string(q) + ")");
    for (double v : rederive(e, "be_q_constant")) EXPECT_NEAR(v, q, 1e-9);
  }
  for (double r : {1.0, 4.0}) {
    char key[32];
    std::snprintf(key, sizeof key, "gauss1(%g)", r);
    const auto e = bet::lookup_catalog(key);
    for (double v : rederive(e, "be_infty_constant")) EXPECT_NEAR(v, r, 1e-10);
  }
}

}  // namespace
