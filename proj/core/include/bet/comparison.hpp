#pragma once

#include <cstdint>
#include <vector>

#include "bet/space.hpp"

namespace bet {

/// The (n+q)-dimensional space form with Ricci curvature r: sectional curvature
/// k = r / (N - 1). Real N is allowed.
class ModelSpace {
 public:
  /// q = +inf is rejected with UnsupportedQ; q = 0 is the unweighted case.
  static ModelSpace make(int n, double q, double r);
  static ModelSpace from_curvature(double total_dim, double k);

  double total_dim() const noexcept { return n_; }
  double curvature() const noexcept { return k_; }
  /// First zero of sn_k (infinite unless k > 0).
  double cut() const noexcept;
  double sn(double t) const;
  /// Integral of sn_k^(N-1) over [0, min(u, cut)].
  double volume(double u) const;
  double ratio(double u1, double u2) const { return volume(u2) / volume(u1); }

 private:
  double n_ = 1.0;
  double k_ = 0.0;
};

/// Mass of the metric ball B_u(center) under phi dvol. For n = 1 the ball is an interval
/// found by arclength; for n = 2, 3 a point-centred fan of shot segments is integrated.
double weighted_ball_volume(const ManifoldSpec& space, const Vec& center, double u, int ray_count = 64);
/// Several radii from a single fan.
std::vector<double> weighted_ball_volumes(const ManifoldSpec& space, const Vec& center,
                                          const std::vector<double>& radii, int ray_count = 64);

struct BishopGromovReport {
  double total_dim = 0;
  double curvature = 0;
  double model_ratio = 0;
  double actual_ratio = 0;
  double volume_u1 = 0;
  double volume_u2 = 0;
  double margin = 0;  // model_ratio - actual_ratio
};

BishopGromovReport bishop_gromov_margin(const ManifoldSpec& space, double q, double r, const Vec& center, double u1,
                                        double u2, int ray_count = 64);

struct MyersReport {
  double diameter_estimate = 0;
  double bound = 0;
  double tolerance = 1e-3;
  bool holds = false;
  int pairs_used = 0;
  bool exact_1d = false;
};

/// Sampled diameter estimate against pi sqrt((n + q - 1) / r). One- and two-dimensional
/// spaces only.
MyersReport myers_diameter_check(const ManifoldSpec& space, double q, double r, std::uint64_t seed = 42,
                                 int pair_count = 24);

/// Length of the shortest geodesic found between two points of a 2-D chart (shooting
/// over periodic images). Returns a negative value if no shot converged.
double geodesic_distance_2d(const ManifoldSpec& space, const Vec& p, const Vec& q);

}  // namespace bet
