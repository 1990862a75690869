#pragma once

#include <optional>
#include <vector>

#include "bet/geometry.hpp"

namespace bet {

struct ShootOptions {
  /// Arclength assigned to the starting point (e.g. when a point-centred fan is started
  /// a small distance away from its centre).
  double origin_offset = 0.0;
  /// area_s at the starting point.
  double initial_area = 1.0;
  /// Start from a point rather than a hypersurface: Jacobi fields J(0) = 0, J'(0) = I,
  /// area = det J. The Riccati matrix is then not integrated.
  bool point_source = false;
  /// Run the step-size self checks and throw StepTooCoarse when they fail.
  bool check_defects = true;
};

/// A shot segment sampled on a uniform arclength grid. All vectors share one length;
/// they stop at a detected cut or where the geodesic left the sample box.
struct GeodesicProfile {
  std::vector<double> u;
  std::vector<Vec> position;
  std::vector<Vec> tangent;
  std::vector<double> h;          // trace of the level-set second fundamental form (Riccati)
  std::vector<double> h_jacobi;   // d/du ln det J from the Jacobi system
  std::vector<double> log_area;
  std::vector<double> log_phi;
  std::vector<double> a;          // phi * area
  std::vector<double> mass;       // integral of a from the start
  std::optional<double> cut;      // arclength of a detected conjugate point
  bool domain_exit = false;
  double max_geodesic_defect = 0.0;  // relative to 1 + |Gamma(T, T)|
  double max_speed_error = 0.0;

  double log_a(std::size_t k) const { return log_phi[k] + log_area[k]; }
};

/// Integrates the geodesic with parallel frame, the matrix Riccati equation
/// Pi' = -Pi^2 - R(., T)T and the Jacobi system J'' = -R J, using classical RK4 with
/// `steps` steps of size u_max / steps. `v` must be g-unit; `base_curvature` is Pi(0) in
/// the frame obtained by Gram-Schmidt from the coordinate vectors orthogonal to v.
GeodesicProfile shoot_segment(const ManifoldSpec& space, const Vec& t0, const Vec& v, const Mat& base_curvature,
                              double u_max, int steps, const ShootOptions& options = {});

/// The orthonormal frame of v-perp used for base_curvature (columns).
Mat normal_frame(const Mat& g, const Vec& v);

/// Plain geodesic endpoint, no curvature data. Returns nullopt if the curve leaves the
/// sample box.
std::optional<Vec> geodesic_endpoint(const ManifoldSpec& space, const Vec& x0, const Vec& v0, double length,
                                     int steps);

}  // namespace bet
