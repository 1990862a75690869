#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bet/geodesic.hpp"

namespace bet {

/// Integral of exp(-(r/2) x^2 + c x) over [u1, u2].
double vhat(double r, double c, double u1, double u2);

/// Comparison profile exp(-(r/2) u^2 + c u).
double ahat(double r, double c, double u);

/// The weighted transverse density of one segment as data: ln a on an increasing grid,
/// plus the arclength of a cut point if one was detected. Values between grid points
/// are obtained by local cubic interpolation of ln a.
class SampledProfile {
 public:
  SampledProfile() = default;
  SampledProfile(std::vector<double> u, std::vector<double> log_a, std::optional<double> cut = std::nullopt);

  static SampledProfile from_values(const std::vector<double>& u, const std::vector<double>& a,
                                    std::optional<double> cut = std::nullopt);
  static SampledProfile from_geodesic(const GeodesicProfile& prof);

  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& log_a() const { return log_a_; }
  std::optional<double> cut() const { return cut_; }
  std::size_t size() const { return u_.size(); }
  double start() const { return u_.front(); }
  double end() const { return u_.back(); }
  /// Length of the segment: the cut if there is one, else the last grid point.
  double length() const { return cut_ ? *cut_ : end(); }

  double a_at(double u) const;
  /// v(u1, u2) = integral of a over [u1, u2]; both ends must lie inside the grid.
  double integral(double u1, double u2) const;
  std::size_t points_in(double u1, double u2) const;

 private:
  double interpolate(double u, bool log_space) const;

  std::vector<double> u_, log_a_;
  std::optional<double> cut_;
};

struct Window {
  double u1 = 0, u2 = 0, u3 = 0, u4 = 0;
};

/// Worst value of -(ln(a / ahat))'' over interior grid points (three-point differences).
/// Non-negative certifies concavity of ln(a / ahat) on the grid.
double log_concavity_margin(const SampledProfile& profile, double r, double c);
double log_concavity_margin(const GeodesicProfile& profile, double r, double c);

struct LemmaReport {
  bool lemma2_holds = true;
  bool lemma3_holds = true;
  bool hypothesis_failed = false;
  double ratio12 = 0;  // v(u1,u2) / vhat(u1,u2)
  double ratio23 = 0;
  double ratio34 = 0;  // on (u3, min(u4, cut))
  double point_ratio3 = 0;  // a(u3) / ahat(u3)
};

LemmaReport lemma_predicates(const SampledProfile& profile, double r, double c, const Window& w);

struct TubeSpec {
  std::vector<SampledProfile> segments;
  std::vector<double> weights;
  double r = 0;
  double c = 0;
  Window window;
};

struct SubtubeReport {
  std::vector<std::size_t> selected;
  std::vector<double> segment_ratios;  // v_s(u2,u3) / v_s(u1,u2)
  double vol12 = 0, vol23 = 0, vol34 = 0;
  double tube_ratio = 0;     // vol23 / vol12
  double vhat_ratio = 0;     // vhat(u2,u3) / vhat(u1,u2)
  double vhat_ratio_34 = 0;  // vhat(u3,u4) / vhat(u2,u3)
  double mass_bound_lhs = 0, mass_bound_rhs = 0;
  bool mass_bound_holds = false;
  double window_bound_lhs = 0, window_bound_rhs = 0;
  bool window_bound_holds = false;
  bool window_bound_vacuous = false;
  /// Selection takes whole segments, so a segment meeting the subtube lies in it.
  bool conclusion2_structural = true;
  /// Pairwise disjointness of the segments is assumed, never checked.
  bool disjointness_verified = false;
};

/// Relative tolerance used for ties in the selection and for the conclusion checks.
inline constexpr double kTubeTieTolerance = 1e-9;

SubtubeReport subtube_select(const TubeSpec& tube);

struct ProbeResult {
  double c0 = 0;
  double r0 = 0;
  double c0_coarse = 0;  // before Richardson extrapolation
  double r0_coarse = 0;
};

/// Shoots from m in directions v and -v off a totally geodesic slice and recovers the
/// first two derivatives of ln(phi * area) at 0.
ProbeResult converse_probe(const ManifoldSpec& space, const Vec& m, const Vec& v, double u_probe = 0.01,
                           int steps = 40);

}  // namespace bet
