#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "bet/expr.hpp"

namespace bet {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

/// Textual description of a chart, as read from a space file.
struct SpaceDefinition {
  std::string name;
  std::vector<std::string> coordinates;
  std::vector<Interval> domain;
  std::vector<bool> periodic;
  /// Upper triangle by rows: row i holds g_ii .. g_i(n-1). Full square rows are also
  /// accepted; entries below the diagonal are then ignored.
  std::vector<std::vector<std::string>> metric;
  std::string density = "1";
  double margin = 0.02;
  /// The chart is a finite window onto a noncompact manifold (e.g. a Gaussian on R^n).
  bool noncompact = false;
  std::map<std::string, double> parameters;
};

/// A single-chart weighted Riemannian manifold (M, g, phi). Immutable once built; the
/// factories validate positive definiteness, positivity of phi and periodicity.
class ManifoldSpec {
 public:
  static ManifoldSpec build(const SpaceDefinition& def);
  /// `metric_upper` lists g_ij for i <= j in row order.
  static ManifoldSpec from_expressions(std::string name, std::vector<std::string> coordinates,
                                       std::vector<Interval> domain, std::vector<bool> periodic,
                                       std::vector<Expression> metric_upper, Expression density,
                                       double margin, bool noncompact = false);

  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinate_names() const noexcept { return coordinates_; }
  const Interval& domain(int axis) const { return domain_.at(static_cast<std::size_t>(axis)); }
  bool periodic(int axis) const { return periodic_.at(static_cast<std::size_t>(axis)); }
  bool fully_periodic() const noexcept;
  bool noncompact() const noexcept { return noncompact_; }
  double sample_margin() const noexcept { return margin_; }

  const Expression& metric(int i, int j) const;
  const Expression& density() const noexcept { return density_; }

  Mat metric_at(const Vec& x) const;
  double density_at(const Vec& x) const;

  /// The region where public pointwise operations are allowed: the margin-shrunk box on
  /// non-periodic axes, the whole line on periodic ones. `sample_interval` gives the box
  /// used for sampling (one period on periodic axes).
  Interval sample_interval(int axis) const;
  bool in_sample_box(const Vec& x) const;
  /// Throws DomainError when x lies outside the sample box.
  void require_in_box(const Vec& x) const;
  /// Throws DimensionMismatch when x has the wrong length.
  void require_dimension(const Vec& x) const;

  /// k points per axis, cell-centred on periodic axes and end-point inclusive otherwise.
  std::vector<Vec> lattice(int per_axis) const;
  std::vector<Vec> random_points(int count, std::mt19937_64& rng) const;

  /// Re-express a coordinate as text (used to build derived specs).
  SpaceDefinition definition() const;

 private:
  void validate() const;

  std::string name_;
  std::vector<std::string> coordinates_;
  std::vector<Interval> domain_;
  std::vector<bool> periodic_;
  std::vector<Expression> metric_;  // upper triangle
  Expression density_;
  double margin_ = 0.02;
  bool noncompact_ = false;
};

/// Index of g_ij (i <= j) in the packed upper triangle of an n x n matrix.
inline int upper_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

}  // namespace bet
