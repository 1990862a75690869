#include "bet/space.hpp"

#include <cmath>
#include <Eigen/Cholesky>

#include "bet/error.hpp"

namespace bet {

namespace {

constexpr double kPositiveDefinite = 1e-10;
constexpr double kPeriodicTol = 1e-9;
constexpr int kWrapPairs = 16;
constexpr std::size_t kMaxLatticePoints = 40000;

}  // namespace

ManifoldSpec ManifoldSpec::build(const SpaceDefinition& def) {
  const int n = static_cast<int>(def.coordinates.size());
  if (n < 1 || n > kMaxDim)
    throw Error(ErrorCode::DimensionMismatch, "dimension must be between 1 and " + std::to_string(kMaxDim));
  if (static_cast<int>(def.metric.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "metric must have " + std::to_string(n) + " rows");
  std::vector<Expression> upper;
  for (int i = 0; i < n; ++i) {
    const auto& row = def.metric[static_cast<std::size_t>(i)];
    const int len = static_cast<int>(row.size());
    if (len != n - i && len != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "metric row " + std::to_string(i) + " must have " + std::to_string(n - i) + " or " +
                      std::to_string(n) + " entries");
    for (int j = i; j < n; ++j)
      upper.push_back(parse_expression(row[static_cast<std::size_t>(len == n ? j : j - i)], n,
                                       def.coordinates, def.parameters));
  }
  Expression density = parse_expression(def.density, n, def.coordinates, def.parameters);
  return from_expressions(def.name, def.coordinates, def.domain, def.periodic, std::move(upper),
                          std::move(density), def.margin, def.noncompact);
}

ManifoldSpec ManifoldSpec::from_expressions(std::string name, std::vector<std::string> coordinates,
                                            std::vector<Interval> domain, std::vector<bool> periodic,
                                            std::vector<Expression> metric_upper, Expression density,
                                            double margin, bool noncompact) {
  ManifoldSpec s;
  const std::size_t n = coordinates.size();
  if (n < 1 || n > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorCode::DimensionMismatch, "dimension must be between 1 and " + std::to_string(kMaxDim));
  if (domain.size() != n || periodic.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "domain and periodic flags must have one entry per coordinate");
  if (metric_upper.size() != n * (n + 1) / 2)
    throw Error(ErrorCode::DimensionMismatch, "metric must list the upper triangle");
  for (const auto& iv : domain)
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi))
      throw Error(ErrorCode::InvalidInterval, "chart intervals must be finite with lo < hi");
  if (!(margin > 0.0 && margin < 0.5))
    throw Error(ErrorCode::InvalidArgument, "sample margin must lie in (0, 0.5)");
  for (const auto& e : metric_upper)
    if (e.dimension() != static_cast<int>(n))
      throw Error(ErrorCode::DimensionMismatch, "metric expression has wrong dimension");
  if (density.dimension() != static_cast<int>(n))
    throw Error(ErrorCode::DimensionMismatch, "density expression has wrong dimension");
  s.name_ = std::move(name);
  s.coordinates_ = std::move(coordinates);
  s.domain_ = std::move(domain);
  s.periodic_ = std::move(periodic);
  s.metric_ = std::move(metric_upper);
  s.density_ = std::move(density);
  s.margin_ = margin;
  s.noncompact_ = noncompact;
  s.validate();
  return s;
}

bool ManifoldSpec::fully_periodic() const noexcept {
  for (bool p : periodic_)
    if (!p) return false;
  return true;
}

const Expression& ManifoldSpec::metric(int i, int j) const {
  return metric_.at(static_cast<std::size_t>(upper_index(dimension(), i, j)));
}

Mat ManifoldSpec::metric_at(const Vec& x) const {
  const int n = dimension();
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = metric(i, j).evaluate(x);
  return g;
}

double ManifoldSpec::density_at(const Vec& x) const { return density_.evaluate(x); }

Interval ManifoldSpec::sample_interval(int axis) const {
  const Interval& iv = domain(axis);
  if (periodic(axis)) return iv;
  const double m = margin_ * iv.length();
  return {iv.lo + m, iv.hi - m};
}

bool ManifoldSpec::in_sample_box(const Vec& x) const {
  if (x.size() != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    if (periodic(i)) continue;
    const Interval box = sample_interval(i);
    const double slack = 1e-12 * (1.0 + box.length());
    if (!(x(i) >= box.lo - slack && x(i) <= box.hi + slack)) return false;
  }
  return true;
}

void ManifoldSpec::require_dimension(const Vec& x) const {
  if (x.size() != dimension())
    throw Error(ErrorCode::DimensionMismatch, "point has " + std::to_string(x.size()) + " coordinates, space '" +
                                                  name_ + "' has dimension " + std::to_string(dimension()));
}

void ManifoldSpec::require_in_box(const Vec& x) const {
  require_dimension(x);
  if (!in_sample_box(x)) {
    std::string msg = "point (";
    for (int i = 0; i < x.size(); ++i) msg += (i ? ", " : "") + std::to_string(x(i));
    throw Error(ErrorCode::DomainError, msg + ") lies outside the sampled chart of '" + name_ + "'");
  }
}

std::vector<Vec> ManifoldSpec::lattice(int per_axis) const {
  const int n = dimension();
  std::vector<Vec> out;
  if (per_axis < 1) return out;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
  out.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t count = 0; count < total; ++count) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      const Interval iv = sample_interval(i);
      const int k = idx[static_cast<std::size_t>(i)];
      if (periodic(i)) x(i) = iv.lo + (k + 0.5) * iv.length() / per_axis;
      else if (per_axis == 1) x(i) = 0.5 * (iv.lo + iv.hi);
      else x(i) = iv.lo + k * iv.length() / (per_axis - 1);
    }
    out.push_back(x);
    for (int i = 0; i < n; ++i) {
      if (++idx[static_cast<std::size_t>(i)] < per_axis) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

std::vector<Vec> ManifoldSpec::random_points(int count, std::mt19937_64& rng) const {
  const int n = dimension();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int c = 0; c < count; ++c) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      const Interval iv = sample_interval(i);
      x(i) = iv.lo + unit(rng) * iv.length();
    }
    out.push_back(x);
  }
  return out;
}

void ManifoldSpec::validate() const {
  const int n = dimension();
  // 8 points per axis; fewer in high dimension so the check stays cheap.
  int per_axis = 8;
  while (per_axis > 2 && std::pow(per_axis, n) > static_cast<double>(kMaxLatticePoints)) --per_axis;
  for (const Vec& x : lattice(per_axis)) {
    const Mat g = metric_at(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > kPositiveDefinite))
      throw Error(ErrorCode::SingularMetric, "metric of '" + name_ + "' is not positive definite at a lattice point");
    if (!(density_at(x) > 0.0))
      throw Error(ErrorCode::NonpositiveDensity, "density of '" + name_ + "' is not positive at a lattice point");
  }
  // Periodicity: compare values on opposite faces of each periodic axis.
  std::mt19937_64 rng(0x5eed);
  for (int axis = 0; axis < n; ++axis) {
    if (!periodic(axis)) continue;
    const auto base = random_points(kWrapPairs, rng);
    for (const Vec& p : base) {
      Vec a = p, b = p;
      a(axis) = domain(axis).lo;
      b(axis) = domain(axis).hi;
      auto mismatch = [](double u, double v) { return std::fabs(u - v) > kPeriodicTol * std::max(1.0, std::fabs(u)); };
      bool bad = mismatch(density_at(a), density_at(b));
      for (const auto& e : metric_)
        bad = bad || mismatch(e.evaluate(a), e.evaluate(b));
      if (bad)
        throw Error(ErrorCode::InvalidArgument, "metric or density of '" + name_ + "' is not periodic along '" +
                                                    coordinates_[static_cast<std::size_t>(axis)] + "'");
    }
  }
}

SpaceDefinition ManifoldSpec::definition() const {
  SpaceDefinition d;
  d.name = name_;
  d.coordinates = coordinates_;
  d.domain = domain_;
  d.periodic = periodic_;
  const int n = dimension();
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row;
    for (int j = i; j < n; ++j) row.push_back(metric(i, j).print());
    d.metric.push_back(std::move(row));
  }
  d.density = density_.print();
  d.margin = margin_;
  d.noncompact = noncompact_;
  return d;
}

}  // namespace bet
