#include "bet/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bet/error.hpp"
#include "bet/quadrature.hpp"

namespace bet {

double ahat(double r, double c, double u) { return std::exp(-0.5 * r * u * u + c * u); }

double vhat(double r, double c, double u1, double u2) {
  if (!std::isfinite(u1) || !std::isfinite(u2) || !(u1 < u2))
    throw Error(ErrorCode::InvalidInterval, "vhat needs finite u1 < u2");
  if (!std::isfinite(r) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "r and c must be finite");
  auto f = [r, c](double x) { return ahat(r, c, x); };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, u1, u2, 15, 1e-13, &err);
  return value;
}

SampledProfile::SampledProfile(std::vector<double> u, std::vector<double> log_a, std::optional<double> cut)
    : u_(std::move(u)), log_a_(std::move(log_a)), cut_(cut) {
  if (u_.size() != log_a_.size()) throw Error(ErrorCode::DimensionMismatch, "profile columns differ in length");
  if (u_.size() < 2) throw Error(ErrorCode::ProfileTooShort, "a profile needs at least two points");
  for (std::size_t k = 1; k < u_.size(); ++k)
    if (!(u_[k] > u_[k - 1])) throw Error(ErrorCode::InvalidArgument, "profile grid must be strictly increasing");
  for (double v : log_a_)
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::DomainError, "profile density must be finite and non-negative");
}

SampledProfile SampledProfile::from_values(const std::vector<double>& u, const std::vector<double>& a,
                                           std::optional<double> cut) {
  std::vector<double> la(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] >= 0.0) || !std::isfinite(a[k]))
      throw Error(ErrorCode::DomainError, "profile density must be finite and non-negative");
    la[k] = std::log(a[k]);
  }
  return SampledProfile(u, std::move(la), cut);
}

SampledProfile SampledProfile::from_geodesic(const GeodesicProfile& prof) {
  std::vector<double> la(prof.u.size());
  for (std::size_t k = 0; k < la.size(); ++k) la[k] = prof.log_a(k);
  return SampledProfile(prof.u, std::move(la), prof.cut);
}

double SampledProfile::interpolate(double u, bool log_space) const {
  const std::size_t n = u_.size();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(u_.begin(), u_.end(), u) - u_.begin());
  k = std::clamp<std::size_t>(k, 1, n - 1) - 1;  // u in [u_k, u_{k+1}]
  const std::size_t width = std::min<std::size_t>(4, n);
  std::size_t lo = k > 0 ? k - 1 : 0;
  if (lo + width > n) lo = n - width;
  double sum = 0.0;
  for (std::size_t i = lo; i < lo + width; ++i) {
    double w = 1.0;
    for (std::size_t j = lo; j < lo + width; ++j)
      if (j != i) w *= (u - u_[j]) / (u_[i] - u_[j]);
    sum += w * (log_space ? log_a_[i] : std::exp(log_a_[i]));
  }
  return sum;
}

double SampledProfile::a_at(double u) const {
  const std::size_t n = u_.size();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(u_.begin(), u_.end(), u) - u_.begin());
  k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
  const std::size_t lo = k > 0 ? k - 1 : 0, hi = std::min(n - 1, k + 2);
  bool finite = true;
  for (std::size_t i = lo; i <= hi; ++i) finite = finite && std::isfinite(log_a_[i]);
  // Near a zero of a (a point-centred fan at its centre) ln a is singular, so interpolate a.
  return finite ? std::exp(interpolate(u, true)) : std::max(interpolate(u, false), 0.0);
}

double SampledProfile::integral(double u1, double u2) const {
  const double slack = 1e-12 * std::max(1.0, std::fabs(end()));
  if (u1 < start() - slack || u2 > end() + slack)
    throw Error(ErrorCode::ProfileTooShort, "profile does not cover the requested interval");
  if (!(u1 <= u2)) throw Error(ErrorCode::InvalidInterval, "integral needs u1 <= u2");
  u1 = std::max(u1, start());
  u2 = std::min(u2, end());
  static const auto gl = gauss_legendre(8);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < u_.size(); ++k) {
    const double a = std::max(u_[k], u1), b = std::min(u_[k + 1], u2);
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < gl.first.size(); ++i) sum += half * gl.second[i] * a_at(mid + half * gl.first[i]);
  }
  return sum;
}

std::size_t SampledProfile::points_in(double u1, double u2) const {
  return static_cast<std::size_t>(std::count_if(u_.begin(), u_.end(), [&](double u) { return u >= u1 && u <= u2; }));
}

double log_concavity_margin(const SampledProfile& profile, double r, double c) {
  std::vector<double> u, f;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double la = profile.log_a()[k];
    if (!std::isfinite(la)) continue;
    u.push_back(profile.u()[k]);
    f.push_back(la - std::log(ahat(r, c, profile.u()[k])));
  }
  if (u.size() < 3) throw Error(ErrorCode::ProfileTooShort, "log-concavity needs three grid points with a > 0");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < u.size(); ++k) {
    const double h1 = u[k] - u[k - 1], h2 = u[k + 1] - u[k];
    const double second = 2.0 * ((f[k + 1] - f[k]) / h2 - (f[k] - f[k - 1]) / h1) / (h1 + h2);
    worst = std::min(worst, -second);
  }
  return worst;
}

double log_concavity_margin(const GeodesicProfile& profile, double r, double c) {
  if (profile.u.size() < 3) throw Error(ErrorCode::ProfileTooShort, "profile has fewer than three points");
  return log_concavity_margin(SampledProfile::from_geodesic(profile), r, c);
}

namespace {

constexpr std::size_t kMinWindowPoints = 64;

bool leq(double lhs, double rhs) { return lhs <= rhs + kTubeTieTolerance * std::max(1.0, std::fabs(rhs)); }

void check_window(const Window& w) {
  if (!(0.0 <= w.u1 && w.u1 < w.u2 && w.u2 < w.u3 && w.u3 < w.u4) || !std::isfinite(w.u4))
    throw Error(ErrorCode::InvalidInterval, "window must satisfy 0 <= u1 < u2 < u3 < u4");
}

// Upper end of the (u3, u4) window for one segment: stops at a cut.
double upper_end(const SampledProfile& p, double u4) {
  if (p.cut() && *p.cut() < u4) return std::min(*p.cut(), p.end());
  if (p.end() < u4) throw Error(ErrorCode::ProfileTooShort, "profile ends before u4 without a cut");
  return u4;
}

}  // namespace

LemmaReport lemma_predicates(const SampledProfile& profile, double r, double c, const Window& w) {
  check_window(w);
  const double top = upper_end(profile, w.u4);
  if (!(top > w.u3)) throw Error(ErrorCode::ProfileTooShort, "segment ends before u3");
  if (profile.points_in(w.u1, w.u2) < kMinWindowPoints || profile.points_in(w.u2, w.u3) < kMinWindowPoints ||
      profile.points_in(w.u3, top) < kMinWindowPoints)
    throw Error(ErrorCode::ProfileTooShort, "each window needs at least 64 grid points");
  LemmaReport rep;
  rep.ratio12 = profile.integral(w.u1, w.u2) / vhat(r, c, w.u1, w.u2);
  rep.ratio23 = profile.integral(w.u2, w.u3) / vhat(r, c, w.u2, w.u3);
  rep.ratio34 = profile.integral(w.u3, top) / vhat(r, c, w.u3, top);
  rep.point_ratio3 = profile.a_at(w.u3) / ahat(r, c, w.u3);
  if (!leq(rep.ratio23, rep.ratio12)) {
    rep.hypothesis_failed = true;
    return rep;
  }
  rep.lemma2_holds = leq(rep.point_ratio3, rep.ratio23);
  rep.lemma3_holds = leq(rep.ratio34, rep.ratio23);
  return rep;
}

SubtubeReport subtube_select(const TubeSpec& tube) {
  const Window& w = tube.window;
  check_window(w);
  if (tube.segments.empty()) throw Error(ErrorCode::InvalidArgument, "a tube needs at least one segment");
  if (tube.weights.size() != tube.segments.size())
    throw Error(ErrorCode::DimensionMismatch, "one weight per segment is required");
  for (double mu : tube.weights)
    if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");

  const std::size_t count = tube.segments.size();
  std::vector<double> v12(count), v23(count), v34(count);
  SubtubeReport rep;
  for (std::size_t s = 0; s < count; ++s) {
    const SampledProfile& p = tube.segments[s];
    if (p.length() < w.u3) throw Error(ErrorCode::InvalidArgument, "every segment must have length at least u3");
    if (p.start() > w.u1) throw Error(ErrorCode::ProfileTooShort, "profile starts after u1");
    v12[s] = p.integral(w.u1, w.u2);
    v23[s] = p.integral(w.u2, w.u3);
    const double top = upper_end(p, w.u4);
    v34[s] = top > w.u3 ? p.integral(w.u3, top) : 0.0;
    rep.vol12 += tube.weights[s] * v12[s];
    rep.vol23 += tube.weights[s] * v23[s];
    rep.vol34 += tube.weights[s] * v34[s];
  }
  if (!(rep.vol23 > 0.0)) throw Error(ErrorCode::EmptyAnnulus, "the annulus A(u2, u3) has zero mass");
  if (!(rep.vol12 > 0.0)) throw Error(ErrorCode::EmptyAnnulus, "the annulus A(u1, u2) has zero mass");

  const double r = tube.r, c = tube.c;
  const double vh12 = vhat(r, c, w.u1, w.u2), vh23 = vhat(r, c, w.u2, w.u3), vh34 = vhat(r, c, w.u3, w.u4);
  rep.vhat_ratio = vh23 / vh12;
  rep.vhat_ratio_34 = vh34 / vh23;
  rep.tube_ratio = rep.vol23 / rep.vol12;
  if (!leq(rep.tube_ratio, rep.vhat_ratio)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "annulus mass ratio %.10g exceeds comparison ratio %.10g", rep.tube_ratio,
                  rep.vhat_ratio);
    throw Error(ErrorCode::HypothesisNotMet, buf);
  }

  double sel12 = 0.0, sel23 = 0.0, sel34 = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const double ratio = v12[s] > 0.0 ? v23[s] / v12[s] : std::numeric_limits<double>::infinity();
    rep.segment_ratios.push_back(ratio);
    // Strict inequality; ratios within the tie tolerance count as equal and stay out.
    if (ratio < rep.vhat_ratio * (1.0 - kTubeTieTolerance)) {
      rep.selected.push_back(s);
      sel12 += tube.weights[s] * v12[s];
      sel23 += tube.weights[s] * v23[s];
      sel34 += tube.weights[s] * v34[s];
    }
  }

  rep.mass_bound_lhs = sel12 / rep.vol12;
  rep.mass_bound_rhs = 1.0 - rep.tube_ratio / rep.vhat_ratio;
  rep.mass_bound_holds = rep.mass_bound_lhs >= rep.mass_bound_rhs - kTubeTieTolerance;

  rep.window_bound_rhs = rep.vhat_ratio_34;
  if (rep.selected.empty() || !(sel23 > 0.0)) {
    rep.window_bound_vacuous = true;
    rep.window_bound_holds = true;
  } else {
    rep.window_bound_lhs = sel34 / sel23;
    rep.window_bound_holds = leq(rep.window_bound_lhs, rep.window_bound_rhs);
  }
  return rep;
}

ProbeResult converse_probe(const ManifoldSpec& space, const Vec& m, const Vec& v, double u_probe, int steps) {
  if (!(u_probe > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe length must be positive");
  if (steps < 2 || steps % 2 != 0) throw Error(ErrorCode::InvalidArgument, "probe needs an even step count");
  const int n = space.dimension();
  const Mat zero = Mat::Zero(n - 1, n - 1);
  // The backward shot off a totally geodesic slice continues ln(phi * area) to u < 0.
  const GeodesicProfile fwd = shoot_segment(space, m, v, zero, u_probe, steps);
  const GeodesicProfile bwd = shoot_segment(space, m, -v, zero, u_probe, steps);
  const auto full = static_cast<std::size_t>(steps) + 1;
  if (fwd.u.size() < full || bwd.u.size() < full)
    throw Error(ErrorCode::DomainExit, "probe segment left the chart or hit a cut");

  const double f0 = fwd.log_a(0);
  auto first = [&](std::size_t k, double h) { return (fwd.log_a(k) - bwd.log_a(k)) / (2.0 * h); };
  auto second = [&](std::size_t k, double h) { return (fwd.log_a(k) - 2.0 * f0 + bwd.log_a(k)) / (h * h); };
  const auto kh = static_cast<std::size_t>(steps), kh2 = kh / 2;
  const double h = u_probe, h2 = 0.5 * u_probe;

  ProbeResult res;
  res.c0_coarse = first(kh, h);
  res.r0_coarse = -second(kh, h);
  res.c0 = (4.0 * first(kh2, h2) - first(kh, h)) / 3.0;
  res.r0 = -(4.0 * second(kh2, h2) - second(kh, h)) / 3.0;
  return res;
}

}  // namespace bet
