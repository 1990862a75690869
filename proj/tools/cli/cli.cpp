#include "cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bet/bakry_emery.hpp"
#include "bet/bochner.hpp"
#include "bet/bundles.hpp"
#include "bet/catalog.hpp"
#include "bet/comparison.hpp"
#include "bet/error.hpp"
#include "bet/geodesic.hpp"
#include "bet/space_io.hpp"
#include "bet/tubes.hpp"

namespace bet::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- serialization -------------------------------------------------------------

std::string number_text(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        dump(it.value(), indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && e.is_primitive();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], indent + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += number_text(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

// ---- report ----------------------------------------------------------------------

struct Report {
  Json inputs = Json::object();
  Json results = Json::object();
  Json checks = Json::array();
  Json provenance = Json::object();
  Json notes = Json::array();
  bool failed = false;

  // Records a check of the form value <relation> limit.
  void check(const std::string& name, double value, const std::string& relation, double limit) {
    bool ok = false;
    if (relation == "<=") ok = value <= limit;
    else if (relation == ">=") ok = value >= limit;
    Json c;
    c["name"] = name;
    c["value"] = value;
    c["relation"] = relation;
    c["limit"] = limit;
    c["passed"] = ok;
    checks.push_back(c);
    failed = failed || !ok;
  }
  void check_flag(const std::string& name, bool ok) {
    Json c;
    c["name"] = name;
    c["passed"] = ok;
    checks.push_back(c);
    failed = failed || !ok;
  }
};

// ---- option parsing helpers ------------------------------------------------------

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (item.find_first_not_of(" \t") == std::string::npos || *end != '\0' || !std::isfinite(v))
      throw UsageError("bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

Vec parse_point(const std::string& text, int dim, const std::string& what) {
  const auto vals = parse_list(text, what);
  if (static_cast<int>(vals.size()) != dim)
    throw Error(ErrorCode::DimensionMismatch,
                what + " needs " + std::to_string(dim) + " coordinates, got " + std::to_string(vals.size()));
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = vals[static_cast<std::size_t>(i)];
  return v;
}

// Like parse_q, but also accepts 0 (the unweighted case) and returns +inf for inf.
double parse_q_number(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (!text.empty() && *end == '\0' && v == 0.0) return 0.0;
  try {
    const QParam q = QParam::parse(text);
    return q.is_infinite() ? std::numeric_limits<double>::infinity() : q.value();
  } catch (const Error&) {
    throw UsageError("bad --q value '" + text + "'");
  }
}

QParam parse_q(const std::string& text) {
  try {
    return QParam::parse(text);
  } catch (const Error&) {
    throw UsageError("bad --q value '" + text + "' (positive number or inf)");
  }
}

struct LoadedSpace {
  SpaceDocument doc;
  std::string source;
};

LoadedSpace load_space(const std::string& where) {
  if (where.empty()) throw UsageError("--space is required");
  const std::string prefix = "catalog:";
  if (where.rfind(prefix, 0) == 0) return {lookup_catalog(where.substr(prefix.size())).document, where};
  return {parse_space_document(read_text_file(where)), where};
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::string& source) {
  if (flag) {
    source = "--seed";
    return *flag;
  }
  if (const char* env = std::getenv("BET_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*env == '\0' || *end != '\0') throw UsageError("BET_SEED must be a non-negative integer");
    source = "BET_SEED";
    return v;
  }
  source = "default";
  return 42;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SingularMetric:
    case ErrorCode::NonpositiveDensity:
    case ErrorCode::UnsupportedFiber:
    case ErrorCode::NotFound:
    case ErrorCode::InvalidInterval:
    case ErrorCode::ProfileTooShort:
      return kSchema;
    case ErrorCode::HypothesisNotMet:
    case ErrorCode::HypothesisFailed:
    case ErrorCode::EmptyAnnulus:
    case ErrorCode::ModeMismatch:
    case ErrorCode::UnsupportedQ:
    case ErrorCode::RequiresPositiveR:
    case ErrorCode::NonCompactDomain:
      return kHypothesisNotMet;
    case ErrorCode::InvalidArgument:
      return kUsage;
    default:
      return kCheckFailed;
  }
}

struct Options {
  std::string space, file, profiles, point, dir, center, window, q = "inf", mode = "infty", emit_dir;
  std::optional<double> r, c, i_scale, u_max;
  double u1 = 0, u2 = 0, u_probe = 0.01;
  int grid = 8, forms = 4, order = 32, samples = 8, rays = 64, pairs = 24, segments = 5, steps = 40;
  std::optional<std::uint64_t> seed;
  std::string catalog_name;
};

double require(const std::optional<double>& v, const std::string& flag) {
  if (!v) throw UsageError(flag + " is required");
  return *v;
}

// ---- commands --------------------------------------------------------------------

void cmd_tensor(const Options& o, Report& rep, std::uint64_t) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const Vec x = parse_point(o.point, space.dimension(), "--point");
  const QParam q = parse_q(o.q);
  rep.inputs["space"] = ls.source;
  rep.inputs["point"] = vec_json(x);
  rep.inputs["q"] = q.str();
  const BeForms f = be_forms_at(space, q, x);
  rep.results["ricci"] = mat_json(f.ricci);
  rep.results["hess_log_phi"] = mat_json(f.hess_log_phi);
  rep.results["dlog_phi"] = vec_json(f.dlog_phi);
  rep.results["ric_be"] = mat_json(f.form_log);
  Json forms;
  forms["log"] = mat_json(f.form_log);
  forms["phi"] = mat_json(f.form_phi);
  if (!q.is_infinite()) forms["root"] = mat_json(f.form_root);
  rep.results["forms"] = forms;
  rep.results["spread"] = f.spread;
  rep.check("three_form_spread", f.spread, "<=", kFormTolerance);
  rep.provenance["ric_be"] = "Ric - Hess ln phi - (1/q) d ln phi (x) d ln phi, from second-order jets";
}

void cmd_bound(const Options& o, Report& rep, std::uint64_t seed) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const QParam q = parse_q(o.q);
  const double r = require(o.r, "--r");
  if (o.grid < 1) throw UsageError("--grid must be positive");
  std::vector<Vec> samples = space.lattice(o.grid);
  std::mt19937_64 rng(seed);
  for (const Vec& p : space.random_points(64, rng)) samples.push_back(p);
  rep.inputs["space"] = ls.source;
  rep.inputs["q"] = q.str();
  rep.inputs["r"] = r;
  rep.inputs["grid"] = o.grid;
  const BoundReport b = lower_bound_margin(space, q, r, samples);
  rep.results["r_star"] = b.r_star;
  rep.results["worst_point"] = vec_json(b.worst_point);
  rep.results["worst_margin"] = b.worst_margin;
  rep.results["sample_count"] = b.sample_count;
  rep.check("bound_margin", b.worst_margin, ">=", -1e-8);
  rep.provenance["samples"] = "lattice of grid^n points plus 64 seeded uniform points";
}

void cmd_bochner(const Options& o, Report& rep, std::uint64_t seed) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const QParam q = parse_q(o.q);
  if (o.forms < 1) throw UsageError("--forms must be positive");
  rep.inputs["space"] = ls.source;
  rep.inputs["forms"] = o.forms;
  rep.inputs["q"] = q.str();
  rep.inputs["order"] = o.order;
  if (o.r) rep.inputs["r"] = *o.r;
  const auto forms = trig_test_forms(space, o.forms, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto points = space.random_points(o.samples, rng);
  const bool compact = !space.noncompact();
  double worst_pointwise = 0.0, worst_adjoint = 0.0, worst_integrated = 0.0;
  Json per_form = Json::array();
  for (std::size_t k = 0; k < forms.size(); ++k) {
    Json fj;
    double pw = 0.0;
    for (const Vec& x : points) pw = std::max(pw, std::fabs(bochner_residual_at(space, forms[k], x).residual));
    fj["pointwise_residual"] = pw;
    worst_pointwise = std::max(worst_pointwise, pw);
    if (compact) {
      const IntegratedBochner ib = integrate_bochner(space, forms[k], o.order);
      const double adj = std::fabs(ib.omega_laplacian - ib.d_omega_sq - ib.codiff_sq);
      fj["omega_laplacian"] = ib.omega_laplacian;
      fj["d_omega_sq"] = ib.d_omega_sq;
      fj["codiff_sq"] = ib.codiff_sq;
      fj["adjointness_residual"] = adj;
      fj["integrated_residual"] = ib.residual;
      worst_adjoint = std::max(worst_adjoint, adj);
      worst_integrated = std::max(worst_integrated, std::fabs(ib.residual));
    }
    per_form.push_back(fj);
  }
  rep.results["forms"] = per_form;
  rep.check("pointwise_residual", worst_pointwise, "<=", 1e-8);
  if (compact) {
    rep.check("adjointness_residual", worst_adjoint, "<=", 1e-6);
    rep.check("integrated_residual", worst_integrated, "<=", 1e-6);
    if (o.r) {
      const Definition1Result d = definition1_margin(space, q, *o.r, forms, o.order);
      rep.results["definition1_worst"] = d.worst;
      rep.results["definition1_margins"] = d.margins;
      rep.check("definition1_margin", d.worst, ">=", -1e-6);
    }
  } else {
    rep.notes.push_back("noncompact chart: integrated identities skipped");
  }
  rep.provenance["test_forms"] = "seeded trigonometric polynomials of degree <= 3 per axis";
}

void cmd_warp_check(const Options& o, Report& rep, std::uint64_t seed) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const double qd = parse_q_number(o.q);
  if (!(qd >= 2.0) || qd != std::floor(qd) || !std::isfinite(qd))
    throw UsageError("warp-check needs an integer --q >= 2 (fiber S^q)");
  const int q = static_cast<int>(qd);
  const double i = o.i_scale.value_or(1.0);
  rep.inputs["space"] = ls.source;
  rep.inputs["q"] = q;
  rep.inputs["i"] = i;
  std::mt19937_64 rng(seed);
  const auto base = space.random_points(o.samples, rng);
  const auto fiber_pts = fiber_sample_points(Fiber{FiberKind::Sphere, q});
  double h = 0, m = 0, v = 0, i_dep = 0;
  const int n = space.dimension();
  for (const Vec& b : base)
    for (const Vec& y : fiber_pts) {
      Vec x(n + q);
      x << b, y;
      const WarpedResidual w = warped_ricci_residual(space, space.density(), q, i, x);
      const WarpedResidual w2 = warped_ricci_residual(space, space.density(), q, 2.0 * i, x);
      h = std::max(h, w.horizontal);
      m = std::max(m, w.mixed);
      v = std::max(v, w.vertical);
      i_dep = std::max(i_dep, (w.ricci.topLeftCorner(n, n) - w2.ricci.topLeftCorner(n, n)).cwiseAbs().maxCoeff());
    }
  rep.results["horizontal_residual"] = h;
  rep.results["mixed_residual"] = m;
  rep.results["vertical_residual"] = v;
  rep.results["horizontal_i_dependence"] = i_dep;
  rep.results["sample_count"] = static_cast<int>(base.size() * fiber_pts.size());
  rep.check("horizontal_residual", h, "<=", 1e-7);
  rep.check("mixed_residual", m, "<=", 1e-7);
  rep.check("vertical_residual", v, "<=", 1e-7);
  rep.check("horizontal_i_dependence", i_dep, "<=", 1e-9);
  rep.provenance["warp"] = "f = phi^(1/q) on S^q x M with fiber metric i^-2 f^2 g_S";
}

void cmd_submersion(const Options& o, Report& rep, std::uint64_t) {
  const LoadedSpace ls = load_space(o.file.empty() ? o.space : o.file);
  const WarpedSubmersion sub = build_submersion(ls.doc);
  const double r = require(o.r, "--r");
  Theorem2Mode mode;
  if (o.mode == "infty" || o.mode == "inf") mode = Theorem2Mode::Infty;
  else if (o.mode == "q") mode = Theorem2Mode::Q;
  else throw UsageError("--mode must be infty or q");
  const double q_bound = o.q == "inf" ? sub.fiber.q : parse_q_number(o.q);
  rep.inputs["file"] = ls.source;
  rep.inputs["mode"] = mode == Theorem2Mode::Q ? "q" : "infty";
  rep.inputs["q"] = q_bound;
  rep.inputs["r"] = r;
  const auto samples = sub.base.lattice(std::max(o.samples, 2));
  const Theorem2Report t = theorem2_margins(sub, q_bound, r, samples, mode);
  Json th;
  th["worst"] = t.worst;
  th["worst_point"] = vec_json(t.worst_point);
  th["hypothesis_margin"] = t.hypothesis_margin;
  th["min_discarded"] = t.min_discarded;
  th["min_cauchy_schwarz"] = t.min_cauchy_schwarz;
  th["fiber_constancy"] = t.fiber_constancy;
  th["sample_count"] = t.sample_count;
  rep.results["theorem2"] = th;
  rep.check("theorem2_margin", t.worst, ">=", -1e-8);

  const int nb = sub.base_dim();
  Vec b(nb);
  for (int k = 0; k < nb; ++k) {
    const Interval iv = sub.base.sample_interval(k);
    b(k) = 0.5 * (iv.lo + iv.hi);
  }
  Vec x = Vec::Zero(nb);
  x(0) = 1.0 / std::sqrt(sub.base.metric_at(b)(0, 0));
  const CollapseReport cr = collapse_residual(sub, x, b, {1, 2, 4, 8, 16, 32});
  Json rows = Json::array();
  for (const auto& row : cr.rows) {
    Json rj;
    rj["i"] = row.i;
    rj["horizontal"] = row.horizontal;
    rj["vertical"] = row.vertical;
    rows.push_back(rj);
  }
  Json cj;
  cj["base_point"] = vec_json(b);
  cj["rows"] = rows;
  cj["vertical_ratios"] = cr.vertical_ratios;
  rep.results["collapse"] = cj;
  // The leading vertical residual scales like i^-2 once i is large.
  for (std::size_t k = 2; k < cr.vertical_ratios.size(); ++k) {
    if (!(cr.rows[k].vertical > 1e-12)) continue;
    const double ratio = cr.vertical_ratios[k];
    const std::string name = "collapse_ratio_i" + number_text(cr.rows[k].i);
    rep.check(name + "_low", ratio, ">=", 0.15);
    rep.check(name + "_high", ratio, "<=", 0.35);
  }
  rep.provenance["collapse"] = "vertical residual |Ric_eps(U,U) - Ric_F(U,U)| at the base centre, U unit in g_1";
}

Window parse_window(const std::string& text) {
  const auto u = parse_list(text, "--window");
  if (u.size() != 4) throw UsageError("--window needs u1,u2,u3,u4");
  return {u[0], u[1], u[2], u[3]};
}

Json subtube_json(const SubtubeReport& s) {
  Json j;
  j["selected"] = s.selected;
  j["segment_ratios"] = s.segment_ratios;
  j["vol12"] = s.vol12;
  j["vol23"] = s.vol23;
  j["vol34"] = s.vol34;
  j["tube_ratio"] = s.tube_ratio;
  j["vhat_ratio"] = s.vhat_ratio;
  j["vhat_ratio_34"] = s.vhat_ratio_34;
  j["mass_bound_lhs"] = s.mass_bound_lhs;
  j["mass_bound_rhs"] = s.mass_bound_rhs;
  j["window_bound_lhs"] = s.window_bound_lhs;
  j["window_bound_rhs"] = s.window_bound_rhs;
  j["window_bound_vacuous"] = s.window_bound_vacuous;
  j["conclusion2_structural"] = s.conclusion2_structural;
  j["disjointness_verified"] = s.disjointness_verified;
  return j;
}

void cmd_tube(const Options& o, Report& rep, std::uint64_t seed) {
  TubeSpec tube;
  if (!o.profiles.empty() && !o.space.empty()) throw UsageError("use either --profiles or --space");
  if (!o.profiles.empty()) {
    const ProfileManifest man = parse_manifest(read_text_file(o.profiles));
    const fs::path dir = fs::path(o.profiles).parent_path();
    for (const auto& seg : man.segments) {
      const fs::path p = fs::path(seg.file).is_absolute() ? fs::path(seg.file) : dir / seg.file;
      tube.segments.push_back(parse_profile_csv(read_text_file(p.string()), seg.cut));
      tube.weights.push_back(seg.weight);
    }
    tube.r = man.r;
    tube.c = man.c;
    tube.window = man.window;
    rep.inputs["profiles"] = o.profiles;
  } else {
    const LoadedSpace ls = load_space(o.space);
    const ManifoldSpec space = build_space(ls.doc);
    const int n = space.dimension();
    const Vec p = parse_point(o.point, n, "--point");
    Vec v = parse_point(o.dir, n, "--dir");
    if (o.window.empty()) throw UsageError("--window is required with --space");
    const Window w = parse_window(o.window);
    const double u_max = o.u_max.value_or(w.u4);
    if (u_max < w.u4) throw UsageError("--u-max must reach u4");
    const int steps = std::max(256, static_cast<int>(std::ceil(u_max / 0.005)));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-0.05, 0.05);
    const Mat g0 = space.metric_at(p);
    const Mat frame = normal_frame(g0, v / std::sqrt(v.dot(g0 * v)));
    const int count = n == 1 ? 1 : std::max(1, o.segments);
    for (int k = 0; k < count; ++k) {
      Vec t0 = p;
      if (n > 1 && k > 0) t0 += offset(rng) * frame.col(0);
      const Mat g = space.metric_at(t0);
      const Vec vk = v / std::sqrt(v.dot(g * v));
      const GeodesicProfile prof = shoot_segment(space, t0, vk, Mat::Zero(n - 1, n - 1), u_max, steps);
      if (prof.domain_exit) throw Error(ErrorCode::DomainExit, "a tube segment left the chart");
      tube.segments.push_back(SampledProfile::from_geodesic(prof));
      tube.weights.push_back(1.0);
    }
    tube.window = w;
    rep.inputs["space"] = ls.source;
    rep.inputs["point"] = vec_json(p);
    rep.inputs["dir"] = vec_json(v);
    rep.inputs["segments"] = count;
    rep.notes.push_back("segments start on a short geodesically flat slice; their disjointness is not checked");
  }
  if (!o.window.empty()) tube.window = parse_window(o.window);
  if (o.r) tube.r = *o.r;
  if (o.c) tube.c = *o.c;
  rep.inputs["window"] = {tube.window.u1, tube.window.u2, tube.window.u3, tube.window.u4};
  rep.inputs["r"] = tube.r;
  rep.inputs["c"] = tube.c;

  Json concavity = Json::array();
  for (const auto& seg : tube.segments) {
    try {
      concavity.push_back(log_concavity_margin(seg, tube.r, tube.c));
    } catch (const Error&) {
      concavity.push_back(nullptr);
    }
  }
  rep.results["log_concavity_margins"] = concavity;

  if (!o.emit_dir.empty()) {
    fs::create_directories(o.emit_dir);
    for (std::size_t k = 0; k < tube.segments.size(); ++k) {
      std::ofstream f(fs::path(o.emit_dir) / ("segment_" + std::to_string(k) + ".csv"));
      f << profile_csv(tube.segments[k], tube.r, tube.c);
    }
    rep.results["emitted_profiles"] = static_cast<int>(tube.segments.size());
  }

  const SubtubeReport s = subtube_select(tube);
  rep.results["subtube"] = subtube_json(s);
  rep.check_flag("mass_bound", s.mass_bound_holds);
  rep.check_flag("window_bound", s.window_bound_holds);
  rep.provenance["selection"] = "segments with v(u2,u3)/v(u1,u2) strictly below vhat(u2,u3)/vhat(u1,u2)";
}

Vec unit_direction(const ManifoldSpec& space, const Vec& m, const Vec& v) {
  const double len = std::sqrt(v.dot(space.metric_at(m) * v));
  if (!(len > 0.0)) throw UsageError("--dir must be non-zero");
  return v / len;
}

void cmd_probe(const Options& o, Report& rep, std::uint64_t) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const Vec m = parse_point(o.point, space.dimension(), "--point");
  const Vec v = unit_direction(space, m, parse_point(o.dir, space.dimension(), "--dir"));
  rep.inputs["space"] = ls.source;
  rep.inputs["point"] = vec_json(m);
  rep.inputs["dir"] = vec_json(v);
  rep.inputs["u"] = o.u_probe;
  rep.inputs["steps"] = o.steps;
  const ProbeResult pr = converse_probe(space, m, v, o.u_probe, o.steps);
  const BeForms f = be_forms_at(space, QParam::infinite(), m);
  const double ric = v.dot(f.form_log * v), dlog = f.dlog_phi.dot(v);
  rep.results["c0"] = pr.c0;
  rep.results["r0"] = pr.r0;
  rep.results["ric_be_vv"] = ric;
  rep.results["v_log_phi"] = dlog;
  rep.check("r0_error", std::fabs(pr.r0 - ric), "<=", 1e-3);
  rep.check("c0_error", std::fabs(pr.c0 - dlog), "<=", 1e-4);
  rep.provenance["fit"] = "centred differences of ln(phi area) at h and h/2, Richardson extrapolated";
}

void certify(const ManifoldSpec& space, double q, double r, std::uint64_t seed, Report& rep) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> samples = space.lattice(6);
  for (const Vec& p : space.random_points(32, rng)) samples.push_back(p);
  double margin;
  if (q == 0.0) {
    margin = std::numeric_limits<double>::infinity();
    for (const Vec& x : samples)
      margin = std::min(margin, min_generalized_eigenvalue(ricci_at(space, x).matrix, space.metric_at(x)) - r);
  } else {
    margin = lower_bound_margin(space, QParam::finite(q), r, samples).worst_margin;
  }
  rep.results["curvature_margin"] = margin;
  rep.results["curvature_certified"] = margin >= -1e-8;
  if (margin < -1e-8) rep.notes.push_back("the curvature bound is not certified on samples; comparison may fail");
}

void cmd_bg(const Options& o, Report& rep, std::uint64_t seed) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const double q = parse_q_number(o.q);
  const double r = require(o.r, "--r");
  const Vec center = parse_point(o.center, space.dimension(), "--center");
  rep.inputs["space"] = ls.source;
  rep.inputs["q"] = o.q;
  rep.inputs["r"] = r;
  rep.inputs["center"] = vec_json(center);
  rep.inputs["u1"] = o.u1;
  rep.inputs["u2"] = o.u2;
  rep.inputs["rays"] = o.rays;
  const BishopGromovReport b = bishop_gromov_margin(space, q, r, center, o.u1, o.u2, o.rays);
  rep.results["total_dim"] = b.total_dim;
  rep.results["curvature"] = b.curvature;
  rep.results["model_ratio"] = b.model_ratio;
  rep.results["actual_ratio"] = b.actual_ratio;
  rep.results["volume_u1"] = b.volume_u1;
  rep.results["volume_u2"] = b.volume_u2;
  rep.results["margin"] = b.margin;
  certify(space, q, r, seed, rep);
  rep.check("bishop_gromov_margin", b.margin, ">=", -1e-4);
  rep.provenance["model"] = "(n+q)-dimensional space form with Ricci curvature r";
}

void cmd_myers(const Options& o, Report& rep, std::uint64_t seed) {
  const LoadedSpace ls = load_space(o.space);
  const ManifoldSpec space = build_space(ls.doc);
  const double q = parse_q_number(o.q);
  const double r = require(o.r, "--r");
  rep.inputs["space"] = ls.source;
  rep.inputs["q"] = o.q;
  rep.inputs["r"] = r;
  rep.inputs["pairs"] = o.pairs;
  const MyersReport m = myers_diameter_check(space, q, r, seed, o.pairs);
  rep.results["diameter_estimate"] = m.diameter_estimate;
  rep.results["bound"] = m.bound;
  rep.results["holds"] = m.holds;
  rep.results["pairs_used"] = m.pairs_used;
  rep.results["exact_1d"] = m.exact_1d;
  rep.check("diameter_within_bound", m.diameter_estimate - m.bound, "<=", m.tolerance);
  if (!m.exact_1d) rep.notes.push_back("diameter is a sampled estimate over seeded point pairs");
  rep.provenance["bound"] = "pi sqrt((n + q - 1) / r)";
}

void cmd_catalog_list(const Options&, Report& rep, std::uint64_t) {
  Json entries = Json::array();
  for (const CatalogEntry& e : load_catalog()) {
    Json j;
    j["name"] = e.label();
    j["description"] = e.description;
    j["kind"] = e.is_submersion() ? "submersion" : "space";
    j["dimension"] = e.document.space.coordinates.size();
    Json ref = Json::object();
    for (const auto& [k, f] : e.reference) {
      Json fj;
      fj["value"] = f.value;
      fj["tolerance"] = f.tolerance;
      fj["note"] = f.note;
      ref[k] = fj;
    }
    j["reference"] = ref;
    entries.push_back(j);
  }
  rep.results["entries"] = entries;
}

void cmd_catalog_show(const Options& o, Report& rep, std::uint64_t) {
  const CatalogEntry e = lookup_catalog(o.catalog_name);
  rep.inputs["name"] = o.catalog_name;
  rep.results["space_file"] = Json::parse(space_document_to_json(e.document));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Bakry-Emery comparison geometry checks", "bet"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed (default 42, or BET_SEED)");

  using Handler = void (*)(const Options&, Report&, std::uint64_t);
  std::vector<std::pair<CLI::App*, Handler>> handlers;
  auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sc = app.add_subcommand(name, help);
    handlers.emplace_back(sc, h);
    return sc;
  };

  auto* tensor = add("tensor", "Ric, Hess ln phi and the weighted Ricci tensor at a point", cmd_tensor);
  tensor->add_option("--space", o.space, "space file or catalog:NAME")->required();
  tensor->add_option("--point", o.point, "comma-separated coordinates")->required();
  tensor->add_option("--q", o.q, "q > 0 or inf");

  auto* bound = add("bound", "sampled lower bound margin of the weighted Ricci tensor", cmd_bound);
  bound->add_option("--space", o.space)->required();
  bound->add_option("--q", o.q);
  bound->add_option("--r", o.r)->required();
  bound->add_option("--grid", o.grid, "lattice points per axis");

  auto* bochner = add("bochner", "weighted Bochner identity residuals", cmd_bochner);
  bochner->add_option("--space", o.space)->required();
  bochner->add_option("--forms", o.forms);
  bochner->add_option("--r", o.r);
  bochner->add_option("--q", o.q);
  bochner->add_option("--order", o.order, "quadrature order per axis");
  bochner->add_option("--samples", o.samples, "random points per form");

  auto* warp = add("warp-check", "warped-product Ricci residuals on S^q x M", cmd_warp_check);
  warp->add_option("--space", o.space)->required();
  warp->add_option("--q", o.q)->required();
  warp->add_option("--i", o.i_scale);
  warp->add_option("--samples", o.samples);

  auto* sub = add("submersion", "base curvature margins and collapse residual sweep", cmd_submersion);
  sub->add_option("--file", o.file, "submersion space file or catalog:NAME")->required();
  sub->add_option("--mode", o.mode, "infty or q");
  sub->add_option("--r", o.r)->required();
  sub->add_option("--q", o.q, "q used in the base bound (default: fiber dimension)");
  sub->add_option("--samples", o.samples, "base lattice points per axis");

  auto* tube = add("tube", "subtube selection for a tube of segments", cmd_tube);
  tube->add_option("--space", o.space);
  tube->add_option("--profiles", o.profiles, "manifest JSON of u,a CSV profiles");
  tube->add_option("--window", o.window, "u1,u2,u3,u4");
  tube->add_option("--r", o.r);
  tube->add_option("--c", o.c);
  tube->add_option("--point", o.point);
  tube->add_option("--dir", o.dir);
  tube->add_option("--segments", o.segments);
  tube->add_option("--u-max", o.u_max);
  tube->add_option("--emit-profiles", o.emit_dir, "directory for u,a,ahat CSV files");

  auto* probe = add("probe", "infinitesimal converse probe (c0, r0)", cmd_probe);
  probe->add_option("--space", o.space)->required();
  probe->add_option("--point", o.point)->required();
  probe->add_option("--dir", o.dir)->required();
  probe->add_option("--u", o.u_probe);
  probe->add_option("--steps", o.steps);

  auto* bg = add("bg", "Bishop-Gromov ratio against the model space", cmd_bg);
  bg->add_option("--space", o.space)->required();
  bg->add_option("--q", o.q)->required();
  bg->add_option("--r", o.r)->required();
  bg->add_option("--center", o.center)->required();
  bg->add_option("--u1", o.u1)->required();
  bg->add_option("--u2", o.u2)->required();
  bg->add_option("--rays", o.rays);

  auto* myers = add("myers", "diameter estimate against the Myers bound", cmd_myers);
  myers->add_option("--space", o.space)->required();
  myers->add_option("--q", o.q)->required();
  myers->add_option("--r", o.r)->required();
  myers->add_option("--pairs", o.pairs);

  CLI::App* catalog = app.add_subcommand("catalog", "built-in spaces");
  catalog->require_subcommand(1);
  handlers.emplace_back(catalog->add_subcommand("list", "list catalog entries"), cmd_catalog_list);
  auto* show = catalog->add_subcommand("show", "print an entry as a space file");
  show->add_option("name", o.catalog_name)->required();
  handlers.emplace_back(show, cmd_catalog_show);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPassed;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPassed;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  std::string command;
  Handler handler = nullptr;
  for (auto& [sc, h] : handlers)
    if (sc->parsed()) {
      handler = h;
      command = sc->get_parent() == catalog ? "catalog " + sc->get_name() : sc->get_name();
    }
  if (!handler) {
    err << "usage error: no command given\n";
    return kUsage;
  }
  if (seed_opt->count() > 0) o.seed = seed_value;

  Report rep;
  Json doc;
  doc["command"] = command;
  int code = kPassed;
  std::string seed_source;
  try {
    const std::uint64_t seed = resolve_seed(o.seed, seed_source);
    doc["seed"] = seed;
    handler(o, rep, seed);
    code = rep.failed ? kCheckFailed : kPassed;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    if (code == kUsage) {
      err << "usage error: " << e.what() << "\n";
      return kUsage;
    }
    Json ej;
    ej["code"] = to_string(e.code());
    ej["message"] = e.what();
    doc["error"] = ej;
    err << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  doc["inputs"] = rep.inputs;
  doc["results"] = rep.results;
  doc["checks"] = rep.checks;
  doc["passed"] = code == kPassed;
  doc["exit_code"] = code;
  if (!rep.notes.empty()) doc["notes"] = rep.notes;
  rep.provenance["seed_source"] = seed_source;
  doc["provenance"] = rep.provenance;
  doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string text;
  dump(doc, 0, text);
  text += "\n";
  out << text << std::flush;
  return code;
}

}  // namespace bet::cli
