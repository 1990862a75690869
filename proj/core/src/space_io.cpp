#include "bet/space_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bet/error.hpp"

namespace bet {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::SchemaError, msg); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) schema(what + " must be a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& what) {
  if (v.is_string()) return v.get<std::string>();
  schema(what + " must be an expression string");
}

// Domain bounds may be numbers or constant expressions such as "pi/2".
double bound(const json& v, const std::map<std::string, double>& params, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) schema(what + " must be a number or a constant expression");
  try {
    return parse_expression(v.get<std::string>(), 0, {}, params).evaluate(Vec());
  } catch (const Error& e) {
    schema(what + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SpaceDocument parse_space_document(const std::string& json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) schema("space file must be a JSON object");
  SpaceDocument out;
  SpaceDefinition& def = out.space;

  if (auto it = doc.find("parameters"); it != doc.end()) {
    if (!it->is_object()) schema("'parameters' must be an object");
    for (const auto& [k, v] : it->items()) def.parameters[k] = number(v, "parameter '" + k + "'");
  }
  if (auto it = doc.find("name"); it != doc.end()) def.name = text(*it, "'name'");

  const json& coords = field(doc, "coordinates");
  if (!coords.is_array() || coords.empty()) schema("'coordinates' must be a non-empty array");
  for (const auto& c : coords) {
    if (!c.is_string()) schema("coordinate names must be strings");
    def.coordinates.push_back(c.get<std::string>());
  }
  const std::size_t n = def.coordinates.size();
  if (auto it = doc.find("dimension"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long>() != static_cast<long>(n))
      schema("'dimension' does not match the number of coordinates");
  }

  const json& domain = field(doc, "domain");
  if (!domain.is_array() || domain.size() != n) schema("'domain' needs one [min, max] pair per coordinate");
  for (const auto& iv : domain) {
    if (!iv.is_array() || iv.size() != 2) schema("each domain entry must be [min, max]");
    def.domain.push_back({bound(iv[0], def.parameters, "domain bound"), bound(iv[1], def.parameters, "domain bound")});
    if (!(def.domain.back().lo < def.domain.back().hi)) schema("domain bounds must satisfy min < max");
  }

  const json& periodic = field(doc, "periodic");
  if (!periodic.is_array() || periodic.size() != n) schema("'periodic' needs one boolean per coordinate");
  for (const auto& p : periodic) {
    if (!p.is_boolean()) schema("'periodic' entries must be booleans");
    def.periodic.push_back(p.get<bool>());
  }

  const json& metric = field(doc, "metric");
  if (!metric.is_array() || metric.size() != n) schema("'metric' needs one row per coordinate");
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = metric[i];
    if (!row.is_array() || (row.size() != n - i && row.size() != n))
      schema("metric row " + std::to_string(i) + " must list the upper triangle or a full row");
    std::vector<std::string> r;
    for (const auto& e : row) r.push_back(text(e, "metric entry"));
    def.metric.push_back(std::move(r));
  }

  if (auto it = doc.find("density"); it != doc.end()) def.density = text(*it, "'density'");
  if (auto it = doc.find("margin"); it != doc.end()) {
    def.margin = number(*it, "'margin'");
    if (!(def.margin > 0.0 && def.margin < 0.5)) schema("'margin' must lie in (0, 0.5)");
  }
  if (auto it = doc.find("noncompact"); it != doc.end()) {
    if (!it->is_boolean()) schema("'noncompact' must be a boolean");
    def.noncompact = it->get<bool>();
  }

  if (auto it = doc.find("fiber"); it != doc.end()) {
    if (!it->is_string()) schema("'fiber' must be \"S^q\" or \"T^q\"");
    SubmersionDefinition sub;
    try {
      sub.fiber = Fiber::parse(it->get<std::string>());
    } catch (const Error& e) {
      schema(e.what());
    }
    if (auto q = doc.find("q"); q != doc.end()) {
      if (!q->is_number() || q->get<double>() != sub.fiber.q) schema("'q' does not match the fiber dimension");
    }
    sub.warp = text(field(doc, "warp"), "'warp'");
    if (auto s = doc.find("scale_i"); s != doc.end()) sub.scale_i = number(*s, "'scale_i'");
    out.submersion = sub;
  }
  return out;
}

std::string space_document_to_json(const SpaceDocument& doc) {
  const SpaceDefinition& def = doc.space;
  json j;
  j["name"] = def.name;
  j["dimension"] = def.coordinates.size();
  j["coordinates"] = def.coordinates;
  json domain = json::array();
  for (const Interval& iv : def.domain) domain.push_back({iv.lo, iv.hi});
  j["domain"] = domain;
  j["periodic"] = def.periodic;
  j["metric"] = def.metric;
  j["density"] = def.density;
  j["margin"] = def.margin;
  if (def.noncompact) j["noncompact"] = true;
  if (!def.parameters.empty()) j["parameters"] = def.parameters;
  if (doc.submersion) {
    j["fiber"] = doc.submersion->fiber.str();
    j["q"] = doc.submersion->fiber.q;
    j["warp"] = doc.submersion->warp;
    j["scale_i"] = doc.submersion->scale_i;
  }
  return j.dump(2);
}

ManifoldSpec build_space(const SpaceDocument& doc) { return ManifoldSpec::build(doc.space); }

WarpedSubmersion build_submersion(const SpaceDocument& doc) {
  if (!doc.submersion) schema("space file has no 'fiber'; not a submersion");
  const ManifoldSpec base = build_space(doc);
  const Expression warp =
      parse_expression(doc.submersion->warp, base.dimension(), base.coordinate_names(), doc.space.parameters);
  return WarpedSubmersion::make(base, doc.submersion->fiber, warp, doc.submersion->scale_i);
}

ProfileManifest parse_manifest(const std::string& json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) schema("manifest must be a JSON object");
  ProfileManifest m;
  const json& segs = field(doc, "segments");
  if (!segs.is_array() || segs.empty()) schema("'segments' must be a non-empty array");
  for (const auto& s : segs) {
    if (!s.is_object()) schema("each segment must be an object");
    ManifestSegment seg;
    const json& f = field(s, "file");
    if (!f.is_string()) schema("segment 'file' must be a string");
    seg.file = f.get<std::string>();
    if (auto w = s.find("weight"); w != s.end()) seg.weight = number(*w, "segment weight");
    if (!(seg.weight > 0.0)) schema("segment weights must be positive");
    if (auto c = s.find("cut"); c != s.end()) seg.cut = number(*c, "segment cut");
    m.segments.push_back(seg);
  }
  if (auto w = doc.find("window"); w != doc.end()) {
    if (!w->is_object()) schema("'window' must be an object");
    if (auto r = w->find("r"); r != w->end()) m.r = number(*r, "window r");
    if (auto c = w->find("c"); c != w->end()) m.c = number(*c, "window c");
    if (auto u = w->find("u"); u != w->end()) {
      if (!u->is_array() || u->size() != 4) schema("window 'u' must list u1..u4");
      m.window = {number((*u)[0], "u1"), number((*u)[1], "u2"), number((*u)[2], "u3"), number((*u)[3], "u4")};
    }
  }
  return m;
}

SampledProfile parse_profile_csv(const std::string& text, std::optional<double> cut) {
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  if (!std::getline(in, line)) schema("profile CSV is empty");
  std::string header = trim(line);
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  if (header.rfind("u,a", 0) != 0) schema("profile CSV must start with the header 'u,a'");
  std::vector<double> u, a;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) schema("CSV row " + std::to_string(row) + " has fewer than two columns");
    char* end = nullptr;
    const std::string su = trim(line.substr(0, comma));
    std::string sa = line.substr(comma + 1);
    if (auto c2 = sa.find(','); c2 != std::string::npos) sa = sa.substr(0, c2);
    sa = trim(sa);
    const double vu = std::strtod(su.c_str(), &end);
    if (su.empty() || *end != '\0') schema("CSV row " + std::to_string(row) + ": bad u value");
    const double va = std::strtod(sa.c_str(), &end);
    if (sa.empty() || *end != '\0') schema("CSV row " + std::to_string(row) + ": bad a value");
    u.push_back(vu);
    a.push_back(va);
  }
  try {
    return SampledProfile::from_values(u, a, cut);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ProfileTooShort) throw;
    schema(std::string("profile CSV: ") + e.what());
  }
}

std::string profile_csv(const SampledProfile& profile, double r, double c) {
  std::string out = "u,a,ahat\n";
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double u = profile.u()[k];
    out += format_double(u) + "," + format_double(std::exp(profile.log_a()[k])) + "," + format_double(ahat(r, c, u)) +
           "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bet
