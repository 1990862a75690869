#include "bet/catalog.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "bet/error.hpp"

namespace bet {

namespace {

// Reference values are constant expressions in the entry's parameters.
constexpr const char* kCatalogJson = R"json([
  {
    "name": "flat_torus_2",
    "description": "flat 2-torus, phi = 1",
    "space": {
      "coordinates": ["x", "y"],
      "domain": [[0, "2*pi"], [0, "2*pi"]],
      "periodic": [true, true],
      "metric": [["1", "0"], ["1"]],
      "density": "1"
    },
    "reference": {
      "ricci_constant": {"value": "0", "tolerance": 1e-10, "note": "flat metric"},
      "ball_volume_0.5": {"value": "pi*0.25", "tolerance": 1e-4, "note": "Euclidean disc below the injectivity radius"}
    }
  },
  {
    "name": "sphere2",
    "description": "unit round sphere in the polar chart",
    "space": {
      "coordinates": ["th", "ph"],
      "domain": [[0, "pi"], [0, "2*pi"]],
      "periodic": [false, true],
      "metric": [["1", "0"], ["sin(th)^2"]],
      "density": "1",
      "margin": 0.02
    },
    "reference": {
      "ricci_constant": {"value": "1", "tolerance": 1e-8, "note": "Ric = g on the unit sphere"},
      "myers_bound": {"value": "pi", "tolerance": 1e-12, "note": "q = 0, r = 1"}
    }
  },
  {
    "name": "hyperbolic2",
    "description": "a band of the upper half-plane",
    "space": {
      "coordinates": ["x", "y"],
      "domain": [[-1, 1], [0.5, 3]],
      "periodic": [false, false],
      "metric": [["1/y^2", "0"], ["1/y^2"]],
      "density": "1",
      "noncompact": true
    },
    "reference": {
      "ricci_constant": {"value": "-1", "tolerance": 1e-8, "note": "curvature -1"}
    }
  },
  {
    "name": "gauss1",
    "description": "the real line with a Gaussian measure",
    "parameters": {"r": 2},
    "space": {
      "coordinates": ["x"],
      "domain": [[-3, 3]],
      "periodic": [false],
      "metric": [["1"]],
      "density": "exp(-r*x^2/2)",
      "noncompact": true
    },
    "reference": {
      "be_infty_constant": {"value": "r", "tolerance": 1e-10, "note": "Hess of r|x|^2/2"}
    }
  },
  {
    "name": "gauss2",
    "description": "the plane with a Gaussian measure",
    "parameters": {"r": 2},
    "space": {
      "coordinates": ["x", "y"],
      "domain": [[-3, 3], [-3, 3]],
      "periodic": [false, false],
      "metric": [["1", "0"], ["1"]],
      "density": "exp(-r*(x^2+y^2)/2)",
      "noncompact": true
    },
    "reference": {
      "be_infty_constant": {"value": "r", "tolerance": 1e-10, "note": "Hess of r|x|^2/2"}
    }
  },
  {
    "name": "cosq_interval",
    "description": "(-pi/2, pi/2) with density cos^q, the measured limit of S^(q+1)",
    "parameters": {"q": 2},
    "space": {
      "coordinates": ["x"],
      "domain": [["-pi/2", "pi/2"]],
      "periodic": [false],
      "metric": [["1"]],
      "density": "cos(x)^q",
      "margin": 0.01
    },
    "reference": {
      "be_q_constant": {"value": "q", "tolerance": 1e-9, "note": "q sec^2 - q tan^2"},
      "myers_bound": {"value": "pi", "tolerance": 1e-12, "note": "r = q, n = 1"},
      "diameter": {"value": "pi", "tolerance": 1e-3, "note": "length of the interval"}
    }
  },
  {
    "name": "s3_as_submersion",
    "description": "round S^3 as [0, pi] x S^2 warped by sin",
    "space": {
      "coordinates": ["b"],
      "domain": [[0, "pi"]],
      "periodic": [false],
      "metric": [["1"]],
      "density": "1",
      "margin": 0.02
    },
    "fiber": "S^2",
    "q": 2,
    "warp": "sin(b)",
    "scale_i": 1,
    "reference": {
      "total_ricci_constant": {"value": "2", "tolerance": 1e-7, "note": "Ric = 2g on the unit 3-sphere"},
      "theorem2_margin": {"value": "0", "tolerance": 1e-8, "note": "pushforward is cos^2 on the interval: equality case"}
    }
  },
  {
    "name": "warp_demo",
    "description": "circle base, flat 2-torus fiber, warp 1 + 0.3 sin b",
    "space": {
      "coordinates": ["b"],
      "domain": [[0, "2*pi"]],
      "periodic": [true],
      "metric": [["1"]],
      "density": "1"
    },
    "fiber": "T^2",
    "q": 2,
    "warp": "1 + 0.3*sin(b)",
    "scale_i": 1,
    "reference": {
      "collapse_ratio": {"value": "0.25", "tolerance": 0.1, "note": "residual scales like i^-2"}
    }
  },
  {
    "name": "weighted_torus",
    "description": "flat torus with density exp(0.5 sin x cos y)",
    "space": {
      "coordinates": ["x", "y"],
      "domain": [[0, "2*pi"], [0, "2*pi"]],
      "periodic": [true, true],
      "metric": [["1", "0"], ["1"]],
      "density": "exp(0.5*sin(x)*cos(y))"
    },
    "reference": {}
  },
  {
    "name": "lumpy_torus",
    "description": "torus with a non-flat, non-diagonal metric and a weight",
    "space": {
      "coordinates": ["x", "y"],
      "domain": [[0, "2*pi"], [0, "2*pi"]],
      "periodic": [true, true],
      "metric": [["1.5 + 0.3*sin(y)", "0.2*cos(x + y)"], ["1.2 + 0.2*cos(x)"]],
      "density": "exp(0.4*sin(x)*cos(y))"
    },
    "reference": {}
  }
])json";

using nlohmann::json;

const json& catalog_json() {
  static const json doc = json::parse(kCatalogJson);
  return doc;
}

CatalogEntry make_entry(const json& e, const std::vector<double>& args) {
  CatalogEntry entry;
  entry.name = e.at("name").get<std::string>();
  entry.description = e.at("description").get<std::string>();
  std::map<std::string, double> params;
  if (auto it = e.find("parameters"); it != e.end())
    for (const auto& [k, v] : it->items()) {
      entry.parameter_order.push_back(k);
      params[k] = v.get<double>();
    }
  if (args.size() > entry.parameter_order.size())
    throw Error(ErrorCode::InvalidArgument, "too many arguments for catalog entry '" + entry.name + "'");
  for (std::size_t i = 0; i < args.size(); ++i) params[entry.parameter_order[i]] = args[i];

  json space = e.at("space");
  space["name"] = entry.name;
  space["parameters"] = params;
  for (const char* key : {"fiber", "q", "warp", "scale_i"})
    if (auto it = e.find(key); it != e.end()) space[key] = *it;
  entry.document = parse_space_document(space.dump());
  entry.document.space.name = entry.label();

  for (const auto& [key, fact] : e.at("reference").items()) {
    ReferenceFact r;
    r.value = parse_expression(fact.at("value").get<std::string>(), 0, {}, params).evaluate(Vec());
    r.tolerance = fact.at("tolerance").get<double>();
    r.note = fact.at("note").get<std::string>();
    entry.reference[key] = r;
  }
  return entry;
}

std::string format_arg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string CatalogEntry::label() const {
  if (parameter_order.empty()) return name;
  std::string out = name + "(";
  for (std::size_t i = 0; i < parameter_order.size(); ++i) {
    const auto& p = parameter_order[i];
    out += (i ? ", " : "") + p + "=" + format_arg(document.space.parameters.at(p));
  }
  return out + ")";
}

std::vector<CatalogEntry> load_catalog() {
  std::vector<CatalogEntry> out;
  for (const auto& e : catalog_json()) out.push_back(make_entry(e, {}));
  return out;
}

CatalogEntry lookup_catalog(const std::string& key) {
  std::string name = key;
  std::vector<double> args;
  if (const auto open = key.find('('); open != std::string::npos) {
    if (key.back() != ')') throw Error(ErrorCode::InvalidArgument, "malformed catalog key '" + key + "'");
    name = key.substr(0, open);
    std::string inner = key.substr(open + 1, key.size() - open - 2);
    std::size_t pos = 0;
    while (pos <= inner.size() && !inner.empty()) {
      const auto comma = inner.find(',', pos);
      const std::string item = inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        args.push_back(parse_expression(item, 0, {}).evaluate(Vec()));
      } catch (const Error&) {
        throw Error(ErrorCode::InvalidArgument, "bad catalog argument '" + item + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  for (const auto& e : catalog_json())
    if (e.at("name").get<std::string>() == name) return make_entry(e, args);
  throw Error(ErrorCode::NotFound, "no catalog entry named '" + name + "'");
}

}  // namespace bet
