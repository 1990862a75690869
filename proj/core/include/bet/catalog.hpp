#pragma once

#include <map>
#include <string>
#include <vector>

#include "bet/space_io.hpp"

namespace bet {

struct ReferenceFact {
  double value = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct CatalogEntry {
  std::string name;         // family name, e.g. "cosq_interval"
  std::string description;
  std::vector<std::string> parameter_order;  // positional arguments in "name(a, b)"
  SpaceDocument document;   // with parameters filled in
  std::map<std::string, ReferenceFact> reference;

  bool is_submersion() const { return document.submersion.has_value(); }
  ManifoldSpec space() const { return build_space(document); }
  WarpedSubmersion submersion() const { return build_submersion(document); }
  /// "cosq_interval(q=2)"
  std::string label() const;
};

/// All entries with default parameters.
std::vector<CatalogEntry> load_catalog();

/// Looks up "name" or "name(v1, v2, ...)"; positional values override the defaults.
/// Throws NotFound for unknown names.
CatalogEntry lookup_catalog(const std::string& key);

}  // namespace bet
