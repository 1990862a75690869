#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bet/bundles.hpp"
#include "bet/space.hpp"
#include "bet/tubes.hpp"

namespace bet {

struct SubmersionDefinition {
  Fiber fiber;
  std::string warp;
  double scale_i = 1.0;
};

/// A space file: the chart, plus fiber data when it describes a warped submersion
/// (the chart is then the base).
struct SpaceDocument {
  SpaceDefinition space;
  std::optional<SubmersionDefinition> submersion;
};

/// Parses and schema-checks a space file. Expressions are only checked later, when the
/// spec is built. Throws SchemaError.
SpaceDocument parse_space_document(const std::string& json_text);
std::string space_document_to_json(const SpaceDocument& doc);

ManifoldSpec build_space(const SpaceDocument& doc);
/// Throws SchemaError when the document has no fiber.
WarpedSubmersion build_submersion(const SpaceDocument& doc);

struct ManifestSegment {
  std::string file;
  double weight = 1.0;
  std::optional<double> cut;
};

struct ProfileManifest {
  std::vector<ManifestSegment> segments;
  double r = 0.0;
  double c = 0.0;
  Window window;
};

ProfileManifest parse_manifest(const std::string& json_text);

/// CSV with header `u,a`.
SampledProfile parse_profile_csv(const std::string& text, std::optional<double> cut = std::nullopt);
/// CSV with header `u,a,ahat`, one row per grid point.
std::string profile_csv(const SampledProfile& profile, double r, double c);

std::string read_text_file(const std::string& path);

}  // namespace bet
