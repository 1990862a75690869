#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bet/error.hpp"
#include "bet/space_io.hpp"
#include "test_support.hpp"

namespace {

using bet::testing::vec;

bet::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const bet::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return bet::ErrorCode::NotFound;
}

const char* kSphere = R"j({
  "name": "sphere",
  "dimension": 2,
  "coordinates": ["th", "ph"],
  "domain": [[0, "pi"], [0, "2*pi"]],
  "periodic": [false, true],
  "metric": [["1", "0"], ["sin(th)^2"]],
  "density": "1",
  "margin": 0.02
})j";

TEST(SpaceFile, ParsesAndBuilds) {
  const auto doc = bet::parse_space_document(kSphere);
  EXPECT_FALSE(doc.submersion.has_value());
  const auto s = bet::build_space(doc);
  EXPECT_EQ(s.dimension(), 2);
  EXPECT_NEAR(s.domain(0).hi, std::numbers::pi, 1e-15);
  EXPECT_NEAR(s.metric_at(vec({std::numbers::pi / 2, 0.0}))(1, 1), 1.0, 1e-15);
}

TEST(SpaceFile, FullSquareMetricAccepted) {
  const std::string text = R"j({"coordinates": ["x", "y"], "domain": [[0, 1], [0, 1]], "periodic": [false, false],
    "metric": [["2", "0.5"], ["0.5", "1"]]})j";
  const auto s = bet::build_space(bet::parse_space_document(text));
  EXPECT_DOUBLE_EQ(s.metric_at(vec({0.5, 0.5}))(0, 1), 0.5);
}

TEST(SpaceFile, RoundTrip) {
  const auto doc = bet::parse_space_document(kSphere);
  const auto again = bet::parse_space_document(bet::space_document_to_json(doc));
  EXPECT_EQ(again.space.coordinates, doc.space.coordinates);
  EXPECT_EQ(again.space.metric, doc.space.metric);
  EXPECT_EQ(again.space.periodic, doc.space.periodic);
  EXPECT_DOUBLE_EQ(again.space.domain[1].hi, doc.space.domain[1].hi);
}

TEST(SpaceFile, Submersion) {
  const std::string text = R"j({"coordinates": ["b"], "domain": [[0, "pi"]], "periodic": [false],
    "metric": [["1"]], "fiber": "S^2", "q": 2, "warp": "sin(b)", "scale_i": 2})j";
  const auto doc = bet::parse_space_document(text);
  ASSERT_TRUE(doc.submersion.has_value());
  const auto sub = bet::build_submersion(doc);
  EXPECT_EQ(sub.total_dim(), 3);
  EXPECT_DOUBLE_EQ(sub.scale_i, 2.0);
  EXPECT_EQ(code_of([] { bet::build_submersion(bet::parse_space_document(kSphere)); }), bet::ErrorCode::SchemaError);
}

TEST(SpaceFile, SchemaErrors) {
  const std::vector<std::string> bad = {
      "not json",
      R"j([1, 2])j",
      R"j({"domain": [[0, 1]], "periodic": [false], "metric": [["1"]]})j",
      R"j({"coordinates": ["x"], "domain": [[0]], "periodic": [false], "metric": [["1"]]})j",
      R"j({"coordinates": ["x"], "domain": [[0, 1]], "periodic": [false, true], "metric": [["1"]]})j",
      R"j({"coordinates": ["x"], "dimension": 2, "domain": [[0, 1]], "periodic": [false], "metric": [["1"]]})j",
      R"j({"coordinates": ["x"], "domain": [[1, 0]], "periodic": [false], "metric": [["1"]]})j",
      R"j({"coordinates": ["x"], "domain": [[0, 1]], "periodic": [false], "metric": [[1]]})j",
      R"j({"coordinates": ["x"], "domain": [[0, 1]], "periodic": [false], "metric": [["1"]], "margin": 0.7})j",
      R"j({"coordinates": ["b"], "domain": [[0, 1]], "periodic": [false], "metric": [["1"]], "fiber": "S^2", "q": 3, "warp": "1"})j",
  };
  for (const auto& text : bad) EXPECT_EQ(code_of([&] { bet::parse_space_document(text); }), bet::ErrorCode::SchemaError) << text;
}

TEST(SpaceFile, BadExpressionSurfacesAtBuild) {
  const std::string text = R"j({"coordinates": ["x"], "domain": [[0, 1]], "periodic": [false], "metric": [["1 +"]]})j";
  const auto doc = bet::parse_space_document(text);
  EXPECT_EQ(code_of([&] { bet::build_space(doc); }), bet::ErrorCode::SyntaxError);
}

TEST(Manifest, Parse) {
  const auto m = bet::parse_manifest(R"j({"segments": [{"file": "a.csv", "weight": 2}, {"file": "b.csv", "weight": 1, "cut": 3.5}],
    "window": {"r": 1, "c": 0.5, "u": [1, 2, 3, 4]}})j");
  ASSERT_EQ(m.segments.size(), 2u);
  EXPECT_EQ(m.segments[0].file, "a.csv");
  EXPECT_DOUBLE_EQ(m.segments[0].weight, 2.0);
  EXPECT_FALSE(m.segments[0].cut.has_value());
  EXPECT_DOUBLE_EQ(*m.segments[1].cut, 3.5);
  EXPECT_DOUBLE_EQ(m.c, 0.5);
  EXPECT_DOUBLE_EQ(m.window.u4, 4.0);
  EXPECT_EQ(code_of([] { bet::parse_manifest(R"j({"segments": []})j"); }), bet::ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { bet::parse_manifest(R"j({"segments": [{"file": "a"}], "window": {"r": 1, "c": 0, "u": [1, 2]}})j"); }),
            bet::ErrorCode::SchemaError);
}

TEST(ProfileCsv, ParseAndEmit) {
  const auto p = bet::parse_profile_csv("u,a\n0,1\n0.5,2\n1,4\n");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p.a_at(0.5), 2.0, 1e-14);
  const std::string out = bet::profile_csv(p, 0, 0);
  EXPECT_EQ(out.substr(0, out.find('\n')), "u,a,ahat");
  const auto again = bet::parse_profile_csv(out);
  EXPECT_NEAR(again.a_at(1.0), 4.0, 1e-14);
  EXPECT_EQ(code_of([] { bet::parse_profile_csv("x,y\n0,1\n"); }), bet::ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { bet::parse_profile_csv("u,a\n0,1\n0,2\n"); }), bet::ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { bet::parse_profile_csv("u,a\n0,1\n1,-2\n"); }), bet::ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { bet::read_text_file("/nonexistent/file"); }), bet::ErrorCode::SchemaError);
}

}  // namespace
