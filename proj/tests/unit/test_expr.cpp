#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bet/error.hpp"
#include "bet/expr.hpp"
#include "test_support.hpp"

namespace {

using bet::Expression;
using bet::parse_expression;
using bet::testing::vec;

const std::vector<std::string> kAbc = {"a", "b", "c"};

double eval3(const std::string& s, double a, double b, double c) {
  return parse_expression(s, 3, kAbc).evaluate(vec({a, b, c}));
}

struct PrecedenceCase {
  const char* text;
  double expected;  // at a = 2, b = 3, c = 0.5
};

class Precedence : public ::testing::TestWithParam<PrecedenceCase> {};

TEST_P(Precedence, EvaluatesLikeHandParenthesized) {
  const auto& p = GetParam();
  EXPECT_NEAR(eval3(p.text, 2.0, 3.0, 0.5), p.expected, 1e-12 * (1.0 + std::abs(p.expected))) << p.text;
}

INSTANTIATE_TEST_SUITE_P(
    Grammar, Precedence,
    ::testing::Values(
        PrecedenceCase{"a-b-c", (2.0 - 3.0) - 0.5},
        PrecedenceCase{"a-(b-c)", 2.0 - (3.0 - 0.5)},
        PrecedenceCase{"a/b/c", (2.0 / 3.0) / 0.5},
        PrecedenceCase{"a/b*c", (2.0 / 3.0) * 0.5},
        PrecedenceCase{"a*b/c", (2.0 * 3.0) / 0.5},
        PrecedenceCase{"a^b^c", std::pow(2.0, std::pow(3.0, 0.5))},
        PrecedenceCase{"(a^b)^c", std::pow(8.0, 0.5)},
        PrecedenceCase{"-a^2", -4.0},
        PrecedenceCase{"(-a)^2", 4.0},
        PrecedenceCase{"-a*b", -6.0},
        PrecedenceCase{"a+b*c", 2.0 + 1.5},
        PrecedenceCase{"(a+b)*c", 2.5},
        PrecedenceCase{"a*b^2", 18.0},
        PrecedenceCase{"a^2*b", 12.0},
        PrecedenceCase{"a-b+c", -0.5},
        PrecedenceCase{"a+b-c", 4.5},
        PrecedenceCase{"a^-c", std::pow(2.0, -0.5)},
        PrecedenceCase{"--a", 2.0},
        PrecedenceCase{"-a-b", -5.0},
        PrecedenceCase{"a*-b", -6.0},
        PrecedenceCase{"2^-a^2", std::pow(2.0, -4.0)},
        PrecedenceCase{"sin(a)^2", std::sin(2.0) * std::sin(2.0)},
        PrecedenceCase{"sin(a^2)", std::sin(4.0)},
        PrecedenceCase{"-sin(a)", -std::sin(2.0)},
        PrecedenceCase{"exp(-a^2)", std::exp(-4.0)},
        PrecedenceCase{"a / b ^ c", 2.0 / std::sqrt(3.0)},
        PrecedenceCase{" a\t*\n b ", 6.0},
        PrecedenceCase{"pi*c", std::numbers::pi / 2.0},
        PrecedenceCase{"e^a", std::exp(2.0)},
        PrecedenceCase{"1e-1*a", 0.2},
        PrecedenceCase{"2.5E+1 - a", 23.0},
        PrecedenceCase{".5*b", 1.5},
        PrecedenceCase{"sqrt(abs(-a*b))", std::sqrt(6.0)},
        PrecedenceCase{"log(e^3)", 3.0},
        PrecedenceCase{"cosh(c)^2 - sinh(c)^2", 1.0},
        PrecedenceCase{"a-b*c^a/b", 2.0 - 3.0 * 0.25 / 3.0}));

TEST(Parse, CoordinateLeaf) {
  const auto e = parse_expression("x0", 1, {"x0"});
  EXPECT_EQ(e.root().kind, bet::NodeKind::Coordinate);
  EXPECT_EQ(e.root().index, 0);
}

TEST(Parse, UnaryMinusBindsLooserThanPower) {
  const auto e = parse_expression("-x0^2", 1, {"x0"});
  using namespace bet::ast;
  const auto hand = negate(binary(bet::BinaryOp::Pow, coordinate(0), constant(2.0)));
  EXPECT_TRUE(bet::structurally_equal(e.root(), *hand));
  EXPECT_DOUBLE_EQ(e.evaluate(vec({2.0})), -4.0);
}

TEST(Parse, FunctionPower) {
  const auto e = parse_expression("sin(th)^2", 2, {"th", "ps"});
  using namespace bet::ast;
  const auto hand = binary(bet::BinaryOp::Pow, call(bet::Function::Sin, coordinate(0)), constant(2.0));
  EXPECT_TRUE(bet::structurally_equal(e.root(), *hand));
  EXPECT_DOUBLE_EQ(e.evaluate(vec({std::numbers::pi / 2, 0.0})), 1.0);
}

TEST(Parse, Errors) {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const bet::Error& e) {
      return e.code();
    }
    return bet::ErrorCode::NotFound;
  };
  EXPECT_EQ(code_of([] { parse_expression("x0 +", 1, {"x0"}); }), bet::ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_expression("(x0", 1, {"x0"}); }), bet::ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_expression("", 1, {"x0"}); }), bet::ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_expression("sin x0", 1, {"x0"}); }), bet::ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_expression("sin(x0, x0)", 1, {"x0"}); }), bet::ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_expression("y", 1, {"x0"}); }), bet::ErrorCode::UnknownIdentifier);
  EXPECT_EQ(code_of([] { parse_expression("foo(x0)", 1, {"x0"}); }), bet::ErrorCode::UnknownIdentifier);
  EXPECT_EQ(code_of([] { parse_expression("x0", 2, {"x0"}); }), bet::ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_expression("x0", 2, {"x0", "x0"}); }), bet::ErrorCode::InvalidArgument);
}

TEST(Parse, SyntaxErrorCarriesPosition) {
  try {
    parse_expression("x0 * * 2", 1, {"x0"});
    FAIL();
  } catch (const bet::Error& e) {
    ASSERT_TRUE(e.position().has_value());
    EXPECT_EQ(*e.position(), 5u);
  }
}

TEST(Parse, ParametersFoldToConstants) {
  const auto e = parse_expression("r*x", 1, {"x"}, {{"r", 3.0}});
  EXPECT_FALSE(e.root().lhs->depends_on_coordinates);
  EXPECT_DOUBLE_EQ(e.evaluate(vec({2.0})), 6.0);
}

TEST(Evaluate, DomainErrorNamesSubexpression) {
  const auto e = parse_expression("1 + log(x0)", 1, {"x0"});
  try {
    e.evaluate(vec({-1.0}));
    FAIL();
  } catch (const bet::Error& err) {
    EXPECT_EQ(err.code(), bet::ErrorCode::DomainError);
    EXPECT_NE(std::string(err.what()).find("log"), std::string::npos);
  }
  EXPECT_THROW(parse_expression("x0^x0", 1, {"x0"}).evaluate_jet(vec({-1.0})), bet::Error);
}

TEST(Jet, GaussianBump) {
  const auto j = parse_expression("exp(-x0^2)", 1, {"x0"}).evaluate_jet(vec({1.0}));
  const double em1 = std::exp(-1.0);
  EXPECT_NEAR(j.value(), em1, 1e-15);
  EXPECT_NEAR(j.grad(0), -2.0 * em1, 1e-15);
  EXPECT_NEAR(j.hess(0, 0), 2.0 * em1, 1e-15);
}

TEST(Jet, Coordinate) {
  const auto j = parse_expression("x0", 1, {"x0"}).evaluate_jet(vec({3.7}));
  EXPECT_EQ(j.value(), 3.7);
  EXPECT_EQ(j.grad(0), 1.0);
  EXPECT_EQ(j.hess(0, 0), 0.0);
}

TEST(Jet, SineSquaredAgainstClosedFormAndDifferences) {
  const auto e = parse_expression("sin(th)^2", 2, {"th", "ps"});
  const auto x = vec({std::numbers::pi / 3, 0.2});
  const auto j = e.evaluate_jet(x);
  EXPECT_NEAR(j.value(), 0.75, 1e-15);
  EXPECT_NEAR(j.grad(0), std::sqrt(3.0) / 2, 1e-15);
  EXPECT_EQ(j.grad(1), 0.0);
  EXPECT_NEAR(j.hess(0, 0), -1.0, 1e-14);
  EXPECT_EQ(j.hess(0, 1), 0.0);
  EXPECT_EQ(j.hess(1, 1), 0.0);

  auto f = [&](const bet::Vec& y) { return e.evaluate(y); };
  const auto g = bet::testing::fd_gradient(f, x, 1e-5);
  EXPECT_NEAR(g(0), j.grad(0), 1e-8);
  const auto H = bet::testing::fd_hessian(f, x, 1e-5);
  EXPECT_NEAR(H(0, 0), j.hess(0, 0), 1e-5);
}

TEST(Jet, IntegerPowerOfZeroIsFinite) {
  const auto j = parse_expression("x0^2 + x0^3", 1, {"x0"}).evaluate_jet(vec({0.0}));
  EXPECT_EQ(j.value(), 0.0);
  EXPECT_EQ(j.grad(0), 0.0);
  EXPECT_EQ(j.hess(0, 0), 2.0);
}

TEST(JetProperty, RandomExpressionsMatchFiniteDifferences) {
  int checked = 0;
  for (int dim = 1; dim <= 3; ++dim) {
    bet::testing::ExpressionGenerator gen(dim, 1000 + static_cast<std::uint64_t>(dim));
    const auto names = gen.names();
    const int count = dim == 1 ? 334 : 333;
    for (int k = 0; k < count; ++k) {
      const std::string text = gen.generate(6);
      const auto e = parse_expression(text, dim, names);
      const auto x = gen.point();
      const auto j = e.evaluate_jet(x);
      auto f = [&](const bet::Vec& y) { return e.evaluate(y); };
      const auto g = bet::testing::fd_gradient(f, x, 1e-5);
      const auto H = bet::testing::fd_hessian_adaptive(f, x);
      // Differences carry rounding of order eps |f| / h^2, so the scale includes |f|.
      const double scale = std::max({1.0, std::abs(j.value())});
      for (int a = 0; a < dim; ++a) {
        ASSERT_LE(std::abs(g(a) - j.grad(a)), 1e-6 * std::max(scale, std::abs(j.grad(a)))) << text;
        for (int b = 0; b < dim; ++b)
          ASSERT_LE(std::abs(H(a, b) - j.hess(a, b)), 1e-6 * std::max(scale, std::abs(j.hess(a, b))))
              << text;
      }
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1000);
}

TEST(Printer, RoundTripRandomCorpus) {
  bet::testing::ExpressionGenerator gen(2, 7);
  const auto names = gen.names();
  for (int k = 0; k < 300; ++k) {
    const auto e = parse_expression(gen.generate(5), 2, names);
    const auto again = parse_expression(e.print(), 2, names);
    ASSERT_TRUE(bet::structurally_equal(e, again)) << e.print();
    EXPECT_EQ(again.print(), e.print());
  }
}

TEST(Printer, RoundTripHandCorpus) {
  const std::vector<std::string> corpus = {
      "a-b-c", "a^b^c", "-a^2", "sin(a)^2*b", "exp(-(a^2+b^2)/2)", "1/(1+a^2)", "pi*e",
      "(1.2+cos(a))^(0.3*b)", "abs(a)-sqrt(b^2+1)", "--a", "2^-a", "1e-3*c"};
  for (const auto& s : corpus) {
    const auto e = parse_expression(s, 3, kAbc);
    EXPECT_TRUE(bet::structurally_equal(e, parse_expression(e.print(), 3, kAbc))) << s;
  }
}

}  // namespace
