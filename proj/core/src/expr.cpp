#include "bet/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "bet/error.hpp"

namespace bet {

namespace {

struct FunctionName {
  std::string_view name;
  Function fn;
};

constexpr FunctionName kFunctions[] = {
    {"sin", Function::Sin},   {"cos", Function::Cos},   {"tan", Function::Tan},
    {"sinh", Function::Sinh}, {"cosh", Function::Cosh}, {"tanh", Function::Tanh},
    {"exp", Function::Exp},   {"log", Function::Log},   {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
};

const Function* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f.fn;
  return nullptr;
}

bool named_constant_value(std::string_view name, double& out) {
  if (name == "pi") {
    out = std::numbers::pi;
    return true;
  }
  if (name == "e") {
    out = std::numbers::e;
    return true;
  }
  return false;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Function f) noexcept {
  for (const auto& entry : kFunctions)
    if (entry.fn == f) return entry.name;
  return "?";
}

namespace ast {

NodePtr constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr named_constant(std::string_view name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::NamedConstant;
  n->name = std::string(name);
  if (!named_constant_value(name, n->value))
    throw Error(ErrorCode::UnknownIdentifier, "unknown constant '" + n->name + "'");
  return n;
}

NodePtr coordinate(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Coordinate;
  n->index = index;
  n->depends_on_coordinates = true;
  return n;
}

NodePtr negate(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negate;
  n->depends_on_coordinates = a->depends_on_coordinates;
  n->lhs = std::move(a);
  return n;
}

NodePtr binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Binary;
  n->op = op;
  n->depends_on_coordinates = a->depends_on_coordinates || b->depends_on_coordinates;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr call(Function fn, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->fn = fn;
  n->depends_on_coordinates = a->depends_on_coordinates;
  n->lhs = std::move(a);
  return n;
}

}  // namespace ast

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
  double number = 0.0;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      std::string text(s.substr(start, i - start));
      if (text == ".") throw Error(ErrorCode::SyntaxError, "malformed number at " + std::to_string(start), start);
      Token t{Tok::Number, start, text};
      t.number = std::strtod(text.c_str(), nullptr);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        throw Error(ErrorCode::SyntaxError,
                    "unexpected character '" + std::string(1, c) + "' at " + std::to_string(i), i);
    }
    out.push_back({kind, i, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::vector<std::string>& names,
         const std::map<std::string, double>& params)
      : toks_(std::move(tokens)), names_(names), params_(params) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (peek().kind != Tok::End) fail("expected operator or end of input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw Error(ErrorCode::SyntaxError,
                what + ", found " + std::string(describe(t.kind)) +
                    (t.text.empty() ? "" : " '" + t.text + "'") + " at " + std::to_string(t.pos),
                t.pos);
  }

  void expect(Tok kind) {
    if (peek().kind != kind) fail("expected " + std::string(describe(kind)));
    ++pos_;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const BinaryOp op = next().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = ast::binary(op, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const BinaryOp op = next().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = ast::binary(op, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::Minus) {
      ++pos_;
      return ast::negate(unary());
    }
    if (peek().kind == Tok::Plus) {
      ++pos_;
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::Caret) {
      ++pos_;
      return ast::binary(BinaryOp::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        ++pos_;
        return ast::constant(t.number);
      case Tok::LParen: {
        ++pos_;
        NodePtr e = expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail("expected number, identifier or '('");
    }
  }

  NodePtr identifier() {
    const Token t = next();
    if (peek().kind == Tok::LParen) {
      const Function* fn = find_function(t.text);
      if (!fn)
        throw Error(ErrorCode::UnknownIdentifier, "unknown function '" + t.text + "' at " + std::to_string(t.pos),
                    t.pos);
      ++pos_;
      NodePtr arg = expr();
      expect(Tok::RParen);
      return ast::call(*fn, arg);
    }
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == t.text) return ast::coordinate(static_cast<int>(i));
    if (auto it = params_.find(t.text); it != params_.end()) return ast::constant(it->second);
    double v;
    if (named_constant_value(t.text, v)) return ast::named_constant(t.text);
    if (find_function(t.text)) {
      fail("expected '(' after function name '" + t.text + "'");
    }
    throw Error(ErrorCode::UnknownIdentifier,
                "unknown identifier '" + t.text + "' at " + std::to_string(t.pos), t.pos);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::vector<std::string>& names_;
  const std::map<std::string, double>& params_;
};

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

Expression parse_expression(std::string_view source, int dimension,
                            const std::vector<std::string>& coordinate_names,
                            const std::map<std::string, double>& parameters) {
  if (dimension < 0 || dimension > kMaxDim || static_cast<int>(coordinate_names.size()) != dimension)
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(dimension) + " coordinate names, got " +
                    std::to_string(coordinate_names.size()));
  std::set<std::string> seen;
  for (const auto& n : coordinate_names) {
    if (!is_identifier(n))
      throw Error(ErrorCode::InvalidArgument, "coordinate name '" + n + "' is not an identifier");
    if (!seen.insert(n).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate coordinate name '" + n + "'");
  }
  Parser p(tokenize(source), coordinate_names, parameters);
  return Expression(p.parse(), coordinate_names);
}

// ---------------------------------------------------------------------------
// Evaluation

Expression::Expression(NodePtr root, std::vector<std::string> coordinate_names)
    : root_(std::move(root)),
      names_(std::make_shared<const std::vector<std::string>>(std::move(coordinate_names))) {}

Expression Expression::constant(double v, std::vector<std::string> coordinate_names) {
  return Expression(ast::constant(v), std::move(coordinate_names));
}

namespace {

[[noreturn]] void domain_failure(const Node& node, const std::vector<std::string>& names,
                                 const char* why) {
  throw Error(ErrorCode::DomainError, std::string(why) + " in '" + print_node(node, names) + "'");
}

double apply(Function fn, double a) {
  switch (fn) {
    case Function::Sin: return std::sin(a);
    case Function::Cos: return std::cos(a);
    case Function::Tan: return std::tan(a);
    case Function::Sinh: return std::sinh(a);
    case Function::Cosh: return std::cosh(a);
    case Function::Tanh: return std::tanh(a);
    case Function::Exp: return std::exp(a);
    case Function::Log: return std::log(a);
    case Function::Sqrt: return std::sqrt(a);
    case Function::Abs: return std::fabs(a);
  }
  return std::nan("");
}

double eval_value(const Node& n, std::span<const double> x, const std::vector<std::string>& names) {
  double out = 0.0;
  switch (n.kind) {
    case NodeKind::Constant:
    case NodeKind::NamedConstant:
      return n.value;
    case NodeKind::Coordinate:
      return x[static_cast<std::size_t>(n.index)];
    case NodeKind::Negate:
      return -eval_value(*n.lhs, x, names);
    case NodeKind::Call: {
      const double a = eval_value(*n.lhs, x, names);
      if (n.fn == Function::Log && a <= 0) domain_failure(n, names, "log of nonpositive value");
      if (n.fn == Function::Sqrt && a < 0) domain_failure(n, names, "sqrt of negative value");
      out = apply(n.fn, a);
      break;
    }
    case NodeKind::Binary: {
      const double a = eval_value(*n.lhs, x, names);
      const double b = eval_value(*n.rhs, x, names);
      switch (n.op) {
        case BinaryOp::Add: out = a + b; break;
        case BinaryOp::Sub: out = a - b; break;
        case BinaryOp::Mul: out = a * b; break;
        case BinaryOp::Div:
          if (b == 0.0) domain_failure(n, names, "division by zero");
          out = a / b;
          break;
        case BinaryOp::Pow:
          if (n.rhs->depends_on_coordinates && a <= 0)
            domain_failure(n, names, "variable exponent needs a positive base");
          out = std::pow(a, b);
          break;
      }
      break;
    }
  }
  if (!std::isfinite(out)) domain_failure(n, names, "non-finite value");
  return out;
}

Jet2 eval_jet(const Node& n, const Vec& x, const std::vector<std::string>& names) {
  const int dim = static_cast<int>(x.size());
  if (!n.depends_on_coordinates) return Jet2(dim, eval_value(n, std::span<const double>(x.data(), x.size()), names));
  Jet2 out;
  switch (n.kind) {
    case NodeKind::Constant:
    case NodeKind::NamedConstant:
      return Jet2(dim, n.value);
    case NodeKind::Coordinate:
      return Jet2::variable(dim, n.index, x(n.index));
    case NodeKind::Negate:
      return -eval_jet(*n.lhs, x, names);
    case NodeKind::Call: {
      const Jet2 a = eval_jet(*n.lhs, x, names);
      const double v = a.value();
      switch (n.fn) {
        case Function::Sin: out = sin(a); break;
        case Function::Cos: out = cos(a); break;
        case Function::Tan: out = tan(a); break;
        case Function::Sinh: out = sinh(a); break;
        case Function::Cosh: out = cosh(a); break;
        case Function::Tanh: out = tanh(a); break;
        case Function::Exp: out = exp(a); break;
        case Function::Log:
          if (v <= 0) domain_failure(n, names, "log of nonpositive value");
          out = log(a);
          break;
        case Function::Sqrt:
          if (v <= 0) domain_failure(n, names, "sqrt not differentiable at nonpositive value");
          out = sqrt(a);
          break;
        case Function::Abs:
          if (v == 0) domain_failure(n, names, "abs not differentiable at zero");
          out = abs(a);
          break;
      }
      break;
    }
    case NodeKind::Binary: {
      const Jet2 a = eval_jet(*n.lhs, x, names);
      if (n.op == BinaryOp::Pow && !n.rhs->depends_on_coordinates) {
        const double c = eval_value(*n.rhs, std::span<const double>(x.data(), x.size()), names);
        if (a.value() < 0 && c != std::floor(c))
          domain_failure(n, names, "fractional power of negative value");
        out = pow(a, c);
        break;
      }
      const Jet2 b = eval_jet(*n.rhs, x, names);
      switch (n.op) {
        case BinaryOp::Add: out = a + b; break;
        case BinaryOp::Sub: out = a - b; break;
        case BinaryOp::Mul: out = a * b; break;
        case BinaryOp::Div:
          if (b.value() == 0.0) domain_failure(n, names, "division by zero");
          out = a / b;
          break;
        case BinaryOp::Pow:
          if (a.value() <= 0) domain_failure(n, names, "variable exponent needs a positive base");
          out = pow(a, b);
          break;
      }
      break;
    }
  }
  bool finite = std::isfinite(out.value());
  for (int i = 0; i < dim && finite; ++i) {
    finite = std::isfinite(out.grad(i));
    for (int j = 0; j <= i && finite; ++j) finite = std::isfinite(out.hess(j, i));
  }
  if (!finite) domain_failure(n, names, "non-finite derivative");
  return out;
}

}  // namespace

double Expression::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != dimension())
    throw Error(ErrorCode::DimensionMismatch, "point has " + std::to_string(point.size()) +
                                                  " coordinates, expression expects " +
                                                  std::to_string(dimension()));
  return eval_value(*root_, point, *names_);
}

double Expression::evaluate(const Vec& point) const {
  return evaluate(std::span<const double>(point.data(), static_cast<std::size_t>(point.size())));
}

Jet2 Expression::evaluate_jet(const Vec& point) const {
  if (static_cast<int>(point.size()) != dimension())
    throw Error(ErrorCode::DimensionMismatch, "point has " + std::to_string(point.size()) +
                                                  " coordinates, expression expects " +
                                                  std::to_string(dimension()));
  return eval_jet(*root_, point, *names_);
}

Jet2 evaluate_jet(const Expression& expr, const Vec& point) { return expr.evaluate_jet(point); }

// ---------------------------------------------------------------------------
// Printing and comparison

std::string print_node(const Node& n, const std::vector<std::string>& names) {
  switch (n.kind) {
    case NodeKind::Constant:
      if (std::signbit(n.value)) return "(-" + format_number(-n.value) + ")";
      return format_number(n.value);
    case NodeKind::NamedConstant:
      return n.name;
    case NodeKind::Coordinate:
      if (n.index < static_cast<int>(names.size())) return names[static_cast<std::size_t>(n.index)];
      return "x" + std::to_string(n.index);
    case NodeKind::Negate:
      return "(-" + print_node(*n.lhs, names) + ")";
    case NodeKind::Call:
      return std::string(to_string(n.fn)) + "(" + print_node(*n.lhs, names) + ")";
    case NodeKind::Binary: {
      static constexpr const char* ops[] = {" + ", " - ", " * ", " / ", "^"};
      return "(" + print_node(*n.lhs, names) + ops[static_cast<int>(n.op)] +
             print_node(*n.rhs, names) + ")";
    }
  }
  return "?";
}

std::string Expression::print() const { return print_node(*root_, *names_); }

bool structurally_equal(const Node& a, const Node& b) noexcept {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant:
      return a.value == b.value;
    case NodeKind::NamedConstant:
      return a.name == b.name;
    case NodeKind::Coordinate:
      return a.index == b.index;
    case NodeKind::Negate:
      return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Call:
      return a.fn == b.fn && structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Binary:
      return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
  return false;
}

}  // namespace bet
