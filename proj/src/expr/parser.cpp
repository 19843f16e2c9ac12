#include "curvcheck/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <unordered_set>

namespace curvcheck {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 9> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sqrt", Func::Sqrt},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"tanh", Func::Tanh},
}};

std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions) {
    if (n == name) return f;
  }
  return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_unary(Node::Kind kind, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coords)
      : text_(text), coords_(coords) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      fail(ParseError::Kind::Syntax, "unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) const {
    throw ParseError(kind, std::min(pos_, text_.empty() ? 0 : text_.size() - 1), msg);
  }
  [[noreturn]] void fail_at(ParseError::Kind kind, std::size_t at, const std::string& msg) const {
    throw ParseError(kind, at, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(Node::Kind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_binary(Node::Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(Node::Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(Node::Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_unary(Node::Kind::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) return make_binary(Node::Kind::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    const char c = peek();
    if (c == '\0') fail(ParseError::Kind::Syntax, "unexpected end of expression");
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    fail(ParseError::Kind::Syntax, "unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      const std::size_t from = end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      return end > from;
    };
    bool mantissa = digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      mantissa = digits() || mantissa;
    }
    if (!mantissa) fail(ParseError::Kind::Syntax, "malformed number");
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
      if (!digits()) {
        pos_ = save;
        fail(ParseError::Kind::Syntax, "malformed exponent");
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, v);
    if (ec != std::errc() || ptr != text_.data() + end) {
      fail_at(ParseError::Kind::Syntax, start, "malformed number");
    }
    pos_ = end;
    return make_number(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    const bool call = peek() == '(';

    if (auto f = lookup_function(name)) {
      if (!call) fail_at(ParseError::Kind::Arity, start, "function '" + name + "' requires one argument");
      ++pos_;  // '('
      NodePtr arg = parse_expr();
      if (peek() == ',') fail(ParseError::Kind::Arity, "function '" + name + "' takes exactly one argument");
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->func = *f;
      n->lhs = std::move(arg);
      return n;
    }

    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == name) {
        if (call) fail_at(ParseError::Kind::Arity, start, "coordinate '" + name + "' is not a function");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Var;
        n->var = i;
        return n;
      }
    }
    fail_at(ParseError::Kind::UnknownIdentifier, start,
            (call ? "unknown function '" : "unknown identifier '") + name + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

std::string_view func_name(Func f) {
  for (const auto& [n, fn] : kFunctions) {
    if (fn == f) return n;
  }
  return "?";
}

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message), kind_(kind), offset_(offset) {}

DomainError::DomainError(const std::string& subtree, const std::string& message)
    : std::runtime_error(message + " in '" + subtree + "'"), subtree_(subtree) {}

CoordNames make_coords(std::vector<std::string> names) {
  if (names.empty()) throw std::invalid_argument("coordinate list is empty");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty() || !is_ident_start(n.front())) throw std::invalid_argument("invalid coordinate name '" + n + "'");
    for (char c : n) {
      if (!is_ident_char(c)) throw std::invalid_argument("invalid coordinate name '" + n + "'");
    }
    if (lookup_function(n)) throw std::invalid_argument("coordinate name '" + n + "' shadows a function");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate coordinate name '" + n + "'");
  }
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

Expr parse(std::string_view text, const CoordNames& coords) {
  Parser p(text, *coords);
  return Expr(p.parse_all(), coords);
}

Expr parse(std::string_view text, const std::vector<std::string>& coords) {
  return parse(text, make_coords(coords));
}

Expr Expr::constant(double v, CoordNames coords) {
  NodePtr n = make_number(std::abs(v));
  if (std::signbit(v)) n = make_unary(Node::Kind::Neg, n);
  return Expr(std::move(n), std::move(coords));
}

bool Expr::is_zero_literal() const {
  return root_ && root_->kind == Node::Kind::Number && root_->number == 0.0;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Number:
      return a.number == b.number;
    case Node::Kind::Var:
      return a.var == b.var;
    case Node::Kind::Neg:
      return structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::Call:
      return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  return a.coords() == b.coords() && structurally_equal(a.root(), b.root());
}

std::string render(const Node& node, const std::vector<std::string>& coords) {
  auto bin = [&](const char* op) {
    return "(" + render(*node.lhs, coords) + op + render(*node.rhs, coords) + ")";
  };
  switch (node.kind) {
    case Node::Kind::Number:
      return format_number(node.number);
    case Node::Kind::Var:
      return coords.at(node.var);
    case Node::Kind::Neg:
      return "(-" + render(*node.lhs, coords) + ")";
    case Node::Kind::Add:
      return bin("+");
    case Node::Kind::Sub:
      return bin("-");
    case Node::Kind::Mul:
      return bin("*");
    case Node::Kind::Div:
      return bin("/");
    case Node::Kind::Pow:
      return bin("^");
    case Node::Kind::Call:
      return std::string(func_name(node.func)) + "(" + render(*node.lhs, coords) + ")";
  }
  return {};
}

std::string render(const Expr& e) { return render(e.root(), e.coords()); }

}  // namespace curvcheck
