#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "strategos/common.hpp"
#include "strategos/observation.hpp"

namespace strategos {

enum class CmpOp { lt, le, eq, ge, gt };

inline const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::eq: return "=";
    case CmpOp::ge: return ">=";
    case CmpOp::gt: return ">";
  }
  return "=";
}

// One side of a comparison: either a numeric literal or a feature reference
// optionally scaled by a literal (e.g. `2 * visible_enemy_army_supply`).
struct Term {
  std::optional<Feature> feature;
  double scale = 1.0;     // multiplies the feature value; ignored for literals
  double constant = 0.0;  // the literal value when feature is absent

  double value(const Observation& o) const {
    return feature ? scale * feature_value(o, *feature) : constant;
  }

  static Term literal(double v) {
    Term t;
    t.constant = v;
    return t;
  }
  static Term ref(Feature f, double scale = 1.0) {
    Term t;
    t.feature = f;
    t.scale = scale;
    return t;
  }
};

namespace detail {
// Integers render bare, everything else with up to 6 significant digits.
inline std::string number_text(double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace detail

// Immutable boolean expression over observation features. Copies share the
// underlying tree, so a parsed spec can be spread across parallel episodes.
class PredicateExpr {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Compare {
    Term lhs;
    CmpOp op;
    Term rhs;
  };
  struct And {
    std::vector<NodePtr> children;
  };
  struct Or {
    std::vector<NodePtr> children;
  };
  struct Not {
    NodePtr child;
  };
  struct Node {
    std::variant<Compare, And, Or, Not> v;
    explicit Node(std::variant<Compare, And, Or, Not> v_) : v(std::move(v_)) {}
  };

 public:
  PredicateExpr() : PredicateExpr(comparison(Term::literal(0), CmpOp::eq, Term::literal(0))) {}

  static PredicateExpr comparison(Term lhs, CmpOp op, Term rhs) {
    return PredicateExpr(std::make_shared<const Node>(Compare{lhs, op, rhs}));
  }
  static PredicateExpr conjunction(std::vector<PredicateExpr> children) {
    return PredicateExpr(std::make_shared<const Node>(And{roots_of(std::move(children))}));
  }
  static PredicateExpr disjunction(std::vector<PredicateExpr> children) {
    return PredicateExpr(std::make_shared<const Node>(Or{roots_of(std::move(children))}));
  }
  static PredicateExpr negation(PredicateExpr child) {
    return PredicateExpr(std::make_shared<const Node>(Not{std::move(child.root_)}));
  }

  // Total: never throws, defined for every observation.
  bool evaluate(const Observation& o) const { return eval_node(*root_, o); }

  // Canonical text form; re-parses to an equivalent expression.
  std::string to_text() const { return node_text(*root_); }

 private:
  explicit PredicateExpr(NodePtr root) : root_(std::move(root)) {}

  static std::vector<NodePtr> roots_of(std::vector<PredicateExpr> children) {
    std::vector<NodePtr> out;
    out.reserve(children.size());
    for (auto& c : children) out.push_back(std::move(c.root_));
    return out;
  }

  static bool eval_node(const Node& n, const Observation& o) {
    if (const auto* c = std::get_if<Compare>(&n.v)) {
      double a = c->lhs.value(o);
      double b = c->rhs.value(o);
      switch (c->op) {
        case CmpOp::lt: return a < b;
        case CmpOp::le: return a <= b;
        case CmpOp::eq: return a == b;
        case CmpOp::ge: return a >= b;
        case CmpOp::gt: return a > b;
      }
      return false;
    }
    if (const auto* a = std::get_if<And>(&n.v)) {
      for (const auto& ch : a->children)
        if (!eval_node(*ch, o)) return false;
      return true;
    }
    if (const auto* d = std::get_if<Or>(&n.v)) {
      for (const auto& ch : d->children)
        if (eval_node(*ch, o)) return true;
      return false;
    }
    return !eval_node(*std::get<Not>(n.v).child, o);
  }

  static std::string term_text(const Term& t) {
    if (!t.feature) return detail::number_text(t.constant);
    if (t.scale == 1.0) return feature_name(*t.feature);
    return detail::number_text(t.scale) + " * " + feature_name(*t.feature);
  }

  static std::string node_text(const Node& n) {
    if (const auto* c = std::get_if<Compare>(&n.v))
      return term_text(c->lhs) + " " + cmp_op_text(c->op) + " " + term_text(c->rhs);
    if (const auto* a = std::get_if<And>(&n.v)) return child_list(a->children, " and ");
    if (const auto* d = std::get_if<Or>(&n.v)) return child_list(d->children, " or ");
    return "not (" + node_text(*std::get<Not>(n.v).child) + ")";
  }

  static std::string child_list(const std::vector<NodePtr>& children, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < children.size(); ++i) {
      if (i) out += sep;
      out += "(" + node_text(*children[i]) + ")";
    }
    return out;
  }

  NodePtr root_;
};

inline bool evaluate_predicate(const PredicateExpr& p, const Observation& o) {
  return p.evaluate(o);
}

// ============================================================================
// Expression parser
//
//   expr := or_expr
//   or   := and ("or" and)*
//   and  := unary ("and" unary)*
//   unary:= "not" unary | "(" expr ")" | comparison
//   cmp  := term op term        op: < <= = == >= >
//   term := number | feature | number "*" feature | feature "*" number
// ============================================================================

namespace detail {

struct ExprToken {
  enum Kind { ident, number, op, lparen, rparen, end } kind = end;
  std::string text;
  double num = 0.0;
  int column = 0;  // 1-based within the expression source
};

class ExprLexer {
 public:
  ExprLexer(std::string_view src, int line, int col_base)
      : src_(src), line_(line), col_base_(col_base) {}

  ExprToken next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    ExprToken t;
    t.column = col_base_ + static_cast<int>(pos_);
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      t.kind = ExprToken::ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
        ++pos_;
      t.kind = ExprToken::number;
      t.text = std::string(src_.substr(start, pos_ - start));
      try {
        t.num = std::stod(t.text);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + t.text + "'", line_, t.column);
      }
      return t;
    }
    if (c == '(') {
      ++pos_;
      t.kind = ExprToken::lparen;
      t.text = "(";
      return t;
    }
    if (c == ')') {
      ++pos_;
      t.kind = ExprToken::rparen;
      t.text = ")";
      return t;
    }
    // operators: < <= = == >= > *
    if (c == '<' || c == '>' || c == '=' || c == '*') {
      size_t start = pos_++;
      if (pos_ < src_.size() && src_[pos_] == '=' && (c == '<' || c == '>' || c == '=')) ++pos_;
      t.kind = ExprToken::op;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "' in expression", line_,
                     t.column);
  }

  int line() const { return line_; }

 private:
  std::string_view src_;
  int line_;
  int col_base_;
  size_t pos_ = 0;
};

class ExprParser {
 public:
  ExprParser(std::string_view src, int line, int col_base) : lexer_(src, line, col_base) {
    advance();
  }

  PredicateExpr parse() {
    PredicateExpr e = parse_or();
    if (cur_.kind != ExprToken::end)
      throw ParseError("unexpected trailing text '" + cur_.text + "' in expression",
                       lexer_.line(), cur_.column);
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  bool at_keyword(std::string_view kw) const {
    return cur_.kind == ExprToken::ident && cur_.text == kw;
  }

  PredicateExpr parse_or() {
    std::vector<PredicateExpr> children;
    children.push_back(parse_and());
    while (at_keyword("or")) {
      advance();
      children.push_back(parse_and());
    }
    if (children.size() == 1) return children[0];
    return PredicateExpr::disjunction(std::move(children));
  }

  PredicateExpr parse_and() {
    std::vector<PredicateExpr> children;
    children.push_back(parse_unary());
    while (at_keyword("and")) {
      advance();
      children.push_back(parse_unary());
    }
    if (children.size() == 1) return children[0];
    return PredicateExpr::conjunction(std::move(children));
  }

  PredicateExpr parse_unary() {
    if (at_keyword("not")) {
      advance();
      return PredicateExpr::negation(parse_unary());
    }
    if (cur_.kind == ExprToken::lparen) {
      advance();
      PredicateExpr e = parse_or();
      if (cur_.kind != ExprToken::rparen)
        throw ParseError("expected ')' in expression", lexer_.line(), cur_.column);
      advance();
      return e;
    }
    return parse_comparison();
  }

  PredicateExpr parse_comparison() {
    Term lhs = parse_term();
    if (cur_.kind != ExprToken::op || cur_.text == "*")
      throw ParseError("expected comparison operator", lexer_.line(), cur_.column);
    std::string op_text = cur_.text;
    int op_col = cur_.column;
    advance();
    Term rhs = parse_term();
    CmpOp op;
    if (op_text == "<")
      op = CmpOp::lt;
    else if (op_text == "<=")
      op = CmpOp::le;
    else if (op_text == "=" || op_text == "==")
      op = CmpOp::eq;
    else if (op_text == ">=")
      op = CmpOp::ge;
    else if (op_text == ">")
      op = CmpOp::gt;
    else
      throw ParseError("unknown comparison operator '" + op_text + "'", lexer_.line(), op_col);
    return PredicateExpr::comparison(lhs, op, rhs);
  }

  Term parse_term() {
    if (cur_.kind == ExprToken::number) {
      double v = cur_.num;
      advance();
      if (cur_.kind == ExprToken::op && cur_.text == "*") {
        advance();
        Feature f = expect_feature();
        return Term::ref(f, v);
      }
      return Term::literal(v);
    }
    if (cur_.kind == ExprToken::ident) {
      Feature f = expect_feature();
      if (cur_.kind == ExprToken::op && cur_.text == "*") {
        advance();
        if (cur_.kind != ExprToken::number)
          throw ParseError("expected numeric scale after '*'", lexer_.line(), cur_.column);
        double v = cur_.num;
        advance();
        return Term::ref(f, v);
      }
      return Term::ref(f);
    }
    throw ParseError("expected number or feature reference", lexer_.line(), cur_.column);
  }

  Feature expect_feature() {
    if (cur_.kind != ExprToken::ident)
      throw ParseError("expected feature reference", lexer_.line(), cur_.column);
    std::optional<Feature> f = parse_feature(cur_.text);
    if (!f)
      throw ParseError("unknown feature reference '" + cur_.text + "'", lexer_.line(),
                       cur_.column);
    advance();
    return *f;
  }

  ExprLexer lexer_;
  ExprToken cur_;
};

}  // namespace detail

// Parses a boolean expression. `line`/`col_base` locate the expression inside
// a larger document so diagnostics point at the real source position.
inline PredicateExpr parse_predicate(std::string_view text, int line = 1, int col_base = 1) {
  return detail::ExprParser(text, line, col_base).parse();
}

}  // namespace strategos
