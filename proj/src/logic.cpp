// Copyright 2026 The tracial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tracial/logic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "tracial/errors.hpp"

namespace tracial {

// ---------------------------------------------------------------------------
// Term
// ---------------------------------------------------------------------------

struct Term::Node {
  TermKind kind = TermKind::One;
  std::size_t level = 0;
  GaussianRational coefficient;
  Term a;
  Term b;
};

namespace {

template <typename T>
const T& require_kind(bool ok, const T& value, const char* what) {
  if (!ok) throw std::logic_error(what);
  return value;
}

}  // namespace

Term Term::variable(std::size_t level) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Variable;
  n->level = level;
  return Term(std::move(n));
}

Term Term::one() {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::One;
  return Term(std::move(n));
}

Term Term::adjoint(Term t) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Adjoint;
  n->a = std::move(t);
  return Term(std::move(n));
}

Term Term::sum(Term a, Term b) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Sum;
  n->a = std::move(a);
  n->b = std::move(b);
  return Term(std::move(n));
}

Term Term::difference(Term a, Term b) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Difference;
  n->a = std::move(a);
  n->b = std::move(b);
  return Term(std::move(n));
}

Term Term::product(Term a, Term b) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Product;
  n->a = std::move(a);
  n->b = std::move(b);
  return Term(std::move(n));
}

Term Term::scaled(GaussianRational c, Term t) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Scalar;
  n->coefficient = std::move(c);
  n->a = std::move(t);
  return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }

std::size_t Term::level() const {
  return require_kind(kind() == TermKind::Variable, node_->level,
                      "Term::level on non-variable");
}

const Term& Term::operand() const {
  return require_kind(kind() == TermKind::Adjoint || kind() == TermKind::Scalar,
                      node_->a, "Term::operand on binary or leaf term");
}

const Term& Term::lhs() const {
  return require_kind(node_->a.node_ && kind() != TermKind::Adjoint &&
                          kind() != TermKind::Scalar,
                      node_->a, "Term::lhs on non-binary term");
}

const Term& Term::rhs() const {
  return require_kind(static_cast<bool>(node_->b.node_), node_->b,
                      "Term::rhs on non-binary term");
}

const GaussianRational& Term::coefficient() const {
  return require_kind(kind() == TermKind::Scalar, node_->coefficient,
                      "Term::coefficient on non-scalar term");
}

std::size_t Term::arity() const {
  switch (kind()) {
    case TermKind::Variable:
      return level() + 1;
    case TermKind::One:
      return 0;
    case TermKind::Adjoint:
    case TermKind::Scalar:
      return operand().arity();
    default:
      return std::max(lhs().arity(), rhs().arity());
  }
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Variable:
      return a.level() == b.level();
    case TermKind::One:
      return true;
    case TermKind::Adjoint:
      return a.operand() == b.operand();
    case TermKind::Scalar:
      return a.coefficient() == b.coefficient() && a.operand() == b.operand();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

Term operator+(Term a, Term b) { return Term::sum(std::move(a), std::move(b)); }
Term operator-(Term a, Term b) {
  return Term::difference(std::move(a), std::move(b));
}
Term operator*(Term a, Term b) { return Term::product(std::move(a), std::move(b)); }
Term adj(Term t) { return Term::adjoint(std::move(t)); }

namespace {

void add_into(Polynomial& p, const Word& w, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = p.emplace(w, c);
  if (!inserted) {
    it->second = it->second + c;
    if (it->second.is_zero()) p.erase(it);
  }
}

}  // namespace

Polynomial expand_polynomial(const Term& t) {
  Polynomial out;
  switch (t.kind()) {
    case TermKind::Variable:
      out.emplace(Word{Letter{t.level(), false}}, GaussianRational{1, 0});
      break;
    case TermKind::One:
      out.emplace(Word{}, GaussianRational{1, 0});
      break;
    case TermKind::Adjoint:
      for (const auto& [w, c] : expand_polynomial(t.operand())) {
        Word r(w.rbegin(), w.rend());
        for (auto& l : r) l.adjoint = !l.adjoint;
        add_into(out, r, conj(c));
      }
      break;
    case TermKind::Scalar:
      for (const auto& [w, c] : expand_polynomial(t.operand())) {
        add_into(out, w, t.coefficient() * c);
      }
      break;
    case TermKind::Sum:
    case TermKind::Difference: {
      out = expand_polynomial(t.lhs());
      const bool negate = t.kind() == TermKind::Difference;
      for (const auto& [w, c] : expand_polynomial(t.rhs())) {
        add_into(out, w, negate ? GaussianRational{-c.re, -c.im} : c);
      }
      break;
    }
    case TermKind::Product: {
      const Polynomial l = expand_polynomial(t.lhs());
      const Polynomial r = expand_polynomial(t.rhs());
      for (const auto& [wl, cl] : l) {
        for (const auto& [wr, cr] : r) {
          Word w = wl;
          w.insert(w.end(), wr.begin(), wr.end());
          add_into(out, w, cl * cr);
        }
      }
      break;
    }
  }
  return out;
}

Rational coefficient_mass(const Polynomial& p) {
  Rational total = 0;
  for (const auto& [w, c] : p) total += c.modulus_bound();
  return total;
}

Rational degree_weighted_mass(const Polynomial& p) {
  Rational total = 0;
  for (const auto& [w, c] : p) total += c.modulus_bound() * Rational(w.size());
  return total;
}

// ---------------------------------------------------------------------------
// Formula
// ---------------------------------------------------------------------------

struct Formula::Node {
  FormulaKind kind = FormulaKind::Const;
  Term term;
  Formula a;
  Formula b;
  Rational scalar{0};
  UnaryFunction fn = UnaryFunction::Exp;
  std::vector<std::string> names;
};

std::string_view function_name(UnaryFunction f) {
  switch (f) {
    case UnaryFunction::Exp: return "exp";
    case UnaryFunction::Sin: return "sin";
    case UnaryFunction::Cos: return "cos";
    case UnaryFunction::Tanh: return "tanh";
    case UnaryFunction::Abs: return "abs";
    case UnaryFunction::Sqrt: return "sqrt";
  }
  return "?";
}

std::optional<UnaryFunction> function_from_name(std::string_view name) {
  for (auto f : {UnaryFunction::Exp, UnaryFunction::Sin, UnaryFunction::Cos,
                 UnaryFunction::Tanh, UnaryFunction::Abs, UnaryFunction::Sqrt}) {
    if (function_name(f) == name) return f;
  }
  return std::nullopt;
}

double apply_function(UnaryFunction f, double t) {
  switch (f) {
    case UnaryFunction::Exp: return std::exp(t);
    case UnaryFunction::Sin: return std::sin(t);
    case UnaryFunction::Cos: return std::cos(t);
    case UnaryFunction::Tanh: return std::tanh(t);
    case UnaryFunction::Abs: return std::fabs(t);
    case UnaryFunction::Sqrt: return std::sqrt(std::max(t, 0.0));
  }
  return 0.0;
}

namespace {

std::shared_ptr<Formula::Node> make_node(FormulaKind kind) {
  auto n = std::make_shared<Formula::Node>();
  n->kind = kind;
  return n;
}

}  // namespace

Formula Formula::norm2(Term t) {
  auto n = make_node(FormulaKind::Norm2);
  n->term = std::move(t);
  return Formula(std::move(n));
}

Formula Formula::retrace(Term t) {
  auto n = make_node(FormulaKind::ReTrace);
  n->term = std::move(t);
  return Formula(std::move(n));
}

Formula Formula::imtrace(Term t) {
  auto n = make_node(FormulaKind::ImTrace);
  n->term = std::move(t);
  return Formula(std::move(n));
}

#define TRACIAL_BINARY_FORMULA(name, KIND)      \
  Formula Formula::name(Formula a, Formula b) { \
    auto n = make_node(FormulaKind::KIND);      \
    n->a = std::move(a);                        \
    n->b = std::move(b);                        \
    return Formula(std::move(n));               \
  }

TRACIAL_BINARY_FORMULA(max, Max)
TRACIAL_BINARY_FORMULA(min, Min)
TRACIAL_BINARY_FORMULA(plus, Plus)
TRACIAL_BINARY_FORMULA(times, Times)
TRACIAL_BINARY_FORMULA(truncsub, TruncSub)
#undef TRACIAL_BINARY_FORMULA

Formula Formula::scale(Rational q, Formula f) {
  auto n = make_node(FormulaKind::Scale);
  n->scalar = std::move(q);
  n->a = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::constant(Rational q) {
  if (q < 0) throw ValidationError("constant " + format_rational(q) + " is negative");
  auto n = make_node(FormulaKind::Const);
  n->scalar = std::move(q);
  return Formula(std::move(n));
}

Formula Formula::apply(UnaryFunction fn, Formula f) {
  auto n = make_node(FormulaKind::Apply);
  n->fn = fn;
  n->a = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::sup(std::vector<std::string> names, Formula body) {
  if (names.empty()) throw ValidationError("quantifier must bind at least one variable");
  auto n = make_node(FormulaKind::Sup);
  n->names = std::move(names);
  n->a = std::move(body);
  return Formula(std::move(n));
}

Formula Formula::inf(std::vector<std::string> names, Formula body) {
  if (names.empty()) throw ValidationError("quantifier must bind at least one variable");
  auto n = make_node(FormulaKind::Inf);
  n->names = std::move(names);
  n->a = std::move(body);
  return Formula(std::move(n));
}

FormulaKind Formula::kind() const { return node_->kind; }

const Term& Formula::term() const {
  return require_kind(kind() == FormulaKind::Norm2 || kind() == FormulaKind::ReTrace ||
                          kind() == FormulaKind::ImTrace,
                      node_->term, "Formula::term on non-atomic formula");
}

const Formula& Formula::lhs() const {
  return require_kind(static_cast<bool>(node_->b.node_), node_->a,
                      "Formula::lhs on non-binary formula");
}

const Formula& Formula::rhs() const {
  return require_kind(static_cast<bool>(node_->b.node_), node_->b,
                      "Formula::rhs on non-binary formula");
}

const Formula& Formula::operand() const {
  return require_kind(static_cast<bool>(node_->a.node_) && !node_->b.node_, node_->a,
                      "Formula::operand on formula without a single operand");
}

const Rational& Formula::scalar() const {
  return require_kind(kind() == FormulaKind::Scale || kind() == FormulaKind::Const,
                      node_->scalar, "Formula::scalar on formula without scalar");
}

UnaryFunction Formula::function() const {
  return require_kind(kind() == FormulaKind::Apply, node_->fn,
                      "Formula::function on non-apply formula");
}

const std::vector<std::string>& Formula::binder_names() const { return node_->names; }

bool Formula::is_leaf() const {
  switch (kind()) {
    case FormulaKind::Norm2:
    case FormulaKind::ReTrace:
    case FormulaKind::ImTrace:
    case FormulaKind::Const:
      return true;
    default:
      return false;
  }
}

bool Formula::is_quantifier() const {
  return kind() == FormulaKind::Sup || kind() == FormulaKind::Inf;
}

bool Formula::is_quantifier_free() const {
  std::unordered_set<const void*> seen;
  std::vector<Formula> stack{*this};
  while (!stack.empty()) {
    Formula f = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(f.identity()).second) continue;
    if (f.is_quantifier()) return false;
    for (auto& c : f.children()) stack.push_back(std::move(c));
  }
  return true;
}

std::vector<Formula> Formula::children() const {
  if (is_leaf()) return {};
  if (node_->b.node_) return {node_->a, node_->b};
  return {node_->a};
}

std::size_t Formula::atomic_leaf_count() const {
  if (kind() == FormulaKind::Const) return 0;
  if (is_leaf()) return 1;
  std::size_t total = 0;
  for (const auto& c : children()) total += c.atomic_leaf_count();
  return total;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::Norm2:
    case FormulaKind::ReTrace:
    case FormulaKind::ImTrace:
      return a.term() == b.term();
    case FormulaKind::Const:
      return a.scalar() == b.scalar();
    case FormulaKind::Scale:
      return a.scalar() == b.scalar() && a.operand() == b.operand();
    case FormulaKind::Apply:
      return a.function() == b.function() && a.operand() == b.operand();
    case FormulaKind::Sup:
    case FormulaKind::Inf:
      return a.binder_count() == b.binder_count() && a.operand() == b.operand();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// ---------------------------------------------------------------------------
// Scope
// ---------------------------------------------------------------------------

namespace {

void check_scope_rec(const Formula& f, std::size_t in_scope) {
  switch (f.kind()) {
    case FormulaKind::Norm2:
    case FormulaKind::ReTrace:
    case FormulaKind::ImTrace:
      if (f.term().arity() > in_scope) {
        throw ValidationError("variable x" + std::to_string(f.term().arity() - 1) +
                              " is not bound");
      }
      return;
    case FormulaKind::Sup:
    case FormulaKind::Inf:
      check_scope_rec(f.operand(), in_scope + f.binder_count());
      return;
    default:
      for (const auto& c : f.children()) check_scope_rec(c, in_scope);
  }
}

}  // namespace

void check_scope(const Formula& f, std::size_t free_count) {
  check_scope_rec(f, free_count);
}

bool is_sentence(const Formula& f) {
  try {
    check_scope(f, 0);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

std::size_t free_arity(const Formula& f) {
  std::unordered_set<const void*> seen;
  std::vector<Formula> stack{f};
  std::size_t out = 0;
  while (!stack.empty()) {
    Formula g = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(g.identity()).second) continue;
    if (g.is_quantifier()) throw ValidationError("free_arity requires a quantifier-free formula");
    if (g.kind() == FormulaKind::Const) continue;
    if (g.is_leaf()) {
      out = std::max(out, g.term().arity());
      continue;
    }
    for (auto& c : g.children()) stack.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class TokenKind { LParen, RParen, Atom, End };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t offset;
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : text_(text), options_(options) {
    for (std::size_t k = 0; k < options.free_count; ++k) {
      free_names_.push_back("x" + std::to_string(k));
    }
    advance();
  }

  Formula parse_top() {
    Formula f = parse_formula();
    if (current_.kind != TokenKind::End) fail("unexpected trailing input", current_.offset);
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what, offset, line, column);
  }

  void advance() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= text_.size()) {
      current_ = {TokenKind::End, {}, text_.size()};
      return;
    }
    const char c = text_[pos_];
    if (c == '(' || c == ')') {
      current_ = {c == '(' ? TokenKind::LParen : TokenKind::RParen,
                  text_.substr(pos_, 1), pos_};
      ++pos_;
      return;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      ++pos_;
    }
    current_ = {TokenKind::Atom, text_.substr(start, pos_ - start), start};
  }

  void expect(TokenKind kind, const char* what) {
    if (current_.kind != kind) {
      if (current_.kind == TokenKind::End) fail("unexpected end of input, expected " + std::string(what), current_.offset);
      fail("expected " + std::string(what) + ", found '" + std::string(current_.text) + "'",
           current_.offset);
    }
    advance();
  }

  std::string_view expect_atom(const char* what) {
    if (current_.kind != TokenKind::Atom) {
      if (current_.kind == TokenKind::End) fail("unexpected end of input, expected " + std::string(what), current_.offset);
      fail("expected " + std::string(what), current_.offset);
    }
    std::string_view t = current_.text;
    advance();
    return t;
  }

  Rational parse_rational_token(const char* what) {
    const std::size_t at = current_.offset;
    std::string_view t = expect_atom(what);
    try {
      return parse_rational(t);
    } catch (const ValidationError&) {
      fail("malformed rational literal '" + std::string(t) + "'", at);
    }
  }

  static bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    }
    return s != "one";
  }

  Term resolve(std::string_view name, std::size_t at) {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == name) return Term::variable(free_names_.size() + i);
    }
    for (std::size_t k = 0; k < free_names_.size(); ++k) {
      if (free_names_[k] == name) return Term::variable(k);
    }
    fail("unbound variable '" + std::string(name) + "'", at);
  }

  Term parse_term() {
    if (current_.kind == TokenKind::Atom) {
      const std::size_t at = current_.offset;
      std::string_view t = current_.text;
      advance();
      if (t == "one") return Term::one();
      if (!is_identifier(t)) fail("expected a term, found '" + std::string(t) + "'", at);
      return resolve(t, at);
    }
    expect(TokenKind::LParen, "a term");
    const std::size_t at = current_.offset;
    std::string_view head = expect_atom("a term constructor");
    Term out = Term::one();
    if (head == "adj") {
      out = Term::adjoint(parse_term());
    } else if (head == "add" || head == "sub" || head == "mul") {
      Term a = parse_term();
      Term b = parse_term();
      out = head == "add" ? Term::sum(a, b) : head == "sub" ? Term::difference(a, b)
                                                            : Term::product(a, b);
    } else if (head == "scal") {
      Rational re = parse_rational_token("real part");
      Rational im = parse_rational_token("imaginary part");
      out = Term::scaled({re, im}, parse_term());
    } else {
      fail("unknown term constructor '" + std::string(head) + "'", at);
    }
    expect(TokenKind::RParen, "')'");
    return out;
  }

  Formula parse_formula() {
    expect(TokenKind::LParen, "'('");
    const std::size_t at = current_.offset;
    std::string_view head = expect_atom("a connective");
    std::optional<Formula> out;
    if (head == "norm2") {
      out = Formula::norm2(parse_term());
    } else if (head == "retrace") {
      out = Formula::retrace(parse_term());
    } else if (head == "imtrace") {
      out = Formula::imtrace(parse_term());
    } else if (head == "max" || head == "min" || head == "plus" || head == "times" ||
               head == "tminus") {
      Formula a = parse_formula();
      Formula b = parse_formula();
      if (head == "max") out = Formula::max(a, b);
      else if (head == "min") out = Formula::min(a, b);
      else if (head == "plus") out = Formula::plus(a, b);
      else if (head == "times") out = Formula::times(a, b);
      else out = Formula::truncsub(a, b);
    } else if (head == "scale") {
      Rational q = parse_rational_token("a rational scale");
      out = Formula::scale(q, parse_formula());
    } else if (head == "const") {
      const std::size_t lit = current_.offset;
      Rational q = parse_rational_token("a rational constant");
      if (q < 0 || q > options_.const_bound) {
        fail("constant " + format_rational(q) + " outside declared bound [0, " +
                 format_rational(options_.const_bound) + "]",
             lit);
      }
      out = Formula::constant(q);
    } else if (head == "fn") {
      const std::size_t name_at = current_.offset;
      std::string_view name = expect_atom("a function name");
      auto fn = function_from_name(name);
      if (!fn) fail("unknown function '" + std::string(name) + "'", name_at);
      out = Formula::apply(*fn, parse_formula());
    } else if (head == "sup" || head == "inf") {
      expect(TokenKind::LParen, "'(' opening the binder list");
      std::vector<std::string> names;
      while (current_.kind == TokenKind::Atom) {
        if (!is_identifier(current_.text)) {
          fail("invalid variable name '" + std::string(current_.text) + "'", current_.offset);
        }
        names.emplace_back(current_.text);
        advance();
      }
      if (names.empty() && current_.kind == TokenKind::RParen) {
        fail("quantifier must bind at least one variable", current_.offset);
      }
      expect(TokenKind::RParen, "')' closing the binder list");
      scope_.insert(scope_.end(), names.begin(), names.end());
      Formula body = parse_formula();
      scope_.resize(scope_.size() - names.size());
      out = head == "sup" ? Formula::sup(names, body) : Formula::inf(names, body);
    } else {
      fail("unknown connective '" + std::string(head) + "'", at);
    }
    expect(TokenKind::RParen, "')'");
    return *out;
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
  Token current_{TokenKind::End, {}, 0};
  std::vector<std::string> free_names_;
  std::vector<std::string> scope_;
};

}  // namespace

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).parse_top();
}

Sentence parse_sentence(std::string_view text, const ParseOptions& options) {
  ParseOptions closed = options;
  closed.free_count = 0;
  return Parser(text, closed).parse_top();
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

void print_term_into(std::string& out, const Term& t, std::span<const std::string> names) {
  switch (t.kind()) {
    case TermKind::Variable:
      if (t.level() < names.size()) {
        out += names[t.level()];
      } else {
        out += "x" + std::to_string(t.level());
      }
      return;
    case TermKind::One:
      out += "one";
      return;
    case TermKind::Adjoint:
      out += "(adj ";
      print_term_into(out, t.operand(), names);
      out += ')';
      return;
    case TermKind::Scalar:
      out += "(scal " + format_rational(t.coefficient().re) + " " +
             format_rational(t.coefficient().im) + " ";
      print_term_into(out, t.operand(), names);
      out += ')';
      return;
    case TermKind::Sum:
    case TermKind::Difference:
    case TermKind::Product:
      out += t.kind() == TermKind::Sum ? "(add " : t.kind() == TermKind::Difference ? "(sub " : "(mul ";
      print_term_into(out, t.lhs(), names);
      out += ' ';
      print_term_into(out, t.rhs(), names);
      out += ')';
      return;
  }
}

class Printer {
 public:
  explicit Printer(std::size_t free_count) {
    for (std::size_t k = 0; k < free_count; ++k) names_.push_back("x" + std::to_string(k));
  }

  void print(std::string& out, const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::Norm2:
      case FormulaKind::ReTrace:
      case FormulaKind::ImTrace:
        out += f.kind() == FormulaKind::Norm2 ? "(norm2 " : f.kind() == FormulaKind::ReTrace ? "(retrace " : "(imtrace ";
        print_term_into(out, f.term(), names_);
        out += ')';
        return;
      case FormulaKind::Const:
        out += "(const " + format_rational(f.scalar()) + ")";
        return;
      case FormulaKind::Scale:
        out += "(scale " + format_rational(f.scalar()) + " ";
        print(out, f.operand());
        out += ')';
        return;
      case FormulaKind::Apply:
        out += "(fn " + std::string(function_name(f.function())) + " ";
        print(out, f.operand());
        out += ')';
        return;
      case FormulaKind::Sup:
      case FormulaKind::Inf: {
        out += f.kind() == FormulaKind::Sup ? "(sup (" : "(inf (";
        const std::size_t base = names_.size();
        for (std::size_t i = 0; i < f.binder_count(); ++i) {
          names_.push_back(fresh_name(f.binder_names()[i], base + i));
          if (i) out += ' ';
          out += names_.back();
        }
        out += ") ";
        print(out, f.operand());
        names_.resize(base);
        out += ')';
        return;
      }
      default: {
        static constexpr const char* heads[] = {"max", "min", "plus", "times", "tminus"};
        const auto idx = static_cast<int>(f.kind()) - static_cast<int>(FormulaKind::Max);
        out += '(';
        out += heads[idx];
        out += ' ';
        print(out, f.lhs());
        out += ' ';
        print(out, f.rhs());
        out += ')';
      }
    }
  }

 private:
  bool taken(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }

  std::string fresh_name(const std::string& preferred, std::size_t level) const {
    auto valid = [](const std::string& s) {
      if (s.empty() || s == "one") return false;
      if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
      return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
      });
    };
    std::string name = valid(preferred) ? preferred : "x" + std::to_string(level);
    while (taken(name)) name += '\'';
    return name;
  }

  std::vector<std::string> names_;
};

}  // namespace

std::string print_term(const Term& t, std::span<const std::string> names) {
  std::string out;
  print_term_into(out, t, names);
  return out;
}

std::string print_formula(const Formula& f, std::size_t free_count) {
  std::string out;
  Printer(free_count).print(out, f);
  return out;
}

// ---------------------------------------------------------------------------
// Restriction
// ---------------------------------------------------------------------------

namespace {

bool find_offending_connective(const Formula& f, std::vector<std::size_t>& path,
                               std::string& reason) {
  if (f.kind() == FormulaKind::Apply) {
    reason = "connective '" + std::string(function_name(f.function())) +
             "' is outside the restricted family";
    return true;
  }
  const auto kids = f.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    if (find_offending_connective(kids[i], path, reason)) return true;
    path.pop_back();
  }
  return false;
}

bool find_misplaced_quantifier(const Formula& f, bool outer, std::vector<std::size_t>& path,
                               std::string& reason) {
  if (f.kind() == FormulaKind::Inf) {
    reason = "inf quantifier in a universal sentence";
    return true;
  }
  if (f.kind() == FormulaKind::Sup && !outer) {
    reason = "sup quantifier below a connective";
    return true;
  }
  const bool child_outer = outer && f.kind() == FormulaKind::Sup;
  const auto kids = f.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    if (find_misplaced_quantifier(kids[i], child_outer, path, reason)) return true;
    path.pop_back();
  }
  return false;
}

}  // namespace

RestrictionCertificate check_restricted(const Formula& f, SentenceClass claim) {
  RestrictionCertificate cert;
  std::vector<std::size_t> path;
  if (find_offending_connective(f, path, cert.reason)) {
    cert.restricted = false;
    cert.witness_path = path;
    return cert;
  }
  path.clear();
  if (claim == SentenceClass::RestrictedUniversal &&
      find_misplaced_quantifier(f, true, path, cert.reason)) {
    cert.restricted = false;
    cert.witness_path = path;
    return cert;
  }
  cert.reason = "restricted";
  return cert;
}

// ---------------------------------------------------------------------------
// Ranges and Lipschitz bounds
// ---------------------------------------------------------------------------

Rational Interval::magnitude() const {
  return std::max(rational_abs(lo), rational_abs(hi));
}

namespace {

Interval hull(const std::vector<Rational>& xs) {
  Interval out{xs.front(), xs.front()};
  for (const auto& x : xs) {
    out.lo = std::min(out.lo, x);
    out.hi = std::max(out.hi, x);
  }
  return out;
}

// Outward rational enclosure of a monotone increasing function image.
Interval monotone_image(double (*fn)(double), const Interval& in) {
  const double lo = fn(to_double(in.lo));
  const double hi = fn(to_double(in.hi));
  const double pad_lo = std::fabs(lo) * 1e-12 + 1e-300;
  const double pad_hi = std::fabs(hi) * 1e-12 + 1e-300;
  return {rational_floor(lo - pad_lo, 60), rational_ceil(hi + pad_hi, 60)};
}

Interval apply_range(UnaryFunction fn, const Interval& in) {
  switch (fn) {
    case UnaryFunction::Exp:
      return monotone_image([](double t) { return std::exp(t); }, in);
    case UnaryFunction::Tanh:
      return monotone_image([](double t) { return std::tanh(t); }, in);
    case UnaryFunction::Sin:
    case UnaryFunction::Cos:
      return {Rational(-1), Rational(1)};
    case UnaryFunction::Abs:
      if (in.lo >= 0) return in;
      if (in.hi <= 0) return {-in.hi, -in.lo};
      return {Rational(0), in.magnitude()};
    case UnaryFunction::Sqrt: {
      Interval clipped{std::max(in.lo, Rational(0)), std::max(in.hi, Rational(0))};
      return monotone_image([](double t) { return std::sqrt(t); }, clipped);
    }
  }
  return in;
}

void require_quantifier_free(const Formula& f, const char* op) {
  if (!f.is_quantifier_free()) {
    throw ValidationError(std::string(op) + " requires a quantifier-free formula");
  }
}

}  // namespace

std::optional<Rational> function_lipschitz(UnaryFunction fn, const Interval& in) {
  switch (fn) {
    case UnaryFunction::Exp: {
      const double v = std::exp(to_double(in.hi));
      return rational_ceil(v * (1 + 1e-12), 60);
    }
    case UnaryFunction::Sin:
    case UnaryFunction::Cos:
    case UnaryFunction::Tanh:
    case UnaryFunction::Abs:
      return Rational(1);
    case UnaryFunction::Sqrt: {
      if (in.lo <= 0) return std::nullopt;
      const double v = 0.5 / std::sqrt(to_double(in.lo));
      return rational_ceil(v * (1 + 1e-12), 60);
    }
  }
  return std::nullopt;
}

Interval value_range(const Formula& f) {
  require_quantifier_free(f, "value_range");
  switch (f.kind()) {
    case FormulaKind::Norm2:
      return {Rational(0), coefficient_mass(expand_polynomial(f.term()))};
    case FormulaKind::ReTrace:
    case FormulaKind::ImTrace: {
      const Rational m = coefficient_mass(expand_polynomial(f.term()));
      return {-m, m};
    }
    case FormulaKind::Const:
      return {f.scalar(), f.scalar()};
    case FormulaKind::Scale: {
      const Interval c = value_range(f.operand());
      return hull({f.scalar() * c.lo, f.scalar() * c.hi});
    }
    case FormulaKind::Apply:
      return apply_range(f.function(), value_range(f.operand()));
    default:
      break;
  }
  const Interval a = value_range(f.lhs());
  const Interval b = value_range(f.rhs());
  switch (f.kind()) {
    case FormulaKind::Max:
      return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
    case FormulaKind::Min:
      return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
    case FormulaKind::Plus:
      return {a.lo + b.lo, a.hi + b.hi};
    case FormulaKind::Times:
      return hull({a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi});
    case FormulaKind::TruncSub:
      return {std::max(Rational(a.lo - b.hi), Rational(0)), std::max(Rational(a.hi - b.lo), Rational(0))};
    default:
      throw std::logic_error("value_range: unhandled formula kind");
  }
}

std::optional<Rational> try_lipschitz_bound(const Formula& f) {
  require_quantifier_free(f, "lipschitz_bound");
  switch (f.kind()) {
    case FormulaKind::Norm2:
    case FormulaKind::ReTrace:
    case FormulaKind::ImTrace:
      return degree_weighted_mass(expand_polynomial(f.term()));
    case FormulaKind::Const:
      return Rational(0);
    case FormulaKind::Scale: {
      auto c = try_lipschitz_bound(f.operand());
      if (!c) return std::nullopt;
      return rational_abs(f.scalar()) * *c;
    }
    case FormulaKind::Apply: {
      auto c = try_lipschitz_bound(f.operand());
      auto outer = function_lipschitz(f.function(), value_range(f.operand()));
      if (!c || !outer) return std::nullopt;
      return *outer * *c;
    }
    default:
      break;
  }
  auto la = try_lipschitz_bound(f.lhs());
  auto lb = try_lipschitz_bound(f.rhs());
  if (!la || !lb) return std::nullopt;
  switch (f.kind()) {
    case FormulaKind::Max:
    case FormulaKind::Min:
      return std::max(*la, *lb);
    case FormulaKind::Plus:
    case FormulaKind::TruncSub:
      return *la + *lb;
    case FormulaKind::Times:
      return *la * value_range(f.rhs()).magnitude() + *lb * value_range(f.lhs()).magnitude();
    default:
      throw std::logic_error("lipschitz_bound: unhandled formula kind");
  }
}

Rational lipschitz_bound(const Formula& f) {
  auto l = try_lipschitz_bound(f);
  if (!l) throw ValidationError("formula has no finite syntactic Lipschitz bound");
  return *l;
}

// ---------------------------------------------------------------------------
// Sugar expansion
// ---------------------------------------------------------------------------

namespace {

Formula polarized_real_trace(const Term& p) {
  const Formula shifted = Formula::norm2(Term::sum(p, Term::one()));
  const Formula plain = Formula::norm2(p);
  const Formula difference =
      Formula::plus(Formula::times(shifted, shifted),
                    Formula::scale(Rational(-1), Formula::times(plain, plain)));
  return Formula::scale(
      Rational(1, 2),
      Formula::plus(difference, Formula::scale(Rational(-1), Formula::constant(1))));
}

}  // namespace

Formula rebuild_formula(const Formula& f, const std::vector<Formula>& kids) {
  switch (f.kind()) {
    case FormulaKind::Max: return Formula::max(kids[0], kids[1]);
    case FormulaKind::Min: return Formula::min(kids[0], kids[1]);
    case FormulaKind::Plus: return Formula::plus(kids[0], kids[1]);
    case FormulaKind::Times: return Formula::times(kids[0], kids[1]);
    case FormulaKind::TruncSub: return Formula::truncsub(kids[0], kids[1]);
    case FormulaKind::Scale: return Formula::scale(f.scalar(), kids[0]);
    case FormulaKind::Apply: return Formula::apply(f.function(), kids[0]);
    case FormulaKind::Sup: return Formula::sup(f.binder_names(), kids[0]);
    case FormulaKind::Inf: return Formula::inf(f.binder_names(), kids[0]);
    default: return f;
  }
}

Formula expand_trace_sugar(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::ReTrace:
      return polarized_real_trace(f.term());
    case FormulaKind::ImTrace:
      return polarized_real_trace(Term::scaled({Rational(0), Rational(-1)}, f.term()));
    case FormulaKind::Norm2:
    case FormulaKind::Const:
      return f;
    default: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(expand_trace_sugar(c));
      return rebuild_formula(f, kids);
    }
  }
}

std::optional<UniversalForm> universal_form(const Sentence& s) {
  std::vector<std::string> names;
  const Formula* cur = &s;
  while (cur->kind() == FormulaKind::Sup) {
    names.insert(names.end(), cur->binder_names().begin(), cur->binder_names().end());
    cur = &cur->operand();
  }
  if (!cur->is_quantifier_free()) return std::nullopt;
  return UniversalForm{std::move(names), *cur};
}

}  // namespace tracial
