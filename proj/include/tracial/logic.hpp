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

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracial/rational.hpp"

namespace tracial {

// ---------------------------------------------------------------------------
// Terms: *-polynomials in noncommuting variables over Q(i).
// ---------------------------------------------------------------------------

enum class TermKind { Variable, One, Adjoint, Sum, Difference, Product, Scalar };

/// Immutable *-polynomial expression. Variables are identified by their
/// binding level: free variables of a formula come first (0..F-1), then
/// quantifier binders in order of nesting.
class Term {
 public:
  static Term variable(std::size_t level);
  static Term one();
  static Term adjoint(Term t);
  static Term sum(Term a, Term b);
  static Term difference(Term a, Term b);
  static Term product(Term a, Term b);
  static Term scaled(GaussianRational c, Term t);

  TermKind kind() const;
  std::size_t level() const;
  /// Operand of Adjoint and Scalar nodes.
  const Term& operand() const;
  const Term& lhs() const;
  const Term& rhs() const;
  const GaussianRational& coefficient() const;

  /// 1 + largest variable level referenced, 0 if none.
  std::size_t arity() const;

  friend bool operator==(const Term& a, const Term& b);

  /// Empty handle; only valid as an assignment target.
  Term() = default;

  struct Node;

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Term operator+(Term a, Term b);
Term operator-(Term a, Term b);
Term operator*(Term a, Term b);
Term adj(Term t);

/// A word in the letters x_k and x_k^*.
struct Letter {
  std::size_t level;
  bool adjoint;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};
using Word = std::vector<Letter>;

/// Normal form of a term as a noncommutative polynomial; zero coefficients
/// are dropped.
using Polynomial = std::map<Word, GaussianRational>;
Polynomial expand_polynomial(const Term& t);

/// Sum over monomials of |coefficient|, a bound on the operator norm (and
/// hence the 2-norm) of the term over unit-ball assignments.
Rational coefficient_mass(const Polynomial& p);
/// Sum over monomials of |coefficient|·degree: a 2-norm Lipschitz constant of
/// the term over the operator-norm unit ball.
Rational degree_weighted_mass(const Polynomial& p);

// ---------------------------------------------------------------------------
// Formulas.
// ---------------------------------------------------------------------------

enum class FormulaKind {
  Norm2,
  ReTrace,
  ImTrace,
  Max,
  Min,
  Plus,
  Times,
  TruncSub,
  Scale,
  Const,
  Apply,
  Sup,
  Inf,
};

/// Real functions outside the restricted connective family. restrict_sentence
/// replaces them by piecewise-linear interpolants.
enum class UnaryFunction { Exp, Sin, Cos, Tanh, Abs, Sqrt };

std::string_view function_name(UnaryFunction f);
std::optional<UnaryFunction> function_from_name(std::string_view name);
double apply_function(UnaryFunction f, double t);

class Formula {
 public:
  static Formula norm2(Term t);
  static Formula retrace(Term t);
  static Formula imtrace(Term t);
  static Formula max(Formula a, Formula b);
  static Formula min(Formula a, Formula b);
  static Formula plus(Formula a, Formula b);
  static Formula times(Formula a, Formula b);
  static Formula truncsub(Formula a, Formula b);
  static Formula scale(Rational q, Formula f);
  /// Requires q >= 0.
  static Formula constant(Rational q);
  static Formula apply(UnaryFunction fn, Formula f);
  /// Binds names.size() consecutive levels. Requires at least one name.
  static Formula sup(std::vector<std::string> names, Formula body);
  static Formula inf(std::vector<std::string> names, Formula body);

  FormulaKind kind() const;
  /// Term of Norm2/ReTrace/ImTrace leaves.
  const Term& term() const;
  const Formula& lhs() const;
  const Formula& rhs() const;
  /// Operand of Scale/Apply, body of Sup/Inf.
  const Formula& operand() const;
  const Rational& scalar() const;
  UnaryFunction function() const;
  const std::vector<std::string>& binder_names() const;
  std::size_t binder_count() const { return binder_names().size(); }

  bool is_leaf() const;
  bool is_quantifier() const;
  bool is_quantifier_free() const;
  /// Immediate subformulas, in print order.
  std::vector<Formula> children() const;
  /// Number of Norm2/ReTrace/ImTrace leaves.
  std::size_t atomic_leaf_count() const;

  /// Structural equality; binder names are ignored.
  friend bool operator==(const Formula& a, const Formula& b);

  /// Address of the shared node; equal for copies of one handle.
  const void* identity() const { return node_.get(); }

  /// Empty handle; only valid as an assignment target.
  Formula() = default;

  struct Node;

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using Sentence = Formula;

/// Throws ValidationError unless every variable reference resolves when the
/// formula has `free_count` free variables.
void check_scope(const Formula& f, std::size_t free_count);
bool is_sentence(const Formula& f);
/// Smallest free-variable count under which a quantifier-free formula is in
/// scope.
std::size_t free_arity(const Formula& f);

// ---------------------------------------------------------------------------
// Text form.
// ---------------------------------------------------------------------------

struct ParseOptions {
  /// Declared upper bound on (const q) literals.
  Rational const_bound{1};
  /// Names x0..x{free_count-1} resolve to free variables.
  std::size_t free_count = 0;
};

/// Throws ParseError on malformed text or unbound variables.
Sentence parse_sentence(std::string_view text, const ParseOptions& options = {});
Formula parse_formula(std::string_view text, const ParseOptions& options = {});

std::string print_formula(const Formula& f, std::size_t free_count = 0);
inline std::string print_sentence(const Sentence& s) { return print_formula(s, 0); }
std::string print_term(const Term& t, std::span<const std::string> names);

// ---------------------------------------------------------------------------
// Classification and analysis.
// ---------------------------------------------------------------------------

enum class SentenceClass { Restricted, RestrictedUniversal };

struct RestrictionCertificate {
  bool restricted = true;
  /// Child indices (in children() order) from the root to the first
  /// offending node.
  std::vector<std::size_t> witness_path;
  std::string reason;
};

RestrictionCertificate check_restricted(
    const Formula& f, SentenceClass claim = SentenceClass::Restricted);

struct Interval {
  Rational lo{0};
  Rational hi{0};
  Rational magnitude() const;
};

/// Sound enclosure of the values a quantifier-free formula takes over
/// unit-ball assignments in every tracial von Neumann algebra.
Interval value_range(const Formula& f);
/// Lipschitz constant of `fn` on `in`; nullopt when unbounded there.
std::optional<Rational> function_lipschitz(UnaryFunction fn, const Interval& in);

/// Rational L with |f(a)-f(b)| <= L·max_i ||a_i-b_i||_2 over the unit ball.
/// Throws ValidationError for formulas with quantifiers. Returns nullopt
/// when the syntactic rules give no finite bound.
std::optional<Rational> try_lipschitz_bound(const Formula& f);
Rational lipschitz_bound(const Formula& f);

/// Rewrites ReTrace/ImTrace leaves into Norm2 arithmetic:
///   Re tau(p) = (||p+1||^2 - ||p||^2 - 1)/2,  Im tau(p) = Re tau(-i p).
Formula expand_trace_sugar(const Formula& f);
/// Same node kind and payload as `f` with the given children.
Formula rebuild_formula(const Formula& f, const std::vector<Formula>& kids);

/// Quantifier structure of a universal sentence: leading Sup binders
/// flattened, and the quantifier-free body.
struct UniversalForm {
  std::vector<std::string> names;
  Formula body;
};
/// nullopt unless `s` is a chain of Sup nodes over a quantifier-free body
/// (a bare quantifier-free sentence has zero binders).
std::optional<UniversalForm> universal_form(const Sentence& s);

}  // namespace tracial
