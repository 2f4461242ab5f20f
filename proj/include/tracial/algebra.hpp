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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tracial/logic.hpp"
#include "tracial/rational.hpp"

namespace tracial {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class Element;

/// One full matrix summand M_d with trace weight lambda.
struct Block {
  std::size_t dim = 1;
  Rational weight{1};
};

/// Direct sum of full matrix algebras with trace
///   tau(x) = sum_i lambda_i · tr(x_i) / d_i,  sum_i lambda_i = 1.
class FiniteTracialAlgebra {
 public:
  /// Throws ValidationError for empty block lists, non-positive dimensions or
  /// weights, and (unless `normalize`) weights not summing to exactly 1.
  static FiniteTracialAlgebra make(std::vector<Block> blocks, bool normalize = false);
  /// The full matrix algebra M_d with its normalized trace.
  static FiniteTracialAlgebra matrix(std::size_t d);
  /// k copies of M_d with uniform weights.
  static FiniteTracialAlgebra uniform(std::size_t copies, std::size_t d = 1);

  std::span<const Block> blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t dim(std::size_t i) const { return blocks_[i].dim; }
  /// lambda_i as a double.
  double weight(std::size_t i) const { return weights_[i]; }
  /// lambda_i / d_i: the coefficient turning the matrix trace of block i into
  /// its contribution to tau.
  double trace_factor(std::size_t i) const { return weights_[i] / static_cast<double>(blocks_[i].dim); }
  std::size_t max_dim() const;
  /// Complex dimension of the algebra, sum_i d_i^2.
  std::size_t linear_dim() const;

  Element zero() const;
  Element identity() const;
  bool contains(const Element& x) const;
  /// Throws ValidationError on a block-shape mismatch.
  void require(const Element& x) const;

  /// "M2(1/2) + M3(1/2)" style description.
  std::string describe() const;

  friend bool operator==(const FiniteTracialAlgebra& a, const FiniteTracialAlgebra& b) {
    if (a.blocks_.size() != b.blocks_.size()) return false;
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) {
      if (a.blocks_[i].dim != b.blocks_[i].dim || a.blocks_[i].weight != b.blocks_[i].weight) return false;
    }
    return true;
  }

 private:
  std::vector<Block> blocks_;
  std::vector<double> weights_;
};

/// Block-diagonal element: one dense complex matrix per summand.
class Element {
 public:
  Element() = default;
  explicit Element(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {}

  std::span<const Matrix> blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }
  Matrix& block(std::size_t i) { return blocks_[i]; }

  Element adjoint() const;
  bool same_shape(const Element& other) const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Complex c);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Complex c, Element a) { return a *= c; }
  friend Element operator*(const Element& a, const Element& b);

 private:
  std::vector<Matrix> blocks_;
};

Complex trace(const FiniteTracialAlgebra& A, const Element& x);
/// ||x||_2 = sqrt(Re tau(x^* x)).
double two_norm(const FiniteTracialAlgebra& A, const Element& x);
/// Largest singular value over all blocks.
double op_norm(const FiniteTracialAlgebra& A, const Element& x);
/// max(||x - y||_2) shorthand.
double two_distance(const FiniteTracialAlgebra& A, const Element& x, const Element& y);

/// Clips singular values above 1, blockwise.
Element project_to_unit_ball(const FiniteTracialAlgebra& A, const Element& x);

/// Evaluates a *-polynomial with variable level k bound to assignment[k].
Element eval_term(const Term& t, const FiniteTracialAlgebra& A, std::span<const Element> assignment);

struct EvalOptions {
  /// Elements with operator norm above 1 + tolerance are rejected.
  double unit_ball_tolerance = 1e-9;
  bool check_unit_ball = true;
};

/// Value of a quantifier-free formula at an assignment of its free variables.
/// Throws ValidationError for quantifiers, unassigned variables and unit-ball
/// violations.
double eval_formula(const Formula& f, const FiniteTracialAlgebra& A,
                    std::span<const Element> assignment, const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// Presentations
// ---------------------------------------------------------------------------

struct PresentationOptions {
  /// Words in the special points and their adjoints up to this length are
  /// used for the density (rank) test.
  std::size_t density_degree = 8;
  /// Generated points whose expanded degree exceeds this are rejected.
  std::size_t degree_cap = 32;
};

/// A finite-dimensional algebra with a distinguished sequence of special
/// points whose generated *-algebra is the whole algebra.
class Presentation {
 public:
  /// Throws ValidationError when the special points do not generate A.
  Presentation(FiniteTracialAlgebra algebra, std::vector<Element> special_points,
               PresentationOptions options = {});

  const FiniteTracialAlgebra& algebra() const { return algebra_; }
  std::span<const Element> special_points() const { return points_; }
  const PresentationOptions& options() const { return options_; }
  /// Dimension of the span of words reached by the density test.
  std::size_t generated_rank() const { return rank_; }

 private:
  FiniteTracialAlgebra algebra_;
  std::vector<Element> points_;
  PresentationOptions options_;
  std::size_t rank_ = 0;
};

/// Rational q with | ||p||_2 - q | < 2^-k, where the term's variable level
/// j names special point a_j. Throws ValidationError for out-of-range
/// indices, degree above the cap, or k beyond the resolution of working
/// precision.
Rational presentation_norm(const Presentation& P, const Term& p, unsigned k);

/// Largest k accepted by presentation_norm.
inline constexpr unsigned kMaxPresentationBits = 40;

}  // namespace tracial
