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

#include "tracial/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "tracial/errors.hpp"

namespace tracial {

// ---------------------------------------------------------------------------
// FiniteTracialAlgebra
// ---------------------------------------------------------------------------

FiniteTracialAlgebra FiniteTracialAlgebra::make(std::vector<Block> blocks, bool normalize) {
  if (blocks.empty()) throw ValidationError("algebra needs at least one block");
  Rational total = 0;
  for (const auto& b : blocks) {
    if (b.dim == 0) throw ValidationError("block dimension must be positive");
    if (b.weight <= 0) throw ValidationError("block weight " + format_rational(b.weight) + " is not positive");
    total += b.weight;
  }
  if (total != 1) {
    if (!normalize) {
      throw ValidationError("block weights sum to " + format_rational(total) + ", expected 1");
    }
    for (auto& b : blocks) b.weight /= total;
  }
  FiniteTracialAlgebra A;
  A.blocks_ = std::move(blocks);
  for (const auto& b : A.blocks_) A.weights_.push_back(to_double(b.weight));
  return A;
}

FiniteTracialAlgebra FiniteTracialAlgebra::matrix(std::size_t d) {
  return make({Block{d, Rational(1)}});
}

FiniteTracialAlgebra FiniteTracialAlgebra::uniform(std::size_t copies, std::size_t d) {
  if (copies == 0) throw ValidationError("algebra needs at least one block");
  std::vector<Block> blocks(copies, Block{d, Rational(1, static_cast<long long>(copies))});
  return make(std::move(blocks));
}

std::size_t FiniteTracialAlgebra::max_dim() const {
  std::size_t d = 0;
  for (const auto& b : blocks_) d = std::max(d, b.dim);
  return d;
}

std::size_t FiniteTracialAlgebra::linear_dim() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.dim * b.dim;
  return n;
}

Element FiniteTracialAlgebra::zero() const {
  std::vector<Matrix> blocks;
  for (const auto& b : blocks_) blocks.push_back(Matrix::Zero(b.dim, b.dim));
  return Element(std::move(blocks));
}

Element FiniteTracialAlgebra::identity() const {
  std::vector<Matrix> blocks;
  for (const auto& b : blocks_) blocks.push_back(Matrix::Identity(b.dim, b.dim));
  return Element(std::move(blocks));
}

bool FiniteTracialAlgebra::contains(const Element& x) const {
  if (x.block_count() != blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto d = static_cast<Eigen::Index>(blocks_[i].dim);
    if (x.block(i).rows() != d || x.block(i).cols() != d) return false;
  }
  return true;
}

void FiniteTracialAlgebra::require(const Element& x) const {
  if (!contains(x)) throw ValidationError("element shape does not match algebra " + describe());
}

std::string FiniteTracialAlgebra::describe() const {
  std::string out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) out += " + ";
    out += "M" + std::to_string(blocks_[i].dim) + "(" + format_rational(blocks_[i].weight) + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Element
// ---------------------------------------------------------------------------

Element Element::adjoint() const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return Element(std::move(out));
}

bool Element::same_shape(const Element& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != other.blocks_[i].rows() || blocks_[i].cols() != other.blocks_[i].cols()) {
      return false;
    }
  }
  return true;
}

Element& Element::operator+=(const Element& other) {
  if (!same_shape(other)) throw ValidationError("element shape mismatch in addition");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  if (!same_shape(other)) throw ValidationError("element shape mismatch in subtraction");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

Element& Element::operator*=(Complex c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  if (!a.same_shape(b)) throw ValidationError("element shape mismatch in product");
  std::vector<Matrix> out;
  out.reserve(a.block_count());
  for (std::size_t i = 0; i < a.block_count(); ++i) out.push_back(a.block(i) * b.block(i));
  return Element(std::move(out));
}

// ---------------------------------------------------------------------------
// Trace and norms
// ---------------------------------------------------------------------------

Complex trace(const FiniteTracialAlgebra& A, const Element& x) {
  A.require(x);
  Complex total = 0;
  for (std::size_t i = 0; i < A.block_count(); ++i) total += A.trace_factor(i) * x.block(i).trace();
  return total;
}

double two_norm(const FiniteTracialAlgebra& A, const Element& x) {
  A.require(x);
  // tau(x^* x) = sum_i (lambda_i/d_i) ||x_i||_F^2 is real by construction.
  double total = 0;
  for (std::size_t i = 0; i < A.block_count(); ++i) total += A.trace_factor(i) * x.block(i).squaredNorm();
  return std::sqrt(total);
}

double op_norm(const FiniteTracialAlgebra& A, const Element& x) {
  A.require(x);
  double best = 0;
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    const Matrix& b = x.block(i);
    if (b.rows() == 1) {
      best = std::max(best, std::abs(b(0, 0)));
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(b);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

double two_distance(const FiniteTracialAlgebra& A, const Element& x, const Element& y) {
  return two_norm(A, x - y);
}

Element project_to_unit_ball(const FiniteTracialAlgebra& A, const Element& x) {
  A.require(x);
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    const Matrix& b = x.block(i);
    if (b.rows() == 1) {
      const double r = std::abs(b(0, 0));
      out.push_back(r > 1 ? Matrix(b / r) : b);
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(0) <= 1.0) {
      out.push_back(b);
      continue;
    }
    Eigen::VectorXd clipped = s.cwiseMin(1.0);
    out.push_back(svd.matrixU() * clipped.asDiagonal() * svd.matrixV().adjoint());
  }
  return Element(std::move(out));
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Element eval_term(const Term& t, const FiniteTracialAlgebra& A, std::span<const Element> assignment) {
  switch (t.kind()) {
    case TermKind::Variable:
      if (t.level() >= assignment.size()) {
        throw ValidationError("variable x" + std::to_string(t.level()) + " is unassigned");
      }
      A.require(assignment[t.level()]);
      return assignment[t.level()];
    case TermKind::One:
      return A.identity();
    case TermKind::Adjoint:
      return eval_term(t.operand(), A, assignment).adjoint();
    case TermKind::Scalar: {
      const Complex c(to_double(t.coefficient().re), to_double(t.coefficient().im));
      return c * eval_term(t.operand(), A, assignment);
    }
    case TermKind::Sum:
      return eval_term(t.lhs(), A, assignment) + eval_term(t.rhs(), A, assignment);
    case TermKind::Difference:
      return eval_term(t.lhs(), A, assignment) - eval_term(t.rhs(), A, assignment);
    case TermKind::Product:
      return eval_term(t.lhs(), A, assignment) * eval_term(t.rhs(), A, assignment);
  }
  throw std::logic_error("eval_term: unhandled term kind");
}

namespace {

class FormulaEvaluator {
 public:
  FormulaEvaluator(const FiniteTracialAlgebra& A, std::span<const Element> assignment)
      : A_(A), assignment_(assignment) {}

  // Shared subformulas are evaluated once.
  double operator()(const Formula& f) {
    if (auto it = cache_.find(f.identity()); it != cache_.end()) return it->second;
    const double v = compute(f);
    cache_.emplace(f.identity(), v);
    return v;
  }

 private:
  double compute(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::Norm2:
        return two_norm(A_, eval_term(f.term(), A_, assignment_));
      case FormulaKind::ReTrace:
        return trace(A_, eval_term(f.term(), A_, assignment_)).real();
      case FormulaKind::ImTrace:
        return trace(A_, eval_term(f.term(), A_, assignment_)).imag();
      case FormulaKind::Const:
        return to_double(f.scalar());
      case FormulaKind::Scale:
        return to_double(f.scalar()) * (*this)(f.operand());
      case FormulaKind::Apply:
        return apply_function(f.function(), (*this)(f.operand()));
      case FormulaKind::Sup:
      case FormulaKind::Inf:
        throw ValidationError("eval_formula requires a quantifier-free formula");
      default:
        break;
    }
    const double a = (*this)(f.lhs());
    const double b = (*this)(f.rhs());
    switch (f.kind()) {
      case FormulaKind::Max: return std::max(a, b);
      case FormulaKind::Min: return std::min(a, b);
      case FormulaKind::Plus: return a + b;
      case FormulaKind::Times: return a * b;
      case FormulaKind::TruncSub: return std::max(a - b, 0.0);
      default: throw std::logic_error("eval_formula: unhandled formula kind");
    }
  }

  const FiniteTracialAlgebra& A_;
  std::span<const Element> assignment_;
  std::unordered_map<const void*, double> cache_;
};

}  // namespace

double eval_formula(const Formula& f, const FiniteTracialAlgebra& A, std::span<const Element> assignment,
                    const EvalOptions& options) {
  if (!f.is_quantifier_free()) throw ValidationError("eval_formula requires a quantifier-free formula");
  const std::size_t arity = free_arity(f);
  if (arity > assignment.size()) {
    throw ValidationError("variable x" + std::to_string(arity - 1) + " is unassigned");
  }
  if (options.check_unit_ball) {
    for (std::size_t k = 0; k < arity; ++k) {
      A.require(assignment[k]);
      const double r = op_norm(A, assignment[k]);
      if (r > 1.0 + options.unit_ball_tolerance) {
        throw ValidationError("assignment to x" + std::to_string(k) + " has operator norm " +
                              std::to_string(r) + " outside the unit ball");
      }
    }
  }
  return FormulaEvaluator(A, assignment)(f);
}

// ---------------------------------------------------------------------------
// Presentations
// ---------------------------------------------------------------------------

namespace {

// Flattens an element into a coordinate vector of length sum d_i^2.
Eigen::VectorXcd flatten(const Element& x) {
  Eigen::Index total = 0;
  for (const auto& b : x.blocks()) total += b.size();
  Eigen::VectorXcd v(total);
  Eigen::Index at = 0;
  for (const auto& b : x.blocks()) {
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index r = 0; r < b.rows(); ++r) v(at++) = b(r, c);
    }
  }
  return v;
}

// Incremental Gram-Schmidt basis with re-orthogonalization.
class SpanBuilder {
 public:
  bool try_add(Eigen::VectorXcd v) {
    const double scale = v.norm();
    if (scale == 0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) v -= q * q.dot(v);
    }
    const double r = v.norm();
    if (r <= 1e-9 * std::max(scale, 1.0)) return false;
    basis_.push_back(v / r);
    return true;
  }
  std::size_t rank() const { return basis_.size(); }

 private:
  std::vector<Eigen::VectorXcd> basis_;
};

}  // namespace

Presentation::Presentation(FiniteTracialAlgebra algebra, std::vector<Element> special_points,
                           PresentationOptions options)
    : algebra_(std::move(algebra)), points_(std::move(special_points)), options_(options) {
  for (const auto& p : points_) algebra_.require(p);
  std::vector<Element> letters;
  for (const auto& p : points_) {
    letters.push_back(p);
    letters.push_back(p.adjoint());
  }
  SpanBuilder span;
  std::vector<Element> frontier;
  Element unit = algebra_.identity();
  span.try_add(flatten(unit));
  frontier.push_back(unit);
  const std::size_t target = algebra_.linear_dim();
  for (std::size_t degree = 1; degree <= options_.density_degree && !frontier.empty() && span.rank() < target;
       ++degree) {
    std::vector<Element> next;
    for (const auto& w : frontier) {
      for (const auto& l : letters) {
        Element candidate = l * w;
        if (span.try_add(flatten(candidate))) next.push_back(std::move(candidate));
        if (span.rank() == target) break;
      }
      if (span.rank() == target) break;
    }
    frontier = std::move(next);
  }
  rank_ = span.rank();
  if (rank_ < target) {
    throw ValidationError("special points generate a subspace of dimension " + std::to_string(rank_) +
                          " < " + std::to_string(target) + "; the presentation is not dense");
  }
}

Rational presentation_norm(const Presentation& P, const Term& p, unsigned k) {
  if (k > kMaxPresentationBits) {
    throw ValidationError("requested precision 2^-" + std::to_string(k) + " exceeds working precision (k <= " +
                          std::to_string(kMaxPresentationBits) + ")");
  }
  if (p.arity() > P.special_points().size()) {
    throw ValidationError("generated point references special point a" + std::to_string(p.arity() - 1) +
                          " but only " + std::to_string(P.special_points().size()) + " are declared");
  }
  const Polynomial poly = expand_polynomial(p);
  std::size_t degree = 0;
  for (const auto& [w, c] : poly) degree = std::max(degree, w.size());
  if (degree > P.options().degree_cap) {
    throw ValidationError("generated point has degree " + std::to_string(degree) + " above the cap " +
                          std::to_string(P.options().degree_cap));
  }
  const double value = two_norm(P.algebra(), eval_term(p, P.algebra(), P.special_points()));

  // Floating-point error of the evaluation grows with the size of the
  // entries; bound it crudely by the operator norms of the special points.
  double spread = 1.0;
  for (const auto& a : P.special_points()) spread = std::max(spread, op_norm(P.algebra(), a));
  const double mass = to_double(coefficient_mass(poly)) * std::pow(spread, static_cast<double>(degree));
  const double eval_error = 64.0 * std::numeric_limits<double>::epsilon() *
                            static_cast<double>(degree + P.algebra().max_dim() + 1) * std::max(mass, 1.0);
  const double budget = std::ldexp(1.0, -static_cast<int>(k));
  if (eval_error >= budget / 2) {
    throw NumericalError("generated point too large to certify 2^-" + std::to_string(k) +
                         " accuracy at working precision");
  }
  return rational_round(value, k + 2);
}

}  // namespace tracial
