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

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tracial/algebra.hpp"
#include "tracial/sampling.hpp"

namespace tracial {

/// Defect threshold below which a tuple counts as an exact PVM tuple.
inline constexpr double kExactTolerance = 1e-9;

/// n·m operators e_x^a stored question-major (index x·m + a). No algebraic
/// constraints are implied.
class OperatorTuple {
 public:
  OperatorTuple(std::size_t questions, std::size_t answers, std::vector<Element> ops);

  std::size_t questions() const { return questions_; }
  std::size_t answers() const { return answers_; }
  const Element& at(std::size_t x, std::size_t a) const { return ops_[x * answers_ + a]; }
  Element& at(std::size_t x, std::size_t a) { return ops_[x * answers_ + a]; }
  std::span<const Element> row(std::size_t x) const {
    return std::span<const Element>(ops_).subspan(x * answers_, answers_);
  }
  std::span<const Element> elements() const { return ops_; }

 private:
  std::size_t questions_;
  std::size_t answers_;
  std::vector<Element> ops_;
};

struct DefectBreakdown {
  double self_adjoint = 0;
  double idempotent = 0;
  double partition = 0;
  double max() const { return std::max(self_adjoint, std::max(idempotent, partition)); }
};

/// The three PVM defect families in 2-norm: max_{x,a} ||e - e*||,
/// max_{x,a} ||e^2 - e||, max_x ||sum_a e_x^a - 1||.
DefectBreakdown pvm_defect_breakdown(const FiniteTracialAlgebra& A, const OperatorTuple& E);
double pvm_defect(const FiniteTracialAlgebra& A, const OperatorTuple& E);
double row_defect(const FiniteTracialAlgebra& A, std::span<const Element> row);

/// An OperatorTuple whose defect has been checked against kExactTolerance.
class PvmTuple {
 public:
  /// Throws ValidationError if the defect exceeds `tolerance`.
  static PvmTuple verify(const FiniteTracialAlgebra& A, OperatorTuple E, double tolerance = kExactTolerance);

  const OperatorTuple& operators() const { return ops_; }
  std::size_t questions() const { return ops_.questions(); }
  std::size_t answers() const { return ops_.answers(); }
  const Element& at(std::size_t x, std::size_t a) const { return ops_.at(x, a); }
  double defect() const { return defect_; }

 private:
  PvmTuple(OperatorTuple ops, double defect) : ops_(std::move(ops)), defect_(defect) {}
  OperatorTuple ops_;
  double defect_;
};

/// e_x^{f(x)} = 1, all other entries 0.
PvmTuple deterministic_pvm(const FiniteTracialAlgebra& A, std::size_t answers, std::span<const std::size_t> f);
/// Each row diagonalised in a Haar-random basis per block, with each basis
/// vector assigned a uniformly random answer.
PvmTuple random_pvm(const FiniteTracialAlgebra& A, std::size_t questions, std::size_t answers, Rng& rng);

/// omega = exp(2 pi i · power / order), required primitive.
struct RootOfUnity {
  unsigned order = 2;
  unsigned power = 1;

  static RootOfUnity primitive(unsigned m) { return {m, 1}; }
  Complex value() const;
  /// omega^k.
  Complex pow(long long k) const;
};

/// max(||v^*v - 1||, ||vv^* - 1||, ||v^m - 1||) in operator norm.
double order_defect(const FiniteTracialAlgebra& A, const Element& v, unsigned m);

class OrderMUnitary {
 public:
  /// Throws NumericalError unless ||u^*u-1||, ||uu^*-1||, ||u^m-1|| <= tolerance.
  static OrderMUnitary verify(const FiniteTracialAlgebra& A, Element u, unsigned order,
                              double tolerance = kExactTolerance);

  const Element& element() const { return u_; }
  unsigned order() const { return order_; }

 private:
  OrderMUnitary(Element u, unsigned order) : u_(std::move(u)), order_(order) {}
  Element u_;
  unsigned order_;
};

/// u = sum_a omega^a e^a. Throws ValidationError if the row is not exact.
OrderMUnitary pvm_to_unitary(const FiniteTracialAlgebra& A, std::span<const Element> row, RootOfUnity omega);
/// e^a = (1/m) sum_c omega^{-ac} u^c.
std::vector<Element> unitary_to_pvm(const FiniteTracialAlgebra& A, const OrderMUnitary& u, RootOfUnity omega);

struct UnitaryRounding {
  OrderMUnitary unitary;
  double epsilon;   ///< order defect of the input
  double distance;  ///< ||u - v|| in operator norm
};

/// Rounds an approximate order-m unitary: polar part v(vv^*)^{-1/2}, then
/// each eigenvalue moved to the nearest m-th root of unity (ties to the root
/// with smaller argument in [0, 2pi)). Guarantees ||u - v|| <= 2^{m+2}·eps.
/// Throws ValidationError when eps >= 2^-m.
UnitaryRounding round_to_order_m_unitary(const FiniteTracialAlgebra& A, const Element& v, unsigned m);

enum class RoundingRoute { Unchanged, Unitary, EigenspaceFallback };

struct PvmRounding {
  PvmTuple tuple;
  /// max_{x,a} ||e_x^a - rounded||_2.
  double distance;
  std::vector<RoundingRoute> routes;
};

/// Rounds each row to an exact PVM through its Fourier unitary when the
/// order defect permits, otherwise by whitening sum_a e_x^a and assigning
/// eigenvectors by Rayleigh quotient. Rows that are already exact are left
/// untouched. Throws NumericalError when sum_a e_x^a is not positive definite
/// on the fallback route.
PvmRounding round_to_pvm(const FiniteTracialAlgebra& A, const OperatorTuple& E);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ModulusExperiment {
  std::size_t questions = 2;
  std::size_t answers = 2;
  std::vector<std::size_t> dims;
  std::vector<double> epsilons;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ModulusRow {
  double epsilon;
  double delta_hat;
};

struct ModulusTable {
  std::vector<ModulusRow> rows;
  std::size_t questions = 0;
  std::size_t answers = 0;
  std::vector<std::size_t> dims;
  std::size_t trials = 0;
  std::size_t max_dim = 0;
  std::uint64_t seed = 0;
  /// Samples on which rounding failed (counted as infinitely far).
  std::size_t rounding_failures = 0;
};

/// Samples perturbed exact PVM tuples and, for each epsilon, records the
/// largest defect among samples whose rounded distance stayed <= epsilon,
/// then takes the running maximum over increasing epsilon. Reproducible
/// from `seed` for any thread count.
ModulusTable estimate_modulus(const ModulusExperiment& experiment);
/// Columns: epsilon,delta_hat,trials,max_dim,seed.
std::string modulus_csv(const ModulusTable& table);

struct StabilityExperiment {
  unsigned order = 2;
  std::vector<std::size_t> dims;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct StabilityTrial {
  std::size_t index;
  unsigned order;
  std::size_t dim;
  double epsilon;
  double distance;
  double bound;
  double ratio;
  double order_defect;
};

/// Perturbs random order-m unitaries in M_d to admissible epsilon and rounds
/// them back.
std::vector<StabilityTrial> run_stability_trials(const StabilityExperiment& experiment);
/// Columns: trial,m,dim,epsilon,distance,bound,ratio,order_defect.
std::string stability_csv(std::span<const StabilityTrial> trials);

/// Haar-conjugated diagonal of random m-th roots of unity, per block.
Element random_order_m_unitary(const FiniteTracialAlgebra& A, unsigned m, Rng& rng);

}  // namespace tracial
