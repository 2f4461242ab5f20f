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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tracial/algebra.hpp"
#include "tracial/games.hpp"
#include "tracial/logic.hpp"
#include "tracial/pvm.hpp"

namespace tracial {

struct OptimizerConfig {
  std::size_t restarts = 32;
  /// Ascent iterations, or see-saw sweeps, per restart.
  std::size_t max_iterations = 500;
  /// Relative improvement below which a restart stops.
  double tolerance = 1e-8;
  /// Initial ascent step in 2-norm; grows by 3/2 on success, halves on failure.
  double initial_step = 0.25;
  double min_step = 1e-12;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Throws ValidationError on restarts < 1, max_iterations < 1 or
  /// tolerance <= 0.
  void validate() const;
};

struct RestartTrace {
  std::size_t index = 0;
  /// Block dimension the restart ran in (see-saw), or 0 for the whole algebra.
  std::size_t dim = 0;
  double best = 0;
  std::size_t iterations = 0;
  /// Objective after each accepted sweep (see-saw only).
  std::vector<double> sweeps;
};

/// A finite-model lower bound. The supremum over all tracial von Neumann
/// algebras is not bounded from above by anything reported here.
struct ValueCertificate {
  double value = 0;
  std::vector<Element> witness;
  FiniteTracialAlgebra algebra = FiniteTracialAlgebra::matrix(1);
  std::vector<RestartTrace> restarts;
  OptimizerConfig config;
  /// True when the witness is an exact PVM tuple.
  bool exact_pvm = false;
  std::size_t questions = 0;
  std::size_t answers = 0;
  double wall_clock_ms = 0;
};

struct PvmShape {
  std::size_t questions;
  std::size_t answers;
};

/// sup over unit-ball tuples of a quantifier-free body, by projected ascent
/// from random restarts. With a PVM shape, restarts start from random exact
/// PVM tuples and first run a linearised PVM see-saw on the body. Throws
/// ValidationError for nested or inf quantifiers, free variables, or a shape
/// that does not match the binder count.
ValueCertificate maximize_sentence(const Sentence& sentence, const FiniteTracialAlgebra& A,
                                   const OptimizerConfig& config, std::optional<PvmShape> shape = std::nullopt);

/// Block-coordinate see-saw over exact PVM tuples. Each distinct block
/// dimension is solved separately (seeded also by direct sums of smaller
/// solutions) and the best per-dimension tuples are placed blockwise.
ValueCertificate seesaw_game_value(const SyncGame& game, const FiniteTracialAlgebra& A,
                                   const OptimizerConfig& config);

struct CertifyReport {
  double claimed = 0;
  double primary = 0;    ///< psi_value or eval_formula
  double secondary = 0;  ///< compiled psi formula or the ascent evaluator
  double correlation = 0;
  double defect = 0;
  double gap = 0;
  bool defect_ok = true;
  bool passed = false;
  std::string message;
};

inline constexpr double kCertifyTolerance = 1e-8;

/// Re-evaluates a game witness through psi_value, the compiled psi formula
/// and the induced correlation. Fails on PVM defect above 1e-9 or gap above
/// 1e-8. Throws ValidationError on a malformed witness.
CertifyReport certify(const SyncGame& game, const FiniteTracialAlgebra& A, std::span<const Element> witness,
                      double claimed);
/// Re-evaluates a sentence witness through eval_formula and the optimizer's
/// own evaluator.
CertifyReport certify(const Sentence& sentence, const FiniteTracialAlgebra& A, std::span<const Element> witness,
                      double claimed);

/// Evaluates and differentiates a quantifier-free body. The gradient is with
/// respect to the real inner product Re tau(a* b), with subgradients taken
/// on the active branch (first child on ties) and 0 at vanishing norms.
class BodyEvaluator {
 public:
  BodyEvaluator(const Formula& body, std::size_t variables);
  ~BodyEvaluator();
  BodyEvaluator(BodyEvaluator&&) noexcept;
  BodyEvaluator& operator=(BodyEvaluator&&) noexcept;

  std::size_t variables() const;
  double value(const FiniteTracialAlgebra& A, std::span<const Element> x) const;
  double value_and_gradient(const FiniteTracialAlgebra& A, std::span<const Element> x,
                            std::vector<Element>& gradient) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tracial
