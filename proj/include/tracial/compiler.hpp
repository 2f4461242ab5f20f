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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracial/games.hpp"
#include "tracial/logic.hpp"
#include "tracial/rational.hpp"

namespace tracial {

/// Nondecreasing piecewise-linear Delta with Delta(0) = 0, given by
/// breakpoints (t_k, Delta(t_k)) with t_0 = 0 < t_1 < ...; extended past the
/// last breakpoint with the slope of the final segment.
class PenaltyModulus {
 public:
  /// Throws ValidationError unless t_0 = 0, Delta(0) = 0, t strictly
  /// increasing, values nondecreasing, and at least two breakpoints.
  static PenaltyModulus from_breakpoints(std::vector<std::pair<Rational, Rational>> points);
  /// Delta(t) = C·t, C >= 0.
  static PenaltyModulus linear(Rational c);

  std::span<const std::pair<Rational, Rational>> breakpoints() const { return points_; }
  /// Slope on [t_k, t_{k+1}] (the last one continues to infinity).
  std::vector<Rational> slopes() const;
  Rational operator()(const Rational& t) const;
  double operator()(double t) const;
  bool vanishes() const;
  /// "linear 100" or "0:0 1/10:1 1:5".
  std::string describe() const;
  /// Inverse of describe().
  static PenaltyModulus parse(std::string_view text);

 private:
  std::vector<std::pair<Rational, Rational>> points_;
};

inline constexpr long long kDefaultPenaltySlope = 100;

/// Variable level of e_x^a.
inline std::size_t pvm_variable(std::size_t x, std::size_t a, std::size_t answers) { return x * answers + a; }

/// Max over ||e - e*||_2, ||e^2 - e||_2 and ||sum_a e_x^a - 1||_2 leaves in
/// n·m free variables. Requires n, m >= 2.
Formula compile_defect_formula(std::size_t n, std::size_t m);
/// sum over (x, y) of mu(x,y)·Re tau(sum_{D(a,b|x,y)=1} e_x^a e_y^b), or
/// Const 0 when no term survives.
Formula compile_payoff_formula(const SyncGame& game);
/// Delta applied to a formula as hinges Scale(s_k - s_{k-1}, f -. t_k).
Formula apply_penalty(const PenaltyModulus& delta, const Formula& f);
/// min(psi, psi -. Delta(phi)) in n·m free variables.
Formula compile_penalized_body(const SyncGame& game, const PenaltyModulus& delta);

struct CompiledSentence {
  Sentence sentence;
  std::size_t questions = 0;
  std::size_t answers = 0;
  std::string game_hash;
  std::string penalty;
  Rational lipschitz_psi;
  Rational lipschitz_body;
  /// Extra header lines, e.g. the constructor label of the TM pipeline.
  std::vector<std::pair<std::string, std::string>> extra;
};

CompiledSentence compile_game(const SyncGame& game, const PenaltyModulus& delta);
/// sup over the n·m-tuple of the penalized body.
Sentence compile_game_sentence(const SyncGame& game, const PenaltyModulus& delta);

struct RestrictedSentence {
  Sentence sentence;
  /// Worst-case |value(result) - value(input)| over all models, <= eta.
  Rational budget;
};

/// Replaces every non-family connective by a clamped piecewise-linear
/// interpolant on its operand's value range. Already-restricted universal
/// sentences come back unchanged with budget 0. Throws ValidationError when
/// the sentence is not universal, eta <= 0, or the body has no finite
/// Lipschitz bound.
RestrictedSentence restrict_sentence(const Sentence& sentence, const Rational& eta);

// ---------------------------------------------------------------------------
// Turing machine pipeline
// ---------------------------------------------------------------------------

struct Transition {
  std::string state;
  std::string read;
  std::string write;
  char move = 'R';
  std::string next;
};

/// Single tape, one-way infinite.
struct TuringMachineDescription {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::string blank;
  std::vector<Transition> transitions;
  std::string start;
  std::string accept;
};

/// Requires unique non-empty names, blank in the alphabet, start and accept
/// among the states, moves in {L, R}, and exactly one transition for each
/// (state, symbol) with state != accept, none out of accept.
void validate_tm(const TuringMachineDescription& tm);
std::string canonical_tm_text(const TuringMachineDescription& tm);

using GameConstructor = std::function<RawGame(const TuringMachineDescription&)>;

/// Maps every machine to the triangle game. Non-normative stand-in.
GameConstructor demo_constructor();
inline constexpr const char* kDemoConstructorLabel = "demo (non-normative)";

/// Validates M, applies the constructor, validates its output, and compiles
/// the game. Never simulates M.
CompiledSentence compile_tm(const TuringMachineDescription& tm, const GameConstructor& ctor,
                            const PenaltyModulus& delta, const std::string& ctor_label);
Sentence compile_tm_sentence(const TuringMachineDescription& tm, const GameConstructor& ctor,
                             const PenaltyModulus& delta);

// ---------------------------------------------------------------------------
// Sentence files
// ---------------------------------------------------------------------------

inline constexpr const char* kSentenceFormat = "tracial-sentence 1";

/// Header comment lines "; key value" followed by the printed sentence.
std::string emit_sentence_file(const CompiledSentence& compiled);

struct SentenceFile {
  Sentence sentence;
  std::map<std::string, std::string> metadata;
  /// From the "pvm-shape n m" header, when present.
  std::optional<std::pair<std::size_t, std::size_t>> pvm_shape;
};

/// Parses header metadata and the sentence; `const_bound` bounds Const literals.
SentenceFile read_sentence_file(std::string_view text, const Rational& const_bound = Rational(1));

}  // namespace tracial
