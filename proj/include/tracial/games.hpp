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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tracial/algebra.hpp"
#include "tracial/pvm.hpp"
#include "tracial/rational.hpp"

namespace tracial {

/// Unvalidated game description. `accept` lists [a, b, x, y] quadruples with
/// D = 1; `decider`, when present, is a dense table indexed
/// ((x·n + y)·m + a)·m + b and takes precedence over `accept`.
struct RawGame {
  long long n = 0;
  long long m = 0;
  std::vector<std::tuple<long long, long long, Rational>> mu;
  std::vector<std::array<long long, 4>> accept;
  std::optional<std::vector<long long>> decider;
};

class SyncGame {
 public:
  std::size_t questions() const { return n_; }
  std::size_t answers() const { return m_; }
  const Rational& mu(std::size_t x, std::size_t y) const { return mu_[x * n_ + y]; }
  double mu_value(std::size_t x, std::size_t y) const { return mu_double_[x * n_ + y]; }
  bool accepts(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
    return decider_[((x * n_ + y) * m_ + a) * m_ + b] != 0;
  }
  /// Canonical text used for hashing.
  std::string canonical_text() const;
  std::string hash() const;

  friend bool operator==(const SyncGame&, const SyncGame&) = default;

 private:
  friend SyncGame validate_game(const RawGame& raw);
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<Rational> mu_;
  std::vector<double> mu_double_;
  std::vector<std::uint8_t> decider_;
};

/// Throws ValidationError on empty Q or A, out-of-range indices, negative or
/// duplicated mu entries, a mu sum other than 1, or decider values outside {0,1}.
SyncGame validate_game(const RawGame& raw);
RawGame to_raw(const SyncGame& game);

/// p(a,b|x,y), stored at ((x·n + y)·m + a)·m + b.
class Correlation {
 public:
  Correlation(std::size_t questions, std::size_t answers);
  Correlation(std::size_t questions, std::size_t answers, std::vector<double> values);

  std::size_t questions() const { return n_; }
  std::size_t answers() const { return m_; }
  double operator()(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
    return p_[((x * n_ + y) * m_ + a) * m_ + b];
  }
  double& operator()(std::size_t a, std::size_t b, std::size_t x, std::size_t y) {
    return p_[((x * n_ + y) * m_ + a) * m_ + b];
  }
  std::span<const double> values() const { return p_; }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> p_;
};

/// p(a,b|x,y) = Re tau(e_x^a e_y^b). Throws NumericalError if an imaginary
/// part exceeds 1e-9; ValidationError on shape mismatch.
Correlation strategy_from_pvm(const SyncGame& game, const PvmTuple& E, const FiniteTracialAlgebra& A);
double game_value_of_correlation(const SyncGame& game, const Correlation& p);

struct ClassicalValue {
  Rational value;
  std::vector<std::size_t> assignment;
};

inline constexpr std::uint64_t kDefaultClassicalCap = 10'000'000;

/// Exact maximum of sum mu(x,y) D(f(x),f(y)|x,y) over f: Q -> A; ties go to
/// the lexicographically smallest f. Throws ValidationError when m^n > cap.
ClassicalValue classical_sync_value(const SyncGame& game, std::uint64_t cap = kDefaultClassicalCap,
                                    unsigned threads = 1);
/// m^n, saturating at UINT64_MAX.
std::uint64_t assignment_count(const SyncGame& game);

/// sum mu(x,y) D(a,b|x,y) Re tau(e_x^a e_y^b), computed directly with
/// compensated summation.
double psi_value(const SyncGame& game, const PvmTuple& E, const FiniteTracialAlgebra& A);
/// Same sum on an arbitrary operator tuple (no exactness requirement).
double psi_value_raw(const SyncGame& game, const OperatorTuple& E, const FiniteTracialAlgebra& A);

// ---------------------------------------------------------------------------
// Benchmark games
// ---------------------------------------------------------------------------

/// Synchronous graph colouring: mu uniform on the diagonal pairs and both
/// orientations of every edge when `uniform_all` is false, uniform on all
/// n^2 pairs otherwise. D requires equal colours on x = y, distinct colours
/// on edges, and accepts everything on non-edges.
SyncGame coloring_game(std::size_t vertices, std::size_t colors,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges, bool uniform_all);
/// Triangle 2-colouring with mu uniform on all 9 pairs; classical value 7/9.
SyncGame triangle_game();
/// D identically 1, mu uniform.
SyncGame all_accept_game(std::size_t n, std::size_t m);
/// Uniform random mu over a small denominator and a random synchronous D
/// (D(a,b|x,x) = [a = b]); off-diagonal entries accepted with probability 1/2.
SyncGame random_sync_game(std::size_t n, std::size_t m, std::uint64_t seed);

struct NamedGame {
  std::string name;
  SyncGame game;
};

/// Ten games with 2 <= n, m <= 4 used by the property suites.
std::vector<NamedGame> benchmark_corpus();

}  // namespace tracial
