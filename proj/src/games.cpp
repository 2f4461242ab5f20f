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

#include "tracial/games.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "tracial/errors.hpp"
#include "tracial/format.hpp"
#include "tracial/parallel.hpp"
#include "tracial/sampling.hpp"

namespace tracial {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

std::size_t checked_index(long long v, std::size_t bound, const char* what) {
  if (v < 0 || static_cast<unsigned long long>(v) >= bound) {
    throw ValidationError(std::string(what) + " index " + std::to_string(v) + " out of range [0, " +
                          std::to_string(bound) + ")");
  }
  return static_cast<std::size_t>(v);
}

// Re tau(X Y) blockwise.
double re_trace_product(const FiniteTracialAlgebra& A, const Element& X, const Element& Y) {
  double total = 0;
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    total += A.trace_factor(i) * X.block(i).cwiseProduct(Y.block(i).transpose()).sum().real();
  }
  return total;
}

void require_shape(const SyncGame& game, const OperatorTuple& E, const FiniteTracialAlgebra& A) {
  if (E.questions() != game.questions() || E.answers() != game.answers()) {
    throw ValidationError("tuple shape (" + std::to_string(E.questions()) + ", " + std::to_string(E.answers()) +
                          ") does not match game (" + std::to_string(game.questions()) + ", " +
                          std::to_string(game.answers()) + ")");
  }
  for (const auto& e : E.elements()) A.require(e);
}

}  // namespace

SyncGame validate_game(const RawGame& raw) {
  if (raw.n < 1) throw ValidationError("question set must be non-empty");
  if (raw.m < 1) throw ValidationError("answer set must be non-empty");
  const auto n = static_cast<std::size_t>(raw.n);
  const auto m = static_cast<std::size_t>(raw.m);
  if (n > 4096 || m > 4096) throw ValidationError("game too large");
  SyncGame g;
  g.n_ = n;
  g.m_ = m;
  g.mu_.assign(n * n, Rational(0));
  std::vector<bool> seen(n * n, false);
  Rational total(0);
  for (const auto& [x, y, p] : raw.mu) {
    const std::size_t xi = checked_index(x, n, "question");
    const std::size_t yi = checked_index(y, n, "question");
    if (p < 0) throw ValidationError("negative probability mu(" + std::to_string(x) + "," + std::to_string(y) + ")");
    if (seen[xi * n + yi]) {
      throw ValidationError("duplicate mu entry (" + std::to_string(x) + "," + std::to_string(y) + ")");
    }
    seen[xi * n + yi] = true;
    g.mu_[xi * n + yi] = p;
    total += p;
  }
  if (total != 1) throw ValidationError("mu sums to " + format_rational(total) + ", expected 1");
  for (const auto& p : g.mu_) g.mu_double_.push_back(to_double(p));

  g.decider_.assign(n * n * m * m, 0);
  if (raw.decider) {
    if (raw.decider->size() != g.decider_.size()) {
      throw ValidationError("decider table has " + std::to_string(raw.decider->size()) + " entries, expected " +
                            std::to_string(g.decider_.size()));
    }
    for (std::size_t i = 0; i < g.decider_.size(); ++i) {
      const long long v = (*raw.decider)[i];
      if (v != 0 && v != 1) throw ValidationError("decider value " + std::to_string(v) + " outside {0,1}");
      g.decider_[i] = static_cast<std::uint8_t>(v);
    }
  } else {
    for (const auto& q : raw.accept) {
      const std::size_t a = checked_index(q[0], m, "answer");
      const std::size_t b = checked_index(q[1], m, "answer");
      const std::size_t x = checked_index(q[2], n, "question");
      const std::size_t y = checked_index(q[3], n, "question");
      g.decider_[((x * n + y) * m + a) * m + b] = 1;
    }
  }
  return g;
}

RawGame to_raw(const SyncGame& game) {
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  RawGame raw;
  raw.n = static_cast<long long>(n);
  raw.m = static_cast<long long>(m);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (game.mu(x, y) != 0) raw.mu.emplace_back(x, y, game.mu(x, y));
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (game.accepts(a, b, x, y)) {
            raw.accept.push_back({static_cast<long long>(a), static_cast<long long>(b), static_cast<long long>(x),
                                  static_cast<long long>(y)});
          }
        }
      }
    }
  }
  return raw;
}

std::string SyncGame::canonical_text() const {
  std::string out = "n " + std::to_string(n_) + " m " + std::to_string(m_) + "\nmu";
  for (const auto& p : mu_) out += " " + format_rational(p);
  out += "\nD ";
  for (auto d : decider_) out += d ? '1' : '0';
  out += "\n";
  return out;
}

std::string SyncGame::hash() const { return fnv1a_hex(canonical_text()); }

Correlation::Correlation(std::size_t questions, std::size_t answers)
    : n_(questions), m_(answers), p_(questions * questions * answers * answers, 0.0) {}

Correlation::Correlation(std::size_t questions, std::size_t answers, std::vector<double> values)
    : n_(questions), m_(answers), p_(std::move(values)) {
  if (p_.size() != n_ * n_ * m_ * m_) throw ValidationError("correlation has wrong size");
}

Correlation strategy_from_pvm(const SyncGame& game, const PvmTuple& E, const FiniteTracialAlgebra& A) {
  require_shape(game, E.operators(), A);
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  Correlation p(n, m);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          const Complex t = trace(A, E.at(x, a) * E.at(y, b));
          if (std::abs(t.imag()) > 1e-9) {
            throw NumericalError("tau(e_x^a e_y^b) has imaginary part " + format_real(t.imag()));
          }
          p(a, b, x, y) = t.real();
        }
      }
    }
  }
  return p;
}

double game_value_of_correlation(const SyncGame& game, const Correlation& p) {
  if (p.questions() != game.questions() || p.answers() != game.answers()) {
    throw ValidationError("correlation shape does not match game");
  }
  CompensatedSum sum;
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double w = game.mu_value(x, y);
      if (w == 0) continue;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (game.accepts(a, b, x, y)) sum.add(w * p(a, b, x, y));
        }
      }
    }
  }
  return sum.value();
}

double psi_value_raw(const SyncGame& game, const OperatorTuple& E, const FiniteTracialAlgebra& A) {
  require_shape(game, E, A);
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  CompensatedSum sum;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double w = game.mu_value(x, y);
      if (w == 0) continue;
      for (std::size_t a = 0; a < m; ++a) {
        Element s = A.zero();
        bool any = false;
        for (std::size_t b = 0; b < m; ++b) {
          if (game.accepts(a, b, x, y)) {
            s += E.at(y, b);
            any = true;
          }
        }
        if (any) sum.add(w * re_trace_product(A, E.at(x, a), s));
      }
    }
  }
  return sum.value();
}

double psi_value(const SyncGame& game, const PvmTuple& E, const FiniteTracialAlgebra& A) {
  return psi_value_raw(game, E.operators(), A);
}

std::uint64_t assignment_count(const SyncGame& game) {
  std::uint64_t total = 1;
  for (std::size_t x = 0; x < game.questions(); ++x) {
    if (total > std::numeric_limits<std::uint64_t>::max() / game.answers()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= game.answers();
  }
  return total;
}

namespace {

template <typename Acc>
ClassicalValue classical_search(const SyncGame& game, const std::vector<Acc>& weight, const BigInt& denominator,
                                std::uint64_t total, unsigned threads) {
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  struct Best {
    Acc value{};
    std::uint64_t index = 0;
    bool set = false;
  };
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 64));
  std::vector<Best> best(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t begin = total * c / chunks;
    const std::uint64_t end = total * (c + 1) / chunks;
    std::vector<std::size_t> f(n);
    std::uint64_t rem = begin;
    for (std::size_t x = n; x-- > 0;) {
      f[x] = rem % m;
      rem /= m;
    }
    Best local;
    for (std::uint64_t i = begin; i < end; ++i) {
      Acc v{};
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if (game.accepts(f[x], f[y], x, y)) v += weight[x * n + y];
        }
      }
      if (!local.set || v > local.value) {
        local = {v, i, true};
      }
      for (std::size_t x = n; x-- > 0;) {
        if (++f[x] < m) break;
        f[x] = 0;
      }
    }
    best[c] = local;
  });
  Best winner = best[0];
  for (const auto& b : best) {
    if (b.value > winner.value || (b.value == winner.value && b.index < winner.index)) winner = b;
  }
  ClassicalValue out;
  out.value = Rational(BigInt(winner.value), denominator);
  out.assignment.assign(n, 0);
  std::uint64_t rem = winner.index;
  for (std::size_t x = n; x-- > 0;) {
    out.assignment[x] = rem % m;
    rem /= m;
  }
  return out;
}

}  // namespace

ClassicalValue classical_sync_value(const SyncGame& game, std::uint64_t cap, unsigned threads) {
  const std::uint64_t total = assignment_count(game);
  if (total > cap) {
    throw ValidationError("m^n = " + (total == std::numeric_limits<std::uint64_t>::max() ? std::string("overflow")
                                                                                          : std::to_string(total)) +
                          " exceeds the enumeration cap " + std::to_string(cap));
  }
  const std::size_t n = game.questions();
  BigInt denominator = 1;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const BigInt d = boost::multiprecision::denominator(game.mu(x, y));
      denominator = denominator / boost::multiprecision::gcd(denominator, d) * d;
    }
  }
  std::vector<BigInt> numerators;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const Rational scaled = game.mu(x, y) * denominator;
      numerators.push_back(boost::multiprecision::numerator(scaled));
    }
  }
  // The numerators sum to the denominator, so int64 suffices whenever it does.
  if (denominator < (BigInt(1) << 62)) {
    std::vector<long long> w;
    for (const auto& v : numerators) w.push_back(v.convert_to<long long>());
    return classical_search<long long>(game, w, denominator, total, threads);
  }
  return classical_search<BigInt>(game, numerators, denominator, total, threads);
}

// ---------------------------------------------------------------------------
// Benchmark games
// ---------------------------------------------------------------------------

SyncGame coloring_game(std::size_t vertices, std::size_t colors,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges, bool uniform_all) {
  const std::size_t n = vertices;
  std::set<std::pair<std::size_t, std::size_t>> adjacent;
  for (auto [u, v] : edges) {
    if (u >= n || v >= n || u == v) throw ValidationError("invalid edge");
    adjacent.insert({u, v});
    adjacent.insert({v, u});
  }
  RawGame raw;
  raw.n = static_cast<long long>(n);
  raw.m = static_cast<long long>(colors);
  std::vector<std::pair<std::size_t, std::size_t>> support;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (uniform_all || x == y || adjacent.count({x, y})) support.emplace_back(x, y);
    }
  }
  for (auto [x, y] : support) {
    raw.mu.emplace_back(x, y, Rational(1, static_cast<long long>(support.size())));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t a = 0; a < colors; ++a) {
        for (std::size_t b = 0; b < colors; ++b) {
          bool ok = true;
          if (x == y) {
            ok = a == b;
          } else if (adjacent.count({x, y})) {
            ok = a != b;
          }
          if (ok) {
            raw.accept.push_back({static_cast<long long>(a), static_cast<long long>(b), static_cast<long long>(x),
                                  static_cast<long long>(y)});
          }
        }
      }
    }
  }
  return validate_game(raw);
}

SyncGame triangle_game() { return coloring_game(3, 2, {{0, 1}, {1, 2}, {0, 2}}, true); }

SyncGame all_accept_game(std::size_t n, std::size_t m) {
  RawGame raw;
  raw.n = static_cast<long long>(n);
  raw.m = static_cast<long long>(m);
  raw.mu.clear();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) raw.mu.emplace_back(x, y, Rational(1, static_cast<long long>(n * n)));
  }
  raw.decider = std::vector<long long>(n * n * m * m, 1);
  return validate_game(raw);
}

SyncGame random_sync_game(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<long long> weight(1, 6);
  std::bernoulli_distribution coin(0.5);
  std::vector<long long> w(n * n);
  long long total = 0;
  for (auto& v : w) total += (v = weight(rng));
  RawGame raw;
  raw.n = static_cast<long long>(n);
  raw.m = static_cast<long long>(m);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) raw.mu.emplace_back(x, y, Rational(w[x * n + y], total));
  }
  std::vector<long long> table(n * n * m * m, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          table[((x * n + y) * m + a) * m + b] = x == y ? (a == b) : coin(rng);
        }
      }
    }
  }
  raw.decider = std::move(table);
  return validate_game(raw);
}

std::vector<NamedGame> benchmark_corpus() {
  const std::vector<std::pair<std::size_t, std::size_t>> k4 = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::vector<NamedGame> out;
  out.push_back({"triangle", triangle_game()});
  out.push_back({"all-accept-2-2", all_accept_game(2, 2)});
  out.push_back({"k4-2-coloring", coloring_game(4, 2, k4, false)});
  out.push_back({"k4-3-coloring", coloring_game(4, 3, k4, false)});
  out.push_back({"path3-3-coloring", coloring_game(3, 3, {{0, 1}, {1, 2}}, true)});
  out.push_back({"k3-3-coloring", coloring_game(3, 3, {{0, 1}, {1, 2}, {0, 2}}, false)});
  out.push_back({"random-2-3", random_sync_game(2, 3, 11)});
  out.push_back({"random-3-2", random_sync_game(3, 2, 12)});
  out.push_back({"random-3-4", random_sync_game(3, 4, 13)});
  out.push_back({"random-4-4", random_sync_game(4, 4, 14)});
  return out;
}

}  // namespace tracial
