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

#include "tracial/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tracial/errors.hpp"
#include "tracial/format.hpp"

namespace tracial {

// ---------------------------------------------------------------------------
// Penalty modulus
// ---------------------------------------------------------------------------

PenaltyModulus PenaltyModulus::from_breakpoints(std::vector<std::pair<Rational, Rational>> points) {
  if (points.size() < 2) throw ValidationError("penalty needs at least two breakpoints");
  if (points[0].first != 0 || points[0].second != 0) throw ValidationError("penalty must satisfy Delta(0) = 0");
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k].first > points[k - 1].first)) {
      throw ValidationError("penalty breakpoints must be strictly increasing");
    }
    if (points[k].second < points[k - 1].second) throw ValidationError("penalty must be nondecreasing");
  }
  PenaltyModulus p;
  p.points_ = std::move(points);
  return p;
}

PenaltyModulus PenaltyModulus::linear(Rational c) {
  if (c < 0) throw ValidationError("penalty slope must be nonnegative");
  return from_breakpoints({{Rational(0), Rational(0)}, {Rational(1), c}});
}

std::vector<Rational> PenaltyModulus::slopes() const {
  std::vector<Rational> out;
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    out.push_back((points_[k + 1].second - points_[k].second) / (points_[k + 1].first - points_[k].first));
  }
  return out;
}

Rational PenaltyModulus::operator()(const Rational& t) const {
  const auto s = slopes();
  Rational v = s[0] * t;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (t > points_[k].first) v += (s[k] - s[k - 1]) * (t - points_[k].first);
  }
  return v;
}

double PenaltyModulus::operator()(double t) const {
  const auto s = slopes();
  double v = to_double(s[0]) * t;
  for (std::size_t k = 1; k < s.size(); ++k) {
    v += to_double(s[k] - s[k - 1]) * std::max(t - to_double(points_[k].first), 0.0);
  }
  return v;
}

bool PenaltyModulus::vanishes() const {
  return std::all_of(points_.begin(), points_.end(), [](const auto& p) { return p.second == 0; });
}

std::string PenaltyModulus::describe() const {
  if (points_.size() == 2 && points_[1].first == 1) return "linear " + format_rational(points_[1].second);
  std::string out;
  for (const auto& [t, v] : points_) {
    if (!out.empty()) out += ' ';
    out += format_rational(t) + ":" + format_rational(v);
  }
  return out;
}

PenaltyModulus PenaltyModulus::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::vector<std::string> words;
  while (in >> word) words.push_back(word);
  if (words.size() == 2 && words[0] == "linear") return linear(parse_rational(words[1]));
  std::vector<std::pair<Rational, Rational>> points;
  for (const auto& w : words) {
    const auto colon = w.find(':');
    if (colon == std::string::npos) throw ValidationError("malformed penalty breakpoint '" + w + "'");
    points.emplace_back(parse_rational(w.substr(0, colon)), parse_rational(w.substr(colon + 1)));
  }
  return from_breakpoints(std::move(points));
}

// ---------------------------------------------------------------------------
// Formula construction
// ---------------------------------------------------------------------------

namespace {

Formula scalar_constant(const Rational& q) { return Formula::scale(q, Formula::constant(1)); }

Formula fold_plus(const std::vector<Formula>& terms) {
  if (terms.empty()) return Formula::constant(0);
  Formula acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = Formula::plus(acc, terms[i]);
  return acc;
}

std::vector<std::string> pvm_names(std::size_t n, std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < m; ++a) names.push_back("e" + std::to_string(x) + "_" + std::to_string(a));
  }
  return names;
}

}  // namespace

Formula compile_defect_formula(std::size_t n, std::size_t m) {
  if (n < 2 || m < 2) throw ValidationError("defect formula requires n, m >= 2");
  std::vector<Formula> leaves;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < m; ++a) {
      const Term e = Term::variable(pvm_variable(x, a, m));
      leaves.push_back(Formula::norm2(e - adj(e)));
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < m; ++a) {
      const Term e = Term::variable(pvm_variable(x, a, m));
      leaves.push_back(Formula::norm2(e * e - e));
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    Term total = Term::variable(pvm_variable(x, 0, m));
    for (std::size_t a = 1; a < m; ++a) total = total + Term::variable(pvm_variable(x, a, m));
    leaves.push_back(Formula::norm2(total - Term::one()));
  }
  Formula acc = leaves[0];
  for (std::size_t i = 1; i < leaves.size(); ++i) acc = Formula::max(acc, leaves[i]);
  return acc;
}

Formula compile_payoff_formula(const SyncGame& game) {
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  std::vector<Formula> terms;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (game.mu(x, y) == 0) continue;
      std::optional<Term> sum;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (!game.accepts(a, b, x, y)) continue;
          const Term p = Term::variable(pvm_variable(x, a, m)) * Term::variable(pvm_variable(y, b, m));
          sum = sum ? *sum + p : p;
        }
      }
      if (sum) terms.push_back(Formula::scale(game.mu(x, y), Formula::retrace(*sum)));
    }
  }
  return fold_plus(terms);
}

Formula apply_penalty(const PenaltyModulus& delta, const Formula& f) {
  const auto s = delta.slopes();
  const auto points = delta.breakpoints();
  std::vector<Formula> terms;
  if (s[0] != 0) terms.push_back(Formula::scale(s[0], f));
  for (std::size_t k = 1; k < s.size(); ++k) {
    const Rational d = s[k] - s[k - 1];
    if (d == 0) continue;
    terms.push_back(Formula::scale(d, Formula::truncsub(f, scalar_constant(points[k].first))));
  }
  return fold_plus(terms);
}

Formula compile_penalized_body(const SyncGame& game, const PenaltyModulus& delta) {
  const Formula psi = compile_payoff_formula(game);
  const Formula phi = compile_defect_formula(game.questions(), game.answers());
  return Formula::min(psi, Formula::truncsub(psi, apply_penalty(delta, phi)));
}

CompiledSentence compile_game(const SyncGame& game, const PenaltyModulus& delta) {
  const Formula psi = compile_payoff_formula(game);
  const Formula body = compile_penalized_body(game, delta);
  CompiledSentence out;
  out.sentence = Formula::sup(pvm_names(game.questions(), game.answers()), body);
  out.questions = game.questions();
  out.answers = game.answers();
  out.game_hash = game.hash();
  out.penalty = delta.describe();
  out.lipschitz_psi = lipschitz_bound(psi);
  out.lipschitz_body = lipschitz_bound(body);
  return out;
}

Sentence compile_game_sentence(const SyncGame& game, const PenaltyModulus& delta) {
  return compile_game(game, delta).sentence;
}

// ---------------------------------------------------------------------------
// Restriction
// ---------------------------------------------------------------------------

namespace {

std::size_t count_apply(const Formula& f) {
  std::size_t total = f.kind() == FormulaKind::Apply ? 1 : 0;
  for (const auto& c : f.children()) total += count_apply(c);
  return total;
}

// Largest power of two not exceeding q (q > 0).
Rational dyadic_floor(const Rational& q) {
  Rational p(1);
  while (p > q) p /= 2;
  while (p * 2 <= q) p *= 2;
  return p;
}

unsigned bits_for(const Rational& rho) {
  unsigned bits = 0;
  Rational unit(1);
  while (unit > rho) {
    unit /= 2;
    ++bits;
  }
  return bits;
}

constexpr std::size_t kMaxInterpolationNodes = 200000;

class Restrictor {
 public:
  Restrictor(Rational eta, std::size_t count) : eta_(std::move(eta)), count_(count) {}

  Formula run(const Formula& f, const Rational& sens) {
    if (count_apply(f) == 0) return f;
    switch (f.kind()) {
      case FormulaKind::Apply:
        return interpolate(f, sens);
      case FormulaKind::Scale:
        return Formula::scale(f.scalar(), run(f.operand(), sens * std::max(rational_abs(f.scalar()), Rational(1))));
      case FormulaKind::Times: {
        const Rational ra = value_range(f.lhs()).magnitude();
        const Rational rb = value_range(f.rhs()).magnitude();
        return Formula::times(run(f.lhs(), sens * (rb + 1)), run(f.rhs(), sens * (ra + 1)));
      }
      default: {
        std::vector<Formula> kids;
        for (const auto& c : f.children()) kids.push_back(run(c, sens));
        return rebuild_formula(f, kids);
      }
    }
  }

  const Rational& budget() const { return budget_; }

 private:
  Formula interpolate(const Formula& f, const Rational& sens) {
    const UnaryFunction fn = f.function();
    const Interval range = value_range(f.operand());
    const auto lip = function_lipschitz(fn, range);
    if (!lip) {
      throw ValidationError("connective '" + std::string(function_name(fn)) +
                            "' is not Lipschitz on its operand range; body is unbounded");
    }
    const Rational L = std::max(*lip, Rational(1));
    const Formula child = run(f.operand(), sens * 2 * L);
    const Rational b = eta_ / (Rational(static_cast<long long>(count_)) * sens);
    const Rational rho = b / 4;
    const unsigned bits = bits_for(rho / 2);

    const Formula lo_c = scalar_constant(range.lo);
    const Formula hi_c = scalar_constant(range.hi);
    const Formula clamped = Formula::min(Formula::max(child, lo_c), hi_c);

    auto value_at = [&](const Rational& t) { return rational_round(apply_function(fn, to_double(t)), bits); };
    if (range.hi == range.lo) {
      budget_ += sens * rho;
      return scalar_constant(value_at(range.lo));
    }
    const Rational h = dyadic_floor(b / (2 * L));
    const Rational width = range.hi - range.lo;
    const Rational steps = width / h;
    BigInt nodes = boost::multiprecision::numerator(steps) / boost::multiprecision::denominator(steps);
    if (nodes * h < width) nodes += 1;
    if (nodes > kMaxInterpolationNodes) {
      throw ValidationError("interpolating '" + std::string(function_name(fn)) + "' needs more than " +
                            std::to_string(kMaxInterpolationNodes) + " nodes; increase eta");
    }
    std::vector<Rational> t;
    for (BigInt k = 0; k < nodes; ++k) t.push_back(range.lo + Rational(k) * h);
    t.push_back(range.hi);
    std::vector<Rational> y;
    for (const auto& tk : t) y.push_back(value_at(tk));

    std::vector<Formula> terms;
    if (y[0] != 0) terms.push_back(scalar_constant(y[0]));
    Rational previous(0);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const Rational slope = (y[k + 1] - y[k]) / (t[k + 1] - t[k]);
      const Rational d = slope - previous;
      previous = slope;
      if (d == 0) continue;
      terms.push_back(Formula::scale(d, Formula::truncsub(clamped, scalar_constant(t[k]))));
    }
    budget_ += sens * (*lip * h + rho);
    return fold_plus(terms);
  }

  Rational eta_;
  std::size_t count_;
  Rational budget_{0};
};

}  // namespace

RestrictedSentence restrict_sentence(const Sentence& sentence, const Rational& eta) {
  if (!(eta > 0)) throw ValidationError("eta must be positive");
  if (!is_sentence(sentence)) throw ValidationError("restrict_sentence requires a sentence");
  const auto form = universal_form(sentence);
  if (!form) throw ValidationError("sentence is not universal (nested or inf quantifiers)");
  if (!try_lipschitz_bound(form->body)) throw ValidationError("body is unbounded: no finite Lipschitz bound");
  if (check_restricted(sentence, SentenceClass::RestrictedUniversal).restricted) return {sentence, Rational(0)};
  const Rational eta_eff = std::min(eta, Rational(1));
  Restrictor r(eta_eff, count_apply(form->body));
  Formula body = r.run(form->body, Rational(1));
  Sentence out = form->names.empty() ? body : Formula::sup(form->names, body);
  return {out, r.budget()};
}

// ---------------------------------------------------------------------------
// Turing machines
// ---------------------------------------------------------------------------

void validate_tm(const TuringMachineDescription& tm) {
  auto unique = [](const std::vector<std::string>& xs, const char* what) {
    std::set<std::string> seen;
    if (xs.empty()) throw ValidationError(std::string(what) + " must be non-empty");
    for (const auto& s : xs) {
      if (s.empty()) throw ValidationError(std::string(what) + " contains an empty name");
      if (!seen.insert(s).second) throw ValidationError(std::string(what) + " contains duplicate '" + s + "'");
    }
    return seen;
  };
  const auto states = unique(tm.states, "states");
  const auto symbols = unique(tm.alphabet, "alphabet");
  if (!symbols.count(tm.blank)) throw ValidationError("blank symbol '" + tm.blank + "' is not in the alphabet");
  if (!states.count(tm.start)) throw ValidationError("start state '" + tm.start + "' is undeclared");
  if (!states.count(tm.accept)) throw ValidationError("accept state '" + tm.accept + "' is undeclared");
  std::set<std::pair<std::string, std::string>> defined;
  for (const auto& t : tm.transitions) {
    if (!states.count(t.state)) throw ValidationError("transition from undeclared state '" + t.state + "'");
    if (!states.count(t.next)) throw ValidationError("transition to undeclared state '" + t.next + "'");
    if (!symbols.count(t.read) || !symbols.count(t.write)) {
      throw ValidationError("transition uses a symbol outside the alphabet");
    }
    if (t.move != 'L' && t.move != 'R') throw ValidationError("move must be L or R");
    if (t.state == tm.accept) throw ValidationError("accept state must not have outgoing transitions");
    if (!defined.insert({t.state, t.read}).second) {
      throw ValidationError("duplicate transition for (" + t.state + ", " + t.read + ")");
    }
  }
  for (const auto& q : tm.states) {
    if (q == tm.accept) continue;
    for (const auto& s : tm.alphabet) {
      if (!defined.count({q, s})) throw ValidationError("missing transition for (" + q + ", " + s + ")");
    }
  }
}

std::string canonical_tm_text(const TuringMachineDescription& tm) {
  std::string out = "states";
  for (const auto& s : tm.states) out += " " + s;
  out += "\nalphabet";
  for (const auto& s : tm.alphabet) out += " " + s;
  out += "\nblank " + tm.blank + "\nstart " + tm.start + "\naccept " + tm.accept + "\n";
  auto sorted = tm.transitions;
  std::sort(sorted.begin(), sorted.end(), [](const Transition& a, const Transition& b) {
    return std::tie(a.state, a.read) < std::tie(b.state, b.read);
  });
  for (const auto& t : sorted) {
    out += t.state + " " + t.read + " " + t.write + " " + std::string(1, t.move) + " " + t.next + "\n";
  }
  return out;
}

GameConstructor demo_constructor() {
  return [](const TuringMachineDescription&) { return to_raw(triangle_game()); };
}

CompiledSentence compile_tm(const TuringMachineDescription& tm, const GameConstructor& ctor,
                            const PenaltyModulus& delta, const std::string& ctor_label) {
  validate_tm(tm);
  if (!ctor) throw ValidationError("no game constructor supplied");
  const SyncGame game = validate_game(ctor(tm));
  CompiledSentence out = compile_game(game, delta);
  out.extra.emplace_back("constructor", ctor_label);
  out.extra.emplace_back("tm-hash", fnv1a_hex(canonical_tm_text(tm)));
  return out;
}

Sentence compile_tm_sentence(const TuringMachineDescription& tm, const GameConstructor& ctor,
                             const PenaltyModulus& delta) {
  return compile_tm(tm, ctor, delta, "custom").sentence;
}

// ---------------------------------------------------------------------------
// Sentence files
// ---------------------------------------------------------------------------

std::string emit_sentence_file(const CompiledSentence& c) {
  std::string out = std::string("; ") + kSentenceFormat + "\n";
  out += "; game-hash " + c.game_hash + "\n";
  out += "; penalty " + c.penalty + "\n";
  out += "; lipschitz-psi " + format_rational(c.lipschitz_psi) + "\n";
  out += "; lipschitz-body " + format_rational(c.lipschitz_body) + "\n";
  out += "; pvm-shape " + std::to_string(c.questions) + " " + std::to_string(c.answers) + "\n";
  for (const auto& [k, v] : c.extra) out += "; " + k + " " + v + "\n";
  out += print_sentence(c.sentence) + "\n";
  return out;
}

SentenceFile read_sentence_file(std::string_view text, const Rational& const_bound) {
  SentenceFile out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line.remove_prefix(first);
    if (line.front() != ';') break;
    line.remove_prefix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    const auto space = line.find(' ');
    const std::string key(line.substr(0, space));
    const std::string value = space == std::string_view::npos ? "" : std::string(line.substr(space + 1));
    if (!key.empty()) out.metadata.emplace(key, value);
  }
  if (auto it = out.metadata.find("tracial-sentence"); it != out.metadata.end() && it->second != "1") {
    throw ValidationError("unsupported sentence file version '" + it->second + "'");
  }
  ParseOptions options;
  options.const_bound = const_bound;
  out.sentence = parse_sentence(text, options);
  if (auto it = out.metadata.find("pvm-shape"); it != out.metadata.end()) {
    std::istringstream in(it->second);
    std::size_t n = 0;
    std::size_t m = 0;
    if (!(in >> n >> m) || n == 0 || m == 0) throw ValidationError("malformed pvm-shape header");
    out.pvm_shape = std::make_pair(n, m);
  }
  return out;
}

}  // namespace tracial
