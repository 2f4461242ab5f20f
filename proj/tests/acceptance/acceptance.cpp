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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
// usage: acceptance <tracial-cli> <data-dir> <scratch-dir>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracial/compiler.hpp"
#include "tracial/games.hpp"
#include "tracial/optimizer.hpp"
#include "tracial/pvm.hpp"
#include "tracial/sampling.hpp"

using namespace tracial;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = limit_s <= 0 || s < limit_s;
  const bool ok = out.passed && in_time;
  if (!ok) ++failures;
  char timing[96];
  if (limit_s > 0) {
    std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", s, limit_s);
  } else {
    std::snprintf(timing, sizeof timing, "%.2f s", s);
  }
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << title << ": " << out.detail << "; " << timing
            << std::endl;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

OperatorTuple random_tuple(const FiniteTracialAlgebra& A, std::size_t n, std::size_t m, Rng& rng) {
  std::vector<Element> ops;
  for (std::size_t k = 0; k < n * m; ++k) ops.push_back(random_unit_ball_element(A, rng));
  return OperatorTuple(n, m, std::move(ops));
}

OperatorTuple perturbed_pvm(const FiniteTracialAlgebra& A, std::size_t n, std::size_t m, Rng& rng) {
  OperatorTuple E = random_pvm(A, n, m, rng).operators();
  const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-4, 0)(rng));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < m; ++a) {
      E.at(x, a) = project_to_unit_ball(A, E.at(x, a) + random_element(A, rng, scale));
    }
  }
  return E;
}

Outcome unitary_rounding() {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_ratio = 0;
  double worst_order = 0;
  for (unsigned m : {2U, 3U, 4U}) {
    StabilityExperiment ex;
    ex.order = m;
    ex.dims = {1, 2, 3, 4, 5, 6, 8, 10, 12, 16};
    ex.trials = 400;
    ex.seed = 1000 + m;
    ex.threads = 4;
    for (const auto& t : run_stability_trials(ex)) {
      ++trials;
      const double bound = std::ldexp(t.epsilon, static_cast<int>(m) + 2);
      const bool admissible = t.epsilon < std::ldexp(1.0, -static_cast<int>(m));
      if (!admissible || t.order_defect > 1e-10 || t.distance > bound) ++violations;
      worst_ratio = std::max(worst_ratio, t.distance / (t.epsilon * std::ldexp(1.0, static_cast<int>(m) + 2)));
      worst_order = std::max(worst_order, t.order_defect);
    }
  }
  return {trials >= 1000 && violations == 0,
          std::to_string(trials) + " trials, " + std::to_string(violations) + " violations, max distance/bound " +
              fmt("%.3g", worst_ratio) + ", max ||u^m-1|| " + fmt("%.2g", worst_order)};
}

Outcome fourier_bijection() {
  Rng rng(derive_seed(2, 0));
  double worst = 0;
  std::size_t rows = 0;
  for (unsigned m : {2U, 3U, 5U}) {
    const RootOfUnity omega = RootOfUnity::primitive(m);
    for (int i = 0; i < 100; ++i) {
      const auto A = random_algebra(rng, 3, 5);
      const PvmTuple E = random_pvm(A, 1, m, rng);
      const auto u = pvm_to_unitary(A, E.operators().row(0), omega);
      const auto back = unitary_to_pvm(A, u, omega);
      for (unsigned a = 0; a < m; ++a) worst = std::max(worst, op_norm(A, back[a] - E.at(0, a)));
      const Element v = random_order_m_unitary(A, m, rng);
      const auto row = unitary_to_pvm(A, OrderMUnitary::verify(A, v, m), omega);
      worst = std::max(worst, op_norm(A, pvm_to_unitary(A, row, omega).element() - v));
      ++rows;
    }
  }
  return {worst <= 1e-10, std::to_string(rows) + " rows per direction, max error " + fmt("%.2g", worst)};
}

Outcome oracle_agreement() {
  Rng rng(derive_seed(3, 0));
  double phi_err = 0;
  double psi_err = 0;
  double raw_err = 0;
  std::size_t tuples = 0;
  const auto corpus = benchmark_corpus();
  for (const auto& named : corpus) {
    const SyncGame& g = named.game;
    const std::size_t n = g.questions();
    const std::size_t m = g.answers();
    const Formula phi = compile_defect_formula(n, m);
    const Formula psi = compile_payoff_formula(g);
    for (int i = 0; i < 100; ++i) {
      const auto A = random_algebra(rng, 3, 4);
      const OperatorTuple T = random_tuple(A, n, m, rng);
      phi_err = std::max(phi_err, std::abs(eval_formula(phi, A, T.elements()) - pvm_defect(A, T)));
      raw_err = std::max(raw_err, std::abs(eval_formula(psi, A, T.elements()) - psi_value_raw(g, T, A)));
      const PvmTuple E = random_pvm(A, n, m, rng);
      psi_err = std::max(psi_err, std::abs(eval_formula(psi, A, E.operators().elements()) - psi_value(g, E, A)));
      ++tuples;
    }
  }
  return {corpus.size() == 10 && phi_err <= 1e-12 && psi_err <= 1e-10 && raw_err <= 1e-10,
          std::to_string(corpus.size()) + " games, " + std::to_string(tuples) + " tuples, max |phi - defect| " +
              fmt("%.2g", phi_err) + ", max |psi - psi_value| " + fmt("%.2g", psi_err) +
              " (exact PVMs), " + fmt("%.2g", raw_err) + " (arbitrary tuples)"};
}

Outcome classical_recovery() {
  bool ok = true;
  std::size_t games = 0;
  double worst = 0;
  std::string bad;
  for (const auto& named : benchmark_corpus()) {
    const SyncGame& g = named.game;
    if (assignment_count(g) > 100000) continue;
    const auto exact = classical_sync_value(g);
    OptimizerConfig cfg;
    cfg.restarts = 16;
    cfg.seed = 4;
    cfg.threads = 4;
    const auto cert = seesaw_game_value(g, FiniteTracialAlgebra::uniform(g.questions() * g.answers()), cfg);
    const double gap = std::abs(cert.value - to_double(exact.value));
    worst = std::max(worst, gap);
    if (gap > 1e-6) {
      ok = false;
      bad += " " + named.name;
    }
    ++games;
  }
  const auto tri = classical_sync_value(triangle_game());
  const bool tri_ok = tri.value == Rational(7, 9);
  return {ok && tri_ok && games > 0,
          std::to_string(games) + " games, max |seesaw - classical| " + fmt("%.2g", worst) +
              ", triangle brute force " + format_rational(tri.value) + (bad.empty() ? "" : ", failing:" + bad)};
}

Outcome penalty_soundness() {
  Rng rng(derive_seed(5, 0));
  const PenaltyModulus delta = PenaltyModulus::linear(kDefaultPenaltySlope);
  double worst_excess = -1e300;
  double worst_exact = 0;
  std::size_t unrestricted = 0;
  std::size_t samples = 0;
  for (const auto& named : benchmark_corpus()) {
    const SyncGame& g = named.game;
    const auto compiled = compile_game(g, delta);
    if (!check_restricted(compiled.sentence, SentenceClass::RestrictedUniversal).restricted) ++unrestricted;
    if (!check_restricted(expand_trace_sugar(compiled.sentence), SentenceClass::RestrictedUniversal).restricted) {
      ++unrestricted;
    }
    const Formula body = compile_penalized_body(g, delta);
    const Formula psi = compile_payoff_formula(g);
    for (int i = 0; i < 1000; ++i) {
      const auto A = random_algebra(rng, 2, 3);
      const OperatorTuple T = i % 2 ? random_tuple(A, g.questions(), g.answers(), rng)
                                    : perturbed_pvm(A, g.questions(), g.answers(), rng);
      worst_excess =
          std::max(worst_excess, eval_formula(body, A, T.elements()) - eval_formula(psi, A, T.elements()));
      const PvmTuple E = random_pvm(A, g.questions(), g.answers(), rng);
      worst_exact = std::max(worst_exact, std::abs(eval_formula(body, A, E.operators().elements()) - psi_value(g, E, A)));
      ++samples;
    }
  }
  return {worst_excess <= 0 && worst_exact <= 1e-10 && unrestricted == 0,
          std::to_string(samples) + " samples, max body - psi " + fmt("%.3g", worst_excess) +
              ", max |body - psi| on PVMs " + fmt("%.2g", worst_exact) + ", " + std::to_string(unrestricted) +
              " unrestricted outputs"};
}

Outcome perfect_game() {
  double worst = 0;
  std::size_t runs = 0;
  const std::vector<FiniteTracialAlgebra> models = {
      FiniteTracialAlgebra::matrix(1),
      FiniteTracialAlgebra::matrix(2),
      FiniteTracialAlgebra::matrix(3),
      FiniteTracialAlgebra::uniform(2),
      FiniteTracialAlgebra::uniform(3),
      FiniteTracialAlgebra::make({{2, Rational(2, 5)}, {3, Rational(3, 5)}}),
      FiniteTracialAlgebra::make({{1, Rational(1, 6)}, {2, Rational(1, 3)}, {1, Rational(1, 2)}}),
  };
  for (const auto& [n, m] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 2}, {3, 2}, {2, 3}}) {
    const SyncGame g = all_accept_game(n, m);
    const Sentence s = compile_game_sentence(g, PenaltyModulus::linear(kDefaultPenaltySlope));
    for (const auto& A : models) {
      OptimizerConfig cfg;
      cfg.restarts = 4;
      cfg.seed = 6;
      const auto cert = maximize_sentence(s, A, cfg, PvmShape{n, m});
      worst = std::max(worst, std::abs(cert.value - 1.0));
      const auto game = seesaw_game_value(g, A, cfg);
      worst = std::max(worst, std::abs(game.value - 1.0));
      ++runs;
    }
  }
  return {worst <= 1e-6, std::to_string(runs) + " (game, model) pairs, max |value - 1| " + fmt("%.2g", worst)};
}

// ---------------------------------------------------------------------------
// Reproducibility through the command-line tool
// ---------------------------------------------------------------------------

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run_cli(const std::string& cli, const std::string& args) {
  CliRun r;
  const std::string cmd = "'" + cli + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The report minus its "execution" member (thread count and wall clock).
std::string payload(const std::string& report_text) {
  auto j = nlohmann::ordered_json::parse(report_text);
  j.erase("execution");
  return j.dump();
}

Outcome reproducibility(const std::string& cli, const std::string& data, const std::filesystem::path& scratch) {
  namespace fs = std::filesystem;
  fs::create_directories(scratch);
  struct Case {
    std::string name;
    std::string args;      // {out} and {aux} are replaced by per-run paths
    bool json_report;      // stdout is a JSON report
    bool out_file;         // --out receives an artifact to compare
    bool aux_file;         // a second artifact
  };
  const std::string tri = data + "/triangle.game";
  const std::string aa = data + "/allaccept.game";
  const std::string tm = data + "/demo.tm";
  const std::string zero = data + "/zero.sent";
  const std::vector<Case> cases = {
      {"compile", "compile " + tri + " --out {out}", true, true, false},
      {"compile-expand", "compile " + aa + " --expand --penalty-c 50 --out {out}", true, true, false},
      {"tm", "tm " + tm + " --ctor demo --out {out}", true, true, false},
      {"classical", "classical " + tri, true, false, false},
      {"value", "value " + tri + " --model " + data + "/c3.model --restarts 8 --witness-out {aux}", true, false, true},
      {"value-m2m3", "value " + tri + " --model " + data + "/m2m3.model --restarts 8", true, false, false},
      {"value-default", "value " + aa + " --restarts 4", true, false, false},
      {"value-csv", "value " + tri + " --model " + data + "/c3.model --restarts 4 --format csv", false, false, false},
      {"eval", "eval {sent} --model " + data + "/m2.model --restarts 4 --witness-out {aux}", true, false, true},
      {"eval-witness", "eval {sent} --model " + data + "/c3.model --witness {wit}", true, false, false},
      {"eval-zero", "eval " + zero, true, false, false},
      {"restrict", "restrict {fn} --eta 1/100", true, false, false},
      {"stability", "stability --m 2 --dims 4 --trials 100", true, false, false},
      {"stability-csv", "stability --m 3 --dims 2,5,9 --trials 60 --format csv --out {out}", false, true, false},
      {"modulus", "modulus --n 2 --m 2 --dims 2,4 --eps 0.01,0.1 --trials 100", true, false, false},
      {"modulus-csv", "modulus --n 3 --m 2 --dims 1,3 --trials 40 --format csv", false, false, false},
  };

  // Shared inputs for the sentence commands.
  const fs::path sent = scratch / "triangle.sent";
  const fs::path fn = scratch / "exp.sent";
  const fs::path wit = scratch / "triangle.witness";
  {
    std::ofstream(fn) << "(sup (x) (fn exp (norm2 x)))\n";
    const auto c = run_cli(cli, "compile " + tri + " --out '" + sent.string() + "'");
    const auto w = run_cli(cli, "value " + tri + " --model " + data + "/c3.model --restarts 4 --witness-out '" +
                                    wit.string() + "'");
    if (c.status != 0 || w.status != 0) return {false, "could not prepare inputs"};
  }

  const std::uint64_t seeds[] = {0, 12345};
  std::size_t compared = 0;
  std::string bad;
  for (const auto& c : cases) {
    for (auto seed : seeds) {
      std::vector<std::string> reports;
      std::vector<std::string> artifacts;
      bool failed = false;
      for (unsigned threads : {1U, 4U, 8U}) {
        // Same paths for every thread count, since reports echo their arguments.
        const fs::path out = scratch / (c.name + ".out");
        const fs::path aux = scratch / (c.name + ".aux");
        fs::remove(out);
        fs::remove(aux);
        std::string args = c.args;
        auto substitute = [&](const std::string& key, const std::string& value) {
          for (std::size_t at; (at = args.find(key)) != std::string::npos;) args.replace(at, key.size(), "'" + value + "'");
        };
        substitute("{out}", out.string());
        substitute("{aux}", aux.string());
        substitute("{sent}", sent.string());
        substitute("{wit}", wit.string());
        substitute("{fn}", fn.string());
        const auto r = run_cli(cli, "--seed " + std::to_string(seed) + " --threads " + std::to_string(threads) + " " + args);
        if (r.status != 0) {
          failed = true;
          break;
        }
        std::string stdout_text = r.out;
        if (c.out_file && !c.json_report) stdout_text = slurp(out);
        reports.push_back(c.json_report ? payload(stdout_text) : stdout_text);
        std::string art;
        if (c.out_file && c.json_report) art += slurp(out);
        if (c.aux_file) art += slurp(aux);
        artifacts.push_back(art);
      }
      ++compared;
      if (failed || reports.size() != 3 || reports[0] != reports[1] || reports[0] != reports[2] ||
          artifacts[0] != artifacts[1] || artifacts[0] != artifacts[2] || reports[0].empty()) {
        bad += " " + c.name + "@" + std::to_string(seed) + (failed ? "(exit)" : "");
      }
    }
  }
  return {bad.empty(), std::to_string(compared) + " command/seed combinations at threads 1, 4, 8" +
                           (bad.empty() ? ", all byte-identical" : ", differing:" + bad)};
}

// ---------------------------------------------------------------------------

Outcome presentation_oracle() {
  Rng rng(derive_seed(8, 0));
  const auto A = FiniteTracialAlgebra::make({{2, Rational(1, 2)}, {3, Rational(1, 2)}});
  std::vector<Element> points;
  for (int i = 0; i < 3; ++i) points.push_back(random_unit_ball_element(A, rng));
  const Presentation P(A, points);
  std::mt19937_64 gen(88);
  double worst_ratio = 0;
  std::size_t checks = 0;
  for (int i = 0; i < 60; ++i) {
    Term p = Term::variable(gen() % 3);
    const int len = 1 + static_cast<int>(gen() % 4);
    for (int k = 0; k < len; ++k) {
      const Term v = Term::variable(gen() % 3);
      switch (gen() % 4) {
        case 0: p = p * v; break;
        case 1: p = p + adj(v); break;
        case 2: p = p - v * v; break;
        default: p = Term::scaled({Rational(1, 2), Rational(-1, 3)}, p) + Term::one(); break;
      }
    }
    const double truth = two_norm(A, eval_term(p, A, points));
    for (unsigned k = 0; k <= 20; ++k) {
      const double q = to_double(presentation_norm(P, p, k));
      worst_ratio = std::max(worst_ratio, std::abs(truth - q) / std::ldexp(1.0, -static_cast<int>(k)));
      ++checks;
    }
  }
  return {worst_ratio < 1, std::to_string(checks) + " (term, k) pairs on M2 + M3, max |norm - q| * 2^k " +
                               fmt("%.3g", worst_ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <tracial-cli> <data-dir> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::string data = argv[2];
  const std::filesystem::path scratch = argv[3];

  report(1, "order-m unitary rounding bound", 30, unitary_rounding);
  report(2, "Fourier bijection round trips", 5, fourier_bijection);
  report(3, "defect and payoff formulas match their oracles", 60, oracle_agreement);
  report(4, "see-saw recovers the classical value", 120, classical_recovery);
  report(5, "penalty soundness", 60, penalty_soundness);
  report(6, "perfect game sentinel", 0, perfect_game);
  report(7, "CLI reproducibility across thread counts", 0, [&] { return reproducibility(cli, data, scratch); });
  report(8, "presentation norm oracle", 5, presentation_oracle);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
