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

// Command-line front end over the tracial C interface.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tracial/format.hpp"
#include "tracial/tracial.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kReportFormat = "tracial-report 1";

struct Failure {
  int code;
  std::string message;
};

void check(tracial_status s) {
  if (s != TRACIAL_OK) throw Failure{static_cast<int>(s), tracial_last_error()};
}

[[noreturn]] void invalid(const std::string& message) { throw Failure{2, message}; }

std::string take(char* s) {
  std::string out = s ? s : "";
  tracial_string_free(s);
  return out;
}

Json take_json(char* s) { return Json::parse(take(s)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) invalid("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) invalid("cannot write '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    invalid("cannot move output into place at '" + path + "'");
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
};

using GameHandle = Handle<tracial_game, tracial_game_free>;
using AlgebraHandle = Handle<tracial_algebra, tracial_algebra_free>;
using SentenceHandle = Handle<tracial_sentence, tracial_sentence_free>;

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int precision = 64;
  std::string out;
  std::string format = "json";
};

struct Run {
  std::string command;
  Json args = Json::object();
  Json inputs = Json::object();
  Json results = Json::object();
  std::string csv;  // table payload when the command produces one
  bool has_table = false;
  bool out_is_artifact = false;  // --out already consumed by the command
  int exit_code = 0;
};

std::string input(Run& run, const std::string& path) {
  std::string text = read_file(path);
  run.inputs[path] = tracial::fnv1a_hex(text);
  return text;
}

void load_game(Run& run, const std::string& path, GameHandle& game) {
  check(tracial_game_from_json(input(run, path).c_str(), &game.ptr));
}

void load_model(Run& run, const std::string& path, AlgebraHandle& algebra) {
  check(tracial_algebra_from_json(input(run, path).c_str(), 0, &algebra.ptr));
}

void load_sentence(Run& run, const std::string& path, const std::string& const_bound, SentenceHandle& sentence) {
  check(tracial_sentence_parse(input(run, path).c_str(), const_bound.c_str(), &sentence.ptr));
}

void uniform_commutative(std::size_t k, AlgebraHandle& algebra) {
  std::vector<std::size_t> dims(k, 1);
  const std::string w = "1/" + std::to_string(k);
  std::vector<const char*> weights(k, w.c_str());
  check(tracial_algebra_from_blocks(dims.data(), weights.data(), k, 0, &algebra.ptr));
}

// Moves the timing field out of an optimizer certificate so results stay reproducible.
void strip_timing(Json& j) {
  if (j.is_object()) j.erase("wall_clock_ms");
}

std::string penalty_text(const std::string& slope, const std::string& breakpoints) {
  if (!slope.empty() && !breakpoints.empty()) invalid("--penalty-c and --penalty are mutually exclusive");
  if (!breakpoints.empty()) return breakpoints;
  return "linear " + (slope.empty() ? std::string("100") : slope);
}

void finish_compile(Run& run, const Globals& g, std::string file, Json info) {
  if (info.value("penalty_disabled", false)) {
    std::cerr << "warning: penalty disabled, sentence value may exceed PVM-sup\n";
  }
  run.results = std::move(info);
  if (!g.out.empty()) {
    write_atomic(g.out, file);
    run.results["sentence_file"] = g.out;
    run.results["sentence_hash"] = tracial::fnv1a_hex(file);
    run.out_is_artifact = true;
  } else {
    run.results["sentence_hash"] = tracial::fnv1a_hex(file);
    run.results["sentence_text"] = file;
  }
}

tracial_optimizer_config optimizer(const Globals& g, std::size_t restarts, std::size_t iterations, double tolerance) {
  tracial_optimizer_config cfg;
  tracial_optimizer_config_init(&cfg);
  cfg.restarts = restarts;
  cfg.max_iterations = iterations;
  cfg.tolerance = tolerance;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  return cfg;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    if (j.size() <= 16 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); })) {
      rows.emplace_back(prefix, j.dump());
    }
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string results_csv(const Json& results) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(results, "", rows);
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += csv_field(k) + "," + csv_field(v) + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encode synchronous games as continuous-logic sentences, evaluate them on finite tracial "
               "algebras, and run rounding experiments."};
  app.set_version_flag("--version", tracial_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--precision", g.precision, "Floating-point precision in bits (64 only)")->capture_default_str();
  app.add_option("--out", g.out, "Output path (sentence file for compile/tm, report or table otherwise)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  Run run;

  // compile
  std::string game_path;
  std::string penalty_c;
  std::string penalty_bp;
  bool expand = false;
  auto* compile = app.add_subcommand("compile", "Compile a game file into a restricted universal sentence");
  compile->add_option("game", game_path, "Game file (JSON)")->required();
  compile->add_option("--penalty-c", penalty_c, "Linear penalty slope C (rational)");
  compile->add_option("--penalty", penalty_bp, "Piecewise-linear penalty breakpoints \"t:v t:v ...\"");
  compile->add_flag("--expand", expand, "Expand trace atoms into 2-norm atoms");

  // tm
  std::string tm_path;
  std::string ctor = "demo";
  auto* tm = app.add_subcommand("tm", "Compile a Turing machine description through a game constructor");
  tm->add_option("machine", tm_path, "Turing machine file (JSON)")->required();
  tm->add_option("--ctor", ctor, "Game constructor")->capture_default_str();
  tm->add_option("--penalty-c", penalty_c, "Linear penalty slope C (rational)");
  tm->add_option("--penalty", penalty_bp, "Piecewise-linear penalty breakpoints");
  tm->add_flag("--expand", expand, "Expand trace atoms into 2-norm atoms");

  // value
  std::string model_path;
  std::size_t restarts = 32;
  std::size_t iterations = 500;
  double tolerance = 1e-8;
  std::uint64_t cap = 10000000;
  std::string witness_out;
  auto* value = app.add_subcommand("value", "Classical value and see-saw lower bound of a game");
  value->add_option("game", game_path, "Game file (JSON)")->required();
  value->add_option("--model", model_path, "Model file (JSON); default is n*m copies of C");
  value->add_option("--restarts", restarts, "Random restarts")->capture_default_str();
  value->add_option("--max-iterations", iterations, "Sweeps per restart")->capture_default_str();
  value->add_option("--tolerance", tolerance, "Convergence tolerance")->capture_default_str();
  value->add_option("--classical-cap", cap, "Largest m^n enumerated for the classical value")->capture_default_str();
  value->add_option("--witness-out", witness_out, "Write the witness PVM tuple to this file");

  // classical
  auto* classical = app.add_subcommand("classical", "Exact classical value of a game by enumeration");
  classical->add_option("game", game_path, "Game file (JSON)")->required();
  classical->add_option("--cap", cap, "Largest m^n enumerated")->capture_default_str();

  // eval
  std::string sentence_path;
  std::string witness_path;
  std::string const_bound = "1";
  bool no_hint = false;
  auto* eval = app.add_subcommand("eval", "Evaluate or maximize a sentence on a model");
  eval->add_option("sentence", sentence_path, "Sentence file")->required();
  eval->add_option("--model", model_path, "Model file (JSON); default is C");
  eval->add_option("--witness", witness_path, "Evaluate the body at this witness (JSON array of elements)");
  eval->add_option("--restarts", restarts, "Random restarts")->capture_default_str();
  eval->add_option("--max-iterations", iterations, "Ascent iterations per restart")->capture_default_str();
  eval->add_option("--tolerance", tolerance, "Convergence tolerance")->capture_default_str();
  eval->add_option("--const-bound", const_bound, "Bound on (const q) literals")->capture_default_str();
  eval->add_flag("--no-pvm-hint", no_hint, "Ignore the pvm-shape header");
  eval->add_option("--witness-out", witness_out, "Write the maximizing witness to this file");

  // restrict
  std::string eta = "1/100";
  auto* restrict_cmd = app.add_subcommand("restrict", "Rewrite a sup sentence into restricted form");
  restrict_cmd->add_option("sentence", sentence_path, "Sentence file")->required();
  restrict_cmd->add_option("--eta", eta, "Approximation tolerance (rational)")->capture_default_str();
  restrict_cmd->add_option("--const-bound", const_bound, "Bound on (const q) literals")->capture_default_str();

  // stability
  unsigned order = 2;
  std::vector<std::size_t> dims;
  std::size_t trials = 100;
  auto* stability = app.add_subcommand("stability", "Randomized test of order-m unitary rounding");
  stability->add_option("--m", order, "Unitary order")->capture_default_str();
  stability->add_option("--dims", dims, "Matrix sizes, cycled over trials")->delimiter(',');
  stability->add_option("--trials", trials, "Number of trials")->capture_default_str();

  // modulus
  std::size_t questions = 2;
  std::size_t answers = 2;
  std::vector<double> eps;
  std::size_t mod_trials = 50;
  auto* modulus = app.add_subcommand("modulus", "Empirical modulus of the PVM defect");
  modulus->add_option("--n", questions, "Questions")->capture_default_str();
  modulus->add_option("--m", answers, "Answers")->capture_default_str();
  modulus->add_option("--dims", dims, "Matrix sizes, cycled over trials")->delimiter(',');
  modulus->add_option("--eps", eps, "Defect thresholds")->delimiter(',');
  modulus->add_option("--trials", mod_trials, "Samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (g.precision != 64) invalid("--precision: only 64-bit floating point is available");

    if (compile->parsed()) {
      run.command = "compile";
      run.args = {{"game", game_path}, {"penalty", penalty_text(penalty_c, penalty_bp)}, {"expand", expand}};
      GameHandle game;
      load_game(run, game_path, game);
      char* file = nullptr;
      char* info = nullptr;
      const std::string pen = penalty_text(penalty_c, penalty_bp);
      check(tracial_compile_game(game.ptr, pen.c_str(), expand, &file, &info));
      std::string text = take(file);
      finish_compile(run, g, std::move(text), take_json(info));
    } else if (tm->parsed()) {
      run.command = "tm";
      run.args = {{"machine", tm_path}, {"ctor", ctor}, {"penalty", penalty_text(penalty_c, penalty_bp)},
                  {"expand", expand}};
      const std::string text = input(run, tm_path);
      char* file = nullptr;
      char* info = nullptr;
      const std::string pen = penalty_text(penalty_c, penalty_bp);
      check(tracial_compile_tm(text.c_str(), ctor.c_str(), pen.c_str(), expand, &file, &info));
      std::string sentence = take(file);
      finish_compile(run, g, std::move(sentence), take_json(info));
    } else if (value->parsed()) {
      run.command = "value";
      run.args = {{"game", game_path}, {"model", model_path}, {"restarts", restarts},
                  {"max_iterations", iterations}, {"tolerance", tolerance}, {"classical_cap", cap}};
      GameHandle game;
      load_game(run, game_path, game);
      const Json info = take_json([&] {
        char* s = nullptr;
        check(tracial_game_info(game.ptr, &s));
        return s;
      }());
      const std::size_t n = info["n"], m = info["m"];
      AlgebraHandle algebra;
      if (model_path.empty()) {
        uniform_commutative(n * m, algebra);
      } else {
        load_model(run, model_path, algebra);
      }
      run.results["game_hash"] = info["hash"];
      run.results["questions"] = n;
      run.results["answers"] = m;

      double total = 1;
      for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(m);
      if (total <= static_cast<double>(cap)) {
        char* s = nullptr;
        check(tracial_classical_value(game.ptr, cap, g.threads, &s));
        run.results["classical"] = take_json(s);
      } else {
        run.results["classical"] = {{"skipped", "m^n exceeds the enumeration cap"}};
      }

      const auto cfg = optimizer(g, restarts, iterations, tolerance);
      char* s = nullptr;
      check(tracial_seesaw_value(game.ptr, algebra.ptr, &cfg, witness_out.empty() ? 0 : 1, &s));
      Json seesaw = take_json(s);
      strip_timing(seesaw);
      if (!witness_out.empty()) {
        write_atomic(witness_out, seesaw["witness"].dump() + "\n");
        seesaw.erase("witness");
        seesaw["witness_file"] = witness_out;
      }
      run.results["seesaw"] = seesaw;
      if (!seesaw["certify"].value("passed", false)) {
        std::cerr << "error: see-saw witness failed re-verification: "
                  << seesaw["certify"].value("message", std::string()) << "\n";
        run.exit_code = 3;
      }
    } else if (classical->parsed()) {
      run.command = "classical";
      run.args = {{"game", game_path}, {"cap", cap}};
      GameHandle game;
      load_game(run, game_path, game);
      char* s = nullptr;
      check(tracial_classical_value(game.ptr, cap, g.threads, &s));
      run.results = take_json(s);
    } else if (eval->parsed()) {
      run.command = "eval";
      run.args = {{"sentence", sentence_path}, {"model", model_path}, {"witness", witness_path},
                  {"restarts", restarts}, {"max_iterations", iterations}, {"tolerance", tolerance},
                  {"const_bound", const_bound}, {"pvm_hint", !no_hint}};
      SentenceHandle sentence;
      load_sentence(run, sentence_path, const_bound, sentence);
      AlgebraHandle algebra;
      if (model_path.empty()) {
        uniform_commutative(1, algebra);
      } else {
        load_model(run, model_path, algebra);
      }
      char* s = nullptr;
      check(tracial_sentence_info(sentence.ptr, &s));
      const Json info = take_json(s);
      run.results["restricted"] = info["restricted"];
      if (info["quantifier_free"].get<bool>() || !witness_path.empty()) {
        const std::string witness = witness_path.empty() ? std::string() : input(run, witness_path);
        check(tracial_sentence_eval(sentence.ptr, algebra.ptr, witness_path.empty() ? nullptr : witness.c_str(), &s));
        run.results["evaluation"] = take_json(s);
      } else {
        const auto cfg = optimizer(g, restarts, iterations, tolerance);
        check(tracial_sentence_maximize(sentence.ptr, algebra.ptr, &cfg, no_hint ? 0 : 1,
                                        witness_out.empty() ? 0 : 1, &s));
        Json cert = take_json(s);
        strip_timing(cert);
        if (!witness_out.empty()) {
          write_atomic(witness_out, cert["witness"].dump() + "\n");
          cert.erase("witness");
          cert["witness_file"] = witness_out;
        }
        run.results["maximization"] = cert;
        if (!cert["certify"].value("passed", false)) {
          std::cerr << "error: witness failed re-verification: " << cert["certify"].value("message", std::string())
                    << "\n";
          run.exit_code = 3;
        }
      }
    } else if (restrict_cmd->parsed()) {
      run.command = "restrict";
      run.args = {{"sentence", sentence_path}, {"eta", eta}, {"const_bound", const_bound}};
      SentenceHandle sentence;
      load_sentence(run, sentence_path, const_bound, sentence);
      char* s = nullptr;
      check(tracial_restrict_sentence(sentence.ptr, eta.c_str(), &s));
      run.results = take_json(s);
    } else if (stability->parsed()) {
      run.command = "stability";
      if (dims.empty()) dims = {4};
      run.args = {{"m", order}, {"dims", dims}, {"trials", trials}};
      char* s = nullptr;
      check(tracial_stability(order, dims.data(), dims.size(), trials, g.seed, g.threads, &s));
      Json out = take_json(s);
      run.csv = out["csv"].get<std::string>();
      run.has_table = true;
      run.results = {{"summary", out["summary"]}, {"rows", out["rows"]}};
      if (out["summary"]["violations"].get<std::size_t>() > 0) {
        std::cerr << "error: rounding bound violated in " << out["summary"]["violations"] << " trials\n";
        run.exit_code = 3;
      }
    } else if (modulus->parsed()) {
      run.command = "modulus";
      if (dims.empty()) dims = {1, 2};
      if (eps.empty()) eps = {0.001, 0.01, 0.1};
      run.args = {{"n", questions}, {"m", answers}, {"dims", dims}, {"eps", eps}, {"trials", mod_trials}};
      char* s = nullptr;
      check(tracial_modulus(questions, answers, dims.data(), dims.size(), eps.data(), eps.size(), mod_trials, g.seed,
                            g.threads, &s));
      Json out = take_json(s);
      run.csv = out["csv"].get<std::string>();
      run.has_table = true;
      run.results = {{"summary", out["summary"]}, {"rows", out["rows"]}};
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code == 1 ? 1 : f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::string payload;
  if (g.format == "csv") {
    payload = run.has_table ? run.csv : results_csv(run.results);
  } else {
    Json report{{"format", kReportFormat},
                {"version", tracial_version()},
                {"command", {{"name", run.command}, {"args", run.args}}},
                {"input_hashes", run.inputs},
                {"seed", g.seed},
                {"results", run.results},
                {"execution", {{"threads", g.threads}, {"wall_clock_ms", ms}}}};
    payload = report.dump(2) + "\n";
  }

  try {
    if (!g.out.empty() && !run.out_is_artifact) {
      write_atomic(g.out, payload);
    } else {
      std::cout << payload;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return run.exit_code;
}
