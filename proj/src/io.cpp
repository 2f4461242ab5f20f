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

#include "tracial/io.hpp"

#include "tracial/errors.hpp"

namespace tracial {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) invalid(std::string(what) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) invalid(std::string(what) + " is missing \"" + key + "\"");
  return *it;
}

long long integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) invalid(std::string(what) + " must be an integer");
  return j.get<long long>();
}

std::string string_value(const Json& j, const char* what) {
  if (!j.is_string()) invalid(std::string(what) + " must be a string");
  return j.get<std::string>();
}

Rational rational_value(const Json& j, const char* what) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  invalid(std::string(what) + " must be a rational string \"p/q\" or an integer");
}

const Json& array(const Json& j, const char* what) {
  if (!j.is_array()) invalid(std::string(what) + " must be an array");
  return j;
}

std::vector<std::string> string_list(const Json& j, const char* what) {
  std::vector<std::string> out;
  for (const auto& s : array(j, what)) out.push_back(string_value(s, what));
  return out;
}

void check_format(const Json& j, const char* expected) {
  if (!j.is_object()) return;
  auto it = j.find("format");
  if (it == j.end()) return;
  if (!it->is_string() || it->get<std::string>() != expected) {
    invalid(std::string("unsupported format field; expected \"") + expected + "\"");
  }
}

}  // namespace

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    invalid(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

FiniteTracialAlgebra algebra_from_json(const Json& j, bool normalize) {
  check_format(j, kModelFormat);
  std::vector<Block> blocks;
  for (const auto& b : array(field(j, "blocks", "model"), "blocks")) {
    if (!b.is_array() || b.size() != 2) invalid("each block must be [dimension, weight]");
    const long long d = integer(b[0], "block dimension");
    if (d < 1) invalid("block dimension must be positive");
    blocks.push_back({static_cast<std::size_t>(d), rational_value(b[1], "block weight")});
  }
  return FiniteTracialAlgebra::make(std::move(blocks), normalize);
}

Json algebra_to_json(const FiniteTracialAlgebra& A) {
  Json blocks = Json::array();
  for (const auto& b : A.blocks()) blocks.push_back(Json::array({b.dim, format_rational(b.weight)}));
  return Json{{"format", kModelFormat}, {"blocks", blocks}};
}

Json element_to_json(const Element& x) {
  Json out = Json::array();
  for (const auto& b : x.blocks()) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index c = 0; c < b.cols(); ++c) entries.push_back(Json::array({b(r, c).real(), b(r, c).imag()}));
    }
    out.push_back(std::move(entries));
  }
  return out;
}

Element element_from_json(const Json& j, const FiniteTracialAlgebra& A) {
  array(j, "element");
  if (j.size() != A.block_count()) invalid("element has the wrong number of blocks");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    const auto d = static_cast<Eigen::Index>(A.dim(i));
    const Json& entries = array(j[i], "element block");
    if (entries.size() != static_cast<std::size_t>(d * d)) invalid("element block has the wrong number of entries");
    Matrix m(d, d);
    for (Eigen::Index k = 0; k < d * d; ++k) {
      const Json& e = entries[static_cast<std::size_t>(k)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        invalid("element entries must be [re, im] pairs");
      }
      m(k / d, k % d) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    blocks.push_back(std::move(m));
  }
  return Element(std::move(blocks));
}

Json elements_to_json(std::span<const Element> xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(element_to_json(x));
  return out;
}

std::vector<Element> elements_from_json(const Json& j, const FiniteTracialAlgebra& A) {
  std::vector<Element> out;
  for (const auto& e : array(j, "elements")) out.push_back(element_from_json(e, A));
  return out;
}

RawGame raw_game_from_json(const Json& j) {
  check_format(j, kGameFormat);
  RawGame raw;
  raw.n = integer(field(j, "n", "game"), "n");
  raw.m = integer(field(j, "m", "game"), "m");
  for (const auto& e : array(field(j, "mu", "game"), "mu")) {
    if (!e.is_array() || e.size() != 3) invalid("mu entries must be [x, y, \"p/q\"]");
    raw.mu.emplace_back(integer(e[0], "mu x"), integer(e[1], "mu y"), rational_value(e[2], "mu probability"));
  }
  if (auto it = j.find("decider"); it != j.end()) {
    std::vector<long long> table;
    for (const auto& v : array(*it, "decider")) table.push_back(integer(v, "decider value"));
    raw.decider = std::move(table);
  } else {
    for (const auto& q : array(field(j, "accept", "game"), "accept")) {
      if (!q.is_array() || q.size() != 4) invalid("accept entries must be [a, b, x, y]");
      raw.accept.push_back({integer(q[0], "a"), integer(q[1], "b"), integer(q[2], "x"), integer(q[3], "y")});
    }
  }
  return raw;
}

Json game_to_json(const SyncGame& game) {
  const RawGame raw = to_raw(game);
  Json mu = Json::array();
  for (const auto& [x, y, p] : raw.mu) mu.push_back(Json::array({x, y, format_rational(p)}));
  Json accept = Json::array();
  for (const auto& q : raw.accept) accept.push_back(Json::array({q[0], q[1], q[2], q[3]}));
  return Json{{"format", kGameFormat}, {"n", raw.n}, {"m", raw.m}, {"mu", mu}, {"accept", accept}};
}

TuringMachineDescription tm_from_json(const Json& j) {
  check_format(j, kMachineFormat);
  TuringMachineDescription tm;
  tm.states = string_list(field(j, "states", "machine"), "states");
  tm.alphabet = string_list(field(j, "alphabet", "machine"), "alphabet");
  tm.blank = string_value(field(j, "blank", "machine"), "blank");
  tm.start = string_value(field(j, "start", "machine"), "start");
  tm.accept = string_value(field(j, "accept", "machine"), "accept");
  for (const auto& t : array(field(j, "transitions", "machine"), "transitions")) {
    if (!t.is_array() || t.size() != 5) invalid("transitions must be [state, read, write, move, next]");
    Transition tr;
    tr.state = string_value(t[0], "transition state");
    tr.read = string_value(t[1], "transition read symbol");
    tr.write = string_value(t[2], "transition write symbol");
    const std::string move = string_value(t[3], "transition move");
    if (move != "L" && move != "R") invalid("move must be \"L\" or \"R\"");
    tr.move = move[0];
    tr.next = string_value(t[4], "transition next state");
    tm.transitions.push_back(std::move(tr));
  }
  validate_tm(tm);
  return tm;
}

Json tm_to_json(const TuringMachineDescription& tm) {
  Json transitions = Json::array();
  for (const auto& t : tm.transitions) {
    transitions.push_back(Json::array({t.state, t.read, t.write, std::string(1, t.move), t.next}));
  }
  return Json{{"format", kMachineFormat}, {"states", tm.states}, {"alphabet", tm.alphabet}, {"blank", tm.blank},
              {"transitions", transitions}, {"start", tm.start}, {"accept", tm.accept}};
}

Json config_to_json(const OptimizerConfig& cfg) {
  return Json{{"restarts", cfg.restarts},
              {"max_iterations", cfg.max_iterations},
              {"tolerance", cfg.tolerance},
              {"initial_step", cfg.initial_step},
              {"seed", cfg.seed}};
}

Json certify_to_json(const CertifyReport& rep) {
  return Json{{"claimed", rep.claimed},     {"primary", rep.primary}, {"secondary", rep.secondary},
              {"correlation", rep.correlation}, {"defect", rep.defect}, {"gap", rep.gap},
              {"defect_ok", rep.defect_ok}, {"passed", rep.passed}, {"message", rep.message}};
}

Json certificate_to_json(const ValueCertificate& cert, bool include_witness) {
  Json restarts = Json::array();
  for (const auto& r : cert.restarts) {
    restarts.push_back(Json{{"index", r.index}, {"dim", r.dim}, {"best", r.best}, {"iterations", r.iterations}});
  }
  Json out{{"value", cert.value},
           {"bound", "lower"},
           {"algebra", cert.algebra.describe()},
           {"model", algebra_to_json(cert.algebra)},
           {"exact_pvm", cert.exact_pvm},
           {"config", config_to_json(cert.config)},
           {"restarts", restarts},
           {"note", "finite-dimensional lower bound; no upper bound on the supremum over all tracial von Neumann "
                    "algebras is implied"}};
  if (include_witness) out["witness"] = elements_to_json(cert.witness);
  out["wall_clock_ms"] = cert.wall_clock_ms;
  return out;
}

}  // namespace tracial
