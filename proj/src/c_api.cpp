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

#include "tracial/tracial.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "tracial/compiler.hpp"
#include "tracial/errors.hpp"
#include "tracial/format.hpp"
#include "tracial/io.hpp"
#include "tracial/optimizer.hpp"
#include "tracial/pvm.hpp"

#ifndef TRACIAL_VERSION_STRING
#define TRACIAL_VERSION_STRING "0.0.0"
#endif

struct tracial_game {
  tracial::SyncGame game;
};

struct tracial_algebra {
  tracial::FiniteTracialAlgebra algebra;
};

struct tracial_sentence {
  tracial::SentenceFile file;
};

namespace {

using tracial::Json;

thread_local std::string last_error;

template <typename F>
tracial_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TRACIAL_OK;
  } catch (const tracial::ValidationError& e) {
    last_error = e.what();
    return TRACIAL_ERR_INVALID;
  } catch (const tracial::NumericalError& e) {
    last_error = e.what();
    return TRACIAL_ERR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TRACIAL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TRACIAL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TRACIAL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw tracial::ValidationError(std::string(what) + " must not be NULL");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  require(out, "output pointer");
  *out = duplicate(s);
}

void put_json(char** out, const Json& j) { put(out, j.dump()); }

tracial::PenaltyModulus penalty_from(const char* text) {
  if (text == nullptr) return tracial::PenaltyModulus::linear(tracial::kDefaultPenaltySlope);
  return tracial::PenaltyModulus::parse(text);
}

tracial::OptimizerConfig config_from(const tracial_optimizer_config* cfg) {
  tracial::OptimizerConfig out;
  if (cfg != nullptr) {
    out.restarts = cfg->restarts;
    out.max_iterations = cfg->max_iterations;
    out.tolerance = cfg->tolerance;
    out.seed = cfg->seed;
    out.threads = cfg->threads == 0 ? 1 : cfg->threads;
  }
  out.validate();
  return out;
}

Json path_json(const std::vector<std::size_t>& path) {
  Json out = Json::array();
  for (auto p : path) out.push_back(p);
  return out;
}

Json compile_info(const tracial::CompiledSentence& c, bool expanded) {
  const auto cert = tracial::check_restricted(c.sentence, tracial::SentenceClass::RestrictedUniversal);
  Json info{{"game_hash", c.game_hash},
            {"questions", c.questions},
            {"answers", c.answers},
            {"penalty", c.penalty},
            {"penalty_disabled", c.penalty.empty() ? false : tracial::PenaltyModulus::parse(c.penalty).vanishes()},
            {"lipschitz_psi", tracial::format_rational(c.lipschitz_psi)},
            {"lipschitz_body", tracial::format_rational(c.lipschitz_body)},
            {"restricted", cert.restricted},
            {"verdict", cert.restricted ? "restricted" : "not restricted"},
            {"trace_sugar_expanded", expanded},
            {"atomic_leaves", c.sentence.atomic_leaf_count()}};
  for (const auto& [k, v] : c.extra) info[k] = v;
  return info;
}

void emit_compiled(tracial::CompiledSentence c, int expand, char** file_out, char** info_out) {
  if (expand) {
    c.sentence = tracial::expand_trace_sugar(c.sentence);
    c.extra.emplace_back("trace-sugar", "expanded");
  }
  const Json info = compile_info(c, expand != 0);
  put(file_out, tracial::emit_sentence_file(c));
  if (info_out != nullptr) put_json(info_out, info);
}

std::vector<std::size_t> dims_from(const std::size_t* dims, std::size_t ndims) {
  if (ndims > 0) require(dims, "dims");
  return std::vector<std::size_t>(dims, dims + ndims);
}

}  // namespace

extern "C" {

const char* tracial_version(void) { return TRACIAL_VERSION_STRING; }

const char* tracial_last_error(void) { return last_error.c_str(); }

void tracial_string_free(char* s) { std::free(s); }

void tracial_optimizer_config_init(tracial_optimizer_config* cfg) {
  if (cfg == nullptr) return;
  const tracial::OptimizerConfig d;
  cfg->restarts = d.restarts;
  cfg->max_iterations = d.max_iterations;
  cfg->tolerance = d.tolerance;
  cfg->seed = d.seed;
  cfg->threads = d.threads;
}

tracial_status tracial_game_from_json(const char* json, tracial_game** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "output pointer");
    *out = new tracial_game{tracial::validate_game(tracial::raw_game_from_json(tracial::parse_json(json, "game")))};
  });
}

tracial_status tracial_game_builtin(const char* name, tracial_game** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "output pointer");
    for (auto& g : tracial::benchmark_corpus()) {
      if (g.name == name) {
        *out = new tracial_game{std::move(g.game)};
        return;
      }
    }
    throw tracial::ValidationError(std::string("unknown builtin game '") + name + "'");
  });
}

tracial_status tracial_game_info(const tracial_game* game, char** json_out) {
  return guarded([&] {
    require(game, "game");
    put_json(json_out, Json{{"n", game->game.questions()},
                            {"m", game->game.answers()},
                            {"hash", game->game.hash()},
                            {"game", tracial::game_to_json(game->game)}});
  });
}

void tracial_game_free(tracial_game* game) { delete game; }

tracial_status tracial_algebra_from_json(const char* json, int normalize, tracial_algebra** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "output pointer");
    *out = new tracial_algebra{tracial::algebra_from_json(tracial::parse_json(json, "model"), normalize != 0)};
  });
}

tracial_status tracial_algebra_from_blocks(const size_t* dims, const char* const* weights, size_t count,
                                           int normalize, tracial_algebra** out) {
  return guarded([&] {
    require(out, "output pointer");
    if (count > 0) {
      require(dims, "dims");
      require(weights, "weights");
    }
    std::vector<tracial::Block> blocks;
    for (std::size_t i = 0; i < count; ++i) {
      require(weights[i], "weight");
      blocks.push_back({dims[i], tracial::parse_rational(weights[i])});
    }
    *out = new tracial_algebra{tracial::FiniteTracialAlgebra::make(std::move(blocks), normalize != 0)};
  });
}

tracial_status tracial_algebra_describe(const tracial_algebra* algebra, char** out) {
  return guarded([&] {
    require(algebra, "algebra");
    put(out, algebra->algebra.describe());
  });
}

void tracial_algebra_free(tracial_algebra* algebra) { delete algebra; }

tracial_status tracial_sentence_parse(const char* text, const char* const_bound, tracial_sentence** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output pointer");
    const tracial::Rational bound = const_bound ? tracial::parse_rational(const_bound) : tracial::Rational(1);
    if (bound < 0) throw tracial::ValidationError("const bound must be nonnegative");
    *out = new tracial_sentence{tracial::read_sentence_file(text, bound)};
  });
}

tracial_status tracial_sentence_print(const tracial_sentence* sentence, char** out) {
  return guarded([&] {
    require(sentence, "sentence");
    put(out, tracial::print_sentence(sentence->file.sentence));
  });
}

tracial_status tracial_sentence_info(const tracial_sentence* sentence, char** json_out) {
  return guarded([&] {
    require(sentence, "sentence");
    const auto& s = sentence->file.sentence;
    const auto cert = tracial::check_restricted(s, tracial::SentenceClass::RestrictedUniversal);
    Json info{{"restricted", cert.restricted}, {"reason", cert.reason}, {"witness_path", path_json(cert.witness_path)}};
    const auto form = tracial::universal_form(s);
    info["quantifier_free"] = s.is_quantifier_free();
    info["universal"] = form.has_value();
    if (form) {
      info["binders"] = form->names.size();
      const auto l = tracial::try_lipschitz_bound(form->body);
      info["lipschitz_body"] = l ? Json(tracial::format_rational(*l)) : Json(nullptr);
    }
    Json meta = Json::object();
    for (const auto& [k, v] : sentence->file.metadata) meta[k] = v;
    info["metadata"] = meta;
    put_json(json_out, info);
  });
}

void tracial_sentence_free(tracial_sentence* sentence) { delete sentence; }

tracial_status tracial_compile_game(const tracial_game* game, const char* penalty, int expand_sugar, char** file_out,
                                    char** info_out) {
  return guarded([&] {
    require(game, "game");
    emit_compiled(tracial::compile_game(game->game, penalty_from(penalty)), expand_sugar, file_out, info_out);
  });
}

tracial_status tracial_compile_tm(const char* tm_json, const char* constructor, const char* penalty, int expand_sugar,
                                  char** file_out, char** info_out) {
  return guarded([&] {
    require(tm_json, "tm_json");
    const std::string ctor = constructor ? constructor : "demo";
    if (ctor != "demo") throw tracial::ValidationError("unknown game constructor '" + ctor + "'; only demo exists");
    const auto tm = tracial::tm_from_json(tracial::parse_json(tm_json, "machine"));
    emit_compiled(tracial::compile_tm(tm, tracial::demo_constructor(), penalty_from(penalty),
                                      tracial::kDemoConstructorLabel),
                  expand_sugar, file_out, info_out);
  });
}

tracial_status tracial_restrict_sentence(const tracial_sentence* sentence, const char* eta, char** json_out) {
  return guarded([&] {
    require(sentence, "sentence");
    require(eta, "eta");
    const auto r = tracial::restrict_sentence(sentence->file.sentence, tracial::parse_rational(eta));
    const auto cert = tracial::check_restricted(r.sentence, tracial::SentenceClass::RestrictedUniversal);
    put_json(json_out, Json{{"sentence", tracial::print_sentence(r.sentence)},
                            {"budget", tracial::format_rational(r.budget)},
                            {"budget_value", tracial::to_double(r.budget)},
                            {"restricted", cert.restricted}});
  });
}

tracial_status tracial_classical_value(const tracial_game* game, uint64_t cap, unsigned threads, char** json_out) {
  return guarded([&] {
    require(game, "game");
    const auto v = tracial::classical_sync_value(game->game, cap == 0 ? tracial::kDefaultClassicalCap : cap,
                                                 threads == 0 ? 1 : threads);
    Json f = Json::array();
    for (auto a : v.assignment) f.push_back(a);
    put_json(json_out, Json{{"value", tracial::format_rational(v.value)},
                            {"value_real", tracial::to_double(v.value)},
                            {"assignment", f},
                            {"assignments_enumerated", tracial::assignment_count(game->game)}});
  });
}

tracial_status tracial_seesaw_value(const tracial_game* game, const tracial_algebra* algebra,
                                    const tracial_optimizer_config* cfg, int include_witness, char** json_out) {
  return guarded([&] {
    require(game, "game");
    require(algebra, "algebra");
    const auto cert = tracial::seesaw_game_value(game->game, algebra->algebra, config_from(cfg));
    Json out = tracial::certificate_to_json(cert, include_witness != 0);
    out["certify"] = tracial::certify_to_json(tracial::certify(game->game, cert.algebra, cert.witness, cert.value));
    put_json(json_out, out);
  });
}

tracial_status tracial_sentence_maximize(const tracial_sentence* sentence, const tracial_algebra* algebra,
                                         const tracial_optimizer_config* cfg, int use_pvm_shape, int include_witness,
                                         char** json_out) {
  return guarded([&] {
    require(sentence, "sentence");
    require(algebra, "algebra");
    std::optional<tracial::PvmShape> shape;
    if (use_pvm_shape && sentence->file.pvm_shape) {
      shape = tracial::PvmShape{sentence->file.pvm_shape->first, sentence->file.pvm_shape->second};
    }
    const auto cert = tracial::maximize_sentence(sentence->file.sentence, algebra->algebra, config_from(cfg), shape);
    Json out = tracial::certificate_to_json(cert, include_witness != 0);
    out["pvm_shape_hint"] = shape.has_value();
    out["certify"] =
        tracial::certify_to_json(tracial::certify(sentence->file.sentence, cert.algebra, cert.witness, cert.value));
    put_json(json_out, out);
  });
}

tracial_status tracial_sentence_eval(const tracial_sentence* sentence, const tracial_algebra* algebra,
                                     const char* witness_json, char** json_out) {
  return guarded([&] {
    require(sentence, "sentence");
    require(algebra, "algebra");
    const auto& s = sentence->file.sentence;
    const auto& A = algebra->algebra;
    if (s.is_quantifier_free()) {
      if (!tracial::is_sentence(s)) throw tracial::ValidationError("formula has free variables");
      put_json(json_out, Json{{"value", tracial::eval_formula(s, A, {})}, {"kind", "quantifier-free"}});
      return;
    }
    require(witness_json, "witness");
    const auto form = tracial::universal_form(s);
    if (!form) throw tracial::ValidationError("nested or inf quantifiers are not supported");
    const auto witness = tracial::elements_from_json(tracial::parse_json(witness_json, "witness"), A);
    if (witness.size() != form->names.size()) {
      throw tracial::ValidationError("witness has " + std::to_string(witness.size()) + " elements, expected " +
                                     std::to_string(form->names.size()));
    }
    const double v = tracial::eval_formula(form->body, A, witness);
    put_json(json_out, Json{{"value", v},
                            {"kind", "body at witness"},
                            {"bound", "lower"},
                            {"certify", tracial::certify_to_json(tracial::certify(s, A, witness, v))}});
  });
}

tracial_status tracial_stability(unsigned m, const size_t* dims, size_t ndims, size_t trials, uint64_t seed,
                                 unsigned threads, char** json_out) {
  return guarded([&] {
    tracial::StabilityExperiment ex;
    ex.order = m;
    ex.dims = dims_from(dims, ndims);
    ex.trials = trials;
    ex.seed = seed;
    ex.threads = threads == 0 ? 1 : threads;
    const auto result = tracial::run_stability_trials(ex);
    Json rows = Json::array();
    double max_ratio = 0;
    double max_order = 0;
    std::size_t violations = 0;
    for (const auto& t : result) {
      rows.push_back(Json{{"trial", t.index},         {"m", t.order},           {"dim", t.dim},
                          {"epsilon", t.epsilon},     {"distance", t.distance}, {"bound", t.bound},
                          {"ratio", t.ratio},         {"order_defect", t.order_defect}});
      max_ratio = std::max(max_ratio, t.ratio);
      max_order = std::max(max_order, t.order_defect);
      if (t.distance > t.bound || t.order_defect > 1e-10) ++violations;
    }
    Json summary{{"trials", result.size()},
                 {"max_ratio", max_ratio},
                 {"ratio_bound", std::ldexp(1.0, static_cast<int>(m) + 2)},
                 {"max_order_defect", max_order},
                 {"violations", violations}};
    put_json(json_out, Json{{"csv", tracial::stability_csv(result)}, {"rows", rows}, {"summary", summary}});
  });
}

tracial_status tracial_modulus(size_t n, size_t m, const size_t* dims, size_t ndims, const double* eps, size_t neps,
                               size_t trials, uint64_t seed, unsigned threads, char** json_out) {
  return guarded([&] {
    tracial::ModulusExperiment ex;
    ex.questions = n;
    ex.answers = m;
    ex.dims = dims_from(dims, ndims);
    if (neps > 0) require(eps, "eps");
    ex.epsilons.assign(eps, eps + neps);
    ex.trials = trials;
    ex.seed = seed;
    ex.threads = threads == 0 ? 1 : threads;
    const auto table = tracial::estimate_modulus(ex);
    Json rows = Json::array();
    for (const auto& r : table.rows) rows.push_back(Json{{"epsilon", r.epsilon}, {"delta_hat", r.delta_hat}});
    Json summary{{"questions", table.questions}, {"answers", table.answers},
                 {"dims", table.dims},           {"trials", table.trials},
                 {"max_dim", table.max_dim},     {"seed", table.seed},
                 {"rounding_failures", table.rounding_failures}};
    put_json(json_out, Json{{"csv", tracial::modulus_csv(table)}, {"rows", rows}, {"summary", summary}});
  });
}

}  // extern "C"
