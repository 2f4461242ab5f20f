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

// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tracial/tracial.h"

namespace {

using Json = nlohmann::json;

std::string take(char* s) {
  std::string out = s;
  tracial_string_free(s);
  return out;
}

const char* kTriangle = R"({"n": 3, "m": 2,
  "mu": [[0,0,"1/9"],[0,1,"1/9"],[0,2,"1/9"],[1,0,"1/9"],[1,1,"1/9"],[1,2,"1/9"],[2,0,"1/9"],[2,1,"1/9"],[2,2,"1/9"]],
  "accept": [[0,0,0,0],[1,1,0,0],[0,0,1,1],[1,1,1,1],[0,0,2,2],[1,1,2,2],
             [0,1,0,1],[1,0,0,1],[0,1,0,2],[1,0,0,2],[0,1,1,0],[1,0,1,0],
             [0,1,1,2],[1,0,1,2],[0,1,2,0],[1,0,2,0],[0,1,2,1],[1,0,2,1]]})";

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::strlen(tracial_version()) > 0);
  tracial_optimizer_config cfg;
  tracial_optimizer_config_init(&cfg);
  CHECK(cfg.restarts == 32);
  CHECK(cfg.max_iterations == 500);
  CHECK(cfg.threads == 1);
}

TEST_CASE("errors map to status codes") {
  tracial_game* g = nullptr;
  CHECK(tracial_game_from_json("{", &g) == TRACIAL_ERR_INVALID);
  CHECK(g == nullptr);
  CHECK(std::string(tracial_last_error()).find("JSON") != std::string::npos);
  CHECK(tracial_game_from_json(R"({"n": 1, "m": 2, "mu": [[0, 0, "1/2"]], "accept": []})", &g) ==
        TRACIAL_ERR_INVALID);
  CHECK(tracial_game_builtin("nope", &g) == TRACIAL_ERR_INVALID);
  CHECK(tracial_game_from_json(nullptr, &g) == TRACIAL_ERR_INVALID);
  tracial_sentence* s = nullptr;
  CHECK(tracial_sentence_parse("(sup (x", nullptr, &s) == TRACIAL_ERR_INVALID);
  CHECK(std::string(tracial_last_error()).find("offset 7") != std::string::npos);
  REQUIRE(tracial_game_builtin("triangle", &g) == TRACIAL_OK);
  CHECK(std::string(tracial_last_error()).empty());
  tracial_game_free(g);
  tracial_game_free(nullptr);
}

TEST_CASE("game, compile and evaluate") {
  tracial_game* g = nullptr;
  REQUIRE(tracial_game_from_json(kTriangle, &g) == TRACIAL_OK);
  char* out = nullptr;
  REQUIRE(tracial_game_info(g, &out) == TRACIAL_OK);
  const Json info = Json::parse(take(out));
  CHECK(info["n"] == 3);
  CHECK(info["m"] == 2);

  REQUIRE(tracial_classical_value(g, 0, 2, &out) == TRACIAL_OK);
  const Json cv = Json::parse(take(out));
  CHECK(cv["value"] == "7/9");
  CHECK(cv["assignment"] == Json::array({0, 0, 1}));

  char* file = nullptr;
  char* meta = nullptr;
  REQUIRE(tracial_compile_game(g, nullptr, 0, &file, &meta) == TRACIAL_OK);
  const std::string text = take(file);
  const Json m = Json::parse(take(meta));
  CHECK(m["restricted"] == true);
  CHECK(m["lipschitz_psi"] == "4");
  CHECK(tracial_compile_game(g, "linear -1", 0, &file, &meta) == TRACIAL_ERR_INVALID);

  tracial_sentence* s = nullptr;
  REQUIRE(tracial_sentence_parse(text.c_str(), nullptr, &s) == TRACIAL_OK);
  REQUIRE(tracial_sentence_info(s, &out) == TRACIAL_OK);
  const Json si = Json::parse(take(out));
  CHECK(si["restricted"] == true);
  CHECK(si["binders"] == 6);
  CHECK(si["metadata"]["pvm-shape"] == "3 2");

  const size_t dims[] = {1, 1, 1};
  const char* weights[] = {"1/3", "1/3", "1/3"};
  tracial_algebra* a = nullptr;
  REQUIRE(tracial_algebra_from_blocks(dims, weights, 3, 0, &a) == TRACIAL_OK);
  REQUIRE(tracial_algebra_describe(a, &out) == TRACIAL_OK);
  CHECK(take(out) == "M1(1/3) + M1(1/3) + M1(1/3)");

  tracial_optimizer_config cfg;
  tracial_optimizer_config_init(&cfg);
  cfg.restarts = 4;
  REQUIRE(tracial_seesaw_value(g, a, &cfg, 1, &out) == TRACIAL_OK);
  const Json sv = Json::parse(take(out));
  CHECK(sv["value"].get<double>() == doctest::Approx(7.0 / 9).epsilon(1e-9));
  CHECK(sv["certify"]["passed"] == true);
  CHECK(sv["witness"].size() == 6);

  REQUIRE(tracial_sentence_maximize(s, a, &cfg, 1, 1, &out) == TRACIAL_OK);
  const Json mv = Json::parse(take(out));
  CHECK(mv["value"].get<double>() == doctest::Approx(7.0 / 9).epsilon(1e-6));

  const std::string witness = mv["witness"].dump();
  REQUIRE(tracial_sentence_eval(s, a, witness.c_str(), &out) == TRACIAL_OK);
  const Json ev = Json::parse(take(out));
  CHECK(ev["value"].get<double>() == doctest::Approx(mv["value"].get<double>()));
  CHECK(tracial_sentence_eval(s, a, "[]", &out) == TRACIAL_ERR_INVALID);

  cfg.restarts = 0;
  CHECK(tracial_seesaw_value(g, a, &cfg, 0, &out) == TRACIAL_ERR_INVALID);

  tracial_sentence_free(s);
  tracial_algebra_free(a);
  tracial_game_free(g);
}

TEST_CASE("quantifier-free evaluation and restriction") {
  tracial_sentence* s = nullptr;
  tracial_algebra* a = nullptr;
  char* out = nullptr;
  REQUIRE(tracial_sentence_parse("(const 0)", nullptr, &s) == TRACIAL_OK);
  REQUIRE(tracial_algebra_from_json(R"({"blocks": [[2, 1]]})", 0, &a) == TRACIAL_OK);
  REQUIRE(tracial_sentence_eval(s, a, nullptr, &out) == TRACIAL_OK);
  CHECK(Json::parse(take(out))["value"] == 0.0);
  tracial_sentence_free(s);

  REQUIRE(tracial_sentence_parse("(sup (x) (fn exp (norm2 x)))", nullptr, &s) == TRACIAL_OK);
  REQUIRE(tracial_restrict_sentence(s, "1/100", &out) == TRACIAL_OK);
  const Json r = Json::parse(take(out));
  CHECK(r["restricted"] == true);
  CHECK(r["budget_value"].get<double>() <= 0.01);
  CHECK(tracial_restrict_sentence(s, "0", &out) == TRACIAL_ERR_INVALID);
  tracial_sentence_free(s);
  tracial_algebra_free(a);
}

TEST_CASE("machines") {
  const char* tm = R"({"states": ["a", "h"], "alphabet": ["_"], "blank": "_",
                       "transitions": [["a", "_", "_", "R", "h"]], "start": "a", "accept": "h"})";
  char* f1 = nullptr;
  char* f2 = nullptr;
  REQUIRE(tracial_compile_tm(tm, "demo", nullptr, 0, &f1, nullptr) == TRACIAL_OK);
  REQUIRE(tracial_compile_tm(tm, nullptr, nullptr, 0, &f2, nullptr) == TRACIAL_OK);
  CHECK(take(f1) == take(f2));
  CHECK(tracial_compile_tm(tm, "lin", nullptr, 0, &f1, nullptr) == TRACIAL_ERR_INVALID);
}

TEST_CASE("experiments") {
  const size_t dims[] = {4};
  char* out = nullptr;
  REQUIRE(tracial_stability(2, dims, 1, 100, 7, 2, &out) == TRACIAL_OK);
  const Json st = Json::parse(take(out));
  CHECK(st["summary"]["violations"] == 0);
  CHECK(st["summary"]["max_ratio"].get<double>() <= 16.0);
  CHECK(st["rows"].size() == 100);
  CHECK(tracial_stability(2, dims, 0, 100, 7, 2, &out) == TRACIAL_ERR_INVALID);

  const size_t mdims[] = {2, 4};
  const double eps[] = {0.1};
  REQUIRE(tracial_modulus(2, 2, mdims, 2, eps, 1, 100, 42, 2, &out) == TRACIAL_OK);
  const Json mo = Json::parse(take(out));
  CHECK(mo["rows"].size() == 1);
  CHECK(mo["csv"].get<std::string>().rfind("epsilon,delta_hat,trials,max_dim,seed\n", 0) == 0);
}
