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

#include "doctest.h"
#include "fixtures.hpp"
#include "tracial/compiler.hpp"
#include "tracial/errors.hpp"
#include "tracial/io.hpp"

using namespace tracial;

TEST_SUITE("io") {
  TEST_CASE("models") {
    const auto A = algebra_from_json(parse_json(R"({"blocks": [[2, "1/3"], [1, "2/3"]]})", "model"));
    CHECK(A.describe() == "M2(1/3) + M1(2/3)");
    CHECK(algebra_from_json(algebra_to_json(A)) == A);
    CHECK(algebra_to_json(A)["format"] == kModelFormat);
    CHECK_THROWS_AS(algebra_from_json(parse_json(R"({"blocks": [[2, "1/3"]]})", "model")), ValidationError);
    CHECK_NOTHROW(algebra_from_json(parse_json(R"({"blocks": [[2, "1/3"]]})", "model"), true));
    CHECK_THROWS_AS(algebra_from_json(parse_json(R"({"blocks": [[0, 1]]})", "model")), ValidationError);
    CHECK_THROWS_AS(algebra_from_json(parse_json(R"({"format": "tracial-model 7", "blocks": [[1, 1]]})", "model")),
                    ValidationError);
    CHECK_THROWS_AS(parse_json("{", "model"), ValidationError);
  }

  TEST_CASE("elements") {
    Rng rng(1);
    const auto A = random_algebra(rng, 3, 3);
    std::vector<Element> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(random_unit_ball_element(A, rng));
    const auto back = elements_from_json(parse_json(elements_to_json(xs).dump(), "witness"), A);
    REQUIRE(back.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(two_distance(A, back[i], xs[i]) == 0.0);
    CHECK_THROWS_AS(element_from_json(parse_json("[[[1, 0]]]", "x"), FiniteTracialAlgebra::matrix(2)),
                    ValidationError);
  }

  TEST_CASE("games") {
    const SyncGame tri = triangle_game();
    const Json j = game_to_json(tri);
    CHECK(j["format"] == kGameFormat);
    CHECK(validate_game(raw_game_from_json(parse_json(j.dump(), "game"))) == tri);
    const Json dense = parse_json(R"({"n": 1, "m": 2, "mu": [[0, 0, "1"]], "decider": [0, 0, 0, 1]})", "game");
    const SyncGame g = validate_game(raw_game_from_json(dense));
    CHECK(g.accepts(1, 1, 0, 0));
    CHECK_FALSE(g.accepts(0, 0, 0, 0));
    CHECK_THROWS_AS(raw_game_from_json(parse_json(R"({"n": 1, "m": 2, "mu": [[0, 0]], "accept": []})", "game")),
                    ValidationError);
    CHECK_THROWS_AS(raw_game_from_json(parse_json(R"({"n": "1", "m": 2, "mu": [], "accept": []})", "game")),
                    ValidationError);
  }

  TEST_CASE("machines") {
    const char* text = R"({"states": ["a", "h"], "alphabet": ["_"], "blank": "_",
                           "transitions": [["a", "_", "_", "R", "h"]], "start": "a", "accept": "h"})";
    const auto tm = tm_from_json(parse_json(text, "machine"));
    CHECK(tm.transitions.size() == 1);
    CHECK(canonical_tm_text(tm_from_json(tm_to_json(tm))) == canonical_tm_text(tm));
    const char* bad = R"({"states": ["a", "h"], "alphabet": ["_"], "blank": "_",
                          "transitions": [["a", "_", "_", "N", "h"]], "start": "a", "accept": "h"})";
    CHECK_THROWS_AS(tm_from_json(parse_json(bad, "machine")), ValidationError);
  }
}
