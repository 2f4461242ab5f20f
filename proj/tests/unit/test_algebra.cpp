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

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "tracial/errors.hpp"

using namespace tracial;
using fixtures::mat;
using fixtures::single;
using fixtures::x;

TEST_SUITE("algebra") {
  TEST_CASE("construction") {
    const auto M2 = FiniteTracialAlgebra::make({{2, Rational(1)}});
    CHECK(M2 == FiniteTracialAlgebra::matrix(2));
    CHECK(trace(M2, M2.identity()).real() == doctest::Approx(1.0));
    const auto CC = FiniteTracialAlgebra::make({{1, Rational(1, 2)}, {1, Rational(1, 2)}});
    const Element e({mat(1, {3.0}), mat(1, {5.0})});
    CHECK(trace(CC, e).real() == doctest::Approx(4.0));
    CHECK_THROWS_AS(FiniteTracialAlgebra::make({{2, Rational(1, 3)}}), ValidationError);
    CHECK_NOTHROW(FiniteTracialAlgebra::make({{2, Rational(1, 3)}}, true));
    CHECK_THROWS_AS(FiniteTracialAlgebra::make({}), ValidationError);
    CHECK_THROWS_AS(FiniteTracialAlgebra::make({{0, Rational(1)}}), ValidationError);
    CHECK_THROWS_AS(FiniteTracialAlgebra::make({{1, Rational(-1)}, {1, Rational(2)}}), ValidationError);
    CHECK(CC.describe() == "M1(1/2) + M1(1/2)");
  }

  TEST_CASE("trace examples") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    CHECK(trace(M2, M2.identity()).real() == 1.0);
    CHECK(trace(M2, single(mat(2, {1.0, 0.0, 0.0, 0.0}))).real() == 0.5);
    const auto A = FiniteTracialAlgebra::make({{1, Rational(1, 3)}, {1, Rational(2, 3)}});
    CHECK(trace(A, Element({mat(1, {1.0}), mat(1, {0.0})})).real() == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("norm examples") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    const Element p = single(mat(2, {1.0, 0.0, 0.0, 0.0}));
    const Element n = single(mat(2, {0.0, 1.0, 0.0, 0.0}));
    CHECK(two_norm(M2, M2.identity()) == doctest::Approx(1.0));
    CHECK(two_norm(M2, p) == doctest::Approx(0.70710678118654752));
    CHECK(op_norm(M2, M2.identity()) == doctest::Approx(1.0));
    CHECK(op_norm(M2, p) == doctest::Approx(1.0));
    CHECK(op_norm(M2, n) == doctest::Approx(1.0));
  }

  TEST_CASE("formula evaluation examples") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    const Element n = single(mat(2, {0.0, 1.0, 0.0, 0.0}));
    CHECK(eval_formula(Formula::norm2(x(0) - adj(x(0))), M2, {&n, 1}) == doctest::Approx(1.0));
    const Element z = M2.zero();
    CHECK(eval_formula(Formula::truncsub(Formula::constant(Rational(1, 2)), Formula::norm2(x(0))), M2, {&z, 1}) ==
          0.5);
    const Element big = single(mat(2, {2.0, 0.0, 0.0, 0.0}));
    CHECK_THROWS_AS(eval_formula(Formula::norm2(x(0)), M2, {&big, 1}), ValidationError);
    CHECK_THROWS_AS(eval_formula(Formula::norm2(x(1)), M2, {&n, 1}), ValidationError);
    CHECK_THROWS_AS(eval_formula(Formula::sup({"y"}, Formula::norm2(x(0))), M2, {}), ValidationError);
  }

  TEST_CASE("random element properties") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      const auto A = random_algebra(rng, 3, 4);
      const Element a = random_unit_ball_element(A, rng);
      const Element b = random_unit_ball_element(A, rng);
      CHECK(std::abs(trace(A, a * b) - trace(A, b * a)) < 1e-12);
      CHECK(std::abs(trace(A, b.adjoint() * a)) <= two_norm(A, a) * two_norm(A, b) + 1e-10);
      CHECK(two_norm(A, a) <= op_norm(A, a) + 1e-10);
      CHECK(op_norm(A, a) <= 1.0 + 1e-12);
      CHECK(std::abs(op_norm(A, project_to_unit_ball(A, 3.0 * a)) - std::min(1.0, 3.0 * op_norm(A, a))) < 1e-9);
    }
  }

  TEST_CASE("direct sum convexity with exact weights") {
    const auto A1 = FiniteTracialAlgebra::matrix(2);
    const auto A2 = FiniteTracialAlgebra::matrix(3);
    const auto A = FiniteTracialAlgebra::make({{2, Rational(1, 4)}, {3, Rational(3, 4)}});
    const Matrix m1 = mat(2, {1.0, 2.0, 3.0, 5.0});
    const Matrix m2 = mat(3, {1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 9.0});
    const Complex t = trace(A, Element({m1, m2}));
    CHECK(t.real() == 0.25 * trace(A1, single(m1)).real() + 0.75 * trace(A2, single(m2)).real());
    CHECK(t.real() == 3.75);
  }

  TEST_CASE("shape mismatches are rejected") {
    const auto A = FiniteTracialAlgebra::make({{2, Rational(1, 2)}, {1, Rational(1, 2)}});
    CHECK_FALSE(A.contains(FiniteTracialAlgebra::matrix(2).identity()));
    CHECK_THROWS_AS(A.require(FiniteTracialAlgebra::matrix(2).identity()), ValidationError);
    CHECK(A.linear_dim() == 5);
    CHECK(A.max_dim() == 2);
  }
}

TEST_SUITE("presentation") {
  TEST_CASE("norm approximation examples") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    const Presentation P(M2, {single(mat(2, {1.0, 0.0, 0.0, 0.0})), single(mat(2, {0.0, 1.0, 0.0, 0.0}))});
    CHECK(P.generated_rank() == 4);
    CHECK(std::abs(to_double(presentation_norm(P, x(0), 3)) - std::sqrt(0.5)) < 1.0 / 8);
    for (unsigned k = 0; k <= 30; ++k) {
      CHECK(std::abs(to_double(presentation_norm(P, x(0) * x(0) - x(0), k))) < std::ldexp(1.0, -static_cast<int>(k)));
    }
    CHECK(std::abs(to_double(presentation_norm(P, Term::one(), 10)) - 1.0) < std::ldexp(1.0, -10));
    CHECK_THROWS_AS(presentation_norm(P, x(2), 3), ValidationError);
    CHECK_THROWS_AS(presentation_norm(P, x(0), kMaxPresentationBits + 1), ValidationError);
  }

  TEST_CASE("non-generating points are rejected") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    CHECK_THROWS_AS(Presentation(M2, {single(mat(2, {1.0, 0.0, 0.0, 0.0}))}), ValidationError);
  }
}
