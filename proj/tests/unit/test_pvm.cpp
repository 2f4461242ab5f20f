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
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "tracial/errors.hpp"
#include "tracial/pvm.hpp"

using namespace tracial;
using fixtures::mat;
using fixtures::single;

namespace {

double op_distance(const FiniteTracialAlgebra& A, const Element& a, const Element& b) { return op_norm(A, a - b); }

}  // namespace

TEST_SUITE("pvm") {
  TEST_CASE("defect examples") {
    const auto C = FiniteTracialAlgebra::matrix(1);
    const std::vector<std::size_t> f{1, 0};
    CHECK(pvm_defect(C, deterministic_pvm(C, 2, f).operators()) == 0.0);
    const Element half = fixtures::scalar(C, 0.5);
    const auto b = pvm_defect_breakdown(C, OperatorTuple(1, 2, {half, half}));
    CHECK(b.idempotent == doctest::Approx(0.25));
    CHECK(b.self_adjoint == 0.0);
    CHECK(b.partition == doctest::Approx(0.0));

    Rng rng(2);
    const auto M3 = FiniteTracialAlgebra::matrix(3);
    for (int i = 0; i < 50; ++i) {
      const PvmTuple E = random_pvm(M3, 2, 3, rng);
      OperatorTuple noisy = E.operators();
      noisy.at(1, 2) += 0.01 * random_hermitian_unit(M3, rng);
      const double d = pvm_defect(M3, noisy);
      CHECK(d > 0.0);
      CHECK(d <= 0.05);
    }
  }

  TEST_CASE("pvm to unitary examples") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    const std::vector<Element> row{single(mat(2, {1.0, 0.0, 0.0, 0.0})), single(mat(2, {0.0, 0.0, 0.0, 1.0}))};
    const auto u = pvm_to_unitary(M2, row, RootOfUnity::primitive(2));
    CHECK(op_distance(M2, u.element(), single(mat(2, {1.0, 0.0, 0.0, -1.0}))) < 1e-15);
    const std::vector<Element> trivial{M2.identity(), M2.zero()};
    CHECK(op_distance(M2, pvm_to_unitary(M2, trivial, RootOfUnity::primitive(2)).element(), M2.identity()) < 1e-15);

    Rng rng(3);
    const auto M3 = FiniteTracialAlgebra::matrix(3);
    const PvmTuple E = random_pvm(M3, 1, 3, rng);
    const auto w = pvm_to_unitary(M3, E.operators().row(0), RootOfUnity::primitive(3));
    CHECK(order_defect(M3, w.element(), 3) < 1e-10);
    const std::vector<Element> inexact{fixtures::scalar(M2, 0.5), fixtures::scalar(M2, 0.5)};
    CHECK_THROWS_AS(pvm_to_unitary(M2, inexact, RootOfUnity::primitive(2)), ValidationError);
  }

  TEST_CASE("unitary to pvm examples") {
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    const auto u = OrderMUnitary::verify(M2, single(mat(2, {1.0, 0.0, 0.0, -1.0})), 2);
    const auto row = unitary_to_pvm(M2, u, RootOfUnity::primitive(2));
    CHECK(op_distance(M2, row[0], single(mat(2, {1.0, 0.0, 0.0, 0.0}))) < 1e-15);
    CHECK(op_distance(M2, row[1], single(mat(2, {0.0, 0.0, 0.0, 1.0}))) < 1e-15);
    const auto one = unitary_to_pvm(M2, OrderMUnitary::verify(M2, M2.identity(), 2), RootOfUnity::primitive(2));
    CHECK(op_distance(M2, one[0], M2.identity()) < 1e-15);
    CHECK(op_norm(M2, one[1]) < 1e-15);
    CHECK_THROWS_AS(OrderMUnitary::verify(M2, fixtures::scalar(M2, Complex(0, 1)), 2), NumericalError);
  }

  TEST_CASE("fourier round trips") {
    Rng rng(5);
    for (unsigned m : {2U, 3U, 5U}) {
      for (unsigned power = 1; power < m; ++power) {
        if (std::gcd(power, m) != 1) continue;
        const RootOfUnity omega{m, power};
        for (int i = 0; i < 20; ++i) {
          const auto A = random_algebra(rng, 3, 5);
          const PvmTuple E = random_pvm(A, 1, m, rng);
          const auto u = pvm_to_unitary(A, E.operators().row(0), omega);
          const auto back = unitary_to_pvm(A, u, omega);
          for (unsigned a = 0; a < m; ++a) CHECK(op_distance(A, back[a], E.at(0, a)) < 1e-10);
          const Element v = random_order_m_unitary(A, m, rng);
          const auto row = unitary_to_pvm(A, OrderMUnitary::verify(A, v, m), omega);
          CHECK(op_distance(A, pvm_to_unitary(A, row, omega).element(), v) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("roots of unity are exact on the axes") {
    const RootOfUnity w4 = RootOfUnity::primitive(4);
    CHECK(w4.pow(1) == Complex(0, 1));
    CHECK(w4.pow(2) == Complex(-1, 0));
    CHECK(w4.pow(-1) == Complex(0, -1));
    CHECK(RootOfUnity::primitive(2).value() == Complex(-1, 0));
    CHECK(std::abs(RootOfUnity::primitive(3).value() - std::polar(1.0, 2 * M_PI / 3)) < 1e-15);
  }

  TEST_CASE("unitary rounding examples") {
    Rng rng(6);
    const auto M3 = FiniteTracialAlgebra::matrix(3);
    const Element v = random_order_m_unitary(M3, 3, rng);
    const auto r = round_to_order_m_unitary(M3, v, 3);
    CHECK(r.distance == 0.0);
    CHECK(op_distance(M3, r.unitary.element(), v) == 0.0);

    const auto C = FiniteTracialAlgebra::matrix(1);
    const Element s = fixtures::scalar(C, std::polar(1.0, 0.05));
    const auto rs = round_to_order_m_unitary(C, s, 2);
    CHECK(rs.epsilon == doctest::Approx(2 * std::sin(0.05)).epsilon(1e-12));
    CHECK(rs.epsilon < 0.25);
    CHECK(std::abs(rs.unitary.element().block(0)(0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(rs.distance == doctest::Approx(2 * std::sin(0.025)).epsilon(1e-12));
    CHECK(rs.distance <= 16 * rs.epsilon);

    const Element far = fixtures::scalar(C, std::polar(1.0, 0.5));
    CHECK_THROWS_AS(round_to_order_m_unitary(C, far, 2), ValidationError);
  }

  TEST_CASE("unitary rounding bound on random perturbations") {
    StabilityExperiment ex;
    ex.dims = {1, 3, 8, 16};
    ex.trials = 120;
    for (unsigned m : {2U, 3U, 4U}) {
      ex.order = m;
      ex.seed = m;
      for (const auto& t : run_stability_trials(ex)) {
        CHECK(t.epsilon < std::ldexp(1.0, -static_cast<int>(m)));
        CHECK(t.distance <= t.bound);
        CHECK(t.order_defect <= 1e-10);
      }
    }
  }

  TEST_CASE("stability trials are reproducible across threads") {
    StabilityExperiment ex;
    ex.order = 3;
    ex.dims = {2, 5};
    ex.trials = 40;
    ex.seed = 11;
    const std::string one = stability_csv(run_stability_trials(ex));
    ex.threads = 4;
    CHECK(stability_csv(run_stability_trials(ex)) == one);
    CHECK(one.rfind("trial,m,dim,epsilon,distance,bound,ratio,order_defect\n", 0) == 0);
  }

  TEST_CASE("pvm rounding examples") {
    Rng rng(7);
    const auto M2 = FiniteTracialAlgebra::matrix(2);
    const PvmTuple exact = random_pvm(M2, 2, 3, rng);
    const auto r = round_to_pvm(M2, exact.operators());
    CHECK(r.distance == 0.0);
    CHECK(r.routes == std::vector<RoundingRoute>{RoundingRoute::Unchanged, RoundingRoute::Unchanged});

    const auto C = FiniteTracialAlgebra::matrix(1);
    const Element half = fixtures::scalar(C, 0.5);
    const auto f = round_to_pvm(C, OperatorTuple(1, 2, {half, half}));
    CHECK(f.routes.front() == RoundingRoute::EigenspaceFallback);
    CHECK(f.distance == doctest::Approx(0.5));
    CHECK(pvm_defect(C, f.tuple.operators()) <= 1e-9);
  }

  TEST_CASE("pvm rounding under small noise") {
    Rng rng(8);
    const auto M4 = FiniteTracialAlgebra::matrix(4);
    for (int i = 0; i < 100; ++i) {
      const PvmTuple E = random_pvm(M4, 2, 3, rng);
      OperatorTuple noisy = E.operators();
      for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t a = 0; a < 3; ++a) noisy.at(x, a) += 1e-3 * random_hermitian_unit(M4, rng);
      }
      const auto r = round_to_pvm(M4, noisy);
      CHECK(r.distance <= 0.1);
      CHECK(pvm_defect(M4, r.tuple.operators()) <= 1e-9);
      const auto again = round_to_pvm(M4, r.tuple.operators());
      CHECK(again.distance == 0.0);
    }
  }

  TEST_CASE("rounding succeeds on larger perturbations") {
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
      const auto A = random_algebra(rng, 2, 4);
      const PvmTuple E = random_pvm(A, 2, 2, rng);
      OperatorTuple noisy = E.operators();
      for (std::size_t a = 0; a < 2; ++a) noisy.at(0, a) += 0.2 * random_hermitian_unit(A, rng);
      try {
        const auto r = round_to_pvm(A, noisy);
        CHECK(pvm_defect(A, r.tuple.operators()) <= 1e-9);
      } catch (const NumericalError&) {
        // a non-invertible row sum is a documented failure mode
      }
    }
  }

  TEST_CASE("modulus estimate") {
    ModulusExperiment ex;
    ex.questions = 2;
    ex.answers = 2;
    ex.dims = {2, 4};
    ex.epsilons = {0.1};
    ex.trials = 500;
    ex.seed = 42;
    const auto table = estimate_modulus(ex);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].delta_hat > 0.0);
    CHECK(table.trials == 500);
    CHECK(table.max_dim == 4);
    CHECK(table.seed == 42);

    ex.epsilons = {0.3, 0.001, 0.03, 0.01, 0.1};
    ex.trials = 200;
    const auto sorted = estimate_modulus(ex);
    for (std::size_t i = 1; i < sorted.rows.size(); ++i) {
      CHECK(sorted.rows[i].epsilon > sorted.rows[i - 1].epsilon);
      CHECK(sorted.rows[i].delta_hat >= sorted.rows[i - 1].delta_hat);
    }
    for (const auto& r : sorted.rows) CHECK(r.delta_hat >= 0.0);
    ex.threads = 8;
    CHECK(modulus_csv(estimate_modulus(ex)) == modulus_csv(sorted));
  }
}
