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

// Shared fixtures for the unit tests.
#pragma once

#include <initializer_list>
#include <random>
#include <vector>

#include "tracial/algebra.hpp"
#include "tracial/logic.hpp"
#include "tracial/sampling.hpp"

namespace fixtures {

using tracial::Complex;
using tracial::Element;
using tracial::Formula;
using tracial::Matrix;
using tracial::Rational;
using tracial::Term;

inline Matrix mat(std::size_t d, std::initializer_list<Complex> entries) {
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  auto it = entries.begin();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = *it++;
  }
  return m;
}

inline Element single(Matrix m) { return Element({std::move(m)}); }

inline Element scalar(const tracial::FiniteTracialAlgebra& A, Complex c) {
  Element e = A.identity();
  e *= c;
  return e;
}

inline Term x(std::size_t level) { return Term::variable(level); }

/// Random *-polynomial over levels [0, vars) of bounded depth.
inline Term random_term(std::mt19937_64& rng, std::size_t vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  std::uniform_int_distribution<std::size_t> var(0, vars - 1);
  switch (pick(rng)) {
    case 0:
      return Term::variable(var(rng));
    case 1:
      return vars > 0 && rng() % 3 ? Term::variable(var(rng)) : Term::one();
    case 2:
      return Term::adjoint(random_term(rng, vars, depth - 1));
    case 3:
      return Term::sum(random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1));
    case 4:
      return Term::difference(random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1));
    case 5:
      return Term::product(random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1));
    default: {
      std::uniform_int_distribution<int> num(-3, 3);
      std::uniform_int_distribution<int> den(1, 4);
      tracial::GaussianRational c{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
      return Term::scaled(c, random_term(rng, vars, depth - 1));
    }
  }
}

/// Random quantifier-free formula over levels [0, vars).
inline Formula random_formula(std::mt19937_64& rng, std::size_t vars, int depth, bool functions = true) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : (functions ? 11 : 10));
  std::uniform_int_distribution<int> num(0, 4);
  switch (pick(rng)) {
    case 0:
      return Formula::norm2(random_term(rng, vars, 2));
    case 1:
      return Formula::retrace(random_term(rng, vars, 2));
    case 2:
      return Formula::imtrace(random_term(rng, vars, 2));
    case 3:
      return Formula::constant(Rational(num(rng), 4));
    case 4:
      return Formula::max(random_formula(rng, vars, depth - 1, functions), random_formula(rng, vars, depth - 1, functions));
    case 5:
      return Formula::min(random_formula(rng, vars, depth - 1, functions), random_formula(rng, vars, depth - 1, functions));
    case 6:
      return Formula::plus(random_formula(rng, vars, depth - 1, functions), random_formula(rng, vars, depth - 1, functions));
    case 7:
      return Formula::times(random_formula(rng, vars, depth - 1, functions), random_formula(rng, vars, depth - 1, functions));
    case 8:
      return Formula::truncsub(random_formula(rng, vars, depth - 1, functions),
                               random_formula(rng, vars, depth - 1, functions));
    case 9:
    case 10:
      return Formula::scale(Rational(num(rng) - 2, 3), random_formula(rng, vars, depth - 1, functions));
    default: {
      static constexpr tracial::UnaryFunction kFns[] = {tracial::UnaryFunction::Exp, tracial::UnaryFunction::Sin,
                                                        tracial::UnaryFunction::Cos, tracial::UnaryFunction::Tanh,
                                                        tracial::UnaryFunction::Abs};
      return Formula::apply(kFns[rng() % 5], random_formula(rng, vars, depth - 1, functions));
    }
  }
}

inline std::vector<Element> random_assignment(const tracial::FiniteTracialAlgebra& A, std::size_t vars,
                                              tracial::Rng& rng) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < vars; ++i) out.push_back(tracial::random_unit_ball_element(A, rng));
  return out;
}

}  // namespace fixtures
