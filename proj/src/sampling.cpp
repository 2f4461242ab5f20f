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

#include "tracial/sampling.hpp"

#include <cmath>

namespace tracial {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

Matrix haar_unitary(std::size_t d, Rng& rng) {
  Matrix g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(j) *= diag / mag;
  }
  return q;
}

Element random_element(const FiniteTracialAlgebra& A, Rng& rng, double radius) {
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < A.block_count(); ++i) blocks.push_back(gaussian_matrix(A.dim(i), A.dim(i), rng));
  Element x(std::move(blocks));
  const double r = op_norm(A, x);
  if (r > 0) x *= Complex(radius / r, 0);
  return x;
}

Element random_unit_ball_element(const FiniteTracialAlgebra& A, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double radius = 1.0 - uniform(rng);
  return random_element(A, rng, radius);
}

Element random_hermitian_unit(const FiniteTracialAlgebra& A, Rng& rng) {
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    Matrix g = gaussian_matrix(A.dim(i), A.dim(i), rng);
    blocks.push_back((g + g.adjoint()) / 2.0);
  }
  Element h(std::move(blocks));
  const double n = two_norm(A, h);
  if (n > 0) h *= Complex(1.0 / n, 0);
  return h;
}

FiniteTracialAlgebra random_algebra(Rng& rng, std::size_t max_blocks, std::size_t max_dim) {
  std::uniform_int_distribution<std::size_t> count(1, max_blocks);
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_int_distribution<long long> numerator(1, 9);
  std::vector<Block> blocks(count(rng));
  for (auto& b : blocks) {
    b.dim = dim(rng);
    b.weight = Rational(numerator(rng));
  }
  return FiniteTracialAlgebra::make(std::move(blocks), true);
}

}  // namespace tracial
