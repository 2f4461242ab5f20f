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

#pragma once

#include <cstdint>
#include <random>

#include "tracial/algebra.hpp"

namespace tracial {

using Rng = std::mt19937_64;

/// Deterministic per-stream seed (splitmix64 of seed and stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(derive_seed(seed, stream)); }

/// Matrix with i.i.d. standard complex Gaussian entries.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);
/// Haar-distributed unitary.
Matrix haar_unitary(std::size_t d, Rng& rng);

/// Random element of A with operator norm exactly `radius`.
Element random_element(const FiniteTracialAlgebra& A, Rng& rng, double radius);
/// Random element with operator norm uniform in (0, 1].
Element random_unit_ball_element(const FiniteTracialAlgebra& A, Rng& rng);
/// Random Hermitian element with ||h||_2 = 1.
Element random_hermitian_unit(const FiniteTracialAlgebra& A, Rng& rng);

/// Random algebra with up to `max_blocks` summands of dimension at most
/// `max_dim` and random positive rational weights.
FiniteTracialAlgebra random_algebra(Rng& rng, std::size_t max_blocks, std::size_t max_dim);

}  // namespace tracial
