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

#include "tracial/pvm.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "tracial/errors.hpp"
#include "tracial/format.hpp"
#include "tracial/parallel.hpp"

namespace tracial {

OperatorTuple::OperatorTuple(std::size_t questions, std::size_t answers, std::vector<Element> ops)
    : questions_(questions), answers_(answers), ops_(std::move(ops)) {
  if (questions == 0 || answers == 0) throw ValidationError("operator tuple needs n, m >= 1");
  if (ops_.size() != questions * answers) {
    throw ValidationError("operator tuple has " + std::to_string(ops_.size()) + " entries, expected " +
                          std::to_string(questions * answers));
  }
}

namespace {

DefectBreakdown row_breakdown(const FiniteTracialAlgebra& A, std::span<const Element> row) {
  DefectBreakdown d;
  Element total = A.zero();
  for (const auto& e : row) {
    A.require(e);
    d.self_adjoint = std::max(d.self_adjoint, two_norm(A, e - e.adjoint()));
    d.idempotent = std::max(d.idempotent, two_norm(A, e * e - e));
    total += e;
  }
  d.partition = two_norm(A, total - A.identity());
  return d;
}

}  // namespace

DefectBreakdown pvm_defect_breakdown(const FiniteTracialAlgebra& A, const OperatorTuple& E) {
  DefectBreakdown out;
  for (std::size_t x = 0; x < E.questions(); ++x) {
    const DefectBreakdown r = row_breakdown(A, E.row(x));
    out.self_adjoint = std::max(out.self_adjoint, r.self_adjoint);
    out.idempotent = std::max(out.idempotent, r.idempotent);
    out.partition = std::max(out.partition, r.partition);
  }
  return out;
}

double pvm_defect(const FiniteTracialAlgebra& A, const OperatorTuple& E) {
  return pvm_defect_breakdown(A, E).max();
}

double row_defect(const FiniteTracialAlgebra& A, std::span<const Element> row) {
  return row_breakdown(A, row).max();
}

PvmTuple PvmTuple::verify(const FiniteTracialAlgebra& A, OperatorTuple E, double tolerance) {
  const double d = pvm_defect(A, E);
  if (!(d <= tolerance)) {
    throw ValidationError("tuple is not an exact PVM tuple: defect " + format_real(d) + " exceeds " +
                          format_real(tolerance));
  }
  return PvmTuple(std::move(E), d);
}

PvmTuple deterministic_pvm(const FiniteTracialAlgebra& A, std::size_t answers, std::span<const std::size_t> f) {
  std::vector<Element> ops;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f[x] >= answers) throw ValidationError("assignment answer out of range");
    for (std::size_t a = 0; a < answers; ++a) ops.push_back(a == f[x] ? A.identity() : A.zero());
  }
  return PvmTuple::verify(A, OperatorTuple(f.size(), answers, std::move(ops)));
}

PvmTuple random_pvm(const FiniteTracialAlgebra& A, std::size_t questions, std::size_t answers, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, answers - 1);
  std::vector<Element> ops(questions * answers, A.zero());
  for (std::size_t x = 0; x < questions; ++x) {
    for (std::size_t i = 0; i < A.block_count(); ++i) {
      const Matrix U = haar_unitary(A.dim(i), rng);
      for (Eigen::Index k = 0; k < U.cols(); ++k) {
        ops[x * answers + pick(rng)].block(i) += U.col(k) * U.col(k).adjoint();
      }
    }
  }
  return PvmTuple::verify(A, OperatorTuple(questions, answers, std::move(ops)));
}

// ---------------------------------------------------------------------------
// Roots of unity and order-m unitaries
// ---------------------------------------------------------------------------

Complex RootOfUnity::value() const { return pow(1); }

Complex RootOfUnity::pow(long long k) const {
  if (order == 0 || std::gcd(power, order) != 1) {
    throw ValidationError("omega must be a primitive root of unity");
  }
  const long long m = order;
  const long long r = ((static_cast<long long>(power) * k) % m + m) % m;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m);
  // Exact values at the axes keep m = 2, 4 Fourier sums free of rounding.
  if (4 * r == 0) return {1, 0};
  if (4 * r == m) return {0, 1};
  if (2 * r == m) return {-1, 0};
  if (4 * r == 3 * m) return {0, -1};
  return {std::cos(angle), std::sin(angle)};
}

namespace {

Element power(const Element& v, unsigned m, const FiniteTracialAlgebra& A) {
  Element out = A.identity();
  for (unsigned k = 0; k < m; ++k) out = out * v;
  return out;
}

}  // namespace

double order_defect(const FiniteTracialAlgebra& A, const Element& v, unsigned m) {
  A.require(v);
  const Element one = A.identity();
  const Element vs = v.adjoint();
  return std::max({op_norm(A, vs * v - one), op_norm(A, v * vs - one), op_norm(A, power(v, m, A) - one)});
}

OrderMUnitary OrderMUnitary::verify(const FiniteTracialAlgebra& A, Element u, unsigned order, double tolerance) {
  if (order == 0) throw ValidationError("unitary order must be positive");
  const double d = order_defect(A, u, order);
  if (!(d <= tolerance)) {
    throw NumericalError("element is not a unitary of order " + std::to_string(order) + ": defect " +
                         format_real(d));
  }
  return OrderMUnitary(std::move(u), order);
}

OrderMUnitary pvm_to_unitary(const FiniteTracialAlgebra& A, std::span<const Element> row, RootOfUnity omega) {
  if (row.size() != omega.order) {
    throw ValidationError("row has " + std::to_string(row.size()) + " outcomes but omega has order " +
                          std::to_string(omega.order));
  }
  const double d = row_defect(A, row);
  if (!(d <= kExactTolerance)) {
    throw ValidationError("row is not an exact PVM: defect " + format_real(d));
  }
  Element u = A.zero();
  for (std::size_t a = 0; a < row.size(); ++a) u += omega.pow(static_cast<long long>(a)) * row[a];
  return OrderMUnitary::verify(A, std::move(u), omega.order);
}

std::vector<Element> unitary_to_pvm(const FiniteTracialAlgebra& A, const OrderMUnitary& u, RootOfUnity omega) {
  const unsigned m = u.order();
  if (omega.order != m) throw ValidationError("omega order does not match unitary order");
  std::vector<Element> powers;
  powers.push_back(A.identity());
  for (unsigned c = 1; c < m; ++c) powers.push_back(powers.back() * u.element());
  std::vector<Element> row;
  for (unsigned a = 0; a < m; ++a) {
    Element e = A.zero();
    for (unsigned c = 0; c < m; ++c) {
      e += omega.pow(-static_cast<long long>(a) * c) * powers[c];
    }
    e *= Complex(1.0 / m, 0);
    row.push_back(std::move(e));
  }
  return row;
}

namespace {

// Index of the m-th root of unity nearest to z; equidistant points go to
// the root with the smaller argument in [0, 2pi).
unsigned nearest_root(Complex z, unsigned m) {
  double theta = std::arg(z);
  if (theta < 0) theta += 2.0 * std::numbers::pi;
  const double t = theta * m / (2.0 * std::numbers::pi);
  const double lo = std::floor(t);
  const double frac = t - lo;
  unsigned k = static_cast<unsigned>(lo) % m;
  if (frac > 0.5) return (k + 1) % m;
  if (frac < 0.5) return k;
  const unsigned up = (k + 1) % m;
  return up == 0 ? 0 : k;
}

Matrix inverse_sqrt_psd(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Eigen::VectorXd& w = eig.eigenvalues();
  if (w.minCoeff() <= 0) throw NumericalError("matrix is not positive definite");
  const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

UnitaryRounding round_to_order_m_unitary(const FiniteTracialAlgebra& A, const Element& v, unsigned m) {
  if (m == 0) throw ValidationError("order must be positive");
  A.require(v);
  const double eps = order_defect(A, v, m);
  const double threshold = std::ldexp(1.0, -static_cast<int>(m));
  if (!(eps < threshold)) {
    throw ValidationError("order defect " + format_real(eps) + " is not below 2^-" + std::to_string(m));
  }
  if (eps <= 1e-12) {
    return {OrderMUnitary::verify(A, v, m), eps, 0.0};
  }
  std::vector<Matrix> blocks;
  std::vector<Complex> roots(m);
  for (unsigned k = 0; k < m; ++k) roots[k] = RootOfUnity::primitive(m).pow(k);
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    const Matrix& b = v.block(i);
    const Matrix polar = b * inverse_sqrt_psd(b * b.adjoint());
    Eigen::ComplexSchur<Matrix> schur(polar);
    const Matrix& Q = schur.matrixU();
    const Matrix& T = schur.matrixT();
    Eigen::VectorXcd mapped(T.rows());
    for (Eigen::Index k = 0; k < T.rows(); ++k) mapped(k) = roots[nearest_root(T(k, k), m)];
    blocks.push_back(Q * mapped.asDiagonal() * Q.adjoint());
  }
  Element u(std::move(blocks));
  const double distance = op_norm(A, u - v);
  return {OrderMUnitary::verify(A, std::move(u), m, 1e-10), eps, distance};
}

// ---------------------------------------------------------------------------
// PVM rounding
// ---------------------------------------------------------------------------

namespace {

std::vector<Element> eigenspace_fallback(const FiniteTracialAlgebra& A, std::span<const Element> row) {
  const std::size_t m = row.size();
  std::vector<Element> out(m, A.zero());
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    std::vector<Matrix> herm;
    Matrix total = Matrix::Zero(A.dim(i), A.dim(i));
    for (const auto& e : row) {
      herm.push_back((e.block(i) + e.block(i).adjoint()) / 2.0);
      total += herm.back();
    }
    Matrix whiten;
    try {
      whiten = inverse_sqrt_psd(total);
    } catch (const NumericalError&) {
      throw NumericalError("cannot round row: sum of outcomes is not positive definite");
    }
    Matrix label = Matrix::Zero(A.dim(i), A.dim(i));
    for (std::size_t a = 0; a < m; ++a) {
      herm[a] = whiten * herm[a] * whiten;
      label += static_cast<double>(a) * herm[a];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig((label + label.adjoint()) / 2.0);
    const Matrix& V = eig.eigenvectors();
    for (Eigen::Index k = 0; k < V.cols(); ++k) {
      std::size_t best = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < m; ++a) {
        const double q = V.col(k).dot(herm[a] * V.col(k)).real();
        if (q > best_q) {
          best_q = q;
          best = a;
        }
      }
      out[best].block(i) += V.col(k) * V.col(k).adjoint();
    }
  }
  return out;
}

}  // namespace

PvmRounding round_to_pvm(const FiniteTracialAlgebra& A, const OperatorTuple& E) {
  const std::size_t n = E.questions();
  const std::size_t m = E.answers();
  const RootOfUnity omega = RootOfUnity::primitive(static_cast<unsigned>(m));
  const double threshold = std::ldexp(1.0, -static_cast<int>(m));
  std::vector<Element> rounded;
  std::vector<RoundingRoute> routes;
  double distance = 0;
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = E.row(x);
    for (const auto& e : row) A.require(e);
    if (row_defect(A, row) <= kExactTolerance) {
      rounded.insert(rounded.end(), row.begin(), row.end());
      routes.push_back(RoundingRoute::Unchanged);
      continue;
    }
    std::vector<Element> fixed;
    Element v = A.zero();
    for (std::size_t a = 0; a < m; ++a) v += omega.pow(static_cast<long long>(a)) * row[a];
    if (order_defect(A, v, static_cast<unsigned>(m)) < threshold) {
      const UnitaryRounding r = round_to_order_m_unitary(A, v, static_cast<unsigned>(m));
      fixed = unitary_to_pvm(A, r.unitary, omega);
      routes.push_back(RoundingRoute::Unitary);
    } else {
      fixed = eigenspace_fallback(A, row);
      routes.push_back(RoundingRoute::EigenspaceFallback);
    }
    for (std::size_t a = 0; a < m; ++a) {
      distance = std::max(distance, two_norm(A, row[a] - fixed[a]));
      rounded.push_back(std::move(fixed[a]));
    }
  }
  PvmTuple tuple = PvmTuple::verify(A, OperatorTuple(n, m, std::move(rounded)));
  return {std::move(tuple), distance, std::move(routes)};
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

Element random_order_m_unitary(const FiniteTracialAlgebra& A, unsigned m, Rng& rng) {
  std::uniform_int_distribution<unsigned> pick(0, m - 1);
  const RootOfUnity omega = RootOfUnity::primitive(m);
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < A.block_count(); ++i) {
    const Matrix U = haar_unitary(A.dim(i), rng);
    Eigen::VectorXcd diag(A.dim(i));
    for (Eigen::Index k = 0; k < diag.size(); ++k) diag(k) = omega.pow(pick(rng));
    blocks.push_back(U * diag.asDiagonal() * U.adjoint());
  }
  return Element(std::move(blocks));
}

ModulusTable estimate_modulus(const ModulusExperiment& ex) {
  if (ex.dims.empty()) throw ValidationError("modulus experiment needs at least one dimension");
  if (ex.trials == 0) throw ValidationError("modulus experiment needs at least one trial");
  if (ex.questions == 0 || ex.answers == 0) throw ValidationError("modulus experiment needs n, m >= 1");
  for (auto d : ex.dims) {
    if (d == 0) throw ValidationError("dimension must be positive");
  }
  struct Sample {
    double defect;
    double distance;
  };
  std::vector<Sample> samples(ex.trials);
  parallel_for(ex.trials, ex.threads, [&](std::size_t t) {
    Rng rng = make_rng(ex.seed, t);
    const auto A = FiniteTracialAlgebra::matrix(ex.dims[t % ex.dims.size()]);
    const PvmTuple exact = random_pvm(A, ex.questions, ex.answers, rng);
    std::uniform_real_distribution<double> exponent(-4.0, 0.0);
    const double amplitude = std::pow(10.0, exponent(rng));
    std::vector<Element> noisy;
    for (const auto& e : exact.operators().elements()) {
      Element g = random_element(A, rng, 1.0);
      g *= Complex(1.0 / two_norm(A, g), 0);
      noisy.push_back(project_to_unit_ball(A, e + amplitude * g));
    }
    const OperatorTuple raw(ex.questions, ex.answers, std::move(noisy));
    Sample s{pvm_defect(A, raw), std::numeric_limits<double>::infinity()};
    try {
      s.distance = round_to_pvm(A, raw).distance;
    } catch (const Error&) {
    }
    samples[t] = s;
  });

  ModulusTable table;
  table.questions = ex.questions;
  table.answers = ex.answers;
  table.dims = ex.dims;
  table.trials = ex.trials;
  table.max_dim = *std::max_element(ex.dims.begin(), ex.dims.end());
  table.seed = ex.seed;
  for (const auto& s : samples) {
    if (!std::isfinite(s.distance)) ++table.rounding_failures;
  }
  std::vector<double> eps = ex.epsilons;
  std::sort(eps.begin(), eps.end());
  double running = 0;
  for (double e : eps) {
    double best = 0;
    for (const auto& s : samples) {
      if (s.distance <= e) best = std::max(best, s.defect);
    }
    running = std::max(running, best);
    table.rows.push_back({e, running});
  }
  return table;
}

std::string modulus_csv(const ModulusTable& table) {
  std::string out = "epsilon,delta_hat,trials,max_dim,seed\n";
  for (const auto& r : table.rows) {
    out += format_real(r.epsilon) + "," + format_real(r.delta_hat) + "," + std::to_string(table.trials) + "," +
           std::to_string(table.max_dim) + "," + std::to_string(table.seed) + "\n";
  }
  return out;
}

std::vector<StabilityTrial> run_stability_trials(const StabilityExperiment& ex) {
  if (ex.order == 0) throw ValidationError("order must be positive");
  if (ex.dims.empty()) throw ValidationError("stability experiment needs at least one dimension");
  if (ex.trials == 0) throw ValidationError("stability experiment needs at least one trial");
  for (auto d : ex.dims) {
    if (d == 0) throw ValidationError("dimension must be positive");
  }
  const unsigned m = ex.order;
  const double threshold = std::ldexp(1.0, -static_cast<int>(m));
  std::vector<StabilityTrial> out(ex.trials);
  parallel_for(ex.trials, ex.threads, [&](std::size_t t) {
    Rng rng = make_rng(ex.seed, t);
    const std::size_t d = ex.dims[t % ex.dims.size()];
    const auto A = FiniteTracialAlgebra::matrix(d);
    const Element u = random_order_m_unitary(A, m, rng);
    const Element g = random_element(A, rng, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double scale = threshold * (0.001 + 0.999 * unit(rng)) / (m + 1);
    Element v = u + Complex(scale, 0) * g;
    double eps = order_defect(A, v, m);
    while (!(eps < threshold)) {
      scale /= 2;
      v = u + Complex(scale, 0) * g;
      eps = order_defect(A, v, m);
    }
    const UnitaryRounding r = round_to_order_m_unitary(A, v, m);
    const double bound = std::ldexp(1.0, static_cast<int>(m) + 2) * r.epsilon;
    Element unit_one = A.identity();
    Element p = unit_one;
    for (unsigned k = 0; k < m; ++k) p = p * r.unitary.element();
    out[t] = StabilityTrial{t, m, d, r.epsilon, r.distance, bound,
                            r.epsilon > 0 ? r.distance / r.epsilon : 0.0, op_norm(A, p - unit_one)};
  });
  return out;
}

std::string stability_csv(std::span<const StabilityTrial> trials) {
  std::string out = "trial,m,dim,epsilon,distance,bound,ratio,order_defect\n";
  for (const auto& t : trials) {
    out += std::to_string(t.index) + "," + std::to_string(t.order) + "," + std::to_string(t.dim) + "," +
           format_real(t.epsilon) + "," + format_real(t.distance) + "," + format_real(t.bound) + "," +
           format_real(t.ratio) + "," + format_real(t.order_defect) + "\n";
  }
  return out;
}

}  // namespace tracial
