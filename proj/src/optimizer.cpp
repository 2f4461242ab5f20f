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

#include "tracial/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "tracial/compiler.hpp"
#include "tracial/errors.hpp"
#include "tracial/format.hpp"
#include "tracial/parallel.hpp"
#include "tracial/sampling.hpp"

namespace tracial {

void OptimizerConfig::validate() const {
  if (restarts < 1) throw ValidationError("restarts must be at least 1");
  if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (!(tolerance > 0)) throw ValidationError("tolerance must be positive");
  if (!(initial_step > 0) || !(min_step > 0)) throw ValidationError("step sizes must be positive");
}

// ---------------------------------------------------------------------------
// Body evaluator
// ---------------------------------------------------------------------------

struct BodyEvaluator::Impl {
  struct NumericWord {
    Complex coefficient;
    std::vector<Letter> letters;
  };
  struct Node {
    FormulaKind kind = FormulaKind::Const;
    int a = -1;
    int b = -1;
    double scalar = 0;
    UnaryFunction fn = UnaryFunction::Exp;
    std::vector<NumericWord> words;
  };

  std::vector<Node> nodes;
  std::size_t variables = 0;

  int build(const Formula& f) {
    Node n;
    n.kind = f.kind();
    switch (f.kind()) {
      case FormulaKind::Norm2:
      case FormulaKind::ReTrace:
      case FormulaKind::ImTrace:
        for (const auto& [word, c] : expand_polynomial(f.term())) {
          for (const auto& l : word) {
            if (l.level >= variables) throw ValidationError("body references an unbound variable");
          }
          n.words.push_back({Complex(to_double(c.re), to_double(c.im)), word});
        }
        break;
      case FormulaKind::Const:
        n.scalar = to_double(f.scalar());
        break;
      case FormulaKind::Scale:
        n.scalar = to_double(f.scalar());
        n.a = build(f.operand());
        break;
      case FormulaKind::Apply:
        n.fn = f.function();
        n.a = build(f.operand());
        break;
      case FormulaKind::Sup:
      case FormulaKind::Inf:
        throw ValidationError("body must be quantifier-free");
      default:
        n.a = build(f.lhs());
        n.b = build(f.rhs());
        break;
    }
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }

  static Element letter_value(std::span<const Element> x, const Letter& l) {
    return l.adjoint ? x[l.level].adjoint() : x[l.level];
  }

  static Element leaf_element(const FiniteTracialAlgebra& A, std::span<const Element> x, const Node& n) {
    Element total = A.zero();
    for (const auto& w : n.words) {
      Element p = A.identity();
      for (const auto& l : w.letters) p = p * letter_value(x, l);
      total += w.coefficient * p;
    }
    return total;
  }

  static double leaf_value(const FiniteTracialAlgebra& A, FormulaKind kind, const Element& p) {
    switch (kind) {
      case FormulaKind::Norm2: return two_norm(A, p);
      case FormulaKind::ReTrace: return trace(A, p).real();
      default: return trace(A, p).imag();
    }
  }

  double forward(const FiniteTracialAlgebra& A, std::span<const Element> x, std::vector<double>& val,
                 std::vector<Element>* leaves) const {
    val.assign(nodes.size(), 0.0);
    if (leaves) leaves->assign(nodes.size(), Element());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      switch (n.kind) {
        case FormulaKind::Norm2:
        case FormulaKind::ReTrace:
        case FormulaKind::ImTrace: {
          Element p = leaf_element(A, x, n);
          val[i] = leaf_value(A, n.kind, p);
          if (leaves) (*leaves)[i] = std::move(p);
          break;
        }
        case FormulaKind::Const: val[i] = n.scalar; break;
        case FormulaKind::Scale: val[i] = n.scalar * val[n.a]; break;
        case FormulaKind::Apply: val[i] = apply_function(n.fn, val[n.a]); break;
        case FormulaKind::Max: val[i] = std::max(val[n.a], val[n.b]); break;
        case FormulaKind::Min: val[i] = std::min(val[n.a], val[n.b]); break;
        case FormulaKind::Plus: val[i] = val[n.a] + val[n.b]; break;
        case FormulaKind::Times: val[i] = val[n.a] * val[n.b]; break;
        case FormulaKind::TruncSub: val[i] = std::max(val[n.a] - val[n.b], 0.0); break;
        default: break;
      }
    }
    return val.back();
  }

  static double derivative(UnaryFunction fn, double t) {
    switch (fn) {
      case UnaryFunction::Exp: return std::exp(t);
      case UnaryFunction::Sin: return std::cos(t);
      case UnaryFunction::Cos: return -std::sin(t);
      case UnaryFunction::Tanh: {
        const double th = std::tanh(t);
        return 1 - th * th;
      }
      case UnaryFunction::Abs: return t >= 0 ? 1.0 : -1.0;
      case UnaryFunction::Sqrt: return t > 0 ? 0.5 / std::sqrt(t) : 0.0;
    }
    return 0;
  }

  // Adds the gradient of Re tau(K · P(x)) to `grad`.
  static void leaf_gradient(const FiniteTracialAlgebra& A, std::span<const Element> x, const Node& n,
                            const Element& K, std::vector<Element>& grad) {
    for (const auto& w : n.words) {
      const std::size_t len = w.letters.size();
      if (len == 0) continue;
      std::vector<Element> value;
      for (const auto& l : w.letters) value.push_back(letter_value(x, l));
      std::vector<Element> prefix(len + 1);
      std::vector<Element> suffix(len + 1);
      prefix[0] = A.identity();
      for (std::size_t j = 0; j < len; ++j) prefix[j + 1] = prefix[j] * value[j];
      suffix[len] = A.identity();
      for (std::size_t j = len; j-- > 0;) suffix[j] = value[j] * suffix[j + 1];
      const Element Kc = w.coefficient * K;
      for (std::size_t j = 0; j < len; ++j) {
        const Element y = suffix[j + 1] * Kc * prefix[j];
        const Letter& l = w.letters[j];
        grad[l.level] += l.adjoint ? y : y.adjoint();
      }
    }
  }

  double gradient(const FiniteTracialAlgebra& A, std::span<const Element> x, std::vector<Element>& grad) const {
    std::vector<double> val;
    std::vector<Element> leaves;
    const double v = forward(A, x, val, &leaves);
    grad.assign(variables, A.zero());
    std::vector<double> adj(nodes.size(), 0.0);
    adj.back() = 1.0;
    for (std::size_t i = nodes.size(); i-- > 0;) {
      const Node& n = nodes[i];
      const double w = adj[i];
      if (w == 0) continue;
      switch (n.kind) {
        case FormulaKind::Norm2: {
          if (!(val[i] > 1e-300)) break;
          leaf_gradient(A, x, n, Complex(w / val[i], 0) * leaves[i].adjoint(), grad);
          break;
        }
        case FormulaKind::ReTrace:
          leaf_gradient(A, x, n, Complex(w, 0) * A.identity(), grad);
          break;
        case FormulaKind::ImTrace:
          leaf_gradient(A, x, n, Complex(0, -w) * A.identity(), grad);
          break;
        case FormulaKind::Const: break;
        case FormulaKind::Scale: adj[n.a] += n.scalar * w; break;
        case FormulaKind::Apply: adj[n.a] += derivative(n.fn, val[n.a]) * w; break;
        case FormulaKind::Max: (val[n.a] >= val[n.b] ? adj[n.a] : adj[n.b]) += w; break;
        case FormulaKind::Min: (val[n.a] <= val[n.b] ? adj[n.a] : adj[n.b]) += w; break;
        case FormulaKind::Plus:
          adj[n.a] += w;
          adj[n.b] += w;
          break;
        case FormulaKind::Times:
          adj[n.a] += w * val[n.b];
          adj[n.b] += w * val[n.a];
          break;
        case FormulaKind::TruncSub:
          if (val[n.a] - val[n.b] >= 0) {
            adj[n.a] += w;
            adj[n.b] -= w;
          }
          break;
        default: break;
      }
    }
    return v;
  }
};

BodyEvaluator::BodyEvaluator(const Formula& body, std::size_t variables) : impl_(std::make_unique<Impl>()) {
  impl_->variables = variables;
  impl_->build(body);
}
BodyEvaluator::~BodyEvaluator() = default;
BodyEvaluator::BodyEvaluator(BodyEvaluator&&) noexcept = default;
BodyEvaluator& BodyEvaluator::operator=(BodyEvaluator&&) noexcept = default;

std::size_t BodyEvaluator::variables() const { return impl_->variables; }

double BodyEvaluator::value(const FiniteTracialAlgebra& A, std::span<const Element> x) const {
  if (x.size() != impl_->variables) throw ValidationError("wrong number of variables");
  std::vector<double> val;
  return impl_->forward(A, x, val, nullptr);
}

double BodyEvaluator::value_and_gradient(const FiniteTracialAlgebra& A, std::span<const Element> x,
                                         std::vector<Element>& gradient) const {
  if (x.size() != impl_->variables) throw ValidationError("wrong number of variables");
  return impl_->gradient(A, x, gradient);
}

// ---------------------------------------------------------------------------
// Row maximisation over m-outcome PVMs in one block
// ---------------------------------------------------------------------------

namespace {

struct RowState {
  Matrix basis;
  std::vector<std::size_t> labels;
};

double column_score(const Matrix& H, const Matrix& basis, Eigen::Index k) {
  return basis.col(k).dot(H * basis.col(k)).real();
}

double row_objective(const std::vector<Matrix>& H, const RowState& s) {
  double total = 0;
  for (Eigen::Index k = 0; k < s.basis.cols(); ++k) total += column_score(H[s.labels[k]], s.basis, k);
  return total;
}

RowState greedy_labels(const std::vector<Matrix>& H, Matrix basis) {
  RowState s{std::move(basis), {}};
  for (Eigen::Index k = 0; k < s.basis.cols(); ++k) {
    std::size_t best = 0;
    double best_score = column_score(H[0], s.basis, k);
    for (std::size_t a = 1; a < H.size(); ++a) {
      const double score = column_score(H[a], s.basis, k);
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    s.labels.push_back(best);
  }
  return s;
}

// Re-splits the span of the columns labelled a or b optimally between a and b.
void pairwise_refine(const std::vector<Matrix>& H, RowState& s) {
  const std::size_t m = H.size();
  for (int round = 0; round < 20; ++round) {
    const double before = row_objective(H, s);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index k = 0; k < s.basis.cols(); ++k) {
          if (s.labels[k] == a || s.labels[k] == b) cols.push_back(k);
        }
        if (cols.empty()) continue;
        Matrix W(s.basis.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) W.col(static_cast<Eigen::Index>(j)) = s.basis.col(cols[j]);
        const Matrix K = W.adjoint() * (H[a] - H[b]) * W;
        Eigen::SelfAdjointEigenSolver<Matrix> eig((K + K.adjoint()) / 2.0);
        const Matrix Wq = W * eig.eigenvectors();
        for (std::size_t j = 0; j < cols.size(); ++j) {
          const auto jj = static_cast<Eigen::Index>(j);
          s.basis.col(cols[j]) = Wq.col(jj);
          s.labels[cols[j]] = eig.eigenvalues()(jj) >= 0 ? a : b;
        }
      }
    }
    if (!(row_objective(H, s) > before + 1e-14 * std::max(1.0, std::abs(before)))) break;
  }
}

RowState maximize_row(const std::vector<Matrix>& H, const RowState& current) {
  RowState best = current;
  pairwise_refine(H, best);
  double best_value = row_objective(H, best);
  Matrix mean = Matrix::Zero(H[0].rows(), H[0].cols());
  for (const auto& h : H) mean += h;
  mean /= static_cast<double>(H.size());
  for (const auto& h : H) {
    const Matrix shifted = h - mean;
    Eigen::SelfAdjointEigenSolver<Matrix> eig((shifted + shifted.adjoint()) / 2.0);
    RowState cand = greedy_labels(H, eig.eigenvectors());
    pairwise_refine(H, cand);
    const double v = row_objective(H, cand);
    if (v > best_value) {
      best_value = v;
      best = std::move(cand);
    }
  }
  return best;
}

RowState random_row(std::size_t d, std::size_t m, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  RowState s{haar_unitary(d, rng), {}};
  for (std::size_t k = 0; k < d; ++k) s.labels.push_back(pick(rng));
  return s;
}

std::vector<Matrix> row_projections(const RowState& s, std::size_t m) {
  const auto d = s.basis.rows();
  std::vector<Matrix> P(m, Matrix::Zero(d, d));
  for (Eigen::Index k = 0; k < s.basis.cols(); ++k) P[s.labels[k]] += s.basis.col(k) * s.basis.col(k).adjoint();
  return P;
}

Matrix hermitian_part(const Matrix& g) { return (g + g.adjoint()) / 2.0; }

// rows[x][i]: state of question x in block i.
using TupleState = std::vector<std::vector<RowState>>;

std::vector<Element> tuple_elements(const TupleState& rows, std::size_t m) {
  std::vector<Element> out;
  for (const auto& row : rows) {
    std::vector<std::vector<Matrix>> per_block;
    for (const auto& s : row) per_block.push_back(row_projections(s, m));
    for (std::size_t a = 0; a < m; ++a) {
      std::vector<Matrix> blocks;
      for (const auto& pb : per_block) blocks.push_back(pb[a]);
      out.emplace_back(std::move(blocks));
    }
  }
  return out;
}

TupleState random_tuple(const FiniteTracialAlgebra& A, std::size_t n, std::size_t m, Rng& rng) {
  TupleState rows(n);
  for (auto& row : rows) {
    for (std::size_t i = 0; i < A.block_count(); ++i) row.push_back(random_row(A.dim(i), m, rng));
  }
  return rows;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Projected ascent
// ---------------------------------------------------------------------------

double ascend(const BodyEvaluator& body, const FiniteTracialAlgebra& A, std::vector<Element>& x,
              const OptimizerConfig& cfg, std::size_t& iterations) {
  double v = body.value(A, x);
  double step = cfg.initial_step;
  std::vector<Element> grad;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    iterations = it + 1;
    body.value_and_gradient(A, x, grad);
    double gn2 = 0;
    for (const auto& g : grad) gn2 += std::pow(two_norm(A, g), 2);
    const double gn = std::sqrt(gn2);
    if (!(gn > 1e-14)) break;
    bool accepted = false;
    double gain = 0;
    while (step >= cfg.min_step) {
      std::vector<Element> y;
      for (std::size_t k = 0; k < x.size(); ++k) {
        y.push_back(project_to_unit_ball(A, x[k] + Complex(step / gn, 0) * grad[k]));
      }
      const double vy = body.value(A, y);
      if (vy > v) {
        gain = vy - v;
        v = vy;
        x = std::move(y);
        step *= 1.5;
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted || gain <= cfg.tolerance * std::max(1.0, std::abs(v))) break;
  }
  return v;
}

// Linearised see-saw on the body over exact PVM tuples.
double pvm_seesaw_on_body(const BodyEvaluator& body, const FiniteTracialAlgebra& A, TupleState& rows,
                          std::size_t m, const OptimizerConfig& cfg, std::size_t& sweeps) {
  std::vector<Element> x = tuple_elements(rows, m);
  double v = body.value(A, x);
  std::vector<Element> grad;
  for (std::size_t sweep = 0; sweep < cfg.max_iterations; ++sweep) {
    sweeps = sweep + 1;
    const double start = v;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      body.value_and_gradient(A, x, grad);
      std::vector<RowState> candidate;
      for (std::size_t i = 0; i < A.block_count(); ++i) {
        std::vector<Matrix> H;
        for (std::size_t a = 0; a < m; ++a) H.push_back(hermitian_part(grad[q * m + a].block(i)));
        candidate.push_back(maximize_row(H, rows[q][i]));
      }
      TupleState trial = rows;
      trial[q] = std::move(candidate);
      std::vector<Element> tx = tuple_elements(trial, m);
      const double tv = body.value(A, tx);
      if (tv > v) {
        v = tv;
        rows = std::move(trial);
        x = std::move(tx);
      }
    }
    if (!(v - start > cfg.tolerance * std::max(1.0, std::abs(v)))) break;
  }
  return v;
}

struct RestartResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Element> witness;
  std::size_t iterations = 0;
  std::vector<double> sweeps;
};

std::size_t best_index(const std::vector<RestartResult>& results) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  return best;
}

}  // namespace

ValueCertificate maximize_sentence(const Sentence& sentence, const FiniteTracialAlgebra& A,
                                   const OptimizerConfig& cfg, std::optional<PvmShape> shape) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  if (!is_sentence(sentence)) throw ValidationError("maximize_sentence requires a sentence without free variables");
  const auto form = universal_form(sentence);
  if (!form) throw ValidationError("nested or inf quantifiers are not supported");
  const std::size_t k = form->names.size();
  if (shape && shape->questions * shape->answers != k) {
    throw ValidationError("pvm shape " + std::to_string(shape->questions) + "x" + std::to_string(shape->answers) +
                          " does not match " + std::to_string(k) + " bound variables");
  }
  const BodyEvaluator body(form->body, k);

  ValueCertificate cert;
  cert.algebra = A;
  cert.config = cfg;
  if (shape) {
    cert.questions = shape->questions;
    cert.answers = shape->answers;
  }
  std::vector<RestartResult> results(cfg.restarts);
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
    Rng rng = make_rng(cfg.seed, r);
    RestartResult res;
    std::vector<Element> x;
    if (shape) {
      TupleState rows = random_tuple(A, shape->questions, shape->answers, rng);
      std::size_t sweeps = 0;
      pvm_seesaw_on_body(body, A, rows, shape->answers, cfg, sweeps);
      x = tuple_elements(rows, shape->answers);
      res.iterations += sweeps;
    } else {
      for (std::size_t v = 0; v < k; ++v) x.push_back(random_unit_ball_element(A, rng));
    }
    std::size_t iterations = 0;
    res.value = ascend(body, A, x, cfg, iterations);
    res.iterations += iterations;
    if (shape) {
      try {
        PvmRounding rounded = round_to_pvm(A, OperatorTuple(shape->questions, shape->answers, x));
        const auto elems = rounded.tuple.operators().elements();
        std::vector<Element> rx(elems.begin(), elems.end());
        const double rv = body.value(A, rx);
        if (rv >= res.value) {
          res.value = rv;
          x = std::move(rx);
        }
      } catch (const Error&) {
      }
    }
    res.witness = std::move(x);
    results[r] = std::move(res);
  });

  for (std::size_t r = 0; r < results.size(); ++r) {
    cert.restarts.push_back({r, 0, results[r].value, results[r].iterations, {}});
  }
  const std::size_t best = k == 0 ? 0 : best_index(results);
  cert.witness = results[best].witness;
  cert.value = eval_formula(form->body, A, cert.witness);
  if (shape) {
    cert.exact_pvm = pvm_defect(A, OperatorTuple(shape->questions, shape->answers, cert.witness)) <= kExactTolerance;
  }
  cert.wall_clock_ms = elapsed_ms(start);
  return cert;
}

// ---------------------------------------------------------------------------
// Game see-saw
// ---------------------------------------------------------------------------

namespace {

struct DimSolution {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<RowState> rows;  // one per question, single block
};

double seesaw_sweeps(const SyncGame& game, std::vector<RowState>& rows, const OptimizerConfig& cfg,
                     std::vector<double>& trace) {
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  const auto d = rows[0].basis.rows();
  const auto A = FiniteTracialAlgebra::matrix(static_cast<std::size_t>(d));
  std::vector<std::vector<Matrix>> P;
  for (const auto& r : rows) P.push_back(row_projections(r, m));
  auto psi_now = [&] {
    std::vector<Element> e;
    for (const auto& row : P) {
      for (const auto& p : row) e.emplace_back(std::vector<Matrix>{p});
    }
    return psi_value_raw(game, OperatorTuple(n, m, std::move(e)), A);
  };
  double v = psi_now();
  trace.push_back(v);
  const Matrix I = Matrix::Identity(d, d);
  for (std::size_t sweep = 0; sweep < cfg.max_iterations; ++sweep) {
    bool changed = false;
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<Matrix> H(m, Matrix::Zero(d, d));
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t y = 0; y < n; ++y) {
          if (y == x) continue;
          for (std::size_t b = 0; b < m; ++b) {
            const double c = (game.accepts(a, b, x, y) ? game.mu_value(x, y) : 0.0) +
                             (game.accepts(b, a, y, x) ? game.mu_value(y, x) : 0.0);
            if (c != 0) H[a] += c * P[y][b];
          }
        }
        if (game.accepts(a, a, x, x)) H[a] += game.mu_value(x, x) * I;
      }
      for (auto& h : H) h = hermitian_part(h);
      const double before = row_objective(H, rows[x]);
      RowState cand = maximize_row(H, rows[x]);
      if (row_objective(H, cand) > before + 1e-13 * std::max(1.0, std::abs(before))) {
        rows[x] = std::move(cand);
        P[x] = row_projections(rows[x], m);
        changed = true;
      }
    }
    const double nv = psi_now();
    if (!changed) break;
    const double gain = nv - v;
    v = std::max(v, nv);
    trace.push_back(v);
    if (!(gain > cfg.tolerance * std::max(1.0, std::abs(v)))) break;
  }
  return v;
}

RowState direct_sum_row(const std::vector<const RowState*>& parts) {
  Eigen::Index d = 0;
  for (const auto* p : parts) d += p->basis.rows();
  RowState s{Matrix::Zero(d, d), {}};
  Eigen::Index off = 0;
  for (const auto* p : parts) {
    const auto k = p->basis.rows();
    s.basis.block(off, off, k, k) = p->basis;
    s.labels.insert(s.labels.end(), p->labels.begin(), p->labels.end());
    off += k;
  }
  return s;
}

}  // namespace

ValueCertificate seesaw_game_value(const SyncGame& game, const FiniteTracialAlgebra& A, const OptimizerConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  std::vector<std::size_t> dims{1};
  for (std::size_t i = 0; i < A.block_count(); ++i) dims.push_back(A.dim(i));
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());

  ValueCertificate cert;
  cert.algebra = A;
  cert.config = cfg;
  cert.exact_pvm = true;
  cert.questions = n;
  cert.answers = m;
  std::map<std::size_t, DimSolution> solved;
  for (std::size_t d : dims) {
    // Direct-sum seed from already solved dimensions: k copies of one
    // solution, padded with copies of the scalar solution.
    std::optional<std::vector<RowState>> seed_rows;
    if (d > 1) {
      double best_seed = -std::numeric_limits<double>::infinity();
      for (const auto& [dp, sol] : solved) {
        if (dp >= d) break;
        const std::size_t copies = d / dp;
        const std::size_t pad = d - copies * dp;
        const double v = (copies * dp * sol.value + pad * solved.at(1).value) / static_cast<double>(d);
        if (v > best_seed) {
          best_seed = v;
          std::vector<RowState> rows;
          for (std::size_t x = 0; x < n; ++x) {
            std::vector<const RowState*> parts(copies, &sol.rows[x]);
            for (std::size_t p = 0; p < pad; ++p) parts.push_back(&solved.at(1).rows[x]);
            rows.push_back(direct_sum_row(parts));
          }
          seed_rows = std::move(rows);
        }
      }
    }
    const std::size_t total = cfg.restarts + (seed_rows ? 1 : 0);
    std::vector<DimSolution> results(total);
    std::vector<RestartTrace> traces(total);
    parallel_for(total, cfg.threads, [&](std::size_t r) {
      std::vector<RowState> rows;
      if (r < cfg.restarts) {
        Rng rng = make_rng(derive_seed(cfg.seed, d), r);
        for (std::size_t x = 0; x < n; ++x) rows.push_back(random_row(d, m, rng));
      } else {
        rows = *seed_rows;
      }
      RestartTrace t;
      t.index = r;
      t.dim = d;
      t.best = seesaw_sweeps(game, rows, cfg, t.sweeps);
      t.iterations = t.sweeps.size();
      results[r] = {t.best, std::move(rows)};
      traces[r] = std::move(t);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < total; ++r) {
      if (results[r].value > results[best].value) best = r;
    }
    solved[d] = std::move(results[best]);
    cert.restarts.insert(cert.restarts.end(), traces.begin(), traces.end());
  }

  std::vector<Element> witness;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<std::vector<Matrix>> per_block;
    for (std::size_t i = 0; i < A.block_count(); ++i) per_block.push_back(row_projections(solved.at(A.dim(i)).rows[x], m));
    for (std::size_t a = 0; a < m; ++a) {
      std::vector<Matrix> blocks;
      for (const auto& pb : per_block) blocks.push_back(pb[a]);
      witness.emplace_back(std::move(blocks));
    }
  }
  const PvmTuple tuple = PvmTuple::verify(A, OperatorTuple(n, m, witness));
  cert.value = psi_value(game, tuple, A);
  cert.witness = std::move(witness);
  cert.wall_clock_ms = elapsed_ms(start);
  return cert;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

CertifyReport certify(const SyncGame& game, const FiniteTracialAlgebra& A, std::span<const Element> witness,
                      double claimed) {
  const std::size_t n = game.questions();
  const std::size_t m = game.answers();
  if (witness.size() != n * m) {
    throw ValidationError("witness has " + std::to_string(witness.size()) + " operators, expected " +
                          std::to_string(n * m));
  }
  for (const auto& w : witness) A.require(w);
  const OperatorTuple E(n, m, std::vector<Element>(witness.begin(), witness.end()));
  CertifyReport rep;
  rep.claimed = claimed;
  rep.defect = pvm_defect(A, E);
  rep.defect_ok = rep.defect <= kExactTolerance;
  rep.primary = psi_value_raw(game, E, A);
  EvalOptions opts;
  opts.check_unit_ball = false;
  rep.secondary = eval_formula(compile_payoff_formula(game), A, witness, opts);
  rep.gap = std::max(std::abs(rep.primary - rep.secondary), std::abs(rep.primary - claimed));
  if (rep.defect_ok) {
    rep.correlation = game_value_of_correlation(game, strategy_from_pvm(game, PvmTuple::verify(A, E), A));
    rep.gap = std::max(rep.gap, std::abs(rep.primary - rep.correlation));
  }
  rep.passed = rep.defect_ok && rep.gap <= kCertifyTolerance;
  if (!rep.defect_ok) {
    rep.message = "PVM defect violation: " + format_real(rep.defect);
  } else if (!rep.passed) {
    rep.message = "oracle gap " + format_real(rep.gap) + " exceeds " + format_real(kCertifyTolerance);
  } else {
    rep.message = "ok";
  }
  return rep;
}

CertifyReport certify(const Sentence& sentence, const FiniteTracialAlgebra& A, std::span<const Element> witness,
                      double claimed) {
  const auto form = universal_form(sentence);
  if (!form || !is_sentence(sentence)) throw ValidationError("certify requires a universal sentence");
  if (witness.size() != form->names.size()) {
    throw ValidationError("witness has " + std::to_string(witness.size()) + " elements, expected " +
                          std::to_string(form->names.size()));
  }
  for (const auto& w : witness) A.require(w);
  CertifyReport rep;
  rep.claimed = claimed;
  rep.primary = eval_formula(form->body, A, witness);
  rep.secondary = BodyEvaluator(form->body, form->names.size()).value(A, witness);
  rep.gap = std::max(std::abs(rep.primary - rep.secondary), std::abs(rep.primary - claimed));
  rep.passed = rep.gap <= kCertifyTolerance;
  rep.message = rep.passed ? "ok" : "oracle gap " + format_real(rep.gap) + " exceeds " + format_real(kCertifyTolerance);
  return rep;
}

}  // namespace tracial
