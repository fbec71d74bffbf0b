#include "eigensolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <cstdio>
#include <thread>

namespace hodge {
namespace {

using Matrix = Eigen::MatrixXd;

constexpr int kKrylovDepth = 5;
constexpr int kExtraBlock = 4;
constexpr int kStagnationWindow = 25;

struct BlockResult {
  std::vector<double> values;
  std::vector<double> residuals;
  Matrix vectors;
  int iterations = 0;
  bool converged = true;
  std::string failure;
};

// Deterministic start block; same seed for every block so identical blocks
// produce identical spectra.
Matrix start_block(Index rows, Index cols) {
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  auto next = [&state]() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) x(i, j) = next();
  }
  return x;
}

// ||A x - theta B x|| / ||A x||, accumulated in long double.
double relative_residual(const SparseMatrix& A, const SparseMatrix& B,
                         const Eigen::Ref<const Vector>& x, double theta) {
  const Index n = x.size();
  std::vector<long double> ax(static_cast<std::size_t>(n), 0.0L);
  std::vector<long double> bx(static_cast<std::size_t>(n), 0.0L);
  for (Index c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      ax[it.row()] += static_cast<long double>(it.value()) * x[c];
    }
  }
  for (Index c = 0; c < B.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
      bx[it.row()] += static_cast<long double>(it.value()) * x[c];
    }
  }
  long double num = 0.0L;
  long double den = 0.0L;
  for (Index i = 0; i < n; ++i) {
    const long double r = ax[i] - static_cast<long double>(theta) * bx[i];
    num += r * r;
    den += ax[i] * ax[i];
  }
  if (den == 0.0L) return num == 0.0L ? 0.0 : INFINITY;
  return static_cast<double>(std::sqrt(num / den));
}

double max_abs_row_sum(const SparseMatrix& A) {
  Vector sums = Vector::Zero(A.rows());
  for (Index c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) sums[it.row()] += std::abs(it.value());
  }
  return sums.size() ? sums.maxCoeff() : 0.0;
}

bool is_symmetric(const SparseMatrix& A) {
  const SparseMatrix diff = A - SparseMatrix(A.transpose());
  double worst = 0.0;
  for (Index c = 0; c < diff.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(diff, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst <= 1e-14 * std::max(1.0, max_abs_row_sum(A));
}

// Growing B-orthonormal basis with the kernel projected out.
class BOrthoBasis {
 public:
  BOrthoBasis(const SparseMatrix& B, const Matrix& kernel, Index capacity)
      : B_(B), kernel_(kernel), kernel_b_(B * kernel), basis_(B.rows(), capacity) {}

  Index size() const { return size_; }
  Index capacity() const { return basis_.cols(); }
  auto columns() const { return basis_.leftCols(size_); }

  void project_kernel(Eigen::Ref<Vector> w) const {
    if (kernel_.cols()) w -= kernel_ * (kernel_b_.transpose() * w);
  }

  // Appends the accepted columns of `w`; returns their positions.
  std::vector<Index> append(Matrix w) {
    std::vector<Index> added;
    for (Index j = 0; j < w.cols() && size_ < capacity(); ++j) {
      Vector v = w.col(j);
      const double before = std::sqrt(std::max(0.0, v.dot(B_ * v)));
      if (!(before > 0.0) || !std::isfinite(before)) continue;
      for (int pass = 0; pass < 2; ++pass) {
        project_kernel(v);
        if (size_) {
          const Vector bv = B_ * v;
          v -= columns() * (columns().transpose() * bv);
        }
      }
      const double after = std::sqrt(std::max(0.0, v.dot(B_ * v)));
      if (after <= 1e-10 * before) continue;
      basis_.col(size_) = v / after;
      added.push_back(size_);
      ++size_;
    }
    return added;
  }

 private:
  const SparseMatrix& B_;
  Matrix kernel_;
  Matrix kernel_b_;
  Matrix basis_;
  Index size_ = 0;
};

Matrix b_orthonormal_kernel(const SparseMatrix& B, const std::vector<Vector>& kernel) {
  Matrix y(B.rows(), 0);
  for (const auto& v : kernel) {
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass) {
      if (y.cols()) w -= y * (y.transpose() * (B * w));
    }
    const double nrm = std::sqrt(std::max(0.0, w.dot(B * w)));
    if (nrm <= 0.0) continue;
    y.conservativeResize(Eigen::NoChange, y.cols() + 1);
    y.col(y.cols() - 1) = w / nrm;
  }
  return y;
}

void check_positive_definite(const SparseMatrix& M, const char* what) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(M);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) {
    fail(ErrorCode::factorization_failure, std::string(what) + " is not numerically positive definite");
  }
}

// Factorization of A - sigma B with sigma = 0, or slightly negative when a
// kernel has been deflated so the shifted matrix stays definite.
class ShiftedFactor {
 public:
  ShiftedFactor(const SparseMatrix& A, const SparseMatrix& B, const Matrix& kernel)
      : kernel_(kernel), kernel_b_(B * kernel) {
    check_positive_definite(B, "B");
    if (kernel.cols()) shift_ = -1e-6 * A.diagonal().sum() / B.diagonal().sum();
    const SparseMatrix shifted = shift_ == 0.0 ? A : SparseMatrix(A - shift_ * B);
    ldlt_.compute(shifted);
    if (ldlt_.info() != Eigen::Success || !(ldlt_.vectorD().array() > 0.0).all()) {
      fail(ErrorCode::factorization_failure,
           "A - sigma B is not positive definite at sigma = " + std::to_string(shift_));
    }
  }

  Vector solve(const Vector& rhs) const {
    Vector x = ldlt_.solve(rhs);
    project_kernel(x);
    return x;
  }

  void project_kernel(Eigen::Ref<Vector> x) const {
    if (kernel_.cols()) x -= kernel_ * (kernel_b_.transpose() * x);
  }

 private:
  Matrix kernel_;
  Matrix kernel_b_;
  double shift_ = 0.0;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

struct PencilProducts {
  std::vector<long double> ax;
  std::vector<long double> bx;
};

PencilProducts products(const SparseMatrix& A, const SparseMatrix& B,
                        const Eigen::Ref<const Vector>& x) {
  PencilProducts p{std::vector<long double>(static_cast<std::size_t>(x.size()), 0.0L),
                   std::vector<long double>(static_cast<std::size_t>(x.size()), 0.0L)};
  for (Index c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      p.ax[it.row()] += static_cast<long double>(it.value()) * x[c];
    }
  }
  for (Index c = 0; c < B.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
      p.bx[it.row()] += static_cast<long double>(it.value()) * x[c];
    }
  }
  return p;
}

long double rayleigh_quotient(const PencilProducts& p, const Eigen::Ref<const Vector>& x) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (Index i = 0; i < x.size(); ++i) {
    num += x[i] * p.ax[i];
    den += x[i] * p.bx[i];
  }
  return num / den;
}

// Mixed-precision refinement of a converged Ritz pair: the residual is formed
// in long double and corrected through the shifted factorization, which
// removes the high-frequency rounding noise of x = V z.
void polish(const SparseMatrix& A, const SparseMatrix& B, const ShiftedFactor& factor,
            Eigen::Ref<Vector> x, double& theta, double& residual) {
  for (int step = 0; step < 2; ++step) {
    const PencilProducts p = products(A, B, x);
    const long double rq = rayleigh_quotient(p, x);
    Vector r(x.size());
    for (Index i = 0; i < x.size(); ++i) r[i] = static_cast<double>(p.ax[i] - rq * p.bx[i]);
    x -= factor.solve(r);
  }
  const PencilProducts p = products(A, B, x);
  long double bnorm = 0.0L;
  for (Index i = 0; i < x.size(); ++i) bnorm += x[i] * p.bx[i];
  x /= static_cast<double>(std::sqrt(bnorm));
  theta = static_cast<double>(rayleigh_quotient(products(A, B, x), x));
  residual = relative_residual(A, B, x, theta);
}

BlockResult dense_block(const SparseMatrix& A, const SparseMatrix& B, const Matrix& kernel,
                        const ShiftedFactor& factor, int count) {
  const Matrix ad = Matrix(A);
  const Matrix bd = Matrix(B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(ad, bd);
  if (ges.info() != Eigen::Success) {
    fail(ErrorCode::numerical_failure, "dense generalized eigensolver failed");
  }
  const Index n = ad.rows();
  std::vector<Index> keep(static_cast<std::size_t>(n));
  std::iota(keep.begin(), keep.end(), 0);
  if (kernel.cols()) {
    // Drop the eigenvectors that span the kernel.
    const Matrix overlap = kernel.transpose() * (bd * ges.eigenvectors());
    std::vector<double> weight(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) weight[j] = overlap.col(j).norm();
    std::stable_sort(keep.begin(), keep.end(),
                     [&](Index a, Index b) { return weight[a] > weight[b]; });
    keep.erase(keep.begin(), keep.begin() + kernel.cols());
    std::sort(keep.begin(), keep.end());
  }
  BlockResult r;
  r.vectors.resize(n, count);
  r.values.resize(static_cast<std::size_t>(count));
  r.residuals.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const Index j = keep[static_cast<std::size_t>(i)];
    r.vectors.col(i) = ges.eigenvectors().col(j);
    polish(A, B, factor, r.vectors.col(i), r.values[i], r.residuals[i]);
  }
  r.iterations = 1;
  return r;
}

// Shift-invert block Krylov with Rayleigh-Ritz on (A, B) and thick restarts.
BlockResult krylov_block(const SparseMatrix& A, const SparseMatrix& B, const Matrix& kernel,
                         const ShiftedFactor& factor, int count, const SolverOptions& options) {
  const Index n = A.rows();
  const Index available = n - kernel.cols();
  const Index block = std::min<Index>(available, count + kExtraBlock);
  const Index capacity = std::min<Index>(available, block * (kKrylovDepth + 1));

  Matrix x = start_block(n, block);
  BlockResult best;
  double best_residual = INFINITY;
  int since_improvement = 0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    BOrthoBasis basis(B, kernel, capacity);
    std::vector<Index> frontier = basis.append(x);
    for (int depth = 0; depth < kKrylovDepth && !frontier.empty() && basis.size() < capacity; ++depth) {
      Matrix w(n, static_cast<Index>(frontier.size()));
      for (std::size_t j = 0; j < frontier.size(); ++j) {
        w.col(static_cast<Index>(j)) = factor.solve(B * basis.columns().col(frontier[j]));
      }
      frontier = basis.append(std::move(w));
    }
    if (basis.size() < count) {
      fail(ErrorCode::numerical_failure, "Krylov basis collapsed below the requested count");
    }

    const Matrix v = basis.columns();
    Matrix h = v.transpose() * (A * v);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> rr(h);
    const Index keep = std::min<Index>(block, v.cols());
    x = v * rr.eigenvectors().leftCols(keep);

    BlockResult current;
    current.iterations = iter;
    current.vectors = x.leftCols(count);
    current.values.resize(static_cast<std::size_t>(count));
    current.residuals.resize(static_cast<std::size_t>(count));
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      polish(A, B, factor, current.vectors.col(i), current.values[i], current.residuals[i]);
      worst = std::max(worst, current.residuals[i]);
    }
    if (worst <= options.tol) {
      // Polishing keeps each value but may reorder nearly equal neighbours.
      std::vector<int> order(static_cast<std::size_t>(count));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return current.values[a] < current.values[b]; });
      BlockResult sorted = current;
      for (int i = 0; i < count; ++i) {
        sorted.values[i] = current.values[order[i]];
        sorted.residuals[i] = current.residuals[order[i]];
        sorted.vectors.col(i) = current.vectors.col(order[i]);
      }
      return sorted;
    }

    if (worst < 0.9 * best_residual) {
      best_residual = worst;
      since_improvement = 0;
    } else if (++since_improvement >= kStagnationWindow) {
      current.converged = false;
      char buf[96];
      std::snprintf(buf, sizeof buf, "residual stagnated at %.3e after %d restarts", worst, iter);
      current.failure = buf;
      return current;
    }
    best = std::move(current);
  }
  best.converged = false;
  best.failure = "iteration cap reached";
  return best;
}

BlockResult solve_block(const SparseMatrix& A, const SparseMatrix& B, const Matrix& kernel,
                        int count, const SolverOptions& options) {
  const ShiftedFactor factor(A, B, kernel);
  if (A.rows() <= options.dense_limit) {
    BlockResult dense = dense_block(A, B, kernel, factor, count);
    const bool ok = std::all_of(dense.residuals.begin(), dense.residuals.end(),
                                [&](double r) { return r <= options.tol; });
    if (ok) return dense;
    dense.converged = false;
    dense.failure = "dense solve did not reach the residual tolerance";
    return dense;
  }
  return krylov_block(A, B, kernel, factor, count, options);
}

// Connected components of the coupling graph of (A, B, kernel supports);
// each list is ascending and the lists are ordered by their first index.
std::vector<std::vector<Index>> coupled_blocks(const ConstrainedPencil& p) {
  const Index n = p.A.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const SparseMatrix* m : {&p.A, &p.B}) {
    for (Index c = 0; c < m->outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(*m, c); it; ++it) unite(it.row(), c);
    }
  }
  for (const auto& v : p.kernel) {
    Index first = -1;
    for (Index i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      if (first < 0) first = i; else unite(first, i);
    }
  }
  std::vector<Index> root_slot(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> out;
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<Index>(out.size());
      out.emplace_back();
    }
    out[root_slot[r]].push_back(i);
  }
  return out;
}

SparseMatrix extract(const SparseMatrix& m, const std::vector<Index>& idx,
                     const std::vector<Index>& local) {
  std::vector<Eigen::Triplet<double>> t;
  for (Index j = 0; j < static_cast<Index>(idx.size()); ++j) {
    for (SparseMatrix::InnerIterator it(m, idx[j]); it; ++it) {
      t.emplace_back(local[it.row()], j, it.value());
    }
  }
  SparseMatrix out(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

}  // namespace

ConstrainedPencil deflate_kernel(const SparseMatrix& A, const SparseMatrix& B,
                                 const std::vector<Vector>& basis, double tol) {
  require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(),
          "deflate_kernel: A and B must be square and of equal size");
  // ||A v|| is measured against ||A||_inf ||v|| so the test is scale free.
  const double scale = std::max(1.0, max_abs_row_sum(A));
  for (const auto& v : basis) {
    require(v.size() == A.rows(), "deflate_kernel: basis vector has the wrong length");
    const double residual = (A * v).norm();
    if (residual > tol * scale * v.norm()) {
      fail(ErrorCode::invalid_argument,
           "deflate_kernel: basis vector is not in the kernel of A (||Av|| = " +
               std::to_string(residual) + ")");
    }
  }
  return ConstrainedPencil{A, B, basis};
}

Spectrum solve_generalized(const ConstrainedPencil& pencil, int count, const SolverOptions& options) {
  const SparseMatrix& A = pencil.A;
  const SparseMatrix& B = pencil.B;
  require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(),
          "solve_generalized: A and B must be square and of equal size");
  require(count >= 1, "solve_generalized: count must be >= 1");
  require(options.tol > 0.0, "solve_generalized: tol must be > 0");
  require(static_cast<Index>(count) <= A.rows() - static_cast<Index>(pencil.kernel.size()),
          "solve_generalized: count exceeds the number of degrees of freedom");
  require(is_symmetric(A), "solve_generalized: A is not symmetric");
  require(is_symmetric(B), "solve_generalized: B is not symmetric");

  const auto blocks = coupled_blocks(pencil);
  const Index n = A.rows();
  std::vector<Index> local(static_cast<std::size_t>(n), -1);
  for (const auto& idx : blocks) {
    for (Index j = 0; j < static_cast<Index>(idx.size()); ++j) local[idx[j]] = j;
  }

  std::vector<BlockResult> results(blocks.size());
  std::vector<std::exception_ptr> errors(blocks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t b = next++; b < blocks.size(); b = next++) {
      try {
        const auto& idx = blocks[b];
        std::vector<Vector> kernel;
        for (const auto& v : pencil.kernel) {
          Vector part(static_cast<Index>(idx.size()));
          for (Index j = 0; j < part.size(); ++j) part[j] = v[idx[j]];
          if (part.squaredNorm() > 0.0) kernel.push_back(std::move(part));
        }
        const SparseMatrix a = extract(A, idx, local);
        const SparseMatrix bm = extract(B, idx, local);
        const Matrix y = b_orthonormal_kernel(bm, kernel);
        const Index available = a.rows() - y.cols();
        const int wanted = static_cast<int>(std::min<Index>(count, available));
        if (wanted > 0) results[b] = solve_block(a, bm, y, wanted, options);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(blocks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  struct Entry {
    double value;
    std::size_t block;
    int local;
  };
  std::vector<Entry> entries;
  for (std::size_t b = 0; b < results.size(); ++b) {
    for (int i = 0; i < static_cast<int>(results[b].values.size()); ++i) {
      entries.push_back({results[b].values[i], b, i});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& l, const Entry& r) { return l.value < r.value; });

  Spectrum s;
  s.deflated_kernel_dim = static_cast<int>(pencil.kernel.size());
  std::string failure;
  for (const auto& r : results) {
    s.iterations = std::max(s.iterations, r.iterations);
    if (!r.converged && failure.empty()) failure = r.failure;
  }
  for (int i = 0; i < count && i < static_cast<int>(entries.size()); ++i) {
    const auto& e = entries[static_cast<std::size_t>(i)];
    const auto& r = results[e.block];
    s.values.push_back(e.value);
    s.residuals.push_back(r.residuals[static_cast<std::size_t>(e.local)]);
    Vector full = Vector::Zero(n);
    const auto& idx = blocks[e.block];
    for (Index j = 0; j < static_cast<Index>(idx.size()); ++j) full[idx[j]] = r.vectors(j, e.local);
    s.vectors.push_back(std::move(full));
  }
  if (!failure.empty()) {
    throw ConvergenceError("solve_generalized: no convergence (" + failure + ")", std::move(s));
  }
  return s;
}

Spectrum solve_generalized(const SparseMatrix& A, const SparseMatrix& B, int count, double tol) {
  SolverOptions options;
  options.tol = tol;
  return solve_generalized(ConstrainedPencil{A, B, {}}, count, options);
}

Spectrum solve(const FormProblem& problem, int count, const SolverOptions& options) {
  const ConstrainedPencil pencil = deflate_kernel(problem.A, problem.B, problem.harmonic_fields);
  auto label = [&]() {
    return std::string(to_string(problem.kind)) + "[p=" + std::to_string(problem.degree) + "]";
  };
  try {
    Spectrum s = solve_generalized(pencil, count, options);
    s.label = label();
    s.kind = problem.kind;
    s.degree = problem.degree;
    return s;
  } catch (const ConvergenceError& e) {
    Spectrum partial = e.partial();
    partial.label = label();
    partial.kind = problem.kind;
    partial.degree = problem.degree;
    throw ConvergenceError(e.what(), std::move(partial));
  }
}

std::vector<int> multiplicities(const std::vector<double>& values, double rel_gap) {
  std::vector<int> out(values.size(), 1);
  std::size_t start = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    const bool split = i == values.size() ||
                       std::abs(values[i] - values[i - 1]) > rel_gap * std::abs(values[i - 1]);
    if (split) {
      for (std::size_t j = start; j < i; ++j) out[j] = static_cast<int>(i - start);
      start = i;
    }
  }
  return out;
}

}  // namespace hodge
