#pragma once

#include <optional>
#include <string>
#include <vector>

#include "discretize.hpp"
#include "error.hpp"

namespace hodge {

struct SolverOptions {
  double tol = 1e-9;           // relative residual ||Ax - tBx|| / ||Ax||
  int max_iterations = 10000;  // outer restarts per block
  Index dense_limit = 48;      // blocks up to this size use a dense solver
  unsigned threads = 1;        // independent blocks solved concurrently
};

/// Lowest eigenpairs of a pencil, sorted ascending.
struct Spectrum {
  std::string label;
  std::optional<ProblemKind> kind;
  int degree = 0;
  std::vector<double> values;
  std::vector<double> residuals;
  std::vector<Vector> vectors;
  int deflated_kernel_dim = 0;
  int iterations = 0;
};

/// Pencil (A, B) restricted to the B-orthogonal complement of `kernel`.
struct ConstrainedPencil {
  SparseMatrix A;
  SparseMatrix B;
  std::vector<Vector> kernel;
};

/// Thrown when a block does not reach the residual tolerance; carries the
/// best values found so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Spectrum partial)
      : Error(ErrorCode::no_convergence, what), partial_(std::move(partial)) {}
  const Spectrum& partial() const { return partial_; }

 private:
  Spectrum partial_;
};

ConstrainedPencil deflate_kernel(const SparseMatrix& A, const SparseMatrix& B,
                                 const std::vector<Vector>& basis, double tol = 1e-9);

Spectrum solve_generalized(const ConstrainedPencil& pencil, int count,
                           const SolverOptions& options = {});

Spectrum solve_generalized(const SparseMatrix& A, const SparseMatrix& B, int count,
                           double tol = 1e-9);

/// Deflates the problem's harmonic fields, solves, and labels the result.
Spectrum solve(const FormProblem& problem, int count, const SolverOptions& options = {});

/// Multiplicity of each value (relative gap < 1e-7 groups values); labeling only.
std::vector<int> multiplicities(const std::vector<double>& values, double rel_gap = 1e-7);

}  // namespace hodge
