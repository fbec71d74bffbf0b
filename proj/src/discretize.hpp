#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hodge {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Axis-aligned box [0, extent_0] x ... with `cells_k` interior nodes per axis
/// and uniform spacing extent_k / (cells_k + 1).
struct BoxDomain {
  int dim = 0;
  std::vector<double> extent;
  std::vector<int> cells;
  std::vector<double> spacing;
};

BoxDomain build_domain(int dim, std::span<const double> extent, std::span<const int> cells);

/// Multi-index I of dx^I, 0-based and strictly increasing.
struct ComponentIndex {
  int degree = 0;
  std::vector<int> axes;

  bool contains(int axis) const;
  std::string label() const;  // "dx1^dx3", "1" for functions
  friend bool operator==(const ComponentIndex&, const ComponentIndex&) = default;
};

/// All C(n,p) components in lexicographic order.
std::vector<ComponentIndex> form_components(int dim, int degree);

/// Complementary multi-index (the Hodge star partner).
ComponentIndex complement(const ComponentIndex& index, int dim);

enum class BoundaryKind { clamped, dirichlet, absolute, relative };

struct FaceCondition {
  int axis = 0;
  int side = -1;  // -1: face x_axis = 0, +1: face x_axis = extent
  bool value_zero = false;
  bool normal_derivative_zero = false;
};

/// Per-face scalar conditions of one component under a form boundary condition.
/// The list has 2n entries ordered (axis 0, -), (axis 0, +), (axis 1, -), ...
std::vector<FaceCondition> component_conditions(const BoxDomain& domain,
                                                const ComponentIndex& index,
                                                BoundaryKind kind);

enum class ProblemKind {
  clamped_plate,
  buckling,
  dirichlet_laplace,
  absolute_laplace,
  relative_laplace,
};

BoundaryKind boundary_of(ProblemKind kind);
bool is_biharmonic(ProblemKind kind);
std::string_view to_string(ProblemKind kind);
std::optional<ProblemKind> parse_problem_kind(std::string_view text);

struct ComponentBlock {
  ComponentIndex index;
  std::vector<bool> value_axes;  // true: value fixed to zero on both faces
  Index offset = 0;
  Index size = 0;
};

/// Assembled symmetric pencil (A, B) on p-forms of a box.
///
/// `laplacian` maps the unknowns to discrete Laplacian values on the node set
/// weighted by `node_weights`; for the biharmonic kinds A = L^T diag(w) L, and
/// for the second-order kinds A = diag(w) L (up to rounding).
struct FormProblem {
  BoxDomain domain;
  int degree = 0;
  ProblemKind kind = ProblemKind::dirichlet_laplace;
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix laplacian;
  Vector node_weights;
  std::vector<ComponentBlock> blocks;
  std::vector<Vector> harmonic_fields;

  Index dof_count() const { return A.rows(); }
};

FormProblem assemble(const BoxDomain& domain, int degree, ProblemKind kind);

}  // namespace hodge
