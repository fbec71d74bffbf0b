#include "discretize.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace hodge {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Index rows, Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix diagonal(const Vector& d) {
  Triplets t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  return from_triplets(d.size(), d.size(), t);
}

// Unknown nodes along one axis: interior only when the value is fixed,
// otherwise the two boundary nodes are unknowns as well.
Index axis_nodes(bool value_fixed, int cells) {
  return value_fixed ? cells : cells + 2;
}

Vector axis_mass(bool value_fixed, int cells, double h) {
  Vector w = Vector::Constant(axis_nodes(value_fixed, cells), h);
  if (!value_fixed) {
    w[0] = 0.5 * h;
    w[w.size() - 1] = 0.5 * h;
  }
  return w;
}

// Positive second difference on the axis unknowns; ghost reflection
// u_{-1} = u_1 on faces where only the normal derivative vanishes.
SparseMatrix axis_second_difference(bool value_fixed, int cells, double h) {
  const Index n = axis_nodes(value_fixed, cells);
  const double s = 1.0 / (h * h);
  Triplets t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 * s);
    if (!value_fixed && i == 0) {
      t.emplace_back(i, i + 1, -2.0 * s);
    } else if (!value_fixed && i == n - 1) {
      t.emplace_back(i, i - 1, -2.0 * s);
    } else {
      if (i > 0) t.emplace_back(i, i - 1, -s);
      if (i < n - 1) t.emplace_back(i, i + 1, -s);
    }
  }
  return from_triplets(n, n, t);
}

// diag(mass) * second difference, assembled directly so it is exactly symmetric.
SparseMatrix axis_stiffness(bool value_fixed, int cells, double h) {
  const Index n = axis_nodes(value_fixed, cells);
  const double s = 1.0 / h;
  Triplets t;
  for (Index i = 0; i < n; ++i) {
    const bool end = !value_fixed && (i == 0 || i == n - 1);
    t.emplace_back(i, i, end ? s : 2.0 * s);
    if (i > 0) t.emplace_back(i, i - 1, -s);
    if (i < n - 1) t.emplace_back(i, i + 1, -s);
  }
  return from_triplets(n, n, t);
}

// Clamped axis: Laplacian values on all nodes 0..N+1 from the interior
// unknowns, with u_0 = 0 and ghost u_{-1} = u_1 (zero centered derivative).
SparseMatrix axis_clamped_rows(int cells, double h) {
  const Index n = cells;
  const double s = 1.0 / (h * h);
  Triplets t;
  t.emplace_back(0, 0, -2.0 * s);
  for (Index r = 1; r <= n; ++r) {
    const Index c = r - 1;
    t.emplace_back(r, c, 2.0 * s);
    if (c > 0) t.emplace_back(r, c - 1, -s);
    if (c < n - 1) t.emplace_back(r, c + 1, -s);
  }
  t.emplace_back(n + 1, n - 1, -2.0 * s);
  return from_triplets(n + 2, n, t);
}

SparseMatrix axis_embedding(int cells) {
  Triplets t;
  for (Index r = 1; r <= cells; ++r) t.emplace_back(r, r - 1, 1.0);
  return from_triplets(cells + 2, cells, t);
}

Vector axis_extended_weights(int cells, double h) {
  Vector w = Vector::Constant(cells + 2, h);
  w[0] = 0.5 * h;
  w[cells + 1] = 0.5 * h;
  return w;
}

SparseMatrix identity(Index n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

// Axis 0 varies fastest in the flattened index.
SparseMatrix kron_chain(const std::vector<SparseMatrix>& factors) {
  SparseMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    SparseMatrix next = Eigen::kroneckerProduct(factors[k], out);
    out = std::move(next);
  }
  return out;
}

Vector kron_chain(const std::vector<Vector>& factors) {
  Vector out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const Vector& f = factors[k];
    Vector next(f.size() * out.size());
    for (Index i = 0; i < f.size(); ++i) next.segment(i * out.size(), out.size()) = f[i] * out;
    out = std::move(next);
  }
  return out;
}

// Sum over axes of kron products where axis k uses `on_axis(k)` and the others
// use `off_axis(j)`.
template <class OnAxis, class OffAxis>
SparseMatrix kron_sum(int dim, OnAxis on_axis, OffAxis off_axis) {
  SparseMatrix total;
  for (int k = 0; k < dim; ++k) {
    std::vector<SparseMatrix> factors;
    factors.reserve(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) factors.push_back(j == k ? on_axis(j) : off_axis(j));
    SparseMatrix term = kron_chain(factors);
    if (k == 0) {
      total = std::move(term);
    } else {
      total += term;
    }
  }
  return total;
}

SparseMatrix drop_zeros(SparseMatrix m) {
  m.prune([](Index, Index, double v) { return v != 0.0; });
  m.makeCompressed();
  return m;
}

struct ScalarBlock {
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix L;
  Vector w;
};

ScalarBlock assemble_second_order(const BoxDomain& d, const std::vector<bool>& fixed) {
  const auto mass = [&](int j) {
    return diagonal(axis_mass(fixed[j], d.cells[j], d.spacing[j]));
  };
  ScalarBlock s;
  s.A = drop_zeros(kron_sum(
      d.dim, [&](int j) { return axis_stiffness(fixed[j], d.cells[j], d.spacing[j]); },
      mass));
  std::vector<Vector> weights;
  std::vector<SparseMatrix> masses;
  for (int j = 0; j < d.dim; ++j) {
    weights.push_back(axis_mass(fixed[j], d.cells[j], d.spacing[j]));
    masses.push_back(mass(j));
  }
  s.B = drop_zeros(kron_chain(masses));
  s.w = kron_chain(weights);
  s.L = drop_zeros(kron_sum(
      d.dim,
      [&](int j) { return axis_second_difference(fixed[j], d.cells[j], d.spacing[j]); },
      [&](int j) { return identity(axis_nodes(fixed[j], d.cells[j])); }));
  return s;
}

ScalarBlock assemble_biharmonic(const BoxDomain& d, ProblemKind kind) {
  ScalarBlock s;
  s.L = drop_zeros(kron_sum(
      d.dim, [&](int j) { return axis_clamped_rows(d.cells[j], d.spacing[j]); },
      [&](int j) { return axis_embedding(d.cells[j]); }));
  std::vector<Vector> weights;
  for (int j = 0; j < d.dim; ++j) weights.push_back(axis_extended_weights(d.cells[j], d.spacing[j]));
  s.w = kron_chain(weights);

  const SparseMatrix weighted = diagonal(s.w) * s.L;
  const SparseMatrix gram = s.L.transpose() * weighted;
  const SparseMatrix gram_t = gram.transpose();
  s.A = drop_zeros(0.5 * (gram + gram_t));

  const std::vector<bool> all_fixed(static_cast<std::size_t>(d.dim), true);
  ScalarBlock laplace = assemble_second_order(d, all_fixed);
  s.B = kind == ProblemKind::buckling ? laplace.A : laplace.B;
  return s;
}

SparseMatrix block_diagonal(const std::vector<const SparseMatrix*>& blocks) {
  Index rows = 0;
  Index cols = 0;
  std::size_t nnz = 0;
  for (const auto* b : blocks) {
    rows += b->rows();
    cols += b->cols();
    nnz += static_cast<std::size_t>(b->nonZeros());
  }
  Triplets t;
  t.reserve(nnz);
  Index r0 = 0;
  Index c0 = 0;
  for (const auto* b : blocks) {
    for (Index k = 0; k < b->outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(*b, k); it; ++it) {
        t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
      }
    }
    r0 += b->rows();
    c0 += b->cols();
  }
  return from_triplets(rows, cols, t);
}

}  // namespace

BoxDomain build_domain(int dim, std::span<const double> extent, std::span<const int> cells) {
  require(dim >= 1 && dim <= 3, "build_domain: dimension must be 1, 2 or 3");
  require(extent.size() == static_cast<std::size_t>(dim),
          "build_domain: expected " + std::to_string(dim) + " extents");
  require(cells.size() == static_cast<std::size_t>(dim),
          "build_domain: expected " + std::to_string(dim) + " cell counts");
  BoxDomain d;
  d.dim = dim;
  for (int k = 0; k < dim; ++k) {
    require(std::isfinite(extent[k]) && extent[k] > 0.0,
            "build_domain: extents must be positive");
    require(cells[k] >= 3, "build_domain: cells must be >= 3 on every axis");
    d.extent.push_back(extent[k]);
    d.cells.push_back(cells[k]);
    d.spacing.push_back(extent[k] / (cells[k] + 1));
  }
  return d;
}

bool ComponentIndex::contains(int axis) const {
  return std::find(axes.begin(), axes.end(), axis) != axes.end();
}

std::string ComponentIndex::label() const {
  if (axes.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i) out += '^';
    out += "dx" + std::to_string(axes[i] + 1);
  }
  return out;
}

std::vector<ComponentIndex> form_components(int dim, int degree) {
  require(degree >= 0 && degree <= dim, "form degree must satisfy 0 <= p <= n");
  std::vector<ComponentIndex> out;
  std::vector<int> axes(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) axes[i] = i;
  while (true) {
    out.push_back(ComponentIndex{degree, axes});
    int i = degree - 1;
    while (i >= 0 && axes[i] == dim - degree + i) --i;
    if (i < 0) break;
    ++axes[i];
    for (int j = i + 1; j < degree; ++j) axes[j] = axes[j - 1] + 1;
  }
  return out;
}

ComponentIndex complement(const ComponentIndex& index, int dim) {
  ComponentIndex out{dim - index.degree, {}};
  for (int k = 0; k < dim; ++k) {
    if (!index.contains(k)) out.axes.push_back(k);
  }
  return out;
}

std::vector<FaceCondition> component_conditions(const BoxDomain& domain,
                                                const ComponentIndex& index,
                                                BoundaryKind kind) {
  std::vector<FaceCondition> out;
  for (int k = 0; k < domain.dim; ++k) {
    FaceCondition c;
    c.axis = k;
    switch (kind) {
      case BoundaryKind::clamped:
        c.value_zero = true;
        c.normal_derivative_zero = true;
        break;
      case BoundaryKind::dirichlet:
        c.value_zero = true;
        break;
      case BoundaryKind::absolute:
        // nu _| w = 0 kills components containing the normal direction;
        // nu _| dw = 0 then leaves d_nu w_I = 0 for the others.
        c.value_zero = index.contains(k);
        c.normal_derivative_zero = !c.value_zero;
        break;
      case BoundaryKind::relative:
        c.value_zero = !index.contains(k);
        c.normal_derivative_zero = !c.value_zero;
        break;
    }
    c.side = -1;
    out.push_back(c);
    c.side = +1;
    out.push_back(c);
  }
  return out;
}

BoundaryKind boundary_of(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::clamped_plate:
    case ProblemKind::buckling:
      return BoundaryKind::clamped;
    case ProblemKind::dirichlet_laplace:
      return BoundaryKind::dirichlet;
    case ProblemKind::absolute_laplace:
      return BoundaryKind::absolute;
    case ProblemKind::relative_laplace:
      return BoundaryKind::relative;
  }
  return BoundaryKind::dirichlet;
}

bool is_biharmonic(ProblemKind kind) {
  return kind == ProblemKind::clamped_plate || kind == ProblemKind::buckling;
}

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::clamped_plate: return "clamped_plate";
    case ProblemKind::buckling: return "buckling";
    case ProblemKind::dirichlet_laplace: return "dirichlet_laplace";
    case ProblemKind::absolute_laplace: return "absolute_laplace";
    case ProblemKind::relative_laplace: return "relative_laplace";
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view text) {
  for (auto k : {ProblemKind::clamped_plate, ProblemKind::buckling,
                 ProblemKind::dirichlet_laplace, ProblemKind::absolute_laplace,
                 ProblemKind::relative_laplace}) {
    if (text == to_string(k)) return k;
  }
  if (text == "clamped") return ProblemKind::clamped_plate;
  if (text == "dirichlet") return ProblemKind::dirichlet_laplace;
  if (text == "absolute") return ProblemKind::absolute_laplace;
  if (text == "relative") return ProblemKind::relative_laplace;
  return std::nullopt;
}

FormProblem assemble(const BoxDomain& domain, int degree, ProblemKind kind) {
  require(domain.dim >= 1 && static_cast<int>(domain.cells.size()) == domain.dim,
          "assemble: malformed domain");
  require(degree >= 0 && degree <= domain.dim, "assemble: degree must satisfy 0 <= p <= n");

  FormProblem problem;
  problem.domain = domain;
  problem.degree = degree;
  problem.kind = kind;

  std::vector<ScalarBlock> scalars;
  Index offset = 0;
  Index row_offset = 0;
  std::vector<Index> row_offsets;
  std::vector<std::size_t> floating_blocks;
  for (const auto& index : form_components(domain.dim, degree)) {
    const auto faces = component_conditions(domain, index, boundary_of(kind));
    ComponentBlock block;
    block.index = index;
    for (int k = 0; k < domain.dim; ++k) block.value_axes.push_back(faces[2 * k].value_zero);

    ScalarBlock s = is_biharmonic(kind) ? assemble_biharmonic(domain, kind)
                                        : assemble_second_order(domain, block.value_axes);
    block.offset = offset;
    block.size = s.A.rows();

    const bool floating = std::none_of(block.value_axes.begin(), block.value_axes.end(),
                                       [](bool b) { return b; });
    if (floating) floating_blocks.push_back(problem.blocks.size());

    row_offsets.push_back(row_offset);
    offset += block.size;
    row_offset += s.L.rows();
    problem.blocks.push_back(std::move(block));
    scalars.push_back(std::move(s));
  }
  // Constants on a component free on every face span the discrete harmonic
  // fields; no other component has a kernel on a box.
  for (std::size_t i : floating_blocks) {
    Vector field = Vector::Zero(offset);
    field.segment(problem.blocks[i].offset, problem.blocks[i].size).setOnes();
    problem.harmonic_fields.push_back(std::move(field));
  }

  std::vector<const SparseMatrix*> a, b, l;
  for (const auto& s : scalars) {
    a.push_back(&s.A);
    b.push_back(&s.B);
    l.push_back(&s.L);
  }
  problem.A = block_diagonal(a);
  problem.B = block_diagonal(b);
  problem.laplacian = block_diagonal(l);
  problem.node_weights.resize(row_offset);
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    problem.node_weights.segment(row_offsets[i], scalars[i].w.size()) = scalars[i].w;
  }
  return problem;
}

}  // namespace hodge
