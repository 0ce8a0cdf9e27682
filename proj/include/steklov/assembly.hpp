#pragma once

#include "steklov/coefficients.hpp"
#include "steklov/dofmap.hpp"
#include "steklov/elements.hpp"
#include "steklov/mesh.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace steklov {

struct ProblemDescriptor {
  std::string domain = "custom";
  int level = -1;
  ElementKind element = ElementKind::cr;
  std::string alpha, beta;
  double alpha0 = 1.0;
  double delta = 1.01;
  int quad_degree = 4;
  std::uint64_t seed = 0;
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t derive_seed(const std::string& domain, int level,
                                 ElementKind element) {
  return fnv1a(domain + "|" + std::to_string(level) + "|" + element_name(element));
}

/// Assembled pencil A u = lambda B u: A is the broken stiffness plus the
/// volume mass (symmetric positive definite), B the boundary mass
/// (symmetric positive semidefinite, supported on boundary DOFs).
template <int Dim>
struct PencilSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> B;
  DofMap dofmap;
  ProblemDescriptor descriptor;

  int n_dofs() const { return int(A.rows()); }
};

namespace detail {

template <int Dim, typename ShapesFactory>
void assemble_with(const SimplicialMesh<Dim>& mesh, const DofMap& dm,
                   const CoefficientField<Dim>& alpha,
                   const CoefficientField<Dim>& beta, int quad_degree,
                   ShapesFactory make_shapes, PencilSystem<Dim>& sys) {
  const auto crule = cell_rule<Dim>(quad_degree);
  const auto frule = face_rule<Dim>(quad_degree);
  const int n_loc = dm.n_loc;

  std::vector<Eigen::Triplet<double>> ta, tb;
  ta.reserve(std::size_t(mesh.n_cells()) * n_loc * n_loc);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geom = mesh.cell_geometry(c);
    const auto shapes = make_shapes(geom);
    LocalMatrices local;
    try {
      local = local_matrices(shapes, geom, alpha, beta, crule);
    } catch (const std::runtime_error& err) {
      throw std::runtime_error("cell " + std::to_string(c) + ": " + err.what());
    }
    for (int i = 0; i < n_loc; ++i)
      for (int j = 0; j < n_loc; ++j)
        ta.emplace_back(dm.dof(c, i), dm.dof(c, j),
                        local.stiffness(i, j) + local.mass(i, j));

    for (int i = 0; i <= Dim; ++i) {
      const int f = mesh.cell_faces[c][i];
      if (!mesh.boundary_face_flags[f]) continue;
      const Eigen::MatrixXd bf = local_boundary_mass(shapes, geom, i, frule);
      for (int a = 0; a < n_loc; ++a)
        for (int b = 0; b < n_loc; ++b)
          tb.emplace_back(dm.dof(c, a), dm.dof(c, b), bf(a, b));
    }
  }

  sys.A.resize(dm.n_dofs, dm.n_dofs);
  sys.B.resize(dm.n_dofs, dm.n_dofs);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.setFromTriplets(tb.begin(), tb.end());
  sys.A.makeCompressed();
  sys.B.makeCompressed();
}

}  // namespace detail

/// Assemble the pencil (A, B) for the given element kind. Local matrices
/// are exactly symmetric, and each global entry accumulates its (i,j) and
/// (j,i) contributions in the same order, so A and B are symmetric to the
/// last bit. Single-threaded cell order keeps results bitwise reproducible.
template <int Dim>
PencilSystem<Dim> assemble(const SimplicialMesh<Dim>& mesh, const DofMap& dm,
                           const CoefficientField<Dim>& alpha,
                           const CoefficientField<Dim>& beta,
                           int quad_degree = 4) {
  PencilSystem<Dim> sys;
  sys.dofmap = dm;
  sys.descriptor.domain = mesh.domain ? domain_name(*mesh.domain) : "custom";
  sys.descriptor.level = mesh.level;
  sys.descriptor.element = dm.kind;
  sys.descriptor.alpha = alpha.descriptor;
  sys.descriptor.beta = beta.descriptor;
  sys.descriptor.alpha0 = alpha.lower_bound;
  sys.descriptor.quad_degree = quad_degree;
  sys.descriptor.seed =
      derive_seed(sys.descriptor.domain, sys.descriptor.level, dm.kind);

  switch (dm.kind) {
    case ElementKind::cr:
      detail::assemble_with<Dim>(mesh, dm, alpha, beta, quad_degree,
                                 [](const ElementGeometry<Dim>&) {
                                   return CrShapes<Dim>{};
                                 },
                                 sys);
      break;
    case ElementKind::p1:
      detail::assemble_with<Dim>(mesh, dm, alpha, beta, quad_degree,
                                 [](const ElementGeometry<Dim>&) {
                                   return P1Shapes<Dim>{};
                                 },
                                 sys);
      break;
    case ElementKind::ecr:
      detail::assemble_with<Dim>(mesh, dm, alpha, beta, quad_degree,
                                 [](const ElementGeometry<Dim>& g) {
                                   return EcrShapes<Dim>(g);
                                 },
                                 sys);
      break;
  }
  return sys;
}

/// Boundary mass of one face of one cell, with the boundary check.
template <int Dim>
Eigen::MatrixXd boundary_face_mass(const SimplicialMesh<Dim>& mesh, int cell,
                                   int local_face, ElementKind kind,
                                   int quad_degree = 4) {
  const int f = mesh.cell_faces[cell][local_face];
  if (!mesh.boundary_face_flags[f])
    throw std::runtime_error("face is not on the boundary");
  const auto geom = mesh.cell_geometry(cell);
  const auto rule = face_rule<Dim>(quad_degree);
  switch (kind) {
    case ElementKind::cr:
      return local_boundary_mass(CrShapes<Dim>{}, geom, local_face, rule);
    case ElementKind::p1:
      return local_boundary_mass(P1Shapes<Dim>{}, geom, local_face, rule);
    case ElementKind::ecr:
      return local_boundary_mass(EcrShapes<Dim>(geom), geom, local_face, rule);
  }
  throw std::logic_error("unreachable");
}

/// Coordinate-format ASCII dump (`i j value`, 17 significant digits,
/// sorted by row then column) for external verification.
inline void dump_matrix(const Eigen::SparseMatrix<double>& m, std::ostream& os) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      entries.emplace_back(it.row(), it.col(), it.value());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
            });
  char buf[64];
  for (const auto& t : entries) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", int(t.row()), int(t.col()),
                  t.value());
    os << buf;
  }
}

inline void dump_matrix(const Eigen::SparseMatrix<double>& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  dump_matrix(m, os);
}

}  // namespace steklov
