#pragma once

#include "steklov/elements.hpp"
#include "steklov/mesh.hpp"

#include <algorithm>
#include <vector>

namespace steklov {

/// Global DOF numbering. CR: one DOF per face, in face order. ECR: face
/// DOFs first, then one per cell. P1: one per vertex, in vertex order.
/// boundary_dofs lists every DOF whose basis function has a nonzero trace
/// on the boundary (all DOFs of boundary cells for CR/ECR, boundary
/// vertices for P1), sorted ascending.
struct DofMap {
  ElementKind kind = ElementKind::cr;
  int n_dofs = 0;
  int n_loc = 0;
  std::vector<int> cell_dofs;  // n_loc entries per cell
  std::vector<int> boundary_dofs;

  int dof(int cell, int i) const { return cell_dofs[std::size_t(cell) * n_loc + i]; }
};

template <int Dim>
DofMap build_dofmap(const SimplicialMesh<Dim>& mesh, ElementKind kind) {
  DofMap dm;
  dm.kind = kind;
  dm.n_loc = n_local_dofs(kind, Dim);
  dm.cell_dofs.resize(std::size_t(mesh.n_cells()) * dm.n_loc);
  switch (kind) {
    case ElementKind::cr:
      dm.n_dofs = mesh.n_faces();
      for (int c = 0; c < mesh.n_cells(); ++c)
        for (int i = 0; i <= Dim; ++i)
          dm.cell_dofs[std::size_t(c) * dm.n_loc + i] = mesh.cell_faces[c][i];
      break;
    case ElementKind::ecr:
      dm.n_dofs = mesh.n_faces() + mesh.n_cells();
      for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int i = 0; i <= Dim; ++i)
          dm.cell_dofs[std::size_t(c) * dm.n_loc + i] = mesh.cell_faces[c][i];
        dm.cell_dofs[std::size_t(c) * dm.n_loc + Dim + 1] = mesh.n_faces() + c;
      }
      break;
    case ElementKind::p1:
      dm.n_dofs = mesh.n_vertices();
      for (int c = 0; c < mesh.n_cells(); ++c)
        for (int i = 0; i <= Dim; ++i)
          dm.cell_dofs[std::size_t(c) * dm.n_loc + i] = mesh.cells[c][i];
      break;
  }

  std::vector<char> on_boundary(dm.n_dofs, 0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!mesh.boundary_face_flags[f]) continue;
    if (kind == ElementKind::p1) {
      for (int v : mesh.faces[f]) on_boundary[v] = 1;
    } else {
      const int c = mesh.face_cells[f][0];
      for (int i = 0; i < dm.n_loc; ++i) on_boundary[dm.dof(c, i)] = 1;
    }
  }
  for (int d = 0; d < dm.n_dofs; ++d)
    if (on_boundary[d]) dm.boundary_dofs.push_back(d);
  return dm;
}

}  // namespace steklov
