#pragma once

#include "steklov/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace steklov {

namespace detail {

inline std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

/// ASCII mesh format: line 1 is `dim n_vertices n_cells`, then one line of
/// Dim coordinates per vertex (17 significant digits), then one line of
/// Dim+1 zero-based vertex indices per cell. Faces and boundary flags are
/// never stored; they are re-derived on import.
template <int Dim>
void export_mesh(const SimplicialMesh<Dim>& mesh, std::ostream& os) {
  if (mesh.vertices.empty() || mesh.cells.empty())
    throw std::runtime_error("refusing to export empty mesh");
  os << Dim << ' ' << mesh.n_vertices() << ' ' << mesh.n_cells() << '\n';
  for (const auto& v : mesh.vertices) {
    for (int d = 0; d < Dim; ++d)
      os << (d ? " " : "") << detail::format_float(v[d]);
    os << '\n';
  }
  for (const auto& c : mesh.cells) {
    for (int i = 0; i <= Dim; ++i) os << (i ? " " : "") << c[i];
    os << '\n';
  }
  if (!os) throw std::runtime_error("mesh export failed (stream error)");
}

template <int Dim>
void export_mesh(const SimplicialMesh<Dim>& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  export_mesh(mesh, os);
}

/// Dimension recorded in a mesh file, for dispatching the typed import.
inline int peek_mesh_dimension(std::istream& is) {
  int dim = 0;
  if (!(is >> dim)) throw std::runtime_error("cannot read mesh header");
  is.seekg(0);
  return dim;
}

template <int Dim>
SimplicialMesh<Dim> import_mesh(std::istream& is) {
  int dim = 0, nv = 0, nc = 0;
  if (!(is >> dim >> nv >> nc)) throw std::runtime_error("bad mesh header");
  if (dim != Dim) throw std::runtime_error("mesh dimension mismatch");
  if (nv <= 0 || nc <= 0) throw std::runtime_error("empty mesh file");
  std::vector<Vec<Dim>> verts(nv);
  for (int i = 0; i < nv; ++i)
    for (int d = 0; d < Dim; ++d)
      if (!(is >> verts[i][d])) throw std::runtime_error("bad vertex line");
  std::vector<std::array<int, Dim + 1>> cells(nc);
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i <= Dim; ++i)
      if (!(is >> cells[c][i])) throw std::runtime_error("bad cell line");
  return make_mesh<Dim>(std::move(verts), std::move(cells));
}

template <int Dim>
SimplicialMesh<Dim> import_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return import_mesh<Dim>(is);
}

}  // namespace steklov
