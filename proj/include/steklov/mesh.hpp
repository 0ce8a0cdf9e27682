#pragma once

#include "steklov/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace steklov {

/// Catalog of benchmark domains. square/lshape/hexagon are 2D,
/// cube/fichera are 3D.
enum class Domain { square, lshape, hexagon, cube, fichera };

inline int domain_dimension(Domain d) {
  return (d == Domain::cube || d == Domain::fichera) ? 3 : 2;
}

inline const char* domain_name(Domain d) {
  switch (d) {
    case Domain::square: return "square";
    case Domain::lshape: return "lshape";
    case Domain::hexagon: return "hexagon";
    case Domain::cube: return "cube";
    case Domain::fichera: return "fichera";
  }
  return "?";
}

inline std::optional<Domain> parse_domain(const std::string& s) {
  if (s == "square") return Domain::square;
  if (s == "lshape") return Domain::lshape;
  if (s == "hexagon") return Domain::hexagon;
  if (s == "cube") return Domain::cube;
  if (s == "fichera") return Domain::fichera;
  return std::nullopt;
}

inline double domain_measure(Domain d) {
  switch (d) {
    case Domain::square: return 1.0;
    case Domain::lshape: return 3.0;
    case Domain::hexagon: return 3.0 * std::sqrt(3.0) / 2.0;
    case Domain::cube: return 1.0;
    case Domain::fichera: return 7.0;
  }
  return 0.0;
}

inline double domain_boundary_measure(Domain d) {
  switch (d) {
    case Domain::square: return 4.0;
    case Domain::lshape: return 8.0;
    case Domain::hexagon: return 6.0;
    case Domain::cube: return 6.0;
    case Domain::fichera: return 24.0;
  }
  return 0.0;
}

/// Diameter of the domain itself (the h_0 used when labelling refinement
/// rows as h_0/32, h_0/64, ...).
inline double domain_diameter(Domain d) {
  switch (d) {
    case Domain::square: return std::sqrt(2.0);
    case Domain::lshape: return 2.0 * std::sqrt(2.0);
    case Domain::hexagon: return 2.0;
    case Domain::cube: return std::sqrt(3.0);
    case Domain::fichera: return 2.0 * std::sqrt(3.0);
  }
  return 0.0;
}

inline std::int64_t base_cell_count(Domain d) {
  switch (d) {
    case Domain::square: return 2;
    case Domain::lshape: return 6;
    case Domain::hexagon: return 6;
    case Domain::cube: return 6;
    case Domain::fichera: return 42;
  }
  return 0;
}

/// Cell-count cap for generate/refine; override with env STEKLOV_CELL_CAP.
inline std::int64_t default_cell_cap() {
  if (const char* env = std::getenv("STEKLOV_CELL_CAP")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 5000000;
}

/// Conforming simplicial mesh. Cells are positively oriented; faces are
/// derived, stored with sorted vertex ids and numbered in discovery order
/// (cells scanned in order, local faces 0..Dim). cell_faces[c][i] is the
/// face opposite local vertex i of cell c.
template <int Dim>
struct SimplicialMesh {
  static constexpr int dim = Dim;
  using Cell = std::array<int, Dim + 1>;
  using Face = std::array<int, Dim>;

  std::vector<Vec<Dim>> vertices;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<Cell> cell_faces;  // Dim+1 face ids per cell
  std::vector<std::uint8_t> boundary_face_flags;
  std::vector<std::array<int, 2>> face_cells;  // incident cells, -1 if none

  // provenance of catalog meshes (drives 3D uniform refinement)
  std::optional<Domain> domain;
  int level = -1;

  int n_vertices() const { return int(vertices.size()); }
  int n_cells() const { return int(cells.size()); }
  int n_faces() const { return int(faces.size()); }

  ElementGeometry<Dim> cell_geometry(int c) const {
    std::array<Vec<Dim>, Dim + 1> v;
    for (int i = 0; i <= Dim; ++i) v[i] = vertices[cells[c][i]];
    return compute_geometry<Dim>(v);
  }

  /// Local index of face f within cell c.
  int local_face_index(int c, int f) const {
    for (int i = 0; i <= Dim; ++i)
      if (cell_faces[c][i] == f) return i;
    throw std::logic_error("face not incident to cell");
  }
};

namespace detail {

struct FaceKeyHash {
  template <std::size_t N>
  std::size_t operator()(const std::array<int, N>& a) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : a) {
      h ^= std::size_t(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace detail

/// Build a mesh from raw vertices and cells: orients cells positively
/// (swapping the last two vertices where needed), derives deduplicated
/// faces and boundary flags, and validates conformity.
template <int Dim>
SimplicialMesh<Dim> make_mesh(std::vector<Vec<Dim>> vertices,
                              std::vector<std::array<int, Dim + 1>> cells) {
  SimplicialMesh<Dim> m;
  m.vertices = std::move(vertices);
  m.cells = std::move(cells);
  if (m.vertices.empty() || m.cells.empty())
    throw std::runtime_error("mesh must have at least one vertex and one cell");

  const int nv = m.n_vertices();
  for (auto& cell : m.cells) {
    std::array<Vec<Dim>, Dim + 1> v;
    for (int i = 0; i <= Dim; ++i) {
      if (cell[i] < 0 || cell[i] >= nv)
        throw std::runtime_error("cell references vertex out of range");
      v[i] = m.vertices[cell[i]];
    }
    double sm = simplex_signed_measure<Dim>(v);
    if (sm == 0.0 || !std::isfinite(sm))
      throw std::runtime_error("degenerate cell in mesh");
    if (sm < 0.0) std::swap(cell[Dim - 1], cell[Dim]);
  }

  std::unordered_map<typename SimplicialMesh<Dim>::Face, int, detail::FaceKeyHash> face_ids;
  face_ids.reserve(m.cells.size() * (Dim + 1));
  m.cell_faces.resize(m.cells.size());
  for (int c = 0; c < m.n_cells(); ++c) {
    for (int i = 0; i <= Dim; ++i) {
      typename SimplicialMesh<Dim>::Face key;
      int k = 0;
      for (int j = 0; j <= Dim; ++j)
        if (j != i) key[k++] = m.cells[c][j];
      std::sort(key.begin(), key.end());
      auto [it, inserted] = face_ids.try_emplace(key, int(m.faces.size()));
      if (inserted) {
        m.faces.push_back(key);
        m.face_cells.push_back({c, -1});
      } else {
        auto& fc = m.face_cells[it->second];
        if (fc[1] != -1)
          throw std::runtime_error("non-manifold mesh: face shared by >2 cells");
        fc[1] = c;
      }
      m.cell_faces[c][i] = it->second;
    }
  }
  m.boundary_face_flags.resize(m.faces.size());
  for (int f = 0; f < m.n_faces(); ++f)
    m.boundary_face_flags[f] = (m.face_cells[f][1] == -1) ? 1 : 0;
  return m;
}

/// Max over cells of the element diameter (longest edge).
template <int Dim>
double mesh_diameter(const SimplicialMesh<Dim>& mesh) {
  if (mesh.cells.empty()) throw std::runtime_error("mesh_diameter of empty mesh");
  double h = 0.0;
  for (const auto& cell : mesh.cells)
    for (int i = 0; i <= Dim; ++i)
      for (int j = i + 1; j <= Dim; ++j)
        h = std::max(h, (mesh.vertices[cell[i]] - mesh.vertices[cell[j]]).norm());
  return h;
}

namespace detail {

inline SimplicialMesh<2> base_mesh_2d(Domain d) {
  using V = Vec<2>;
  std::vector<V> verts;
  std::vector<std::array<int, 3>> cells;
  auto quad = [&](int a, int b, int c, int dd) {
    // split along the a-c diagonal
    cells.push_back({a, b, c});
    cells.push_back({a, c, dd});
  };
  switch (d) {
    case Domain::square: {
      verts = {V(0, 0), V(1, 0), V(1, 1), V(0, 1)};
      quad(0, 1, 2, 3);
      break;
    }
    case Domain::lshape: {
      verts = {V(-1, -1), V(0, -1), V(-1, 0), V(0, 0),
               V(1, 0),  V(-1, 1), V(0, 1),  V(1, 1)};
      quad(0, 1, 3, 2);  // [-1,0]x[-1,0]
      quad(2, 3, 6, 5);  // [-1,0]x[0,1]
      quad(3, 4, 7, 6);  // [0,1]x[0,1]
      break;
    }
    case Domain::hexagon: {
      verts.push_back(V(0, 0));
      for (int k = 0; k < 6; ++k) {
        double a = k * M_PI / 3.0;
        verts.push_back(V(std::cos(a), std::sin(a)));
      }
      for (int k = 0; k < 6; ++k)
        cells.push_back({0, 1 + k, 1 + (k + 1) % 6});
      break;
    }
    default:
      throw std::logic_error("not a 2D domain");
  }
  auto m = make_mesh<2>(std::move(verts), std::move(cells));
  m.domain = d;
  m.level = 0;
  return m;
}

/// Kuhn/Freudenthal triangulation of an axis-aligned grid of cubes.
/// `inside` filters subcubes by their integer min-corner.
template <typename InsideFn>
SimplicialMesh<3> kuhn_grid(int n, double origin, double spacing,
                            InsideFn inside, Domain dom, int level) {
  std::vector<Vec<3>> verts;
  std::unordered_map<std::int64_t, int> vid;
  auto key = [n](int i, int j, int k) {
    return (std::int64_t(i) * (n + 2) + j) * (n + 2) + k;
  };
  auto vertex = [&](int i, int j, int k) {
    auto [it, inserted] = vid.try_emplace(key(i, j, k), int(verts.size()));
    if (inserted)
      verts.push_back(Vec<3>(origin + i * spacing, origin + j * spacing,
                             origin + k * spacing));
    return it->second;
  };
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> cells;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (!inside(i, j, k)) continue;
        int corner[3] = {i, j, k};
        for (const auto& p : perms) {
          // walk from the min corner to the max corner along axes p
          int a[3] = {corner[0], corner[1], corner[2]};
          std::array<int, 4> tet;
          tet[0] = vertex(a[0], a[1], a[2]);
          for (int s = 0; s < 3; ++s) {
            a[p[s]] += 1;
            tet[s + 1] = vertex(a[0], a[1], a[2]);
          }
          cells.push_back(tet);
        }
      }
  auto m = make_mesh<3>(std::move(verts), std::move(cells));
  m.domain = dom;
  m.level = level;
  return m;
}

inline SimplicialMesh<3> generate_3d(Domain d, int level) {
  const int r = 1 << level;  // subcubes per unit length
  if (d == Domain::cube) {
    return kuhn_grid(r, 0.0, 1.0 / r, [](int, int, int) { return true; }, d,
                     level);
  }
  // fichera: [-1,1]^3 minus the all-negative octant
  return kuhn_grid(2 * r, -1.0, 1.0 / r,
                   [r](int i, int j, int k) { return i >= r || j >= r || k >= r; },
                   d, level);
}

}  // namespace detail

template <int Dim>
SimplicialMesh<Dim> uniform_refine(const SimplicialMesh<Dim>& mesh,
                                   std::int64_t cell_cap = default_cell_cap());

/// Structured mesh of a catalog domain: the fixed base mesh uniformly
/// subdivided `level` times. Throws on a dimension mismatch with Dim or
/// when the cell count would exceed `cell_cap`.
template <int Dim>
SimplicialMesh<Dim> generate(Domain d, int level,
                             std::int64_t cell_cap = default_cell_cap()) {
  if (domain_dimension(d) != Dim)
    throw std::runtime_error(std::string("domain ") + domain_name(d) +
                             " is not " + std::to_string(Dim) + "D");
  if (level < 0) throw std::runtime_error("refinement level must be >= 0");
  if (level >= 62 / Dim ||
      base_cell_count(d) * (std::int64_t(1) << (Dim * level)) > cell_cap)
    throw std::runtime_error("cell count exceeds cap at level " +
                             std::to_string(level));
  if constexpr (Dim == 2) {
    auto m = detail::base_mesh_2d(d);
    for (int l = 0; l < level; ++l) m = uniform_refine(m, cell_cap);
    return m;
  } else {
    return detail::generate_3d(d, level);
  }
}

/// Uniform refinement. 2D: red refinement (each triangle into 4 similar
/// children via edge midpoints). 3D: catalog meshes are regenerated at
/// level+1, which coincides with Kuhn-compatible octasection; meshes
/// without catalog provenance are rejected.
template <int Dim>
SimplicialMesh<Dim> uniform_refine(const SimplicialMesh<Dim>& mesh,
                                   std::int64_t cell_cap) {
  if (std::int64_t(mesh.n_cells()) * (1 << Dim) > cell_cap)
    throw std::runtime_error("cell count exceeds cap after refinement");
  if constexpr (Dim == 3) {
    if (!mesh.domain)
      throw std::runtime_error(
          "3D uniform refinement is only supported for catalog meshes");
    return detail::generate_3d(*mesh.domain, mesh.level + 1);
  } else {
    std::vector<Vec<2>> verts = mesh.vertices;
    // one new vertex per edge
    std::vector<int> edge_mid(mesh.n_faces());
    for (int f = 0; f < mesh.n_faces(); ++f) {
      const auto& e = mesh.faces[f];
      edge_mid[f] = int(verts.size());
      verts.push_back(0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]));
    }
    std::vector<std::array<int, 3>> cells;
    cells.reserve(mesh.cells.size() * 4);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      // m[i] = midpoint of the face opposite vertex i
      int m0 = edge_mid[mesh.cell_faces[c][0]];
      int m1 = edge_mid[mesh.cell_faces[c][1]];
      int m2 = edge_mid[mesh.cell_faces[c][2]];
      cells.push_back({cell[0], m2, m1});
      cells.push_back({m2, cell[1], m0});
      cells.push_back({m1, m0, cell[2]});
      cells.push_back({m2, m0, m1});
    }
    auto m = make_mesh<2>(std::move(verts), std::move(cells));
    m.domain = mesh.domain;
    m.level = mesh.domain ? mesh.level + 1 : -1;
    return m;
  }
}

}  // namespace steklov
