#pragma once

#include "steklov/mesh.hpp"
#include "steklov/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace steklov {

/// Mean of f over one mesh face, by face quadrature.
template <int Dim, typename Fn>
double face_mean(const SimplicialMesh<Dim>& mesh, int face, Fn&& f,
                 const QuadratureRule<Dim - 1>& rule) {
  std::array<Vec<Dim>, Dim> p;
  for (int i = 0; i < Dim; ++i) p[i] = mesh.vertices[mesh.faces[face][i]];
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    Vec<Dim> x = Vec<Dim>::Zero();
    for (int i = 0; i < Dim; ++i) x += rule.points[q][i] * p[i];
    s += rule.weights[q] * f(x);
  }
  return s;
}

/// CR interpolation of a smooth function: one DOF per face, the face mean.
template <int Dim, typename Fn>
Eigen::VectorXd cr_interpolate(Fn&& u, const SimplicialMesh<Dim>& mesh,
                               int quad_degree = 4) {
  const auto rule = face_rule<Dim>(quad_degree);
  Eigen::VectorXd dofs(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) dofs[f] = face_mean(mesh, f, u, rule);
  return dofs;
}

enum class I0Mode { cell_mean, barycenter };

/// Piecewise constant interpolation I_0: per-cell mean value of f
/// (L2 projection onto constants) or, behind the flag, the barycenter value.
template <int Dim, typename Fn>
std::vector<double> piecewise_const_project(Fn&& f, const SimplicialMesh<Dim>& mesh,
                                            I0Mode mode = I0Mode::cell_mean,
                                            int quad_degree = 4) {
  std::vector<double> out(mesh.n_cells());
  const auto rule = cell_rule<Dim>(quad_degree);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geom = mesh.cell_geometry(c);
    if (mode == I0Mode::barycenter) {
      out[c] = f(geom.centroid());
    } else {
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * f(geom.point(rule.points[q]));
      out[c] = s;
    }
  }
  return out;
}

}  // namespace steklov
