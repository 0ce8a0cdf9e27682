#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace steklov {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

/// Signed measure of a d-simplex: det of edge vectors divided by d!.
/// Positive for positively oriented vertex orderings.
template <int Dim>
double simplex_signed_measure(const std::array<Vec<Dim>, Dim + 1>& v) {
  Eigen::Matrix<double, Dim, Dim> edges;
  for (int j = 0; j < Dim; ++j) edges.col(j) = v[j + 1] - v[0];
  double fact = 1.0;
  for (int j = 2; j <= Dim; ++j) fact *= j;
  return edges.determinant() / fact;
}

/// Measure of a (d-1)-simplex embedded in R^d (edge length / triangle area).
template <int Dim>
double facet_measure(const std::array<Vec<Dim>, Dim>& v) {
  if constexpr (Dim == 2) {
    return (v[1] - v[0]).norm();
  } else {
    return 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm();
  }
}

/// Per-element geometric quantities used by local assembly and by the
/// correction constants. Face i is opposite local vertex i throughout.
template <int Dim>
struct ElementGeometry {
  static constexpr int n_vertices = Dim + 1;

  std::array<Vec<Dim>, Dim + 1> vertices;
  double measure = 0.0;   // |kappa|
  double diameter = 0.0;  // h_kappa = longest edge
  std::array<double, Dim + 1> face_measures{};           // |e_i|
  std::array<double, Dim + 1> heights{};                 // H_i = Dim |kappa| / |e_i|
  std::array<Vec<Dim>, Dim + 1> barycentric_gradients{}; // grad lambda_i

  Vec<Dim> centroid() const {
    Vec<Dim> c = Vec<Dim>::Zero();
    for (const auto& p : vertices) c += p;
    return c / double(Dim + 1);
  }

  /// Map barycentric coordinates (lambda_0..lambda_Dim) to a physical point.
  Vec<Dim> point(const std::array<double, Dim + 1>& bary) const {
    Vec<Dim> x = Vec<Dim>::Zero();
    for (int i = 0; i <= Dim; ++i) x += bary[i] * vertices[i];
    return x;
  }

  /// Inradius, for shape-regularity diagnostics: r = Dim |kappa| / sum |e_i|.
  double inradius() const {
    double s = 0.0;
    for (double fm : face_measures) s += fm;
    return Dim * measure / s;
  }
};

/// Fill all geometric quantities for the simplex with the given vertices.
/// Throws if the simplex is degenerate or inverted (signed measure <= 0).
template <int Dim>
ElementGeometry<Dim> compute_geometry(const std::array<Vec<Dim>, Dim + 1>& verts) {
  ElementGeometry<Dim> g;
  g.vertices = verts;
  double signed_measure = simplex_signed_measure<Dim>(verts);
  if (!(signed_measure > 0.0))
    throw std::runtime_error("degenerate or inverted simplex (measure <= 0)");
  g.measure = signed_measure;

  for (int i = 0; i <= Dim; ++i)
    for (int j = i + 1; j <= Dim; ++j)
      g.diameter = std::max(g.diameter, (verts[i] - verts[j]).norm());

  for (int i = 0; i <= Dim; ++i) {
    std::array<Vec<Dim>, Dim> face;
    int k = 0;
    for (int j = 0; j <= Dim; ++j)
      if (j != i) face[k++] = verts[j];
    g.face_measures[i] = facet_measure<Dim>(face);
    g.heights[i] = Dim * g.measure / g.face_measures[i];
  }

  // grad lambda_i for i >= 1 are the rows of the inverse edge matrix;
  // lambda_0 closes the partition of unity.
  Eigen::Matrix<double, Dim, Dim> edges;
  for (int j = 0; j < Dim; ++j) edges.col(j) = verts[j + 1] - verts[0];
  Eigen::Matrix<double, Dim, Dim> inv = edges.inverse();
  Vec<Dim> g0 = Vec<Dim>::Zero();
  for (int i = 1; i <= Dim; ++i) {
    g.barycentric_gradients[i] = inv.row(i - 1).transpose();
    g0 -= g.barycentric_gradients[i];
  }
  g.barycentric_gradients[0] = g0;
  return g;
}

}  // namespace steklov
