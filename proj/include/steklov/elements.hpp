#pragma once

#include "steklov/coefficients.hpp"
#include "steklov/geometry.hpp"
#include "steklov/quadrature.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace steklov {

enum class ElementKind { cr, ecr, p1 };

inline const char* element_name(ElementKind k) {
  switch (k) {
    case ElementKind::cr: return "cr";
    case ElementKind::ecr: return "ecr";
    case ElementKind::p1: return "p1";
  }
  return "?";
}

inline std::optional<ElementKind> parse_element(const std::string& s) {
  if (s == "cr") return ElementKind::cr;
  if (s == "ecr") return ElementKind::ecr;
  if (s == "p1") return ElementKind::p1;
  return std::nullopt;
}

inline int n_local_dofs(ElementKind k, int dim) {
  return k == ElementKind::ecr ? dim + 2 : dim + 1;
}

/// Crouzeix-Raviart shape functions eta_i = 1 - Dim * lambda_i. DOF i is
/// the mean value over face i (opposite vertex i): the face-j mean of
/// eta_i is delta_ij.
template <int Dim>
struct CrShapes {
  static constexpr int n_loc = Dim + 1;

  static double value(int i, const std::array<double, Dim + 1>& bary) {
    return 1.0 - Dim * bary[i];
  }
  static Vec<Dim> gradient(int i, const ElementGeometry<Dim>& geom,
                           const std::array<double, Dim + 1>&) {
    return -double(Dim) * geom.barycentric_gradients[i];
  }
};

/// P1 hat functions, one DOF per vertex.
template <int Dim>
struct P1Shapes {
  static constexpr int n_loc = Dim + 1;

  static double value(int i, const std::array<double, Dim + 1>& bary) {
    return bary[i];
  }
  static Vec<Dim> gradient(int i, const ElementGeometry<Dim>& geom,
                           const std::array<double, Dim + 1>&) {
    return geom.barycentric_gradients[i];
  }
};

/// Enriched CR element: span P1 + {sum_i x_i^2}, DOFs = mean values on the
/// Dim+1 faces plus the cell mean. The basis dual to these DOFs is found
/// per element by solving the (Dim+2)x(Dim+2) duality system in the
/// centered monomial basis {1, x-c, |x-c|^2}.
template <int Dim>
struct EcrShapes {
  static constexpr int n_loc = Dim + 2;

  const ElementGeometry<Dim>* geom = nullptr;
  Vec<Dim> center;
  // coeff(j, k): coefficient of monomial j in basis function k
  Eigen::Matrix<double, Dim + 2, Dim + 2> coeff;

  explicit EcrShapes(const ElementGeometry<Dim>& g) : geom(&g), center(g.centroid()) {
    Eigen::Matrix<double, Dim + 2, Dim + 2> dof_matrix;
    const auto frule = simplex_rule<Dim - 1>(2);
    const auto crule = simplex_rule<Dim>(2);
    // rows 0..Dim: face means; row Dim+1: cell mean
    for (int i = 0; i <= Dim; ++i) {
      Eigen::Matrix<double, Dim + 2, 1> moments = Eigen::Matrix<double, Dim + 2, 1>::Zero();
      for (int q = 0; q < frule.size(); ++q) {
        const Vec<Dim> x = face_point(i, frule.points[q]);
        moments += frule.weights[q] * monomials(x);
      }
      dof_matrix.row(i) = moments.transpose();
    }
    Eigen::Matrix<double, Dim + 2, 1> moments = Eigen::Matrix<double, Dim + 2, 1>::Zero();
    for (int q = 0; q < crule.size(); ++q) {
      const Vec<Dim> x = g.point(crule.points[q]);
      moments += crule.weights[q] * monomials(x);
    }
    dof_matrix.row(Dim + 1) = moments.transpose();

    Eigen::FullPivLU<Eigen::Matrix<double, Dim + 2, Dim + 2>> lu(dof_matrix);
    if (!lu.isInvertible())
      throw std::runtime_error("singular ECR duality system (degenerate element?)");
    coeff = lu.inverse();
  }

  Eigen::Matrix<double, Dim + 2, 1> monomials(const Vec<Dim>& x) const {
    Eigen::Matrix<double, Dim + 2, 1> m;
    const Vec<Dim> y = x - center;
    m[0] = 1.0;
    for (int d = 0; d < Dim; ++d) m[d + 1] = y[d];
    m[Dim + 1] = y.squaredNorm();
    return m;
  }

  Vec<Dim> face_point(int local_face, const std::array<double, Dim>& fb) const {
    Vec<Dim> x = Vec<Dim>::Zero();
    int k = 0;
    for (int j = 0; j <= Dim; ++j)
      if (j != local_face) x += fb[k++] * geom->vertices[j];
    return x;
  }

  double value(int k, const std::array<double, Dim + 1>& bary) const {
    return monomials(geom->point(bary)).dot(coeff.col(k));
  }
  Vec<Dim> gradient(int k, const ElementGeometry<Dim>& g,
                    const std::array<double, Dim + 1>& bary) const {
    const Vec<Dim> y = g.point(bary) - center;
    Vec<Dim> grad = Vec<Dim>::Zero();
    for (int d = 0; d < Dim; ++d) grad[d] = coeff(d + 1, k);
    grad += 2.0 * coeff(Dim + 1, k) * y;
    return grad;
  }
};

/// Explicit Poincare constant for the CR interpolation error:
/// 0.1893 h (triangles), 0.3804 h (tetrahedra).
template <int Dim>
double interp_constant_poincare(const ElementGeometry<Dim>& geom) {
  static_assert(Dim == 2 || Dim == 3);
  return (Dim == 2 ? 0.1893 : 0.3804) * geom.diameter;
}

/// Explicit trace constant for the CR interpolation error on face e:
/// 0.6711 h/sqrt(H_e) (triangles), 1.0931 h/sqrt(H_e) (tetrahedra),
/// where H_e = Dim |kappa| / |e| is the height over that face.
template <int Dim>
double interp_constant_trace(const ElementGeometry<Dim>& geom, int local_face) {
  static_assert(Dim == 2 || Dim == 3);
  return (Dim == 2 ? 0.6711 : 1.0931) * geom.diameter /
         std::sqrt(geom.heights[local_face]);
}

/// Local stiffness int_k alpha grad phi_i . grad phi_j and mass
/// int_k beta phi_i phi_j, quadrature-evaluated.
struct LocalMatrices {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

namespace detail {

template <int Dim>
void check_coefficient(double value, const CoefficientField<Dim>& field,
                       const Vec<Dim>& x) {
  const double slack = 1e-12 * std::max(1.0, std::abs(field.lower_bound));
  if (value < field.lower_bound - slack) {
    std::ostringstream msg;
    msg << "coefficient " << field.descriptor << " = " << value
        << " below declared lower bound " << field.lower_bound << " at point (";
    for (int d = 0; d < Dim; ++d) msg << (d ? "," : "") << x[d];
    msg << ")";
    throw std::runtime_error(msg.str());
  }
}

}  // namespace detail

template <int Dim, typename Shapes>
LocalMatrices local_matrices(const Shapes& shapes, const ElementGeometry<Dim>& geom,
                             const CoefficientField<Dim>& alpha,
                             const CoefficientField<Dim>& beta,
                             const QuadratureRule<Dim>& rule) {
  constexpr int n = Shapes::n_loc;
  LocalMatrices out;
  out.stiffness = Eigen::MatrixXd::Zero(n, n);
  out.mass = Eigen::MatrixXd::Zero(n, n);
  std::array<Vec<Dim>, n> grads;
  std::array<double, n> vals;
  for (int q = 0; q < rule.size(); ++q) {
    const auto& bary = rule.points[q];
    const Vec<Dim> x = geom.point(bary);
    const double a = alpha(x);
    const double b = beta(x);
    detail::check_coefficient<Dim>(a, alpha, x);
    detail::check_coefficient<Dim>(b, beta, x);
    for (int i = 0; i < n; ++i) {
      vals[i] = shapes.value(i, bary);
      grads[i] = shapes.gradient(i, geom, bary);
    }
    const double wa = rule.weights[q] * geom.measure * a;
    const double wb = rule.weights[q] * geom.measure * b;
    // products grouped (i,j)-symmetrically so the matrices come out
    // symmetric to the last bit
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.stiffness(i, j) += wa * grads[i].dot(grads[j]);
        out.mass(i, j) += wb * (vals[i] * vals[j]);
      }
  }
  return out;
}

/// int_e phi_i phi_j over one boundary face; note every local basis
/// function can have a nonzero trace on e, not only the one owning e.
template <int Dim, typename Shapes>
Eigen::MatrixXd local_boundary_mass(const Shapes& shapes,
                                    const ElementGeometry<Dim>& geom,
                                    int local_face,
                                    const QuadratureRule<Dim - 1>& rule) {
  constexpr int n = Shapes::n_loc;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  std::array<double, n> vals;
  for (int q = 0; q < rule.size(); ++q) {
    // face barycentrics -> cell barycentrics (zero at the opposite vertex)
    std::array<double, Dim + 1> bary{};
    int k = 0;
    for (int j = 0; j <= Dim; ++j)
      bary[j] = (j == local_face) ? 0.0 : rule.points[q][k++];
    for (int i = 0; i < n; ++i) vals[i] = shapes.value(i, bary);
    const double w = rule.weights[q] * geom.face_measures[local_face];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) += w * (vals[i] * vals[j]);
  }
  return out;
}

}  // namespace steklov
