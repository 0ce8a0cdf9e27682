#pragma once

#include "steklov/coefficients.hpp"
#include "steklov/dofmap.hpp"
#include "steklov/elements.hpp"
#include "steklov/interpolation.hpp"
#include "steklov/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace steklov {

/// Result of correcting one eigenvalue. per_cell holds each element's
/// (delta/alpha0)-scaled contribution, so M is exactly their ordered sum.
struct CorrectionReport {
  double lambda_h = 0.0;
  double M = 0.0;
  double lambda_c = 0.0;
  double lambda_avg = 0.0;
  double delta = 0.0;
  double alpha0 = 0.0;
  std::vector<double> per_cell;
};

/// lambda_c = lambda_h / (1 + M/lambda_h).
inline double correct(double lambda_h, double M) {
  if (!(lambda_h > 0.0)) throw std::invalid_argument("lambda_h must be positive");
  if (M < 0.0) throw std::invalid_argument("M must be nonnegative");
  return lambda_h / (1.0 + M / lambda_h);
}

inline double average_estimate(double lambda_h, double lambda_c) {
  return 0.5 * (lambda_h + lambda_c);
}

/// Residual of the exact identity
///   (lambda_ref - lambda_c) - (lambda_ref - lambda_h) - lambda_h M / (lambda_h + M),
/// which vanishes algebraically for any lambda_ref.
inline double theorem32_residual(double lambda_ref, double lambda_h,
                                 double lambda_c, double M) {
  return std::abs((lambda_ref - lambda_c) - (lambda_ref - lambda_h) -
                  lambda_h * M / (lambda_h + M));
}

struct CorrectionOptions {
  I0Mode i0 = I0Mode::cell_mean;
  int quad_degree = 4;
};

namespace detail {

inline void check_correction_args(double delta, double alpha0) {
  if (!(delta > 1.0))
    throw std::invalid_argument("correction safety factor delta must exceed 1");
  if (!(alpha0 > 0.0))
    throw std::invalid_argument("alpha0 must be positive");
}

}  // namespace detail

/// Correction mass for a CR eigenvector u_h:
///   M = (delta/alpha0) sum_k ( ||(alpha - I0 alpha) grad u_h||_{0,k}
///                              + C_k ||beta u_h||_{0,k} )^2
/// with C_k the explicit Poincare constant of the element. grad u_h is
/// constant per cell, so the first factor splits into
/// |grad u_h| * ||alpha - I0 alpha||_{0,k}.
template <int Dim>
std::pair<double, std::vector<double>> compute_M_cr(
    const SimplicialMesh<Dim>& mesh, const DofMap& dm, const Eigen::VectorXd& u,
    const CoefficientField<Dim>& alpha, const CoefficientField<Dim>& beta,
    double delta, double alpha0, const CorrectionOptions& opts = {}) {
  detail::check_correction_args(delta, alpha0);
  if (dm.kind != ElementKind::cr || u.size() != dm.n_dofs)
    throw std::invalid_argument("compute_M_cr expects a CR coefficient vector");

  const auto rule = cell_rule<Dim>(opts.quad_degree);
  const double scale = delta / alpha0;
  std::vector<double> per_cell(mesh.n_cells());
  double M = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geom = mesh.cell_geometry(c);
    Vec<Dim> grad = Vec<Dim>::Zero();
    for (int i = 0; i <= Dim; ++i)
      grad += u[dm.dof(c, i)] *
              CrShapes<Dim>::gradient(i, geom, rule.points[0]);

    double alpha_mean;
    if (opts.i0 == I0Mode::barycenter) {
      alpha_mean = alpha(geom.centroid());
    } else {
      alpha_mean = 0.0;
      for (int q = 0; q < rule.size(); ++q)
        alpha_mean += rule.weights[q] * alpha(geom.point(rule.points[q]));
    }

    double alpha_dev2 = 0.0;  // ||alpha - I0 alpha||^2_{0,k}
    double beta_u2 = 0.0;     // ||beta u_h||^2_{0,k}
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec<Dim> x = geom.point(bary);
      const double da = alpha(x) - alpha_mean;
      double uh = 0.0;
      for (int i = 0; i <= Dim; ++i)
        uh += u[dm.dof(c, i)] * CrShapes<Dim>::value(i, bary);
      const double bu = beta(x) * uh;
      alpha_dev2 += rule.weights[q] * da * da;
      beta_u2 += rule.weights[q] * bu * bu;
    }
    alpha_dev2 = std::max(0.0, alpha_dev2) * geom.measure;
    beta_u2 = std::max(0.0, beta_u2) * geom.measure;

    const double term = grad.norm() * std::sqrt(alpha_dev2) +
                        interp_constant_poincare(geom) * std::sqrt(beta_u2);
    per_cell[c] = scale * term * term;
    M += per_cell[c];
  }
  return {M, std::move(per_cell)};
}

/// ECR variant: M = (delta/alpha0) sum_k ||(alpha - I0 alpha) grad u_h||^2,
/// with grad u_h affine per cell and no beta term.
template <int Dim>
std::pair<double, std::vector<double>> compute_M_ecr(
    const SimplicialMesh<Dim>& mesh, const DofMap& dm, const Eigen::VectorXd& u,
    const CoefficientField<Dim>& alpha, double delta, double alpha0,
    const CorrectionOptions& opts = {}) {
  detail::check_correction_args(delta, alpha0);
  if (dm.kind != ElementKind::ecr || u.size() != dm.n_dofs)
    throw std::invalid_argument("compute_M_ecr expects an ECR coefficient vector");

  const auto rule = cell_rule<Dim>(opts.quad_degree);
  const double scale = delta / alpha0;
  std::vector<double> per_cell(mesh.n_cells());
  double M = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geom = mesh.cell_geometry(c);
    const EcrShapes<Dim> shapes(geom);

    double alpha_mean;
    if (opts.i0 == I0Mode::barycenter) {
      alpha_mean = alpha(geom.centroid());
    } else {
      alpha_mean = 0.0;
      for (int q = 0; q < rule.size(); ++q)
        alpha_mean += rule.weights[q] * alpha(geom.point(rule.points[q]));
    }

    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec<Dim> x = geom.point(bary);
      const double da = alpha(x) - alpha_mean;
      Vec<Dim> grad = Vec<Dim>::Zero();
      for (int i = 0; i < Dim + 2; ++i)
        grad += u[dm.dof(c, i)] * shapes.gradient(i, geom, bary);
      acc += rule.weights[q] * da * da * grad.squaredNorm();
    }
    per_cell[c] = scale * std::max(0.0, acc) * geom.measure;
    M += per_cell[c];
  }
  return {M, std::move(per_cell)};
}

/// Correct one eigenpair and assemble the full report. P1 vectors get a
/// zero correction mass (no correction applies to conforming elements).
template <int Dim>
CorrectionReport make_correction_report(double lambda_h,
                                        const SimplicialMesh<Dim>& mesh,
                                        const DofMap& dm, const Eigen::VectorXd& u,
                                        const CoefficientField<Dim>& alpha,
                                        const CoefficientField<Dim>& beta,
                                        double delta, double alpha0,
                                        const CorrectionOptions& opts = {}) {
  CorrectionReport rep;
  rep.lambda_h = lambda_h;
  rep.delta = delta;
  rep.alpha0 = alpha0;
  switch (dm.kind) {
    case ElementKind::cr: {
      auto [M, cells] = compute_M_cr(mesh, dm, u, alpha, beta, delta, alpha0, opts);
      rep.M = M;
      rep.per_cell = std::move(cells);
      break;
    }
    case ElementKind::ecr: {
      auto [M, cells] = compute_M_ecr(mesh, dm, u, alpha, delta, alpha0, opts);
      rep.M = M;
      rep.per_cell = std::move(cells);
      break;
    }
    case ElementKind::p1:
      detail::check_correction_args(delta, alpha0);
      rep.per_cell.assign(mesh.n_cells(), 0.0);
      break;
  }
  rep.lambda_c = correct(lambda_h, rep.M);
  rep.lambda_avg = average_estimate(lambda_h, rep.lambda_c);
  return rep;
}

}  // namespace steklov
