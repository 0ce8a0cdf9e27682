#include <steklov/correction.hpp>
#include <steklov/gevp.hpp>

#include "poly_oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace steklov;
using Catch::Approx;

namespace {

template <int Dim>
CoefficientField<Dim> const_field(double c) {
  CoefficientField<Dim> f;
  f.evaluator = [c](const Vec<Dim>&) { return c; };
  f.lower_bound = c;
  f.descriptor = "const";
  return f;
}

SimplicialMesh<2> unit_triangle() {
  return make_mesh<2>({Vec<2>(0, 0), Vec<2>(1, 0), Vec<2>(0, 1)}, {{0, 1, 2}});
}

}  // namespace

TEST_CASE("correction mass for CR on one triangle") {
  const auto tri = unit_triangle();
  const auto dm = build_dofmap(tri, ElementKind::cr);
  const auto alpha = const_field<2>(1.0);
  const auto beta = const_field<2>(1.0);

  SECTION("constant u_h = 1: M = delta * (0.1893 h)^2 |k| with h = sqrt(2)") {
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
    const auto [M, cells] = compute_M_cr(tri, dm, u, alpha, beta, 1.01, 1.0);
    CHECK(M == Approx(0.0361928349).epsilon(1e-10));
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == M);
  }
  SECTION("constant alpha kills the gradient term") {
    // u_h = first CR basis function: ||beta u||^2 = |k|/3
    Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
    u[0] = 1.0;
    const auto [M, cells] = compute_M_cr(tri, dm, u, alpha, beta, 1.01, 1.0);
    const double c = interp_constant_poincare(tri.cell_geometry(0));
    CHECK(M == Approx(1.01 * c * c * (0.5 / 3.0)).epsilon(1e-12));
    // a different constant alpha leaves M unchanged
    const auto [M3, cells3] =
        compute_M_cr(tri, dm, u, const_field<2>(3.0), beta, 1.01, 1.0);
    CHECK(M3 == Approx(M).epsilon(1e-12));
  }
  SECTION("u_h = 0 gives M = 0") {
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
    const auto [M, cells] = compute_M_cr(tri, dm, u, alpha, beta, 1.01, 1.0);
    CHECK(M == 0.0);
  }
  SECTION("delta <= 1 and alpha0 <= 0 are rejected") {
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(compute_M_cr(tri, dm, u, alpha, beta, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(compute_M_cr(tri, dm, u, alpha, beta, 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(compute_M_cr(tri, dm, u, alpha, beta, 1.01, 0.0),
                    std::invalid_argument);
  }
  SECTION("M is linear in delta") {
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
    const auto [m1, c1] = compute_M_cr(tri, dm, u, alpha, beta, 1.01, 1.0);
    const auto [m2, c2] = compute_M_cr(tri, dm, u, alpha, beta, 1.5, 1.0);
    CHECK(m2 / m1 == Approx(1.5 / 1.01).epsilon(1e-13));
  }
}

TEST_CASE("correction mass for ECR") {
  const auto tri = unit_triangle();
  const auto dm = build_dofmap(tri, ElementKind::ecr);

  SECTION("constant alpha: M vanishes and the correction is the identity") {
    Eigen::VectorXd u = Eigen::VectorXd::Random(4);
    const auto [M, cells] =
        compute_M_ecr(tri, dm, u, const_field<2>(2.0), 1.01, 2.0);
    CHECK(M < 1e-28);
    const double lambda = 0.7341;
    CHECK(correct(lambda, M) == lambda);  // bitwise: 1 + M/lambda == 1
  }
  SECTION("u = 0 gives M = 0") {
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
    const auto [M, cells] =
        compute_M_ecr(tri, dm, u, const_field<2>(1.0), 1.01, 1.0);
    CHECK(M == 0.0);
  }
  SECTION("affine alpha, pure bubble: cross-check against the exact oracle") {
    CoefficientField<2> alpha;
    alpha.evaluator = [](const Vec<2>& x) { return 1.0 + x[0]; };
    alpha.lower_bound = 1.0;
    alpha.descriptor = "affine:1,1,0";
    Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
    u[3] = 1.0;  // the cell-mean DOF selects the bubble basis function
    const double delta = 1.25, alpha0 = 1.0;
    const auto [M, cells] = compute_M_ecr(tri, dm, u, alpha, delta, alpha0);

    // oracle: (delta/alpha0) int (alpha - mean)^2 |grad b|^2 with the
    // bubble basis polynomial reconstructed from the duality coefficients
    using P = oracle::Poly<2>;
    const auto geom = tri.cell_geometry(0);
    const EcrShapes<2> ecr(geom);
    const Vec<2> c = geom.centroid();
    P xc = P::var(0) - P::constant(c[0]);
    P yc = P::var(1) - P::constant(c[1]);
    P bubble = P::constant(ecr.coeff(0, 3)) + xc.scaled(ecr.coeff(1, 3)) +
               yc.scaled(ecr.coeff(2, 3)) + (xc * xc + yc * yc).scaled(ecr.coeff(3, 3));
    const std::array<Vec<2>, 3> v = geom.vertices;
    P ap = P::constant(1.0) + P::var(0);
    const double mean = oracle::integrate_cell<2>(ap, v) / geom.measure;
    P dev = ap - P::constant(mean);
    auto g = bubble.gradient();
    P integrand = dev * dev * (g[0] * g[0] + g[1] * g[1]);
    const double exact = delta / alpha0 * oracle::integrate_cell<2>(integrand, v);
    CHECK(M == Approx(exact).epsilon(1e-10));
  }
  SECTION("wrong element kind is rejected") {
    const auto dm_cr = build_dofmap(tri, ElementKind::cr);
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(compute_M_ecr(tri, dm_cr, u, const_field<2>(1.0), 1.01, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("correct() implements lambda/(1 + M/lambda)") {
  CHECK(correct(0.37, 0.0) == 0.37);
  CHECK(correct(1.0, 1.0) == Approx(0.5));
  // Table-style pair: M back-solved from printed digits
  CHECK(correct(0.24008065, 4.080e-6) == Approx(0.24007657).margin(5e-9));
  CHECK_THROWS_AS(correct(-1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(correct(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(correct(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("average estimate") {
  CHECK(average_estimate(0.24008065, 0.24007657) == Approx(0.24007861).margin(1e-9));
  CHECK(average_estimate(0.5, 0.5) == 0.5);
  const double lh = 1.7, m = 0.01;
  const double lc = correct(lh, m);
  const double avg = average_estimate(lh, lc);
  CHECK(lc < avg);
  CHECK(avg < lh);
}

TEST_CASE("the exactness identity holds to round-off") {
  CHECK(theorem32_residual(0.0, 1.0, 0.5, 1.0) == 0.0);
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double lh = std::pow(10.0, 4.0 * unif(rng) - 2.0);
    const double m = std::pow(10.0, 6.0 * unif(rng) - 8.0) * lh;
    const double lref = 4.0 * lh * unif(rng);
    const double lc = correct(lh, m);
    worst = std::max(worst, theorem32_residual(lref, lh, lc, m) / lh);
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("full report on a solved problem") {
  const auto mesh = generate<2>(Domain::square, 3);
  const auto dm = build_dofmap(mesh, ElementKind::cr);
  const auto alpha = const_field<2>(1.0);
  const auto beta = const_field<2>(1.0);
  const auto sys = assemble(mesh, dm, alpha, beta);
  const auto sol = solve_smallest(sys, 4, 1e-10);

  const auto rep =
      make_correction_report(sol.lambdas[0], mesh, dm, sol.vectors.col(0),
                             alpha, beta, 1.01, 1.0);
  CHECK(rep.M > 0.0);
  CHECK(rep.lambda_c == correct(rep.lambda_h, rep.M));
  CHECK(rep.lambda_c < rep.lambda_h);
  CHECK(rep.lambda_c < rep.lambda_avg);
  CHECK(rep.lambda_avg <= rep.lambda_h);

  // per-cell contributions accumulate to M in cell order
  double sum = 0.0;
  for (double c : rep.per_cell) {
    CHECK(c >= 0.0);
    sum += c;
  }
  CHECK(sum == rep.M);

  // delta-monotonicity: a larger delta gives a strictly smaller lambda_c
  const auto rep15 =
      make_correction_report(sol.lambdas[0], mesh, dm, sol.vectors.col(0),
                             alpha, beta, 1.5, 1.0);
  CHECK(rep15.lambda_c < rep.lambda_c);

  // Steklov modes concentrate at the boundary: for a higher mode the mean
  // per-cell contribution of boundary-adjacent cells dominates
  const auto rep4 =
      make_correction_report(sol.lambdas[3], mesh, dm, sol.vectors.col(3),
                             alpha, beta, 1.01, 1.0);
  double interior = 0.0, boundary = 0.0;
  int n_interior = 0, n_boundary = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    bool on_boundary = false;
    for (int i = 0; i <= 2; ++i)
      on_boundary |= bool(mesh.boundary_face_flags[mesh.cell_faces[c][i]]);
    (on_boundary ? boundary : interior) += rep4.per_cell[c];
    (on_boundary ? n_boundary : n_interior) += 1;
  }
  CHECK(boundary / n_boundary > interior / n_interior);
}
