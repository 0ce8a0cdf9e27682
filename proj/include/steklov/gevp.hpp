#pragma once

#include "steklov/assembly.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace steklov {

/// Eigenpairs of A u = lambda B u, ascending in lambda, vectors
/// B-normalized with the largest-magnitude entry positive. cluster_labels
/// groups numerically multiple eigenvalues (relative gap below 1e-8).
struct EigenSolution {
  std::vector<double> lambdas;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;
  std::vector<int> cluster_labels;
};

struct SolveOptions {
  double tol = 1e-10;
  std::optional<std::uint64_t> seed;  // default: descriptor seed
  int direct_dof_threshold = 400000;  // above this, CG replaces Cholesky
  double cg_tol = 1e-12;
  int max_rounds = 12;
};

inline std::vector<int> cluster_labels_from(const std::vector<double>& lambdas) {
  std::vector<int> labels(lambdas.size());
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    const double gap = lambdas[i] - lambdas[i - 1];
    const double scale = std::max(std::abs(lambdas[i]), std::abs(lambdas[i - 1]));
    labels[i] = labels[i - 1] + (gap <= 1e-8 * scale ? 0 : 1);
  }
  return labels;
}

template <int Dim>
double residual(const PencilSystem<Dim>& sys, double lambda,
                const Eigen::VectorXd& u) {
  if (u.size() != sys.A.rows() || u.norm() == 0.0)
    throw std::invalid_argument("residual of zero or mis-sized vector");
  const Eigen::VectorXd au = sys.A * u;
  return (au - lambda * (sys.B * u)).norm() / au.norm();
}

namespace detail {

/// A x = b, by sparse Cholesky up to a size threshold and by
/// preconditioned CG above it.
class InnerSolver {
 public:
  InnerSolver(const Eigen::SparseMatrix<double>& A, int direct_threshold,
              double cg_tol) {
    if (A.rows() <= direct_threshold) {
      llt_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
      llt_->compute(A);
      if (llt_->info() != Eigen::Success)
        throw std::runtime_error(
            "Cholesky factorization of A failed; A is not SPD "
            "(invalid coefficients?)");
    } else {
      cg_ = std::make_unique<Cg>();
      cg_->setTolerance(cg_tol);
      cg_->setMaxIterations(20000);
      cg_->compute(A);
      if (cg_->info() != Eigen::Success)
        throw std::runtime_error("CG setup for A failed");
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (llt_) return llt_->solve(b);
    Eigen::VectorXd x = cg_->solve(b);
    if (cg_->info() != Eigen::Success)
      throw std::runtime_error("inner CG solve did not converge");
    return x;
  }

 private:
  using Cg = Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                      Eigen::Lower | Eigen::Upper,
                                      Eigen::IncompleteCholesky<double>>;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
  std::unique_ptr<Cg> cg_;
};

inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  int idx = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      idx = i;
    }
  if (v[idx] < 0.0) v = -v;
}

template <int Dim>
EigenSolution finalize_solution(const PencilSystem<Dim>& sys,
                                std::vector<std::pair<double, Eigen::VectorXd>> pairs,
                                int k) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  EigenSolution sol;
  sol.vectors.resize(sys.A.rows(), k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = pairs[i].second;
    const double bnorm2 = v.dot(sys.B * v);
    if (!(bnorm2 > 0.0))
      throw std::runtime_error("eigenvector with vanishing boundary norm");
    v /= std::sqrt(bnorm2);
    fix_sign(v);
    sol.lambdas.push_back(pairs[i].first);
    sol.vectors.col(i) = v;
    sol.residuals.push_back(residual(sys, pairs[i].first, v));
  }
  sol.cluster_labels = cluster_labels_from(sol.lambdas);
  return sol;
}

}  // namespace detail

/// k smallest finite eigenvalues of A u = lambda B u (A SPD, B PSD).
///
/// Works on the flipped pencil B x = mu A x: the sought lambda become the
/// largest mu = 1/lambda, computed by Lanczos iteration on x -> A^{-1} B x,
/// which is self-adjoint in the A-inner product. Full reorthogonalization,
/// deterministic seeded start vectors, and restarts with locking of
/// converged Ritz vectors (restarting is what resolves multiple
/// eigenvalues). Infinite eigenvalues (mu = 0) never pass the Ritz value
/// cutoff and are excluded automatically.
template <int Dim>
EigenSolution solve_smallest(const PencilSystem<Dim>& sys, int k,
                             double tol = 1e-10, SolveOptions opts = {}) {
  const int n = int(sys.A.rows());
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(tol > 0.0) || tol > 1e-6)
    throw std::invalid_argument("tol must lie in (0, 1e-6]");
  opts.tol = tol;

  detail::InnerSolver inner(sys.A, opts.direct_dof_threshold, opts.cg_tol);
  std::mt19937_64 rng(opts.seed.value_or(sys.descriptor.seed));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Eigen::MatrixXd locked(n, 0);       // A-orthonormal converged Ritz vectors
  std::vector<double> locked_mu;

  auto a_dot = [&sys](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(sys.A * y);
  };

  int m = std::min(n, std::max(4 * k, k + 20));
  int stale_rounds = 0;

  for (int round = 0; round < opts.max_rounds; ++round) {
    // fresh start vector, deflated against everything locked
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = unif(rng);
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols() > 0) {
        Eigen::VectorXd av = sys.A * v;
        v -= locked * (locked.transpose() * av);
      }
    }
    double vnorm = std::sqrt(a_dot(v, v));
    if (!(vnorm > 0.0)) break;
    v /= vnorm;

    Eigen::MatrixXd V(n, m + 1);
    V.col(0) = v;
    std::vector<double> alpha, beta;
    int steps = 0;
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd bv = sys.B * V.col(j);
      Eigen::VectorXd w = inner.solve(bv);
      alpha.push_back(bv.dot(V.col(j)));  // <A^{-1}Bv, v>_A = v^T B v
      // two passes of full A-reorthogonalization against locked + basis
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd aw = sys.A * w;
        if (locked.cols() > 0) w -= locked * (locked.transpose() * aw);
        w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * aw);
      }
      const double bnorm = std::sqrt(std::max(0.0, a_dot(w, w)));
      steps = j + 1;
      if (bnorm < 1e-14 * std::max(1.0, std::abs(alpha[0])))
        break;  // invariant subspace exhausted
      beta.push_back(bnorm);
      V.col(j + 1) = w / bnorm;
    }

    // Rayleigh-Ritz on the tridiagonal
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd theta = es.eigenvalues();  // ascending
    const double theta_max =
        std::max(theta[steps - 1],
                 locked_mu.empty() ? 0.0
                                   : *std::max_element(locked_mu.begin(),
                                                       locked_mu.end()));
    const double cut = std::max(theta_max, 0.0) * 1e-12;

    bool locked_any = false;
    bool top_changed = false;
    for (int i = steps - 1; i >= 0; --i) {
      const double mu = theta[i];
      if (!(mu > cut)) break;  // remaining Ritz values approximate mu = 0
      Eigen::VectorXd x = V.leftCols(steps) * es.eigenvectors().col(i);
      const double lambda = 1.0 / mu;
      if (residual(sys, lambda, x) > tol) continue;
      // clean deflation, then lock
      if (locked.cols() > 0) {
        Eigen::VectorXd ax = sys.A * x;
        x -= locked * (locked.transpose() * ax);
      }
      const double xnorm = std::sqrt(a_dot(x, x));
      if (!(xnorm > 1e-8)) continue;  // duplicate of an already locked vector
      x /= xnorm;
      locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
      locked.col(locked.cols() - 1) = x;
      locked_mu.push_back(mu);
      locked_any = true;
      // did this vector enter the current top-k?
      int larger = 0;
      for (double other : locked_mu)
        if (other > mu) ++larger;
      if (larger < k) top_changed = true;
    }

    if (int(locked_mu.size()) >= k && !top_changed) break;
    if (!locked_any) {
      ++stale_rounds;
      m = std::min(n, m * 2);
      if (stale_rounds >= 3 && int(locked_mu.size()) >= k) break;
      if (stale_rounds >= 3 && m >= n) break;
    } else {
      stale_rounds = 0;
    }
  }

  if (int(locked_mu.size()) < k)
    throw std::runtime_error(
        "requested " + std::to_string(k) +
        " eigenvalues but only " + std::to_string(locked_mu.size()) +
        " finite eigenpairs converged (k may exceed rank(B))");

  std::vector<std::pair<double, Eigen::VectorXd>> pairs;
  for (std::size_t i = 0; i < locked_mu.size(); ++i)
    pairs.emplace_back(1.0 / locked_mu[i], locked.col(int(i)));
  return detail::finalize_solution(sys, std::move(pairs), k);
}

/// Dense reference path: reduce with the Cholesky factor of A (inside
/// Eigen's generalized solver on the flipped pencil), filter infinite
/// eigenvalues, return the k smallest finite ones. Independent of the
/// Lanczos code path; capped at 2000 DOFs.
template <int Dim>
EigenSolution dense_oracle(const PencilSystem<Dim>& sys, int k) {
  const int n = int(sys.A.rows());
  if (n > 2000) throw std::runtime_error("dense_oracle capped at 2000 DOFs");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const Eigen::MatrixXd Ad(sys.A);
  const Eigen::MatrixXd Bd(sys.B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Bd, Ad, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense generalized eigensolver failed");
  const Eigen::VectorXd mu = es.eigenvalues();  // ascending
  const double cut = std::max(mu[n - 1], 0.0) * 1e-12;

  std::vector<std::pair<double, Eigen::VectorXd>> pairs;
  for (int i = n - 1; i >= 0 && int(pairs.size()) < k; --i) {
    if (!(mu[i] > cut)) break;
    pairs.emplace_back(1.0 / mu[i], es.eigenvectors().col(i));
  }
  if (int(pairs.size()) < k)
    throw std::runtime_error("fewer than k finite eigenvalues in the pencil");
  return detail::finalize_solution(sys, std::move(pairs), k);
}

}  // namespace steklov
