#pragma once

#include "steklov/assembly.hpp"
#include "steklov/correction.hpp"
#include "steklov/gevp.hpp"
#include "steklov/mesh.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace steklov {

/// Richardson extrapolation of an order-2 sequence from two consecutive
/// levels: (4 lambda_fine - lambda_coarse) / 3.
inline double richardson(double lambda_coarse, double lambda_fine) {
  if (!(lambda_coarse > 0.0) || !(lambda_fine > 0.0))
    throw std::invalid_argument("richardson expects positive eigenvalues");
  return (4.0 * lambda_fine - lambda_coarse) / 3.0;
}

/// Observed convergence order between two error levels: log2(ec/ef).
inline double convergence_order(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0))
    throw std::invalid_argument("convergence_order expects positive errors");
  return std::log2(err_coarse / err_fine);
}

struct StudyRow {
  int level = 0;
  int j = 1;  // eigenvalue index, 1-based
  double h = 0.0;
  int n_dofs = 0;
  double lambda_h = 0.0;
  double M = 0.0;
  double lambda_c = 0.0;
  double lambda_avg = 0.0;
  std::optional<double> order_h;  // successive-difference order, needs 3 levels
  std::optional<double> order_c;
  double t_solve_s = 0.0;
  double t_correct_s = 0.0;
};

struct StudyTable {
  std::string domain;
  ElementKind element = ElementKind::cr;
  std::string alpha, beta;
  double delta = 1.01;
  double alpha0 = 1.0;
  int k = 1;
  int quad_degree = 4;
  std::vector<StudyRow> rows;  // sorted by (j, level)
  bool partial = false;        // a level failed; rows hold what completed
  std::string error;

  const StudyRow& row(int j, int level) const {
    for (const auto& r : rows)
      if (r.j == j && r.level == level) return r;
    throw std::out_of_range("no study row for (j, level)");
  }

  /// Reference eigenvalue for column j: Richardson extrapolation of
  /// lambda_h from the two finest completed levels.
  double lambda_ref(int j) const {
    std::vector<const StudyRow*> of_j;
    for (const auto& r : rows)
      if (r.j == j) of_j.push_back(&r);
    if (of_j.size() < 2)
      throw std::runtime_error("lambda_ref needs at least two levels");
    return richardson(of_j[of_j.size() - 2]->lambda_h, of_j.back()->lambda_h);
  }
};

struct StudyOptions {
  std::optional<double> alpha0;  // override the descriptor-derived bound
  int quad_degree = 4;
  double tol = 1e-10;
  std::optional<std::uint64_t> seed;
  I0Mode i0 = I0Mode::cell_mean;
  std::int64_t cell_cap = default_cell_cap();
  int direct_dof_threshold = 400000;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <int Dim>
void run_study_levels(Domain domain, ElementKind element,
                      const std::string& alpha_desc, const std::string& beta_desc,
                      double delta, const std::vector<int>& levels, int k,
                      const StudyOptions& opts, StudyTable& table) {
  for (int level : levels) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto mesh = generate<Dim>(domain, level, opts.cell_cap);
    const auto bbox = bounding_box<Dim>(mesh.vertices);
    const auto alpha = make_coefficient<Dim>(alpha_desc, bbox, opts.alpha0);
    const auto beta = make_coefficient<Dim>(beta_desc, bbox);
    const auto dm = build_dofmap(mesh, element);
    auto sys = assemble(mesh, dm, alpha, beta, opts.quad_degree);
    sys.descriptor.delta = delta;
    if (opts.seed) sys.descriptor.seed = *opts.seed;
    SolveOptions sopts;
    sopts.seed = opts.seed;
    sopts.direct_dof_threshold = opts.direct_dof_threshold;
    const auto sol = solve_smallest(sys, k, opts.tol, sopts);
    const double t_solve = seconds_since(t0);
    const double h = mesh_diameter(mesh);

    table.alpha0 = alpha.lower_bound;
    CorrectionOptions copts;
    copts.i0 = opts.i0;
    copts.quad_degree = opts.quad_degree;
    for (int j = 0; j < k; ++j) {
      const auto tc = std::chrono::steady_clock::now();
      const auto rep = make_correction_report(sol.lambdas[j], mesh, dm,
                                              sol.vectors.col(j), alpha, beta,
                                              delta, alpha.lower_bound, copts);
      StudyRow row;
      row.level = level;
      row.j = j + 1;
      row.h = h;
      row.n_dofs = dm.n_dofs;
      row.lambda_h = rep.lambda_h;
      row.M = rep.M;
      row.lambda_c = rep.lambda_c;
      row.lambda_avg = rep.lambda_avg;
      row.t_solve_s = t_solve;
      row.t_correct_s = seconds_since(tc);
      table.rows.push_back(row);
    }
  }
}

}  // namespace detail

/// Refinement sweep over one catalog domain: generate -> assemble ->
/// solve -> correct at each level. A failed level flags the table as
/// partial and keeps the completed rows.
inline StudyTable run_study(Domain domain, ElementKind element,
                            const std::string& alpha_desc,
                            const std::string& beta_desc, double delta,
                            std::vector<int> levels, int k,
                            const StudyOptions& opts = {}) {
  if (levels.empty() || !std::is_sorted(levels.begin(), levels.end()))
    throw std::invalid_argument("levels must be ascending and nonempty");
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  StudyTable table;
  table.domain = domain_name(domain);
  table.element = element;
  table.alpha = alpha_desc;
  table.beta = beta_desc;
  table.delta = delta;
  table.k = k;
  table.quad_degree = opts.quad_degree;

  try {
    if (domain_dimension(domain) == 2)
      detail::run_study_levels<2>(domain, element, alpha_desc, beta_desc, delta,
                                  levels, k, opts, table);
    else
      detail::run_study_levels<3>(domain, element, alpha_desc, beta_desc, delta,
                                  levels, k, opts, table);
  } catch (const std::exception& err) {
    table.partial = true;
    table.error = err.what();
  }

  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const StudyRow& a, const StudyRow& b) {
                     return a.j != b.j ? a.j < b.j : a.level < b.level;
                   });

  // per-j observed orders from successive eigenvalue differences; the
  // first two levels of each j have no order
  for (int j = 1; j <= k; ++j) {
    std::vector<StudyRow*> of_j;
    for (auto& r : table.rows)
      if (r.j == j) of_j.push_back(&r);
    for (std::size_t i = 2; i < of_j.size(); ++i) {
      const double dh_prev = of_j[i - 2]->lambda_h - of_j[i - 1]->lambda_h;
      const double dh = of_j[i - 1]->lambda_h - of_j[i]->lambda_h;
      if (dh_prev * dh > 0.0) of_j[i]->order_h = std::log2(dh_prev / dh);
      const double dc_prev = of_j[i - 2]->lambda_c - of_j[i - 1]->lambda_c;
      const double dc = of_j[i - 1]->lambda_c - of_j[i]->lambda_c;
      if (dc_prev * dc > 0.0) of_j[i]->order_c = std::log2(dc_prev / dc);
    }
  }
  return table;
}

/// Mesh level whose element diameter equals (domain diameter)/denom.
/// The base-mesh element diameter is the domain diameter for square and
/// cube but half of it for lshape, hexagon, and fichera, hence the offset.
inline int level_for_paper_row(Domain d, int denom) {
  if (denom < 1 || (denom & (denom - 1)) != 0)
    throw std::invalid_argument("row denominator must be a power of two");
  int log = 0;
  while ((1 << log) < denom) ++log;
  const int offset =
      (d == Domain::square || d == Domain::cube) ? 0 : 1;
  if (log < offset) throw std::invalid_argument("row coarser than the base mesh");
  return log - offset;
}

inline const char* csv_header() {
  return "domain,element,alpha,beta,delta,level,h,n_dofs,j,lambda_h,M,"
         "lambda_c,lambda_avg,order_h,order_c,t_solve_s,t_correct_s";
}

/// CSV emission; deterministic bytes for a fixed table, floats at 17
/// significant digits, blank cells for undefined orders.
inline void emit_csv(const StudyTable& table, std::ostream& os) {
  auto g17 = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  os << csv_header() << "\n";
  for (const auto& r : table.rows) {
    os << table.domain << ',' << element_name(table.element) << ','
       << table.alpha << ',' << table.beta << ',' << g17(table.delta) << ','
       << r.level << ',' << g17(r.h) << ',' << r.n_dofs << ',' << r.j << ','
       << g17(r.lambda_h) << ',' << g17(r.M) << ',' << g17(r.lambda_c) << ','
       << g17(r.lambda_avg) << ',' << (r.order_h ? g17(*r.order_h) : "") << ','
       << (r.order_c ? g17(*r.order_c) : "") << ',' << g17(r.t_solve_s) << ','
       << g17(r.t_correct_s) << "\n";
  }
  if (!os) throw std::runtime_error("CSV write failed");
}

inline void emit_csv(const StudyTable& table, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  emit_csv(table, os);
}

}  // namespace steklov
