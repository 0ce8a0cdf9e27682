#pragma once

#include "steklov/mesh_io.hpp"
#include "steklov/steklov.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace steklov::cli {

namespace detail {

inline std::vector<int> parse_levels(const std::string& spec) {
  const auto dots = spec.find("..");
  long a = 0, b = 0;
  std::size_t pos = 0;
  try {
    if (dots == std::string::npos) {
      a = b = std::stol(spec, &pos);
      if (pos != spec.size()) throw std::invalid_argument(spec);
    } else {
      a = std::stol(spec.substr(0, dots), &pos);
      if (pos != dots) throw std::invalid_argument(spec);
      b = std::stol(spec.substr(dots + 2), &pos);
      if (pos != spec.size() - dots - 2) throw std::invalid_argument(spec);
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--levels", "expected N or A..B, got '" + spec + "'");
  }
  if (a < 0 || b < a)
    throw CLI::ValidationError("--levels", "need 0 <= A <= B in '" + spec + "'");
  std::vector<int> out;
  for (long l = a; l <= b; ++l) out.push_back(int(l));
  return out;
}

struct CommonArgs {
  std::string domain;
  std::string element = "cr";
  std::string levels = "0";
  int k = 1;
  double delta = 1.01;
  std::string alpha = "const:1";
  std::string beta = "const:1";
  double alpha0 = 0.0;
  bool has_alpha0 = false;
  int quad_degree = 4;
  std::string out;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string i0 = "mean";
};

inline void add_common(CLI::App* cmd, CommonArgs& a, bool needs_problem) {
  cmd->add_option("--domain", a.domain, "catalog domain")
      ->required()
      ->check(CLI::IsMember({"square", "lshape", "hexagon", "cube", "fichera"}));
  cmd->add_option("--levels", a.levels, "refinement level N or range A..B");
  if (!needs_problem) return;
  cmd->add_option("--element", a.element, "element kind")
      ->check(CLI::IsMember({"cr", "ecr", "p1"}));
  cmd->add_option("--k", a.k, "number of eigenvalues")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", a.delta, "correction safety factor (> 1)");
  cmd->add_option("--alpha", a.alpha, "alpha descriptor (const:c | affine:a,b.. | sinbump:a,b)");
  cmd->add_option("--beta", a.beta, "beta descriptor");
  cmd->add_option("--alpha0", a.alpha0, "declared lower bound of alpha")
      ->each([&a](const std::string&) { a.has_alpha0 = true; });
  cmd->add_option("--quad-degree", a.quad_degree, "quadrature degree")
      ->check(CLI::Range(1, 6));
  cmd->add_option("--seed", a.seed, "eigensolver start-vector seed")
      ->each([&a](const std::string&) { a.has_seed = true; });
  cmd->add_option("--i0", a.i0, "piecewise-constant projection mode")
      ->check(CLI::IsMember({"mean", "barycenter"}));
}

inline StudyOptions study_options(const CommonArgs& a) {
  StudyOptions opts;
  if (a.has_alpha0) opts.alpha0 = a.alpha0;
  if (a.has_seed) opts.seed = a.seed;
  opts.quad_degree = a.quad_degree;
  opts.i0 = a.i0 == "barycenter" ? I0Mode::barycenter : I0Mode::cell_mean;
  return opts;
}

inline void print_table(const StudyTable& t, std::ostream& os) {
  os << "# domain=" << t.domain << " element=" << element_name(t.element)
     << " alpha=" << t.alpha << " beta=" << t.beta << " delta=" << t.delta
     << " alpha0=" << t.alpha0 << "\n";
  std::printf("%5s %3s %12s %9s %14s %12s %14s %14s %8s %8s %9s %10s\n", "level",
              "j", "h", "n_dofs", "lambda_h", "M", "lambda_c", "lambda_avg",
              "ord_h", "ord_c", "t_solve", "t_correct");
  for (const auto& r : t.rows) {
    char oh[16] = "-", oc[16] = "-";
    if (r.order_h) std::snprintf(oh, sizeof(oh), "%.2f", *r.order_h);
    if (r.order_c) std::snprintf(oc, sizeof(oc), "%.2f", *r.order_c);
    std::printf("%5d %3d %12.6g %9d %14.8f %12.4e %14.8f %14.8f %8s %8s %9.3f %10.4f\n",
                r.level, r.j, r.h, r.n_dofs, r.lambda_h, r.M, r.lambda_c,
                r.lambda_avg, oh, oc, r.t_solve_s, r.t_correct_s);
  }
}

inline int run_study_command(const CommonArgs& a, bool single_level) {
  const auto domain = *parse_domain(a.domain);
  const auto element = *parse_element(a.element);
  auto levels = parse_levels(a.levels);
  if (single_level && levels.size() != 1)
    throw CLI::ValidationError("--levels", "solve takes a single level");
  const auto table = run_study(domain, element, a.alpha, a.beta, a.delta, levels,
                               a.k, study_options(a));
  print_table(table, std::cout);
  if (!a.out.empty()) {
    emit_csv(table, a.out);
    std::cout << "# wrote " << a.out << "\n";
  }
  if (table.partial) {
    std::cerr << "error: study aborted: " << table.error << "\n";
    return 1;
  }
  return 0;
}

inline int run_bracket_command(const CommonArgs& a) {
  const auto domain = *parse_domain(a.domain);
  const auto element = *parse_element(a.element);
  if (element == ElementKind::p1)
    throw CLI::ValidationError("--element", "bracket needs a nonconforming element");
  auto levels = parse_levels(a.levels);
  const auto opts = study_options(a);
  const auto lower = run_study(domain, element, a.alpha, a.beta, a.delta, levels,
                               a.k, opts);
  const auto upper = run_study(domain, ElementKind::p1, a.alpha, a.beta, a.delta,
                               levels, a.k, opts);
  if (lower.partial || upper.partial) {
    std::cerr << "error: " << (lower.partial ? lower.error : upper.error) << "\n";
    return 1;
  }
  std::printf("%5s %3s %16s %16s  enclosure\n", "level", "j", "lambda_c(low)",
              "lambda_p1(up)");
  bool ok = true;
  for (const auto& r : lower.rows) {
    const auto& up = upper.row(r.j, r.level);
    const bool good = r.lambda_c <= up.lambda_h;
    ok = ok && good;
    std::printf("%5d %3d %16.10f %16.10f  [%s]\n", r.level, r.j, r.lambda_c,
                up.lambda_h, good ? "ok" : "VIOLATED");
  }
  if (!a.out.empty()) {
    emit_csv(lower, a.out);
    std::cout << "# wrote " << a.out << " (corrected lower-bound run)\n";
  }
  if (!ok) {
    std::cerr << "error: enclosure violated\n";
    return 1;
  }
  return 0;
}

inline int run_mesh_command(const CommonArgs& a) {
  const auto domain = *parse_domain(a.domain);
  auto levels = parse_levels(a.levels);
  if (levels.size() != 1)
    throw CLI::ValidationError("--levels", "mesh takes a single level");
  if (a.out.empty()) throw CLI::ValidationError("--out", "mesh export needs --out");
  if (domain_dimension(domain) == 2)
    export_mesh(generate<2>(domain, levels[0]), a.out);
  else
    export_mesh(generate<3>(domain, levels[0]), a.out);
  std::cout << "# wrote " << a.out << "\n";
  return 0;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Returns 0 on success,
/// 2 on usage errors, 1 on numerical failure.
inline int run(std::vector<std::string> args) {
  CLI::App app{"Steklov eigenvalue bounds toolkit"};
  app.require_subcommand(1);

  detail::CommonArgs solve_args, study_args, bracket_args, mesh_args;
  auto* solve = app.add_subcommand("solve", "solve one refinement level");
  detail::add_common(solve, solve_args, true);
  solve->add_option("--out", solve_args.out, "CSV output path");
  auto* study = app.add_subcommand("study", "run a refinement sweep");
  detail::add_common(study, study_args, true);
  study->add_option("--out", study_args.out, "CSV output path");
  auto* bracket =
      app.add_subcommand("bracket", "enclose eigenvalues: corrected lower + P1 upper");
  detail::add_common(bracket, bracket_args, true);
  bracket->add_option("--out", bracket_args.out, "CSV output path");
  auto* mesh = app.add_subcommand("mesh", "export a catalog mesh");
  detail::add_common(mesh, mesh_args, false);
  mesh->add_option("--out", mesh_args.out, "mesh output path");

  std::vector<const char*> argv;
  argv.push_back("steklov");
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return detail::run_study_command(solve_args, true);
    if (study->parsed()) return detail::run_study_command(study_args, false);
    if (bracket->parsed()) return detail::run_bracket_command(bracket_args);
    return detail::run_mesh_command(mesh_args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace steklov::cli
