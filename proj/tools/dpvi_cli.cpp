// dpvi: batch front end.
//
//   dpvi solve            --config C [--out DIR] [--tol T] [--max-iter N]
//                         [--selection lower|upper|midpoint] [--seed S]
//   dpvi extremal         ... same flags
//   dpvi verify           ... same flags
//   dpvi norm             --config C [--out DIR]
//   dpvi probe-coercivity --config C [--radii 1,2,4,8] [--seed S] [--out DIR]
//
// Exit codes: 0 success, 1 failed certificate or check, 2 validation
// error, 3 non-convergence.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpvi/config.hpp"
#include "dpvi/extremal.hpp"
#include "dpvi/spaces.hpp"
#include "dpvi/visolve.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dpvi;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kInvalid = 2, kNotConverged = 3;

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> selection;
  std::optional<std::uint64_t> seed;
  std::vector<double> radii;
};

void apply_flags(const Flags& f, ProblemConfig& c) {
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw ConfigError("--tol must be positive");
    c.tol = *f.tol;
  }
  if (f.max_iter) {
    if (*f.max_iter < 1) throw ConfigError("--max-iter must be positive");
    c.max_iter = *f.max_iter;
  }
  if (f.selection) {
    try {
      c.selection = parse_selection_rule(*f.selection);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--selection: ") + e.what());
    }
  }
  if (f.seed) c.seed = *f.seed;
  if (!f.radii.empty()) c.radii = f.radii;
}

fs::path out_file(const Flags& f, const std::string& name) {
  fs::create_directories(f.out);
  return fs::path(f.out) / name;
}

void write_function(const Flags& f, const std::string& name,
                    const FeFunction& u) {
  std::ofstream os(out_file(f, name));
  write_csv(os, u);
}

void write_history(const Flags& f, const std::string& name,
                   const std::vector<IterationRecord>& h) {
  std::ofstream os(out_file(f, name));
  os << "iter,max_update,residual\n";
  char buf[96];
  for (const auto& r : h) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.iter, r.max_update,
                  r.residual);
    os << buf;
  }
}

void write_report(const Flags& f, const json& j) {
  std::ofstream os(out_file(f, "report.json"));
  os << j.dump(2) << "\n";
}

json certificate_json(const Certificate& c) {
  return {{"kind", c.kind},
          {"passed", c.ok()},
          {"lattice_ok", c.lattice_ok},
          {"lattice_message", c.lattice_message},
          {"margin", c.margin},
          {"worst_node", c.worst_node},
          {"checked_nodes", c.checked_nodes},
          {"tol", c.tol},
          {"selection", to_string(c.rule)}};
}

json interval_json(const OrderedInterval& oi) {
  json j{{"subsolution", certificate_json(oi.sub)},
         {"supersolution", certificate_json(oi.super)},
         {"constructed", oi.constructed}};
  if (oi.constructed) {
    j["M"] = oi.M;
    j["c_psi"] = oi.c_psi;
    j["k1"] = oi.k1.source();
    j["k2"] = oi.k2.source();
  }
  return j;
}

json history_json(const std::vector<IterationRecord>& h) {
  json a = json::array();
  for (const auto& r : h)
    a.push_back({{"iter", r.iter}, {"max_update", r.max_update},
                 {"residual", r.residual}});
  return a;
}

void print_time(std::chrono::steady_clock::time_point t0) {
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("wall time: %.3f s\n", s);
}

int cmd_solve(const Flags& f, const ProblemConfig& c) {
  const BuiltProblem bp = build_problem(c);
  const SolveResult r = solve_vi(bp.problem, c.solve_options());
  write_function(f, "solution.csv", r.u);
  std::vector<IterationRecord> hist;
  for (std::size_t k = 0; k < r.report.residual_history.size(); ++k)
    hist.push_back({static_cast<int>(k + 1), r.report.update_history[k],
                    r.report.residual_history[k]});
  write_history(f, "history.csv", hist);
  json act = json::array();
  for (auto a : r.report.active_set_sizes) act.push_back(a);
  write_report(f, {{"command", "solve"},
                   {"converged", r.report.converged},
                   {"message", r.report.message},
                   {"residual", r.report.residual},
                   {"newton_iterations", r.report.iterations},
                   {"outer_iterations", r.report.outer_iterations},
                   {"active_set_sizes", act},
                   {"selection", to_string(r.report.selection)},
                   {"enclosure", r.report.enclosure},
                   {"min_value", r.u.coeffs().minCoeff()},
                   {"max_value", r.u.coeffs().maxCoeff()}});
  std::printf("solve: %s, residual %.3e after %d Newton steps\n",
              r.report.message.c_str(), r.report.residual, r.report.iterations);
  return r.report.converged ? kOk : kNotConverged;
}

int cmd_extremal(const Flags& f, const ProblemConfig& c) {
  const BuiltProblem bp = build_problem(c);
  const OrderedInterval oi = build_interval(c, bp);
  json rep{{"command", "extremal"}, {"interval", interval_json(oi)}};
  if (!oi.certified()) {
    write_report(f, rep);
    std::fprintf(stderr, "extremal: interval certificates fail\n");
    return kCheckFailed;
  }
  ExtremalOptions eo;
  eo.solve = c.solve_options();
  bool converged, checks;
  if (bp.j) {
    DiscontinuousOptions d;
    d.extremal = eo;
    d.r_min = c.j->r_min;
    d.r_max = c.j->r_max;
    d.s_min = c.j->s_min;
    d.s_max = c.j->s_max;
    const DiscontinuousResult r = discontinuous_fixed_point(bp.problem, *bp.j, oi, d);
    write_function(f, "u_smallest.csv", r.smallest);
    write_function(f, "u_greatest.csv", r.greatest);
    write_history(f, "history_greatest.csv", r.g_history);
    write_history(f, "history_smallest.csv", r.t_history);
    converged = r.converged;
    checks = r.g_monotone && r.t_monotone && r.iterates_verified;
    rep["scheme"] = "frozen-argument fixed point";
    rep["converged"] = r.converged;
    rep["message"] = r.message;
    rep["g_outer"] = r.g_outer;
    rep["t_outer"] = r.t_outer;
    rep["g_monotone"] = r.g_monotone;
    rep["t_monotone"] = r.t_monotone;
    rep["iterates_verified"] = r.iterates_verified;
    rep["history_greatest"] = history_json(r.g_history);
    rep["history_smallest"] = history_json(r.t_history);
  } else {
    const ExtremalResult r = extremal_pair(bp.problem, oi, eo);
    write_function(f, "u_smallest.csv", r.smallest);
    write_function(f, "u_greatest.csv", r.greatest);
    write_history(f, "history_greatest.csv", r.greatest_history);
    write_history(f, "history_smallest.csv", r.smallest_history);
    converged = r.converged;
    checks = r.greatest_monotone && r.smallest_monotone && r.ordered;
    rep["scheme"] = "monotone extremal iteration";
    rep["converged"] = r.converged;
    rep["message"] = r.message;
    rep["greatest_monotone"] = r.greatest_monotone;
    rep["smallest_monotone"] = r.smallest_monotone;
    rep["ordered"] = r.ordered;
    rep["solution_set_size"] = r.set.members.size();
    rep["history_greatest"] = history_json(r.greatest_history);
    rep["history_smallest"] = history_json(r.smallest_history);
  }
  write_report(f, rep);
  std::printf("extremal: %s\n", rep["message"].get<std::string>().c_str());
  if (!converged) return kNotConverged;
  return checks ? kOk : kCheckFailed;
}

int cmd_verify(const Flags& f, const ProblemConfig& c) {
  const BuiltProblem bp = build_problem(c);
  const OrderedInterval oi = build_interval(c, bp);
  write_function(f, "lower.csv", oi.lower);
  write_function(f, "upper.csv", oi.upper);
  write_report(f, {{"command", "verify"}, {"interval", interval_json(oi)},
                   {"passed", oi.certified()}});
  std::printf("subsolution: %s (margin %.3e)\nsupersolution: %s (margin %.3e)\n",
              oi.sub.ok() ? "pass" : "FAIL", oi.sub.margin,
              oi.super.ok() ? "pass" : "FAIL", oi.super.margin);
  return oi.certified() ? kOk : kCheckFailed;
}

int cmd_norm(const Flags& f, const ProblemConfig& c) {
  const BuiltProblem bp = build_problem(c);
  const FeFunction u =
      fe_interpolate(parse_expression(c.norm_u, {"x", "y"}), bp.mesh);
  const std::vector<Modular> mods{Modular::lebesgue(), Modular::sobolev(),
                                  Modular::weighted(),
                                  Modular::variable(bp.exponents.p)};
  json rows = json::array();
  for (const auto& m : mods) {
    const double rho = modular(m, bp.exponents, u);
    const double nrm = luxemburg_norm(m, bp.exponents, u);
    const std::string name = std::string(to_string(m.kind)) +
                             (m.kind == ModularKind::variable_lp ? "(r=p)" : "");
    std::printf("%-16s modular %.12g  luxemburg %.12g\n", name.c_str(), rho, nrm);
    rows.push_back({{"modular_kind", name}, {"modular", rho}, {"norm", nrm}});
  }
  write_report(f, {{"command", "norm"}, {"u", c.norm_u}, {"values", rows}});
  return kOk;
}

int cmd_probe(const Flags& f, const ProblemConfig& c) {
  const BuiltProblem bp = build_problem(c);
  const FeFunction u0 = bp.problem.K.project(
      fe_interpolate(parse_expression(c.u0, {"x", "y"}), bp.mesh));
  const CoercivityReport r =
      check_coercivity(bp.problem, u0, c.radii, c.samples, c.seed);
  std::printf("%10s %22s %8s %s\n", "radius", "min_value", "samples", "sign");
  json rows = json::array();
  for (const auto& row : r.rows) {
    std::printf("%10.4g %22.12g %8d %s\n", row.radius, row.min_value,
                row.samples, row.positive ? "positive" : "NOT positive");
    rows.push_back({{"radius", row.radius}, {"min_value", row.min_value},
                    {"samples", row.samples}, {"positive", row.positive}});
  }
  std::printf("verdict: %s (sampling probe, not a proof)\n", r.verdict.c_str());
  write_report(f, {{"command", "probe-coercivity"}, {"rows", rows},
                   {"verdict", r.verdict}, {"seed", c.seed}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-element solver for multi-valued double phase "
               "variational inequalities"};
  app.require_subcommand(1);
  Flags flags;
  auto common = [&flags](CLI::App* sub, bool solver_flags) {
    sub->add_option("--config", flags.config, "problem configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    if (solver_flags) {
      sub->add_option("--tol", flags.tol, "solver tolerance");
      sub->add_option("--max-iter", flags.max_iter, "Newton iteration budget");
      sub->add_option("--selection", flags.selection,
                      "selection rule: lower, upper or midpoint");
      sub->add_option("--seed", flags.seed, "random seed");
    }
  };
  auto* s_solve = app.add_subcommand("solve", "solve the variational inequality");
  auto* s_ext = app.add_subcommand("extremal", "smallest and greatest solutions");
  auto* s_ver = app.add_subcommand("verify", "sub-/supersolution certificates");
  auto* s_norm = app.add_subcommand("norm", "modulars and Luxemburg norms");
  auto* s_probe = app.add_subcommand("probe-coercivity",
                                     "sampling probe of the coercivity condition");
  common(s_solve, true);
  common(s_ext, true);
  common(s_ver, true);
  common(s_norm, false);
  common(s_probe, false);
  s_probe->add_option("--seed", flags.seed, "random seed");
  s_probe->add_option("--radii", flags.radii, "comma-separated radii")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = kOk;
  try {
    ProblemConfig cfg = load_config(flags.config);
    apply_flags(flags, cfg);
    if (s_solve->parsed()) rc = cmd_solve(flags, cfg);
    else if (s_ext->parsed()) rc = cmd_extremal(flags, cfg);
    else if (s_ver->parsed()) rc = cmd_verify(flags, cfg);
    else if (s_norm->parsed()) rc = cmd_norm(flags, cfg);
    else rc = cmd_probe(flags, cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kInvalid;
  } catch (const ExprError& e) {
    std::fprintf(stderr, "expression error: %s\n", e.what());
    return kInvalid;
  } catch (const HfViolation& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kInvalid;
  } catch (const EvalError& e) {
    std::fprintf(stderr, "evaluation error: %s\n", e.what());
    return kInvalid;
  } catch (const MeshError& e) {
    std::fprintf(stderr, "mesh error: %s\n", e.what());
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNotConverged;
  }
  print_time(t0);
  return rc;
}
