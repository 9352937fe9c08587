#include "dpvi/config.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dpvi {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

// Expression fields accept strings and numbers.
std::string expr_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError(where + " must be a string or a number");
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  return v.get<int>();
}

void check_expr(const std::string& text, const std::set<std::string>& vars,
                const std::string& where) {
  try {
    parse_expression(text, vars);
  } catch (const ExprError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

const std::set<std::string> kSpatial{"x", "y"};
const std::set<std::string> kState{"x", "y", "s"};
const std::set<std::string> kTwoArg{"x", "y", "r", "s"};

IntervalSpec interval_block(const json& b, const std::string& where) {
  only_keys(b, {"f1", "f2"}, where);
  if (!b.contains("f1") || !b.contains("f2"))
    throw ConfigError(where + " needs f1 and f2");
  IntervalSpec s{expr_text(b["f1"], where + ".f1"),
                 expr_text(b["f2"], where + ".f2")};
  check_expr(s.f1, kState, where + ".f1");
  check_expr(s.f2, kState, where + ".f2");
  return s;
}

}  // namespace

SolveOptions ProblemConfig::solve_options() const {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.selection = selection;
  o.seed = seed;
  o.max_outer = max_outer;
  return o;
}

ProblemConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  only_keys(doc,
            {"schema", "mesh", "exponents", "constraint", "f", "f_gamma", "j",
             "bounds", "solver", "norm", "coercivity"},
            "top level");
  if (!doc.contains("schema") || !doc["schema"].is_string() ||
      doc["schema"].get<std::string>() != kConfigSchema)
    throw ConfigError(std::string("\"schema\" must be \"") + kConfigSchema +
                      "\"");

  ProblemConfig c;
  if (!doc.contains("mesh")) throw ConfigError("missing \"mesh\" block");
  {
    const json& m = doc["mesh"];
    only_keys(m, {"dim", "n", "gamma"}, "mesh");
    if (m.contains("dim")) c.dim = integer(m["dim"], "mesh.dim");
    if (m.contains("n")) c.n = integer(m["n"], "mesh.n");
    if (m.contains("gamma")) c.gamma = expr_text(m["gamma"], "mesh.gamma");
    if (c.dim != 1 && c.dim != 2) throw ConfigError("mesh.dim must be 1 or 2");
    if (c.n < 1) throw ConfigError("mesh.n must be positive");
    check_expr(c.gamma, kSpatial, "mesh.gamma");
  }
  if (doc.contains("exponents")) {
    const json& e = doc["exponents"];
    only_keys(e, {"p", "q", "mu"}, "exponents");
    if (e.contains("p")) c.p = expr_text(e["p"], "exponents.p");
    if (e.contains("q")) c.q = expr_text(e["q"], "exponents.q");
    if (e.contains("mu")) c.mu = expr_text(e["mu"], "exponents.mu");
  }
  check_expr(c.p, kSpatial, "exponents.p");
  check_expr(c.q, kSpatial, "exponents.q");
  check_expr(c.mu, kSpatial, "exponents.mu");

  if (doc.contains("constraint")) {
    const json& k = doc["constraint"];
    only_keys(k, {"kind", "psi", "psi_hi", "c_psi"}, "constraint");
    const std::string kind =
        k.contains("kind") && k["kind"].is_string() ? k["kind"].get<std::string>()
                                                    : "whole_space";
    if (kind == "whole_space") {
      c.constraint = ConstraintKind::whole_space;
    } else if (kind == "obstacle") {
      c.constraint = ConstraintKind::obstacle;
      if (!k.contains("psi")) throw ConfigError("obstacle constraint needs psi");
    } else if (kind == "box") {
      c.constraint = ConstraintKind::box;
      if (!k.contains("psi") || !k.contains("psi_hi"))
        throw ConfigError("box constraint needs psi and psi_hi");
    } else {
      throw ConfigError("constraint.kind must be whole_space, obstacle or box");
    }
    if (k.contains("psi")) {
      c.psi = expr_text(k["psi"], "constraint.psi");
      check_expr(c.psi, kSpatial, "constraint.psi");
    }
    if (k.contains("psi_hi")) {
      c.psi_hi = expr_text(k["psi_hi"], "constraint.psi_hi");
      check_expr(c.psi_hi, kSpatial, "constraint.psi_hi");
    }
    if (k.contains("c_psi")) c.c_psi = number(k["c_psi"], "constraint.c_psi");
  }
  if (doc.contains("f")) c.f = interval_block(doc["f"], "f");
  if (doc.contains("f_gamma")) c.f_gamma = interval_block(doc["f_gamma"], "f_gamma");
  if (doc.contains("j")) {
    const json& j = doc["j"];
    only_keys(j, {"j1", "j2", "domain", "r_min", "r_max", "s_min", "s_max"}, "j");
    if (!j.contains("j1") || !j.contains("j2"))
      throw ConfigError("j needs j1 and j2");
    TwoArgSpec t;
    t.j1 = expr_text(j["j1"], "j.j1");
    t.j2 = expr_text(j["j2"], "j.j2");
    check_expr(t.j1, kTwoArg, "j.j1");
    check_expr(t.j2, kTwoArg, "j.j2");
    if (j.contains("domain")) {
      const std::string d = j["domain"].is_string() ? j["domain"].get<std::string>() : "";
      if (d == "interior") t.domain = FieldLocation::interior;
      else if (d == "boundary") t.domain = FieldLocation::boundary;
      else throw ConfigError("j.domain must be interior or boundary");
    }
    if (j.contains("r_min")) t.r_min = number(j["r_min"], "j.r_min");
    if (j.contains("r_max")) t.r_max = number(j["r_max"], "j.r_max");
    if (j.contains("s_min")) t.s_min = number(j["s_min"], "j.s_min");
    if (j.contains("s_max")) t.s_max = number(j["s_max"], "j.s_max");
    c.j = t;
  }
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    only_keys(b, {"k1", "k2", "margin", "u_lower", "u_upper"}, "bounds");
    BoundsSpec s;
    const bool rec = b.contains("k1") || b.contains("k2");
    const bool expl = b.contains("u_lower") || b.contains("u_upper");
    if (rec == expl)
      throw ConfigError("bounds needs either k1/k2 or u_lower/u_upper");
    s.constructed = rec;
    if (rec) {
      if (!b.contains("k1") || !b.contains("k2"))
        throw ConfigError("bounds needs both k1 and k2");
      s.k1 = expr_text(b["k1"], "bounds.k1");
      s.k2 = expr_text(b["k2"], "bounds.k2");
      check_expr(s.k1, kSpatial, "bounds.k1");
      check_expr(s.k2, kSpatial, "bounds.k2");
      if (b.contains("margin")) s.margin = number(b["margin"], "bounds.margin");
      if (s.margin < 0.0) throw ConfigError("bounds.margin must be >= 0");
    } else {
      if (!b.contains("u_lower") || !b.contains("u_upper"))
        throw ConfigError("bounds needs both u_lower and u_upper");
      s.u_lower = expr_text(b["u_lower"], "bounds.u_lower");
      s.u_upper = expr_text(b["u_upper"], "bounds.u_upper");
      check_expr(s.u_lower, kSpatial, "bounds.u_lower");
      check_expr(s.u_upper, kSpatial, "bounds.u_upper");
    }
    c.bounds = s;
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    only_keys(s, {"tol", "max_iter", "selection", "seed", "max_outer", "eps"},
              "solver");
    if (s.contains("tol")) c.tol = number(s["tol"], "solver.tol");
    if (s.contains("max_iter")) c.max_iter = integer(s["max_iter"], "solver.max_iter");
    if (s.contains("selection")) {
      if (!s["selection"].is_string())
        throw ConfigError("solver.selection must be a string");
      try {
        c.selection = parse_selection_rule(s["selection"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("solver.selection: ") + e.what());
      }
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer())
        throw ConfigError("solver.seed must be a nonnegative integer");
      if (s["seed"].is_number_integer() && s["seed"].get<long long>() < 0)
        throw ConfigError("solver.seed must be a nonnegative integer");
      c.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("max_outer")) c.max_outer = integer(s["max_outer"], "solver.max_outer");
    if (s.contains("eps")) c.eps = number(s["eps"], "solver.eps");
  }
  if (!(c.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (c.max_iter < 1) throw ConfigError("solver.max_iter must be positive");
  if (c.max_outer < 1) throw ConfigError("solver.max_outer must be positive");
  if (!(c.eps >= 0.0)) throw ConfigError("solver.eps must be >= 0");
  if (doc.contains("norm")) {
    const json& n = doc["norm"];
    only_keys(n, {"u"}, "norm");
    if (n.contains("u")) c.norm_u = expr_text(n["u"], "norm.u");
  }
  check_expr(c.norm_u, kSpatial, "norm.u");
  if (doc.contains("coercivity")) {
    const json& k = doc["coercivity"];
    only_keys(k, {"radii", "samples", "u0"}, "coercivity");
    if (k.contains("radii")) {
      if (!k["radii"].is_array()) throw ConfigError("coercivity.radii must be a list");
      c.radii.clear();
      for (const auto& r : k["radii"]) c.radii.push_back(number(r, "coercivity.radii"));
    }
    if (k.contains("samples")) c.samples = integer(k["samples"], "coercivity.samples");
    if (k.contains("u0")) c.u0 = expr_text(k["u0"], "coercivity.u0");
  }
  check_expr(c.u0, kSpatial, "coercivity.u0");
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

BuiltProblem build_problem(const ProblemConfig& c) {
  auto px = [](const std::string& t) { return parse_expression(t, kSpatial); };
  MeshSpec ms;
  ms.dim = c.dim;
  ms.subdivisions = c.n;
  ms.gamma_predicate = px(c.gamma);
  MeshPtr mesh = build_mesh(ms);
  ExponentData ed;
  try {
    ed = ExponentData::sample(mesh, px(c.p), px(c.q), px(c.mu));
  } catch (const EvalError& e) {
    throw ConfigError(std::string("exponent evaluation failed: ") + e.what());
  }
  const ExponentReport rep = validate_exponents(ed);
  for (const auto& v : rep.violations) {
    // The embedding conditions concern the continuous theory; the discrete
    // problem is well posed without them.
    if (v.condition == "p < N" || v.condition == "q < p*") continue;
    std::ostringstream os;
    os << "exponent condition " << v.condition << " fails at (" << v.location.x
       << ", " << v.location.y << "): " << v.lhs << " vs " << v.rhs;
    throw ConfigError(os.str());
  }

  ConstraintSet K;
  if (c.constraint == ConstraintKind::obstacle)
    K = ConstraintSet::obstacle(fe_interpolate(px(c.psi), mesh));
  else if (c.constraint == ConstraintKind::box)
    K = ConstraintSet::box(fe_interpolate(px(c.psi), mesh),
                           fe_interpolate(px(c.psi_hi), mesh));

  BuiltProblem bp{mesh, ed,
                  VIProblem{DoublePhaseOperator(ed, c.eps), K, nullptr, nullptr, {}},
                  std::nullopt};
  if (c.f)
    bp.problem.f = as_pointwise(IntervalMultifunction::parse(c.f->f1, c.f->f2));
  if (c.f_gamma)
    bp.problem.f_gamma = as_pointwise(IntervalMultifunction::parse(
        c.f_gamma->f1, c.f_gamma->f2, FieldLocation::boundary));
  if (c.j) {
    bp.j = TwoArgIntervalMultifunction::parse(c.j->j1, c.j->j2, c.j->domain);
    if (c.j->domain == FieldLocation::interior)
      bp.problem.f = diagonal_multifunction(*bp.j);
    else
      bp.problem.f_gamma = diagonal_multifunction(*bp.j);
  }
  try {
    bp.problem.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return bp;
}

OrderedInterval build_interval(const ProblemConfig& c, const BuiltProblem& bp) {
  if (!c.bounds) throw ConfigError("this command needs a \"bounds\" block");
  const BoundsSpec& b = *c.bounds;
  auto px = [](const std::string& t) { return parse_expression(t, kSpatial); };
  const double cert_tol = std::max(1e-9, c.tol);
  if (!b.constructed)
    return make_interval(fe_interpolate(px(b.u_lower), bp.mesh),
                         fe_interpolate(px(b.u_upper), bp.mesh), bp.problem,
                         cert_tol);
  ObstacleBoundsOptions o;
  o.margin = b.margin;
  o.certificate_tol = cert_tol;
  return construct_obstacle_bounds(bp.problem, px(b.k1), px(b.k2), c.c_psi, o);
}

}  // namespace dpvi
