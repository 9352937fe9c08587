#include <cmath>

#include "doctest.h"
#include "dpvi/extremal.hpp"

using namespace dpvi;

namespace {
MeshPtr mesh(int n) {
  MeshSpec s;
  s.dim = 1;
  s.subdivisions = n;
  return build_mesh(s);
}
Expr ex(const char* t) { return parse_expression(t, {"x", "y"}); }
IntervalPtr mf(const char* f1, const char* f2) {
  return as_pointwise(IntervalMultifunction::parse(f1, f2));
}
VIProblem poisson(const MeshPtr& m, IntervalPtr f, ConstraintSet K = {}) {
  return VIProblem{DoublePhaseOperator(ExponentData::constant(m, 2, 3, 0)),
                   std::move(K), std::move(f), nullptr, {}};
}
double max_diff(const FeFunction& a, const FeFunction& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_SUITE("extremal") {

TEST_CASE("a solution is both a sub- and a supersolution") {
  const auto m = mesh(32);
  const VIProblem p = poisson(m, mf("8", "8"),
                              ConstraintSet::obstacle(fe_constant(m, -0.5)));
  const SolveResult r = solve_vi(p);
  REQUIRE(r.report.converged);
  const Certificate sub = verify_subsolution(r.u, p);
  const Certificate sup = verify_supersolution(r.u, p);
  CHECK(sub.ok());
  CHECK(sup.ok());
  CHECK(std::abs(sub.margin) <= 1e-9);
  CHECK(sup.margin >= -1e-9);
}

TEST_CASE("supersolution failure names the node") {
  const auto m = mesh(2);
  const VIProblem p = poisson(m, mf("-1", "-1"));
  const Certificate c = verify_supersolution(fe_constant(m, 1.0), p);
  CHECK_FALSE(c.ok());
  CHECK(c.worst_node == 1);
  CHECK(c.margin == doctest::Approx(-0.5));
  // Positive boundary values break the subsolution lattice condition.
  const Certificate s = verify_subsolution(fe_constant(m, 1.0), p);
  CHECK_FALSE(s.lattice_ok);
}

TEST_CASE("obstacle bounds construction") {
  const auto m = mesh(16);
  const VIProblem p = poisson(m, mf("-0.5", "-0.5"),
                              ConstraintSet::obstacle(fe_constant(m, -0.5)));
  const OrderedInterval oi = construct_obstacle_bounds(p, ex("0"), ex("-1"), 0.1);
  CHECK(oi.u1.coeffs().cwiseAbs().maxCoeff() <= 1e-14);
  for (std::size_t i = 0; i < m->num_nodes(); ++i) {
    const double x = m->node(i).x;
    CHECK(oi.u2[i] == doctest::Approx(x * (1 - x) / 2).epsilon(1e-12).scale(1.0));
  }
  CHECK(oi.M == doctest::Approx(0.1 + 1e-3).epsilon(1e-12));
  CHECK(oi.upper.coeffs().minCoeff() >= 0.1);
  CHECK(oi.certified());
  CHECK_THROWS_AS(construct_obstacle_bounds(p, ex("-1"), ex("-1"), 0.1), HfViolation);
  CHECK_THROWS_AS(construct_obstacle_bounds(p, ex("0"), ex("-1"), 0.0),
                  std::invalid_argument);
}

TEST_CASE("enclosed solve reproduces the direct solve") {
  const auto m = mesh(64);
  const VIProblem p = poisson(m, mf("8", "8"),
                              ConstraintSet::obstacle(fe_constant(m, -0.5)));
  const SolveResult direct = solve_vi(p);
  const OrderedInterval oi = construct_obstacle_bounds(p, ex("8"), ex("8"), 0.1);
  REQUIRE(oi.certified());
  SolveOptions o;
  o.tol = 1e-10;
  const EnclosedResult er = solve_enclosed(p, oi, o);
  CHECK(er.ok);
  CHECK(er.enclosed);
  CHECK(er.reaction_max == 0.0);
  CHECK(max_diff(er.solution.u, direct.u) <= 1e-8);
}

TEST_CASE("degenerate interval") {
  const auto m = mesh(16);
  const VIProblem p = poisson(m, mf("-1", "-1"));
  SolveOptions o;
  o.tol = 1e-12;
  const SolveResult r = solve_vi(p, o);
  const OrderedInterval oi = make_interval(r.u, r.u, p);
  REQUIRE(oi.certified());
  const EnclosedResult er = solve_enclosed(p, oi);
  CHECK(er.ok);
  CHECK(max_diff(er.solution.u, r.u) <= 1e-12);
  CHECK_THROWS(make_interval(fe_constant(m, 1.0), fe_constant(m, 0.0), p));
}

TEST_CASE("extremal pair for f = [-1, 1]") {
  const auto m = mesh(16);
  const VIProblem p = poisson(m, mf("-1", "1"));
  const OrderedInterval oi = construct_obstacle_bounds(p, ex("1"), ex("-1"), 0.0);
  REQUIRE(oi.certified());
  const ExtremalResult r = extremal_pair(p, oi);
  REQUIRE(r.converged);
  CHECK(r.greatest_monotone);
  CHECK(r.smallest_monotone);
  CHECK(r.ordered);
  // With the lower endpoint -1 selected, u^* solves -u'' = 1 (nodally exact).
  for (std::size_t i = 0; i < m->num_nodes(); ++i) {
    const double x = m->node(i).x, e = x * (1 - x) / 2;
    CHECK(r.greatest[i] == doctest::Approx(e).epsilon(1e-10).scale(1.0));
    CHECK(r.smallest[i] == doctest::Approx(-e).epsilon(1e-10).scale(1.0));
  }
  for (const auto* u : {&r.greatest, &r.smallest}) {
    CHECK(verify_subsolution(*u, p).ok());
    CHECK(verify_supersolution(*u, p).ok());
  }
}

TEST_CASE("single-valued strictly monotone f has one solution") {
  const auto m = mesh(16);
  const VIProblem p = poisson(m, mf("s^3 - 1", "s^3 - 1"));
  const OrderedInterval oi = construct_obstacle_bounds(
      p, ex("1"), ex("-1"), 0.0, ObstacleBoundsOptions{1e-3, 0.0, 1.2, 201, 1e-12, 1e-9});
  // s^3 - 1 has no constant bounds on R; sample where the pair lives.
  REQUIRE(oi.certified());
  const ExtremalResult r = extremal_pair(p, oi);
  REQUIRE(r.converged);
  CHECK(max_diff(r.greatest, r.smallest) <= 1e-8);
}

TEST_CASE("bounded noncoercive drift stays enclosed") {
  const auto m = mesh(32);
  const char* f1 = "-100*min(max(s, -0.2), 0.2) - 1";
  const char* f2 = "-100*min(max(s, -0.2), 0.2) + 1";
  const VIProblem p = poisson(m, mf(f1, f2));
  const OrderedInterval oi = construct_obstacle_bounds(p, ex("21"), ex("-21"), 0.0);
  REQUIRE(oi.certified());
  const EnclosedResult er = solve_enclosed(p, oi);
  CHECK(er.ok);
  CHECK(er.enclosed);
  CHECK(er.original_residual <= 1e-9);
}

TEST_CASE("frozen-argument scheme") {
  const auto m = mesh(16);
  const VIProblem p = poisson(m, nullptr);
  SUBCASE("r-independent j reduces to the extremal pair") {
    const auto j = TwoArgIntervalMultifunction::parse("-1", "1");
    const VIProblem pj{p.op, p.K, diagonal_multifunction(j), nullptr, {}};
    const OrderedInterval oi = construct_obstacle_bounds(pj, ex("1"), ex("-1"), 0.0);
    const DiscontinuousResult d = discontinuous_fixed_point(pj, j, oi);
    const ExtremalResult e = extremal_pair(pj, oi);
    CHECK(d.converged);
    CHECK(d.g_outer == 1);
    CHECK(d.t_outer == 1);
    CHECK(max_diff(d.greatest, e.greatest) <= 1e-8);
    CHECK(max_diff(d.smallest, e.smallest) <= 1e-8);
  }
  SUBCASE("step in r") {
    const auto j = TwoArgIntervalMultifunction::parse("-2 - sign(r - 0.1)",
                                                      "-2 - sign(r - 0.1)");
    const VIProblem pj{p.op, p.K, diagonal_multifunction(j), nullptr, {}};
    const OrderedInterval oi = construct_obstacle_bounds(pj, ex("-1"), ex("-3"), 0.0);
    REQUIRE(oi.certified());
    const DiscontinuousResult d = discontinuous_fixed_point(pj, j, oi);
    CHECK(d.converged);
    CHECK(d.g_monotone);
    CHECK(d.t_monotone);
    CHECK(d.iterates_verified);
    CHECK(d.g_outer <= 20);
    CHECK(d.t_outer <= 20);
    CHECK((d.greatest.coeffs() - d.smallest.coeffs()).minCoeff() >= -1e-8);
  }
  SUBCASE("increasing dependence on r is rejected") {
    const auto j = TwoArgIntervalMultifunction::parse("r - 1", "r + 1");
    const OrderedInterval oi = construct_obstacle_bounds(
        VIProblem{p.op, p.K, mf("-1", "1"), nullptr, {}}, ex("1"), ex("-1"), 0.0);
    CHECK_THROWS_AS(discontinuous_fixed_point(p, j, oi), std::invalid_argument);
  }
}

}
