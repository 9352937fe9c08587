#include <cmath>
#include <random>

#include "doctest.h"
#include "dpvi/spaces.hpp"
#include "oracles.hpp"

using namespace dpvi;

namespace {
MeshPtr mesh(int dim, int n) {
  MeshSpec s;
  s.dim = dim;
  s.subdivisions = n;
  return build_mesh(s);
}
Expr ex(const char* t) { return parse_expression(t, {"x", "y"}); }
bool flags(const ExponentReport& r, const std::string& cond) {
  for (const auto& v : r.violations)
    if (v.condition == cond) return true;
  return false;
}
}  // namespace

TEST_SUITE("spaces") {

TEST_CASE("exponent validation") {
  const auto m = mesh(2, 2);
  const auto r1 = validate_exponents(ExponentData::constant(m, 2, 3, 1));
  CHECK(flags(r1, "p < N"));
  CHECK(validate_exponents(ExponentData::constant(m, 1.5, 2, 0)).holds());
  const auto r3 = validate_exponents(ExponentData::constant(m, 1.5, 7, 0));
  CHECK(flags(r3, "q < p*"));
  CHECK_FALSE(flags(r3, "p < N"));
  CHECK(flags(validate_exponents(ExponentData::constant(m, 1.5, 1.2, 0)), "p < q"));
  CHECK(flags(validate_exponents(ExponentData::constant(m, 1.5, 2, -1)), "mu >= 0"));
  const auto ed = ExponentData::constant(m, 1.5, 2, 0);
  CHECK(ed.p_star.values[0] == doctest::Approx(6.0));
}

TEST_CASE("closed-form modulars") {
  const auto m = mesh(1, 8);
  const auto zero = fe_constant(m, 0.0);
  const auto ed0 = ExponentData::constant(m, 2, 3, 1);
  for (const auto& k : {Modular::lebesgue(), Modular::sobolev(), Modular::weighted(),
                        Modular::variable(ed0.p)}) {
    CHECK(modular(k, ed0, zero) == 0.0);
    CHECK(luxemburg_norm(k, ed0, zero) == 0.0);
  }
  const auto ed = ExponentData::sample(m, ex("2"), ex("3"), ex("x"));
  CHECK(modular(Modular::lebesgue(), ed, fe_constant(m, 2.0)) ==
        doctest::Approx(8.0).epsilon(1e-14));
  const auto edl = ExponentData::constant(m, 2, 3, 0);
  // P1 interpolant of x is exact, and |x|^2 is integrated exactly.
  CHECK(modular(Modular::sobolev(), edl, fe_interpolate(ex("x"), m)) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(luxemburg_norm(Modular::lebesgue(), edl, fe_constant(m, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(luxemburg_norm(Modular::lebesgue(), ed0, fe_constant(m, 1.0)) ==
        doctest::Approx(oracle::plastic_lambda()).epsilon(1e-9));
}

TEST_CASE("norm properties on random functions") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    const auto m = mesh(dim, dim == 1 ? 16 : 8);
    const auto ed = ExponentData::sample(m, ex("1.5 + 0.3*x"), ex("2.6 + 0.4*y"),
                                         ex("1 + x"));
    for (int t = 0; t < 20; ++t) {
      const auto w = oracle::random_vector(rng, m->num_nodes());
      const FeFunction u(m, Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()));
      const double nrm = luxemburg_norm(Modular::sobolev(), ed, u);
      CHECK(modular(Modular::sobolev(), ed, u, 1.0 / nrm) ==
            doctest::Approx(1.0).epsilon(1e-8));
      // Homogeneity and monotone scaling.
      const FeFunction u3(m, 3.0 * u.coeffs());
      CHECK(luxemburg_norm(Modular::sobolev(), ed, u3) ==
            doctest::Approx(3.0 * nrm).epsilon(1e-9));
      double prev = 0.0;
      for (double s : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        const double r = modular(Modular::sobolev(), ed, u, s);
        CHECK(r >= prev);
        prev = r;
      }
    }
  }
}

TEST_CASE("mu = 0 reduces to the variable exponent modular") {
  const auto m = mesh(2, 6);
  const auto ed = ExponentData::sample(m, ex("1.4 + 0.5*x*y"), ex("3"), ex("0"));
  std::mt19937_64 rng(3);
  const auto w = oracle::random_vector(rng, m->num_nodes());
  const FeFunction u(m, Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()));
  CHECK(std::abs(modular(Modular::lebesgue(), ed, u) -
                 modular(Modular::variable(ed.p), ed, u)) <= 1e-14);
  CHECK(modular(Modular::weighted(), ed, u) == 0.0);
  CHECK(luxemburg_norm(Modular::weighted(), ed, u) == 0.0);
}

}
