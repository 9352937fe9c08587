#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's assembly or solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Root of t^3 + t^2 = 1 by plain bisection (t = 1/lambda of the
/// plastic-number norm).
inline double plastic_lambda() {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (m * m * m + m * m < 1.0 ? lo : hi) = m;
  }
  return 1.0 / (0.5 * (lo + hi));
}

/// Uniform 1D P1 stiffness for -u'' on n cells: interior unknowns only.
/// Solves K u = b with the Thomas algorithm; returns all n+1 nodal values
/// (zero at both ends).
inline std::vector<double> poisson_1d(int n, const std::vector<double>& b) {
  const double h = 1.0 / n;
  const int m = n - 1;
  std::vector<double> c(m), d(m), u(n + 1, 0.0);
  const double diag = 2.0 / h, off = -1.0 / h;
  for (int i = 0; i < m; ++i) {
    const double den = diag - (i ? off * c[i - 1] : 0.0);
    c[i] = off / den;
    d[i] = (b[i + 1] - (i ? off * d[i - 1] : 0.0)) / den;
  }
  for (int i = m - 1; i >= 0; --i)
    u[i + 1] = d[i] - (i + 1 < m ? c[i] * u[i + 2] : 0.0);
  return u;
}

/// Projected SOR for min 1/2 u'Ku - b'u subject to u >= psi (1D P1
/// Laplacian, homogeneous Dirichlet ends). Returns n+1 nodal values.
inline std::vector<double> obstacle_qp_1d(int n, const std::vector<double>& b,
                                          const std::vector<double>& psi,
                                          double omega = 1.8,
                                          double tol = 1e-15,
                                          int max_sweeps = 2000000) {
  const double h = 1.0 / n;
  std::vector<double> u(n + 1, 0.0);
  for (int i = 1; i < n; ++i) u[i] = std::max(0.0, psi[i]);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int i = 1; i < n; ++i) {
      const double gs = (b[i] + (u[i - 1] + u[i + 1]) / h) / (2.0 / h);
      const double v = std::max(psi[i], u[i] + omega * (gs - u[i]));
      change = std::max(change, std::abs(v - u[i]));
      u[i] = v;
    }
    if (change < tol) break;
  }
  return u;
}

/// <A u, phi_i> for constant exponents on the uniform 1D mesh, written
/// directly from the element slopes (independent of the library kernels).
inline std::vector<double> p_laplacian_1d(const std::vector<double>& u,
                                          double p, double q, double mu) {
  const int n = static_cast<int>(u.size()) - 1;
  const double h = 1.0 / n;
  std::vector<double> r(n + 1, 0.0);
  for (int e = 0; e < n; ++e) {
    const double g = (u[e + 1] - u[e]) / h;
    const double a = std::abs(g);
    const double flux =
        a == 0.0 ? 0.0 : (std::pow(a, p - 2.0) + mu * std::pow(a, q - 2.0)) * g;
    // int_e flux * phi' with phi' = -1/h, +1/h on the two ends.
    r[e] -= flux;
    r[e + 1] += flux;
  }
  return r;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n,
                                         double a = -1.0, double b = 1.0) {
  std::uniform_real_distribution<double> d(a, b);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace oracle
