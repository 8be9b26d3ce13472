#include "doctest.h"
#include "maflow/elliptic.hpp"
#include "maflow/errors.hpp"
#include "maflow/flow.hpp"
#include "maflow/krylov.hpp"
#include "support.hpp"

using namespace maflow;
using test::kTwoPi;

TEST_SUITE("elliptic_solver") {

TEST_CASE("constant source") {
  TorusGrid grid(1, 16);
  const MetricField g = build_metric(grid, MetricPreset::kahler_bump(0.6));
  const EllipticSolution sol = solve_elliptic(g, ScalarField(grid, 0.4), 1e-12);
  CHECK(sol.b == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(test::max_abs(sol.phi_tilde_inf.values) <= 1e-14);
  CHECK(sol.residual_sup <= 1e-12);
}

TEST_CASE("manufactured solution") {
  TorusGrid grid(2, 8);
  const MetricField g = build_metric(grid, MetricPreset::hermitian_nonkahler(0.3));
  const VolumeWeights w = volume_weights(g);
  const ScalarField psi = TrigPoly::random(61, 4, kTwoPi, 5, 2, 0.002).sample(grid);
  ScalarField F = flow_rhs(psi, g, ScalarField(grid)).first;
  const double c0 = integrate(F, w);
  for (double& f : F.values) f -= c0;
  ScalarField psi_tilde = psi;
  const double mean = integrate(psi, w);
  for (double& v : psi_tilde.values) v -= mean;

  const EllipticSolution sol = solve_elliptic(g, F, 1e-12);
  CHECK(sol.b == doctest::Approx(c0).epsilon(1e-12));
  CHECK(test::max_abs_diff(sol.phi_tilde_inf.values, psi_tilde.values) <= 1e-11);
  CHECK(std::abs(integrate(sol.phi_tilde_inf, w)) <= 1e-15);
  CHECK(std::abs(sol.b - sol.b_newton) <= 1e-11);
}

TEST_CASE("random source on the non-Kahler n=2 preset") {
  TorusGrid grid(2, 16);
  const MetricField g = build_metric(grid, MetricPreset::hermitian_nonkahler(0.3));
  const ScalarField F = TrigPoly::random(7, 4, kTwoPi, 6, 1, 0.1).sample(grid);
  const EllipticSolution sol = solve_elliptic(g, F, 1e-10);
  CHECK(sol.residual_sup <= 1e-10);
  CHECK(sol.newton_iters <= 15);
  // pointwise recomputation of the residual
  const ScalarField r = flow_rhs(sol.phi_tilde_inf, g, F).first;
  double res = 0.0;
  for (double v : r.values) res = std::max(res, std::abs(v - sol.b));
  CHECK(res <= 1e-10);
}

TEST_CASE("Newton failure modes are reported") {
  TorusGrid grid(1, 8);
  const MetricField g = build_metric(grid, MetricPreset::flat());
  const ScalarField F = TrigPoly::random(3, 2, kTwoPi, 3, 1, 0.5).sample(grid);
  EllipticOptions opt;
  opt.max_iter = 1;
  CHECK_THROWS_AS(solve_elliptic(g, F, 1e-14, nullptr, opt), MaxIterations);
}

TEST_CASE("linearization_check") {
  TorusGrid grid(1, 16);
  const MetricField flat = build_metric(grid, MetricPreset::flat());
  const ScalarField cosx = TrigPoly(2, kTwoPi).add(1.0, {1, 0, 0, 0}).sample(grid);
  CHECK(linearization_check(flat, ScalarField(grid), cosx, 1e-5) <= 1e-6);
  CHECK(linearization_check(flat, ScalarField(grid), ScalarField(grid, 1.0), 1e-5) == 0.0);

  TorusGrid grid2(2, 8);
  const MetricField g = build_metric(grid2, MetricPreset::hermitian_nonkahler(0.3));
  const double lam = g.min_eigenvalue();
  const ScalarField phi = TrigPoly::random(71, 4, kTwoPi, 4, 1, 0.05 * lam).sample(grid2);
  const ScalarField dir = TrigPoly::random(72, 4, kTwoPi, 4, 2, lam).sample(grid2);
  CHECK(linearization_check(g, phi, dir, 1e-5) <= 1e-5);
}

TEST_CASE("gmres solves a small nonsymmetric system") {
  // A = tridiag(-1, 3, -0.5)
  const std::size_t n = 50;
  const LinearOp A = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 3.0 * x[i];
      if (i > 0) y[i] -= x[i - 1];
      if (i + 1 < n) y[i] -= 0.5 * x[i + 1];
    }
  };
  const LinearOp id = [](const std::vector<double>& x, std::vector<double>& y) { y = x; };
  std::vector<double> truth(n), b, x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) truth[i] = std::sin(0.3 * i);
  A(truth, b);
  const GmresResult r = gmres(A, id, b, x, 1e-12, 10, 200);
  CHECK(r.converged);
  CHECK(r.rel_residual <= 1e-12);
  CHECK(test::max_abs_diff(x, truth) <= 1e-10);
}

}  // TEST_SUITE
