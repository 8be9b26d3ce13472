#include "doctest.h"
#include "maflow/errors.hpp"
#include "maflow/spectral.hpp"
#include "support.hpp"

using namespace maflow;
using test::kTwoPi;

TEST_SUITE("torus_geometry") {

TEST_CASE("grid indexing round-trips and rejects bad sizes") {
  TorusGrid g(2, 8);
  CHECK(g.size() == 8 * 8 * 8 * 8);
  for (std::size_t p : {std::size_t{0}, std::size_t{7}, std::size_t{4095}}) {
    CHECK(g.flat_index(g.multi_index(p)) == p);
  }
  const auto x = g.coords(g.flat_index({1, 2, 3, 4}));
  CHECK(x[0] == doctest::Approx(1 * kTwoPi / 8));
  CHECK(x[3] == doctest::Approx(4 * kTwoPi / 8));
  CHECK_THROWS_AS(TorusGrid(3, 8), InvalidGrid);
  CHECK_THROWS_AS(TorusGrid(1, 7), InvalidGrid);
  CHECK_THROWS_AS(TorusGrid(2, 64, kTwoPi, 1000), InvalidGrid);
}

TEST_CASE("flat n=1 metric is the normalizing constant") {
  TorusGrid grid(1, 16);
  const MetricField g = build_metric(grid, MetricPreset::flat());
  const double c = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    REQUIRE(std::abs(g.at(p)(0, 0) - c) <= 1e-15);
  }
  CHECK(std::abs(discrete_volume(g) - 1.0) <= 1e-14);
}

TEST_CASE("flat n=2 metric is a multiple of the identity") {
  TorusGrid grid(2, 8);
  const MetricField g = build_metric(grid, MetricPreset::flat());
  // 2! 2^2 c^2 (2π)^4 = 1
  const double c = 1.0 / (std::sqrt(8.0) * 4.0 * std::numbers::pi * std::numbers::pi);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const HermMat m = g.at(p);
    REQUIRE(std::abs(m(0, 0) - c) <= 1e-15);
    REQUIRE(std::abs(m(1, 1) - c) <= 1e-15);
    REQUIRE(std::abs(m(0, 1)) == 0.0);
  }
}

TEST_CASE("hermitian_nonkahler preset is positive and not closed") {
  TorusGrid grid(2, 8);
  const MetricField g = build_metric(grid, MetricPreset::hermitian_nonkahler(0.3));
  CHECK(g.min_eigenvalue() / g.scale() >= 0.1);

  // (dω)_{kij̄} = ∂_k g_{ij̄} - ∂_i g_{kj̄}; only (k, i) = (0, 1) is independent.
  SpectralOps ops(grid);
  const auto& s = g.samples();
  auto comp = [&](int c) {
    ScalarField f(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) f[p] = s.component(c)[p] / g.scale();
    return f;
  };
  const ScalarField a11 = comp(0), a22 = comp(1), br = comp(2), bi = comp(3);
  const ComplexField d1_a11 = ops.d_holo(a11, 1);
  const ComplexField d0_a22 = ops.d_holo(a22, 0);
  const ComplexField d0_br = ops.d_holo(br, 0), d0_bi = ops.d_holo(bi, 0);
  const ComplexField d1_br = ops.d_holo(br, 1), d1_bi = ops.d_holo(bi, 1);
  const cd I(0, 1);
  double dw = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    // j = 0: ∂_0 g_{10̄} - ∂_1 g_{00̄} with g_{10̄} = br - i bi
    const cd t0 = d0_br[p] - I * d0_bi[p] - d1_a11[p];
    // j = 1: ∂_0 g_{11̄} - ∂_1 g_{01̄} with g_{01̄} = br + i bi
    const cd t1 = d0_a22[p] - (d1_br[p] + I * d1_bi[p]);
    dw = std::max({dw, std::abs(t0), std::abs(t1)});
  }
  CHECK(dw > 0.01);
}

TEST_CASE("build_metric enforces the eigenvalue floor") {
  TorusGrid grid(1, 8);
  CHECK_THROWS_AS(build_metric(grid, MetricPreset::kahler_bump(0.6), 10.0), PositivityViolation);
  CHECK_THROWS_AS(MetricPreset::from_name("nope", 0.0), ConfigError);
  CHECK(MetricPreset::from_name("hermitian_nonkahler", 0.3).name() == "hermitian_nonkahler");
}

TEST_CASE("volume_normalize of the unit flat metric") {
  TorusGrid grid(1, 16);
  MetricField one(grid, MetricPreset::flat(), {TrigPoly(2, kTwoPi, 1.0)}, 1.0);
  const auto [g, lambda] = volume_normalize(one);
  // ω = √-1 g dz ∧ dz̄ = 2 g dx dy, so ∫ω = 2 λ (2π)^2.
  CHECK(lambda == doctest::Approx(1.0 / (8.0 * std::numbers::pi * std::numbers::pi))
                      .epsilon(1e-15));
  CHECK(std::abs(discrete_volume(g) - 1.0) <= 1e-14);
  CHECK(std::abs(integrate(ScalarField(grid, 1.0), volume_weights(g)) - 1.0) <= 1e-14);

  const auto [g2, lambda2] = volume_normalize(g);
  CHECK(lambda2 == 1.0);
  CHECK(g2.scale() == g.scale());
  CHECK(g2.samples().component(0) == g.samples().component(0));
}

TEST_CASE("hermitian_nonkahler normalization is resolution independent") {
  const MetricField g8 = build_metric(TorusGrid(2, 8), MetricPreset::hermitian_nonkahler(0.3));
  const MetricField g16 = build_metric(TorusGrid(2, 16), MetricPreset::hermitian_nonkahler(0.3));
  CHECK(std::abs(discrete_volume(g8) - 1.0) <= 1e-13);
  CHECK(std::abs(g8.scale() - g16.scale()) <= 1e-10 * g16.scale());
  const VolumeWeights w = volume_weights(g8);
  double sum = 0.0;
  for (double x : w.weights) sum += x;
  CHECK(std::abs(sum - 1.0) <= 1e-13);
}

TEST_CASE("integrate") {
  TorusGrid grid(1, 16);
  const MetricField flat = build_metric(grid, MetricPreset::flat());
  const VolumeWeights w = volume_weights(flat);
  CHECK(integrate(ScalarField(grid, 3.5), w) == doctest::Approx(3.5).epsilon(1e-15));
  const ScalarField s = TrigPoly(2, kTwoPi).add(1.0, {1, 0, 0, 0}, -std::numbers::pi / 2).sample(grid);
  CHECK(std::abs(integrate(s, w)) <= 1e-14);

  const VolumeWeights other = volume_weights(build_metric(TorusGrid(1, 8), MetricPreset::flat()));
  CHECK_THROWS_AS(integrate(s, other), GridMismatch);
}

TEST_CASE("integrate of sin^2 agrees under resolution doubling") {
  // sin^2 x1 = 1/2 - cos(2 x1)/2
  const TrigPoly f = TrigPoly(4, kTwoPi, 0.5).add(-0.5, {2, 0, 0, 0});
  auto value = [&](int N) {
    const MetricField g = build_metric(TorusGrid(2, N), MetricPreset::hermitian_nonkahler(0.3));
    return integrate(f.sample(g.grid()), volume_weights(g));
  };
  const double v16 = value(16), v32 = value(32);
  CHECK(std::abs(v16 - v32) <= 1e-10);
}

TEST_CASE("analytic metric matches samples and derivatives") {
  TorusGrid grid(2, 8);
  const MetricField g = build_metric(grid, MetricPreset::hermitian_nonkahler(0.3));
  const std::size_t p = 1234;
  CHECK((g.analytic(grid.coords(p)) - g.at(p)).cwiseAbs().maxCoeff() <= 1e-15);
  auto x = grid.coords(p);
  const double h = 1e-5;
  for (int a = 0; a < 4; ++a) {
    auto xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    const HermMat fd = (g.analytic(xp) - g.analytic(xm)) / (2.0 * h);
    CHECK((fd - g.analytic_derivative(x, a)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

}  // TEST_SUITE
