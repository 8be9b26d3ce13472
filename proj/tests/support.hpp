#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "maflow/grid.hpp"
#include "maflow/herm.hpp"
#include "maflow/torus_geometry.hpp"
#include "maflow/trig.hpp"

namespace test {

using namespace maflow;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Metric with constant coefficients in HermitianField component order,
/// volume-normalized.
inline MetricField constant_metric(const TorusGrid& grid, const std::vector<double>& comps) {
  std::vector<TrigPoly> def;
  for (double c : comps) def.emplace_back(grid.real_dim(), grid.period(), c);
  MetricField raw(grid, MetricPreset::flat(), std::move(def), 1.0);
  return volume_normalize(raw).first;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline HermMat random_hermitian(std::mt19937_64& rng, int n, double scale) {
  HermMat a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = scale * uniform(rng, -1.0, 1.0);
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = scale * cd(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

/// Field g + s(x) with s a small random Hermitian perturbation at each point.
inline HermitianField perturbed_field(const HermitianField& g, std::mt19937_64& rng, double scale) {
  HermitianField out(g.grid());
  for (std::size_t p = 0; p < g.size(); ++p) {
    out.set(p, g.at(p) + random_hermitian(rng, g.dim(), scale));
  }
  return out;
}

}  // namespace test
