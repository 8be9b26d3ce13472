#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

/// Uniform double in [0, 1) from the top 53 bits; platform independent,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t count) {
  return static_cast<std::size_t>(rng() % count);
}

/// One term amp * cos(k . theta + phase), theta_a = 2 pi x_a / L.
struct TrigTerm {
  double amp = 0.0;
  std::array<int, 4> k{0, 0, 0, 0};
  double phase = 0.0;
};

/// Real trigonometric polynomial on the 2n-torus of period L.
///
/// Used for metric coefficients, sources F and manufactured potentials;
/// carries closed-form derivatives so tests have an oracle that does not go
/// through the discrete transform.
class TrigPoly {
 public:
  TrigPoly() = default;
  TrigPoly(int real_dim, double period, double constant = 0.0)
      : real_dim_(real_dim), period_(period), constant_(constant) {}

  int real_dim() const { return real_dim_; }
  double period() const { return period_; }
  double constant() const { return constant_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

  TrigPoly& add(double amp, std::array<int, 4> k, double phase = 0.0);
  TrigPoly scaled(double s) const;
  TrigPoly plus(const TrigPoly& o) const;

  double eval(const std::array<double, 4>& x) const;
  /// d/dx_axis in real coordinates.
  TrigPoly derivative(int axis) const;
  /// Closed-form ∂_i ∂_j̄ at x with ∂_i = (∂_{x_{2i}} - i ∂_{x_{2i+1}}) / 2.
  HermMat complex_hessian(const std::array<double, 4>& x) const;
  /// Highest |k_a| over terms.
  int max_wavenumber() const;

  ScalarField sample(const TorusGrid& grid) const;

  /// Text form: "amp k_1 .. k_2n phase" terms separated by ';'. A constant
  /// is written as a term with zero wave vector.
  static TrigPoly parse(const std::string& text, int real_dim, double period);
  std::string to_string() const;

  /// `count` random modes with 1 <= |k|_inf <= kmax; amplitudes are rescaled
  /// so that the sum of |amp| equals `amplitude`.
  static TrigPoly random(std::uint64_t seed, int real_dim, double period, int count, int kmax,
                         double amplitude);

 private:
  double wavenumber_scale() const;

  int real_dim_ = 2;
  double period_ = 0.0;
  double constant_ = 0.0;
  std::vector<TrigTerm> terms_;
};

}  // namespace maflow
