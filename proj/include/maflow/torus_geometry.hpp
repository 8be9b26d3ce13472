#pragma once

#include <string>
#include <utility>
#include <vector>

#include "maflow/grid.hpp"
#include "maflow/trig.hpp"

namespace maflow {

/// Factor relating ω^n to det g times Lebesgue measure for
/// ω = √-1 Σ g_{ij̄} dz^i ∧ dz̄^j:  ω^n = n! 2^n det g dx_1 ... dx_2n.
double volume_form_constant(int n);

struct MetricPreset {
  enum class Kind { flat, kahler_bump, hermitian_nonkahler };
  Kind kind = Kind::flat;
  /// Amplitude for kahler_bump, ε for hermitian_nonkahler; unused for flat.
  double param = 0.0;

  static MetricPreset flat() { return {Kind::flat, 0.0}; }
  static MetricPreset kahler_bump(double amp = 0.6) { return {Kind::kahler_bump, amp}; }
  static MetricPreset hermitian_nonkahler(double eps = 0.3) {
    return {Kind::hermitian_nonkahler, eps};
  }
  /// Throws ConfigError naming the unknown preset.
  static MetricPreset from_name(const std::string& name, double param);
  std::string name() const;

  /// Closed-form coefficients, one trigonometric polynomial per
  /// HermitianField component, before volume normalization.
  std::vector<TrigPoly> coefficients(int n, double period) const;
};

/// Hermitian metric sampled on the grid together with its closed-form
/// definition (already multiplied by `scale`).
class MetricField {
 public:
  MetricField(const TorusGrid& grid, MetricPreset preset, std::vector<TrigPoly> definition,
              double scale);

  const TorusGrid& grid() const { return samples_.grid(); }
  int dim() const { return samples_.dim(); }
  const HermitianField& samples() const { return samples_; }
  const MetricPreset& preset() const { return preset_; }
  /// Product of all volume normalizations applied to the raw preset.
  double scale() const { return scale_; }
  const std::vector<TrigPoly>& definition() const { return definition_; }

  HermMat at(std::size_t p) const { return samples_.at(p); }
  HermMat analytic(const std::array<double, 4>& x) const;
  /// Real-axis derivative of the closed-form metric.
  HermMat analytic_derivative(const std::array<double, 4>& x, int axis) const;

  MetricField rescaled(double lambda) const;
  double min_eigenvalue() const;
  MetricInverseField inverse() const;

 private:
  MetricPreset preset_;
  std::vector<TrigPoly> definition_;
  double scale_;
  HermitianField samples_;
};

/// Quadrature weights of ω^n; they sum to one for a normalized metric.
struct VolumeWeights {
  TorusGrid grid;
  std::vector<double> weights;
};

/// Evaluates the preset, checks positivity and the eigenvalue floor on the
/// raw coefficients, then rescales to unit volume.
MetricField build_metric(const TorusGrid& grid, const MetricPreset& preset,
                         double lambda_floor = 0.1);

/// Discrete ∫ ω^n.
double discrete_volume(const MetricField& g);

/// Returns (λ g, λ) with λ chosen so the discrete ∫ ω^n equals one.
std::pair<MetricField, double> volume_normalize(const MetricField& g);

VolumeWeights volume_weights(const MetricField& g);

/// Σ f(x) w(x). Throws GridMismatch if the grids differ.
double integrate(const ScalarField& f, const VolumeWeights& w);

}  // namespace maflow
