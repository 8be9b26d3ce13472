#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "maflow/flow.hpp"
#include "maflow/grid.hpp"
#include "maflow/spectral.hpp"
#include "maflow/torus_geometry.hpp"

namespace maflow {

struct HolderConfig {
  double alpha = 0.5;
  /// Ω starts at this time.
  double epsilon = 0.5;
  int sample_pairs = 20000;
  std::uint64_t rng_seed = 0;

  void validate(double horizon) const;
};

struct MonitorConfig {
  /// Exponent A in Q = log tr_g g' + exp(A (sup φ̃ - φ̃)).
  double A = 1.0;
  HolderConfig holder;
  /// Li-Yau α, in (1, 2).
  double alpha_ly = 1.5;

  void validate(double horizon) const;
};

struct MonitorRecord {
  double t = 0.0;
  double sup_dphidt = 0.0;
  /// θ(t) = sup u - inf u for u = ∂φ/∂t.
  double osc_u = 0.0;
  /// max over the grid of tr_g g'.
  double trace_max = 0.0;
  /// Extreme eigenvalues of g^{-1} g' over the grid.
  double eig_min = 0.0;
  double eig_max = 0.0;
  double Q_max = 0.0;
  double holder_seminorm = 0.0;
  double liyau_max = 0.0;
  double mean_phitilde = 0.0;

  // Not part of the CSV.
  double harnack_ratio = 0.0;
  double sup_dphitilde_dt = 0.0;
  double max_laplacian_phitilde = 0.0;
  /// Round-off level of u: values of θ or |∂φ̃/∂t| below it are noise.
  double u_floor = 0.0;
};

struct MonitorSeries {
  std::vector<MonitorRecord> records;

  /// Header plus one row per record, every value printed with %.17g.
  std::string to_csv() const;
};

/// Fills the pointwise parts of a record (everything except Q, the Hölder
/// estimate and the Li-Yau/Harnack columns).
MonitorRecord monitor_basic(const FlowState& s, const MetricInverseField& g_inv,
                            const VolumeWeights& w, SpectralOps& ops);

/// max_x log tr_g g' + exp(A (sup_phitilde - φ̃(x))).
double monitor_Q(const FlowState& s, const MetricInverseField& g_inv, double A,
                 double sup_phitilde);

/// Parabolic distance max(|x - y|, |t - s|^{1/2}) with the periodic
/// Euclidean distance on the torus.
double parabolic_distance(const TorusGrid& grid, std::size_t x, double t, std::size_t y, double s);

/// Sampled lower estimate of [g']_{α, M × [ε, t]}, updated as snapshots
/// arrive. Each snapshot adds `sample_pairs` random pairs with one member
/// in the new snapshot, so the estimate is non-decreasing and reproducible
/// from rng_seed.
class HolderEstimator {
 public:
  HolderEstimator(const TorusGrid& grid, HolderConfig cfg);

  /// Returns the running estimate; snapshots with t < ε are ignored.
  double add(double t, const HermitianField& gprime);
  double estimate() const { return estimate_; }
  std::size_t snapshots() const { return times_.size(); }

 private:
  double quotient(std::size_t x, std::size_t a, std::size_t y, std::size_t b) const;

  TorusGrid grid_;
  HolderConfig cfg_;
  std::vector<double> times_;
  std::vector<HermitianField> fields_;
  double estimate_ = 0.0;
  std::uint64_t calls_ = 0;
};

/// Sampled [·]_{α,Ω} over the given snapshots with t >= ε.
/// Throws InsufficientSnapshots if fewer than two qualify.
double holder_seminorm(const std::vector<std::pair<double, HermitianField>>& snapshots,
                       const HolderConfig& cfg);
/// All-pairs value of the same quotient.
double holder_seminorm_exhaustive(const std::vector<std::pair<double, HermitianField>>& snapshots,
                                  const HolderConfig& cfg);

/// Per snapshot, max_x t (|∂f|²_{g'} - α f_t) with f = log u; f_t by
/// centred differences (one-sided at the ends). Throws NonPositiveU.
std::vector<double> liyau_quantity(const std::vector<double>& times,
                                   const std::vector<ScalarField>& u,
                                   const std::vector<MetricInverseField>& gprime_inv,
                                   double alpha_ly);

/// Per snapshot, max_x (|∂f|²_{g'} - α f_t), without the factor t.
std::vector<double> liyau_bracket(const std::vector<double>& times,
                                  const std::vector<ScalarField>& u,
                                  const std::vector<MetricInverseField>& gprime_inv,
                                  double alpha_ly);

/// y(t) <= C1 + C2 / t fitted by least squares with C2 >= 0, then C1 raised
/// until the envelope dominates every sample.
struct EnvelopeFit {
  double C1 = 0.0;
  double C2 = 0.0;
  bool certified = false;
};
EnvelopeFit envelope_fit(const std::vector<double>& t, const std::vector<double>& y);

/// Smallest (lexicographically in C3, C2, C1) non-negative constants with
/// log(sup u(t1) / inf u(t2)) <= C2 log(t2/t1) + C3/(t2 - t1) + C1 (t2 - t1)
/// for every sampled pair t1 < t2.
struct HarnackFit {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  bool finite = false;
};
HarnackFit harnack_fit(const std::vector<double>& t, const std::vector<double>& sup_u,
                       const std::vector<double>& inf_u);

struct HarnackResult {
  double sup_t1 = 0.0;
  double inf_t2 = 0.0;
  HarnackFit fit;
  bool unverifiable = false;
  /// The inequality at (t1, t2) with the fitted constants.
  bool holds = false;
};

/// Snapshots with t > 0 form the fit grid; t1 and t2 must be snapshot times
/// with 0 < t1 < t2. Unverifiable if inf u(t2) <= 0; NonPositiveU if any
/// other snapshot in the grid is non-positive.
HarnackResult harnack_check(const std::vector<double>& times, const std::vector<ScalarField>& u,
                            double t1, double t2);

struct DecayFit {
  double eta = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples = 0;
  bool degenerate = true;
};

struct ContractionResult {
  /// max over m >= 2 of θ(m)/θ(m-1), over resolved θ(m-1); 0 if none.
  double delta = 0.0;
  /// Number of ratios that entered delta.
  int ratios = 0;
  DecayFit fit;
  std::vector<double> theta;
};

/// δ from θ at integer times and a log-linear fit of sup |∂φ̃/∂t|. Samples
/// at or below their round-off floor (or 1e-14) are unresolved; the fit
/// uses the second half of the resolved leading segment, at least its last
/// 10 samples. Throws SeriesTooShort if fewer than 3 integer times.
ContractionResult contraction_and_decay(const MonitorSeries& series);

/// Diagnostics of the positive surrogates on one unit window [m-1, m]:
///   ξ_m(x, τ) = sup u(·, m-1) - u(x, m-1+τ),  ψ_m(x, τ) = u(x, m-1+τ) - inf u(·, m-1).
struct WindowDiagnostics {
  int m = 0;
  double theta_start = 0.0;
  bool resolved = false;
  std::vector<double> tau;
  /// max_x (|∂f|² - α f_t) at each τ, for ξ_m and ψ_m.
  std::vector<double> bracket_xi;
  std::vector<double> bracket_psi;
  EnvelopeFit envelope_xi;
  EnvelopeFit envelope_psi;
  HarnackResult harnack_xi;
  HarnackResult harnack_psi;
  /// A surrogate was non-positive somewhere; `message` says where.
  bool nonpositive = false;
  std::string message;
};

struct RunReport {
  MonitorSeries series;
  ContractionResult contraction;
  std::vector<WindowDiagnostics> windows;
  double sup_F = 0.0;
  /// Smallest C with 1/C <= eig(g^{-1} g') <= C over the run.
  double C_star = 0.0;
};

/// Snapshot observer for FlowEngine::run. Records the pointwise monitors,
/// Q and the Hölder estimate as snapshots arrive; finish() adds the Li-Yau
/// and Harnack diagnostics, which need neighbouring snapshots.
class RunMonitor {
 public:
  RunMonitor(FlowEngine& engine, MonitorConfig cfg);
  ~RunMonitor();

  void operator()(const FlowState& s);
  RunReport finish();

 private:
  FlowEngine& engine_;
  MonitorConfig cfg_;
  std::unique_ptr<SpectralOps> ops_;
  HolderEstimator holder_;
  MonitorSeries series_;
  double sup_phitilde_ = -1e300;
  std::vector<double> times_;
  std::vector<ScalarField> u_;
  std::vector<MetricInverseField> gp_inv_;
};

/// Runs the flow from φ = 0 with a RunMonitor attached.
RunReport simulate(FlowEngine& engine, double horizon, const StepControl& ctrl,
                   const MonitorConfig& cfg, FlowState* final_state = nullptr);

}  // namespace maflow
