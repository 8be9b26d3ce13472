#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "maflow/grid.hpp"
#include "maflow/kernels.hpp"
#include "maflow/spectral.hpp"
#include "maflow/torus_geometry.hpp"

namespace maflow {

enum class TimeScheme { rk4, implicit_euler };

TimeScheme scheme_from_name(const std::string& name);
std::string scheme_name(TimeScheme s);

struct StepControl {
  double cfl_factor = 0.2;
  double dt_min = 1e-12;
  double dt_max = 0.01;
  double eps_pd = 1e-6;
  int retry_limit = 20;
  TimeScheme scheme = TimeScheme::rk4;
  /// Snapshots are emitted at exact multiples of this interval.
  double snapshot_interval = 0.1;
  /// Implicit scheme: Newton stops once the stage residual, divided by dt,
  /// is below this.
  double newton_tol = 1e-13;
  double tail_limit = 1e-6;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

struct FlowState {
  double t = 0.0;
  ScalarField phi;
  ScalarField phi_tilde;
  HermitianField gprime;
  ScalarField dphi_dt;
  long step_count = 0;
  /// Smallest eigenvalue of g' and largest tr(g'^{-1}) over the grid.
  double min_eig = 0.0;
  double max_inverse_trace = 0.0;
  double dt_last = 0.0;
  /// dt halvings spent by the step that produced this state.
  int halvings = 0;

  explicit FlowState(const TorusGrid& grid)
      : phi(grid), phi_tilde(grid), gprime(grid), dphi_dt(grid) {}
};

/// ∂φ/∂t = log det(g + ∂∂̄φ)/det g - F from φ = 0.
class FlowEngine {
 public:
  FlowEngine(MetricField g, ScalarField F);
  ~FlowEngine();
  FlowEngine(const FlowEngine&) = delete;
  FlowEngine& operator=(const FlowEngine&) = delete;

  const TorusGrid& grid() const { return g_.grid(); }
  const MetricField& metric() const { return g_; }
  const ScalarField& source() const { return F_; }
  const VolumeWeights& weights() const { return w_; }
  const MetricInverseField& metric_inverse() const { return g_inv_; }
  SpectralOps& ops() { return *ops_; }

  /// State at φ ≡ 0.
  FlowState initial_state();
  /// Assembles g', ∂φ/∂t and φ̃ for a given φ; throws PositivityViolation.
  FlowState make_state(double t, const ScalarField& phi);

  /// rhs = log det(g + ∂∂̄φ)/det g - F; gprime receives g + ∂∂̄φ.
  kernels::RhsStats rhs(const std::vector<double>& phi, HermitianField& gprime,
                        std::vector<double>& out);

  double cfl_dt(const FlowState& s, const StepControl& c) const;
  /// One step of the configured scheme with dt from cfl_dt (RK4) or
  /// dt_max (implicit), halving on failure. Throws StepFailure.
  FlowState step(const FlowState& s, const StepControl& c);
  /// Same, starting from a caller-proposed dt.
  FlowState step(const FlowState& s, const StepControl& c, double dt);

  /// Integrates to `horizon`, calling on_snapshot at t = 0 and every
  /// snapshot_interval. Throws StepFailure or TailAlarm.
  FlowState run(double horizon, const StepControl& c,
                const std::function<void(const FlowState&)>& on_snapshot = {});

 private:
  bool try_rk4(const FlowState& s, const StepControl& c, double dt, FlowState& out,
               std::size_t& bad);
  bool try_implicit(const FlowState& s, const StepControl& c, double dt, FlowState& out,
                    std::size_t& bad);
  void finish_state(FlowState& s);

  MetricField g_;
  ScalarField F_;
  VolumeWeights w_;
  MetricInverseField g_inv_;
  std::unique_ptr<SpectralOps> ops_;
  HessianField hess_;
};

/// Stand-alone right-hand side: (rhs, g'). Throws PositivityViolation with
/// the offending grid index.
std::pair<ScalarField, HermitianField> flow_rhs(const ScalarField& phi, const MetricField& g,
                                                const ScalarField& F);

}  // namespace maflow
