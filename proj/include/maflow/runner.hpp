#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maflow/config.hpp"
#include "maflow/elliptic.hpp"
#include "maflow/flow.hpp"
#include "maflow/monitors.hpp"

namespace maflow {

/// One measured property with its limit.
struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  /// The limit is a lower bound (measured >= limit) rather than an upper one.
  bool lower_bound = false;
};

/// "PASS name: measured <= limit" style line.
std::string format_check(const Check& c);

struct FlowRun {
  RunConfig config;
  RunReport report;
  FlowState final_state;
  /// ∫ ∂φ/∂t ω^n at the horizon.
  double b_flow = 0.0;
  std::optional<EllipticSolution> oracle;
  std::optional<ScalarField> psi_tilde;
  std::optional<double> b_exact;
  std::vector<Check> invariants;
  std::string csv;
  std::string summary_json;
  /// Wall time of the whole run, in seconds.
  double seconds = 0.0;

  explicit FlowRun(const TorusGrid& grid) : final_state(grid) {}
};

inline constexpr double kTolMaxPrinciple = 1e-8;
inline constexpr double kTolMean = 1e-12;
inline constexpr double kTolTraceIdentity = 1e-10;

/// Builds metric and source, integrates to the horizon with monitors
/// attached, optionally runs the Newton oracle, and assembles the CSV and
/// JSON summary. Solver errors propagate.
FlowRun run_flow(const RunConfig& cfg);

/// Max principle, mean of φ̃, trace identity, oscillation monotonicity,
/// metric equivalence and (with the oracle) b-consistency.
std::vector<Check> flow_invariants(const FlowRun& run);

/// Largest |φ̃_a - φ̃_b| over the grid.
double sup_difference(const ScalarField& a, const ScalarField& b);

}  // namespace maflow
