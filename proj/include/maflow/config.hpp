#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maflow/elliptic.hpp"
#include "maflow/flow.hpp"
#include "maflow/monitors.hpp"
#include "maflow/torus_geometry.hpp"
#include "maflow/trig.hpp"

namespace maflow {

/// `key = value` lines; `#` starts a comment, `[section]` prefixes the keys
/// that follow with "section.". Later duplicates override earlier ones.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const { return map_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return map_; }
  void set(const std::string& key, const std::string& value) { map_[key] = value; }

 private:
  std::map<std::string, std::string> map_;
};

enum class SourceKind { zero, trig, manufactured, random };

struct SourceSpec {
  SourceKind kind = SourceKind::zero;
  /// Trig terms of F (kind trig) or of ψ (kind manufactured).
  std::string terms;
  /// Manufactured: F = log det(g + ∂∂̄ψ)/det g - b.
  double b = 0.0;
  std::uint64_t seed = 0;
  int count = 6;
  int kmax = 1;
  double amplitude = 0.1;
};

struct RunConfig {
  int n = 1;
  int N = 32;
  double period = 0.0;
  MetricPreset metric = MetricPreset::flat();
  double lambda_floor = 0.1;
  SourceSpec source;
  double horizon = 1.0;
  StepControl step;
  MonitorConfig monitor;
  double elliptic_tol = 1e-10;
  EllipticOptions elliptic;
  /// Run the Newton solver next to the flow and report its b.
  bool elliptic_oracle = false;
  bool dump_fields = false;
  std::uint64_t seed = 0;
  int demo_count = 3;
  double demo_lambda_min = 0.2;
  double demo_lambda_max = 5.0;
  /// Acceptance criteria run by `verify`; empty means all.
  std::vector<int> verify_criteria;

  /// Effective configuration, one `key = value` per line in key order.
  std::string to_text() const;
};

/// Builds a RunConfig; `seed_override` replaces run.seed. Seeds not given
/// explicitly (source.seed, holder.rng_seed) default to run.seed.
/// Throws ConfigError on unknown keys, malformed values or unknown presets.
RunConfig load_run_config(const KeyValues& kv, std::optional<std::uint64_t> seed_override = {});

MetricField make_metric(const RunConfig& cfg);

struct SourceField {
  ScalarField F;
  /// Manufactured runs only: ψ̃ and the exact b.
  std::optional<ScalarField> psi_tilde;
  std::optional<double> b_exact;
};
SourceField make_source(const RunConfig& cfg, const MetricField& g);

}  // namespace maflow
