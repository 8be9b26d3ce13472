#include "maflow/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "maflow/errors.hpp"

namespace maflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

SourceKind source_kind(const std::string& v) {
  if (v == "zero") return SourceKind::zero;
  if (v == "trig") return SourceKind::trig;
  if (v == "manufactured") return SourceKind::manufactured;
  if (v == "random") return SourceKind::random;
  throw ConfigError("unknown source kind '" + v + "'");
}

std::string source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::zero: return "zero";
    case SourceKind::trig: return "trig";
    case SourceKind::manufactured: return "manufactured";
    case SourceKind::random: return "random";
  }
  return "zero";
}

std::vector<int> to_criteria(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (v == "all") return out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const long long c = to_int(key, item);
    if (c < 1 || c > 11) throw ConfigError(key + ": criterion " + item + " does not exist");
    out.push_back(static_cast<int>(c));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::stringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    kv.map_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

RunConfig load_run_config(const KeyValues& kv, std::optional<std::uint64_t> seed_override) {
  RunConfig c;
  c.period = 2.0 * std::numbers::pi;
  std::string preset = "flat";
  std::optional<double> param;
  bool source_seed = false, holder_seed = false;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"grid.n", [&](auto& k, auto& v) { c.n = static_cast<int>(to_int(k, v)); }},
      {"grid.N", [&](auto& k, auto& v) { c.N = static_cast<int>(to_int(k, v)); }},
      {"grid.period", [&](auto& k, auto& v) { c.period = to_double(k, v); }},
      {"metric.preset", [&](auto&, auto& v) { preset = v; }},
      {"metric.param", [&](auto& k, auto& v) { param = to_double(k, v); }},
      {"metric.lambda_floor", [&](auto& k, auto& v) { c.lambda_floor = to_double(k, v); }},
      {"source.kind", [&](auto&, auto& v) { c.source.kind = source_kind(v); }},
      {"source.terms", [&](auto&, auto& v) { c.source.terms = v; }},
      {"source.b", [&](auto& k, auto& v) { c.source.b = to_double(k, v); }},
      {"source.seed",
       [&](auto& k, auto& v) {
         c.source.seed = to_u64(k, v);
         source_seed = true;
       }},
      {"source.count", [&](auto& k, auto& v) { c.source.count = static_cast<int>(to_int(k, v)); }},
      {"source.kmax", [&](auto& k, auto& v) { c.source.kmax = static_cast<int>(to_int(k, v)); }},
      {"source.amplitude", [&](auto& k, auto& v) { c.source.amplitude = to_double(k, v); }},
      {"flow.horizon", [&](auto& k, auto& v) { c.horizon = to_double(k, v); }},
      {"step.scheme", [&](auto&, auto& v) { c.step.scheme = scheme_from_name(v); }},
      {"step.cfl_factor", [&](auto& k, auto& v) { c.step.cfl_factor = to_double(k, v); }},
      {"step.dt_min", [&](auto& k, auto& v) { c.step.dt_min = to_double(k, v); }},
      {"step.dt_max", [&](auto& k, auto& v) { c.step.dt_max = to_double(k, v); }},
      {"step.eps_pd", [&](auto& k, auto& v) { c.step.eps_pd = to_double(k, v); }},
      {"step.retry_limit",
       [&](auto& k, auto& v) { c.step.retry_limit = static_cast<int>(to_int(k, v)); }},
      {"step.snapshot_interval",
       [&](auto& k, auto& v) { c.step.snapshot_interval = to_double(k, v); }},
      {"step.newton_tol", [&](auto& k, auto& v) { c.step.newton_tol = to_double(k, v); }},
      {"step.tail_limit", [&](auto& k, auto& v) { c.step.tail_limit = to_double(k, v); }},
      {"holder.alpha", [&](auto& k, auto& v) { c.monitor.holder.alpha = to_double(k, v); }},
      {"holder.epsilon", [&](auto& k, auto& v) { c.monitor.holder.epsilon = to_double(k, v); }},
      {"holder.sample_pairs",
       [&](auto& k, auto& v) { c.monitor.holder.sample_pairs = static_cast<int>(to_int(k, v)); }},
      {"holder.rng_seed",
       [&](auto& k, auto& v) {
         c.monitor.holder.rng_seed = to_u64(k, v);
         holder_seed = true;
       }},
      {"monitor.A", [&](auto& k, auto& v) { c.monitor.A = to_double(k, v); }},
      {"monitor.alpha_ly", [&](auto& k, auto& v) { c.monitor.alpha_ly = to_double(k, v); }},
      {"elliptic.tol", [&](auto& k, auto& v) { c.elliptic_tol = to_double(k, v); }},
      {"elliptic.max_iter",
       [&](auto& k, auto& v) { c.elliptic.max_iter = static_cast<int>(to_int(k, v)); }},
      {"elliptic.linear_tol", [&](auto& k, auto& v) { c.elliptic.linear_tol = to_double(k, v); }},
      {"elliptic.oracle", [&](auto& k, auto& v) { c.elliptic_oracle = to_bool(k, v); }},
      {"output.dump_fields", [&](auto& k, auto& v) { c.dump_fields = to_bool(k, v); }},
      {"run.seed", [&](auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"demo.count", [&](auto& k, auto& v) { c.demo_count = static_cast<int>(to_int(k, v)); }},
      {"demo.lambda_min", [&](auto& k, auto& v) { c.demo_lambda_min = to_double(k, v); }},
      {"demo.lambda_max", [&](auto& k, auto& v) { c.demo_lambda_max = to_double(k, v); }},
      {"verify.criteria", [&](auto& k, auto& v) { c.verify_criteria = to_criteria(k, v); }},
  };

  for (const auto& [key, value] : kv.entries()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }

  if (seed_override) c.seed = *seed_override;
  if (!source_seed) c.source.seed = c.seed;
  if (!holder_seed) c.monitor.holder.rng_seed = c.seed;

  if (!param) {
    param = preset == "kahler_bump" ? MetricPreset::kahler_bump().param
            : preset == "hermitian_nonkahler" ? MetricPreset::hermitian_nonkahler().param
                                             : 0.0;
  }
  c.metric = MetricPreset::from_name(preset, *param);

  if (c.n != 1 && c.n != 2) throw ConfigError("grid.n must be 1 or 2");
  if (c.N < 8 || c.N % 2 != 0) throw ConfigError("grid.N must be even and at least 8");
  if (!(c.period > 0.0)) throw ConfigError("grid.period must be positive");
  if (!(c.horizon > 0.0)) throw ConfigError("flow.horizon must be positive");
  if (!(c.elliptic_tol > 0.0)) throw ConfigError("elliptic.tol must be positive");
  if ((c.source.kind == SourceKind::trig || c.source.kind == SourceKind::manufactured) &&
      c.source.terms.empty()) {
    throw ConfigError("source.terms is required for source.kind = " +
                      source_kind_name(c.source.kind));
  }
  if (c.source.count < 1 || c.source.kmax < 1) {
    throw ConfigError("source.count and source.kmax must be positive");
  }
  if (c.demo_count < 1) throw ConfigError("demo.count must be positive");
  if (!(c.demo_lambda_min > 0.0 && c.demo_lambda_min <= c.demo_lambda_max)) {
    throw ConfigError("need 0 < demo.lambda_min <= demo.lambda_max");
  }
  c.step.validate();
  c.monitor.validate(c.horizon);
  return c;
}

std::string RunConfig::to_text() const {
  std::map<std::string, std::string> m;
  m["grid.n"] = std::to_string(n);
  m["grid.N"] = std::to_string(N);
  m["grid.period"] = fmt(period);
  m["metric.preset"] = metric.name();
  m["metric.param"] = fmt(metric.param);
  m["metric.lambda_floor"] = fmt(lambda_floor);
  m["source.kind"] = source_kind_name(source.kind);
  if (!source.terms.empty()) m["source.terms"] = source.terms;
  m["source.b"] = fmt(source.b);
  m["source.seed"] = std::to_string(source.seed);
  m["source.count"] = std::to_string(source.count);
  m["source.kmax"] = std::to_string(source.kmax);
  m["source.amplitude"] = fmt(source.amplitude);
  m["flow.horizon"] = fmt(horizon);
  m["step.scheme"] = scheme_name(step.scheme);
  m["step.cfl_factor"] = fmt(step.cfl_factor);
  m["step.dt_min"] = fmt(step.dt_min);
  m["step.dt_max"] = fmt(step.dt_max);
  m["step.eps_pd"] = fmt(step.eps_pd);
  m["step.retry_limit"] = std::to_string(step.retry_limit);
  m["step.snapshot_interval"] = fmt(step.snapshot_interval);
  m["step.newton_tol"] = fmt(step.newton_tol);
  m["step.tail_limit"] = fmt(step.tail_limit);
  m["holder.alpha"] = fmt(monitor.holder.alpha);
  m["holder.epsilon"] = fmt(monitor.holder.epsilon);
  m["holder.sample_pairs"] = std::to_string(monitor.holder.sample_pairs);
  m["holder.rng_seed"] = std::to_string(monitor.holder.rng_seed);
  m["monitor.A"] = fmt(monitor.A);
  m["monitor.alpha_ly"] = fmt(monitor.alpha_ly);
  m["elliptic.tol"] = fmt(elliptic_tol);
  m["elliptic.max_iter"] = std::to_string(elliptic.max_iter);
  m["elliptic.linear_tol"] = fmt(elliptic.linear_tol);
  m["elliptic.oracle"] = elliptic_oracle ? "true" : "false";
  m["output.dump_fields"] = dump_fields ? "true" : "false";
  m["run.seed"] = std::to_string(seed);
  m["demo.count"] = std::to_string(demo_count);
  m["demo.lambda_min"] = fmt(demo_lambda_min);
  m["demo.lambda_max"] = fmt(demo_lambda_max);
  std::string crit;
  for (int v : verify_criteria) crit += (crit.empty() ? "" : ",") + std::to_string(v);
  m["verify.criteria"] = crit.empty() ? "all" : crit;

  std::string out;
  for (const auto& [k, v] : m) out += k + " = " + v + "\n";
  return out;
}

MetricField make_metric(const RunConfig& cfg) {
  const TorusGrid grid(cfg.n, cfg.N, cfg.period);
  return build_metric(grid, cfg.metric, cfg.lambda_floor);
}

SourceField make_source(const RunConfig& cfg, const MetricField& g) {
  const TorusGrid& grid = g.grid();
  const int d = grid.real_dim();
  switch (cfg.source.kind) {
    case SourceKind::zero:
      return {ScalarField(grid), {}, {}};
    case SourceKind::trig:
      return {TrigPoly::parse(cfg.source.terms, d, cfg.period).sample(grid), {}, {}};
    case SourceKind::random:
      return {TrigPoly::random(cfg.source.seed, d, cfg.period, cfg.source.count, cfg.source.kmax,
                               cfg.source.amplitude)
                  .sample(grid),
              {},
              {}};
    case SourceKind::manufactured: {
      const ScalarField psi = TrigPoly::parse(cfg.source.terms, d, cfg.period).sample(grid);
      auto [ratio, gp] = flow_rhs(psi, g, ScalarField(grid));
      for (double& v : ratio.values) v -= cfg.source.b;
      const double m = integrate(psi, volume_weights(g));
      ScalarField pt = psi;
      for (double& v : pt.values) v -= m;
      return {std::move(ratio), std::move(pt), cfg.source.b};
    }
  }
  throw ConfigError("unhandled source kind");
}

}  // namespace maflow
