#include "maflow/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace maflow {

namespace {

using json = nlohmann::json;

Check upper(std::string name, double measured, double limit) {
  return {std::move(name), measured <= limit, measured, limit, false};
}

json config_json(const RunConfig& cfg) {
  json c = json::object();
  const KeyValues kv = KeyValues::parse(cfg.to_text());
  for (const auto& [k, v] : kv.entries()) c[k] = v;
  return c;
}

std::string summary(const FlowRun& run) {
  const RunReport& rep = run.report;
  const ContractionResult& cr = rep.contraction;
  json j;
  j["delta"] = cr.delta;
  j["eta"] = cr.fit.eta;
  j["C"] = cr.fit.C;
  j["r_squared"] = cr.fit.r_squared;
  j["C_star"] = rep.C_star;
  if (run.oracle) j["b"] = run.oracle->b;
  j["b_flow"] = run.b_flow;
  j["sup_F"] = rep.sup_F;
  j["decay_fit"] = {{"t_lo", cr.fit.t_lo},
                    {"t_hi", cr.fit.t_hi},
                    {"samples", cr.fit.samples},
                    {"degenerate", cr.fit.degenerate}};
  j["theta_integer_times"] = cr.theta;
  j["steps"] = run.final_state.step_count;

  if (run.oracle) {
    j["elliptic_oracle"] = {{"b", run.oracle->b},
                            {"b_newton", run.oracle->b_newton},
                            {"residual_sup", run.oracle->residual_sup},
                            {"newton_iters", run.oracle->newton_iters},
                            {"phi_tilde_diff", sup_difference(run.final_state.phi_tilde,
                                                              run.oracle->phi_tilde_inf)},
                            {"b_diff", std::abs(run.b_flow - run.oracle->b)}};
  }
  if (run.psi_tilde) {
    j["manufactured"] = {{"b_exact", *run.b_exact},
                         {"b_error", std::abs(run.b_flow - *run.b_exact)},
                         {"phi_tilde_error",
                          sup_difference(run.final_state.phi_tilde, *run.psi_tilde)}};
  }

  json windows = json::array();
  for (const auto& w : rep.windows) {
    json wj = {{"m", w.m}, {"theta_start", w.theta_start}, {"resolved", w.resolved}};
    if (w.resolved) {
      wj["nonpositive"] = w.nonpositive;
      wj["liyau_xi"] = {{"C1", w.envelope_xi.C1},
                        {"C2", w.envelope_xi.C2},
                        {"certified", w.envelope_xi.certified}};
      wj["liyau_psi"] = {{"C1", w.envelope_psi.C1},
                         {"C2", w.envelope_psi.C2},
                         {"certified", w.envelope_psi.certified}};
      wj["harnack_xi"] = {{"C1", w.harnack_xi.fit.C1},
                          {"C2", w.harnack_xi.fit.C2},
                          {"C3", w.harnack_xi.fit.C3},
                          {"holds", w.harnack_xi.holds},
                          {"unverifiable", w.harnack_xi.unverifiable}};
      wj["harnack_psi"] = {{"C1", w.harnack_psi.fit.C1},
                           {"C2", w.harnack_psi.fit.C2},
                           {"C3", w.harnack_psi.fit.C3},
                           {"holds", w.harnack_psi.holds},
                           {"unverifiable", w.harnack_psi.unverifiable}};
    }
    windows.push_back(std::move(wj));
  }
  j["windows"] = std::move(windows);

  json inv = json::array();
  for (const auto& c : run.invariants) {
    inv.push_back({{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}, {"limit", c.limit}});
  }
  j["invariants"] = std::move(inv);
  j["config"] = config_json(run.config);
  return j.dump(2) + "\n";
}

}  // namespace

std::string format_check(const Check& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s: %.6g %s %.6g", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.measured, c.lower_bound ? ">=" : "<=", c.limit);
  return buf;
}

double sup_difference(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

FlowRun run_flow(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  MetricField g = make_metric(cfg);
  SourceField src = make_source(cfg, g);
  FlowRun run(g.grid());
  run.config = cfg;
  run.psi_tilde = src.psi_tilde;
  run.b_exact = src.b_exact;

  if (cfg.elliptic_oracle) {
    run.oracle = solve_elliptic(g, src.F, cfg.elliptic_tol, nullptr, cfg.elliptic);
  }

  FlowEngine engine(std::move(g), std::move(src.F));
  run.report = simulate(engine, cfg.horizon, cfg.step, cfg.monitor, &run.final_state);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.b_flow = integrate(run.final_state.dphi_dt, engine.weights());

  run.invariants = flow_invariants(run);
  run.csv = run.report.series.to_csv();
  run.summary_json = summary(run);
  return run;
}

std::vector<Check> flow_invariants(const FlowRun& run) {
  const auto& rec = run.report.series.records;
  const double n = run.config.n;
  double over = -std::numeric_limits<double>::infinity();
  double mean = 0.0, ident = 0.0, rise = 0.0;
  double eig_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const auto& r = rec[k];
    over = std::max(over, r.sup_dphidt - run.report.sup_F);
    mean = std::max(mean, std::abs(r.mean_phitilde));
    ident = std::max(ident, std::abs(r.trace_max - n - r.max_laplacian_phitilde));
    if (k > 0) rise = std::max(rise, r.osc_u - rec[k - 1].osc_u);
    eig_min = std::min(eig_min, r.eig_min);
  }
  std::vector<Check> out;
  out.push_back(upper("max_principle (sup|dphi/dt| - sup|F|)", over, kTolMaxPrinciple));
  out.push_back(upper("mean_phitilde", mean, kTolMean));
  out.push_back(upper("trace_identity |trace_max - n - max lap phitilde|", ident,
                      kTolTraceIdentity));
  out.push_back(upper("oscillation_monotone (largest rise of osc_u)", rise, kTolMaxPrinciple));
  Check eq{"metric_equivalence (min eig of g^-1 g')", eig_min > 0.0 && std::isfinite(run.report.C_star),
           eig_min, 0.0, true};
  out.push_back(eq);
  if (run.oracle) {
    out.push_back(upper("b_consistency |integral(log ratio - F) - b_newton|",
                        std::abs(run.oracle->b - run.oracle->b_newton), 10.0 * run.config.elliptic_tol));
  }
  return out;
}

}  // namespace maflow
