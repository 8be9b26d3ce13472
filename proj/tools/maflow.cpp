// maflow <mode> --config <path> [--out <dir>] [--seed <u64>]
//
// Exit codes: 0 success, 1 verification failure, 2 config error,
// 3 solver or step failure.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "maflow/acceptance.hpp"
#include "maflow/config.hpp"
#include "maflow/errors.hpp"
#include "maflow/frame.hpp"
#include "maflow/io.hpp"
#include "maflow/kernels.hpp"
#include "maflow/normal_frame.hpp"
#include "maflow/runner.hpp"

namespace fs = std::filesystem;
using namespace maflow;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void apply_thread_cap() {
  const char* env = std::getenv("MAFLOW_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw ConfigError("MAFLOW_THREADS must be a non-negative integer");
  kernels::set_thread_cap(static_cast<int>(v));
}

std::string complex_str(cd z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.6f%+.6fi", z.real(), z.imag());
  return buf;
}

void print_matrix(const char* label, const HermMat& m) {
  std::printf("  %s =", label);
  for (int i = 0; i < m.rows(); ++i) {
    std::printf(i == 0 ? " [" : "\n  %*s   [", static_cast<int>(std::strlen(label)), "");
    for (int j = 0; j < m.cols(); ++j) std::printf(" %s", complex_str(m(i, j)).c_str());
    std::printf(" ]");
  }
  std::printf("\n");
}

int mode_flow(const RunConfig& cfg, const fs::path& out) {
  const FlowRun run = run_flow(cfg);
  write_text_file((out / "monitors.csv").string(), run.csv);
  write_text_file((out / "summary.json").string(), run.summary_json);
  if (cfg.dump_fields) {
    write_field_dump((out / "phi_tilde.f64").string(), run.final_state.phi_tilde);
    write_field_dump((out / "dphi_dt.f64").string(), run.final_state.dphi_dt);
    write_field_dump((out / "gprime.f64").string(), run.final_state.gprime);
  }
  const auto& c = run.report.contraction;
  std::printf("flow to t = %g in %ld steps (%.2f s)\n", run.final_state.t,
              run.final_state.step_count, run.seconds);
  std::printf("delta = %.6g  eta = %.6g  r^2 = %.6g%s  C* = %.6g  b_flow = %.12g\n", c.delta,
              c.fit.eta, c.fit.r_squared, c.fit.degenerate ? " (degenerate fit)" : "",
              run.report.C_star, run.b_flow);
  if (run.oracle) std::printf("Newton oracle: b = %.12g\n", run.oracle->b);
  if (run.psi_tilde) {
    std::printf("manufactured: |phitilde - psitilde|_inf = %.3e  |b - b_exact| = %.3e\n",
                sup_difference(run.final_state.phi_tilde, *run.psi_tilde),
                std::abs(run.b_flow - *run.b_exact));
  }
  bool ok = true;
  for (const auto& chk : run.invariants) {
    std::printf("%s\n", format_check(chk).c_str());
    ok = ok && chk.pass;
  }
  std::printf("wrote %s\n", out.string().c_str());
  return ok ? 0 : kExitVerify;
}

int mode_solve(const RunConfig& cfg, const fs::path& out) {
  const MetricField g = make_metric(cfg);
  const SourceField src = make_source(cfg, g);
  const EllipticSolution sol = solve_elliptic(g, src.F, cfg.elliptic_tol, nullptr, cfg.elliptic);
  write_field_dump((out / "elliptic_phi_tilde.f64").string(), sol.phi_tilde_inf);
  nlohmann::json j = {{"b", sol.b},
                      {"b_newton", sol.b_newton},
                      {"residual_sup", sol.residual_sup},
                      {"newton_iters", sol.newton_iters},
                      {"config", cfg.to_text()}};
  if (src.psi_tilde) {
    j["manufactured"] = {{"phi_tilde_error", sup_difference(sol.phi_tilde_inf, *src.psi_tilde)},
                         {"b_error", std::abs(sol.b - *src.b_exact)}};
  }
  write_text_file((out / "elliptic.json").string(), j.dump(2) + "\n");
  std::printf("Newton: %d iterations, b = %.15g, residual = %.3e\n", sol.newton_iters, sol.b,
              sol.residual_sup);
  if (src.psi_tilde) {
    std::printf("manufactured: |phitilde - psitilde|_inf = %.3e\n",
                sup_difference(sol.phi_tilde_inf, *src.psi_tilde));
  }
  const Check chk{"b_consistency |integral(log ratio - F) - b_newton|",
                  std::abs(sol.b - sol.b_newton) <= 10.0 * cfg.elliptic_tol,
                  std::abs(sol.b - sol.b_newton), 10.0 * cfg.elliptic_tol, false};
  std::printf("%s\n", format_check(chk).c_str());
  return chk.pass ? 0 : kExitVerify;
}

int mode_verify(const RunConfig& cfg, const fs::path& out) {
  AcceptanceSuite suite(&std::cerr);
  std::string report;
  bool ok = true;
  std::vector<int> ids = cfg.verify_criteria;
  if (ids.empty()) {
    for (int i = 1; i <= 11; ++i) ids.push_back(i);
  }
  for (int id : ids) {
    const CriterionResult r = suite.run(id);
    const std::string text = format_result(r);
    std::printf("%s\n", text.c_str());
    std::fflush(stdout);
    report += text + "\n";
    ok = ok && r.pass;
  }
  report += ok ? "ALL PASS\n" : "SOME CRITERIA FAILED\n";
  write_text_file((out / "verify_report.txt").string(), report);
  std::printf("%s", ok ? "ALL PASS\n" : "SOME CRITERIA FAILED\n");
  return ok ? 0 : kExitVerify;
}

int mode_decompose(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  bool ok = true;
  for (int k = 0; k < cfg.demo_count; ++k) {
    const HermMat a = random_pd_matrix(rng, cfg.n, cfg.demo_lambda_min, cfg.demo_lambda_max);
    const FrameDecomposition d = frame_decompose(a, {cfg.demo_lambda_min, cfg.demo_lambda_max});
    const double err = (d.reconstruct() - a).cwiseAbs().maxCoeff();
    double bmin = d.betas.front(), bmax = bmin;
    for (double b : d.betas) {
      bmin = std::min(bmin, b);
      bmax = std::max(bmax, b);
    }
    std::printf("matrix %d\n", k);
    print_matrix("a", a);
    std::printf("  level %d, %zu frame vectors, delta = %.6g\n", d.level, d.frame.size(), d.delta);
    std::printf("  beta in [%.6g, %.6g], certified bounds C1 = %.6g, C2 = %.6g\n", bmin, bmax, d.C1,
                d.C2);
    std::printf("  reconstruction error %.3e\n", err);
    ok = ok && err <= 1e-12 && bmin >= d.C1 && bmax <= d.C2;
  }
  return ok ? 0 : kExitVerify;
}

int mode_normal_frame(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  bool ok = true;
  for (int k = 0; k < cfg.demo_count; ++k) {
    const NormalFrameInstance inst = random_normal_frame_instance(rng, cfg.n);
    const NormalFrame nf = normal_frame(inst.g0, inst.dg0, inst.hess0);
    const NormalFrameResiduals res = normal_frame_residuals(nf, inst, 1e-3);
    std::printf("instance %d\n", k);
    print_matrix("g0", inst.g0);
    print_matrix("J ", nf.linear_map);
    std::printf("  b^p_{qr}:");
    for (int p = 0; p < nf.dim; ++p) {
      for (int q = 0; q < nf.dim; ++q) {
        for (int r = 0; r < nf.dim; ++r) std::printf(" %s", complex_str(nf.b(p, q, r)).c_str());
      }
    }
    std::printf("\n  |g~(0) - I| = %.3e  offdiag Hessian = %.3e  |d_j g~_{i ibar}(0)| = %.3e\n",
                res.metric, res.hessian_offdiag, res.first_derivative);
    ok = ok && res.metric <= 1e-10 && res.hessian_offdiag <= 1e-10 && res.first_derivative <= 1e-6;
  }
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parabolic complex Monge-Ampere flow on flat tori"};
  std::string mode, config_path, out_dir = "maflow_out";
  std::uint64_t seed = 0;
  app.add_option("mode", mode, "flow | solve-elliptic | verify | decompose-demo | normal-frame-demo")
      ->required()
      ->check(CLI::IsMember(
          {"flow", "solve-elliptic", "verify", "decompose-demo", "normal-frame-demo"}));
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "overrides run.seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    apply_thread_cap();
    const KeyValues kv = KeyValues::load(config_path);
    const RunConfig cfg =
        load_run_config(kv, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
    const fs::path out(out_dir);
    if (mode == "flow" || mode == "solve-elliptic" || mode == "verify") {
      std::error_code ec;
      fs::create_directories(out, ec);
      if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    }
    if (mode == "flow") return mode_flow(cfg, out);
    if (mode == "solve-elliptic") return mode_solve(cfg, out);
    if (mode == "verify") return mode_verify(cfg, out);
    if (mode == "decompose-demo") return mode_decompose(cfg);
    return mode_normal_frame(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }
}
