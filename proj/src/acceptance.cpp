#include "maflow/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "maflow/elliptic.hpp"
#include "maflow/errors.hpp"
#include "maflow/frame.hpp"
#include "maflow/trig.hpp"

namespace maflow {

namespace {

// Tolerances and budgets, one block per criterion.
constexpr double kC1PhiTol = 1e-6, kC1BTol = 1e-8, kC1Seconds = 60.0;
constexpr double kC2PhiTol = 1e-5, kC2BTol = 1e-6, kC2Seconds = 600.0;
constexpr double kC3MinR2 = 0.99;
constexpr double kC5MinEig = 0.01, kC5Plateau = 1e-9;
constexpr double kC6Growth = 0.05;
constexpr int kC7Count = 1000;
constexpr double kC7Lo = 0.2, kC7Hi = 5.0, kC7Tol = 1e-12, kC7Seconds = 5.0;
constexpr int kC8Count = 100;
constexpr double kC8Tol = 1e-10, kC8FdTol = 1e-6, kC8Step = 1e-3, kC8Seconds = 10.0;
constexpr int kC9Count = 20;
constexpr double kC9Tol = 1e-5;

constexpr std::uint64_t kSeedC7 = 7001, kSeedC8 = 8001, kSeedC9 = 9001;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Check upper(std::string name, double measured, double limit) {
  return {std::move(name), measured <= limit, measured, limit, false};
}
Check lower(std::string name, double measured, double limit) {
  return {std::move(name), measured >= limit, measured, limit, true};
}
Check flag(std::string name, bool ok) { return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0, true}; }

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on the library's portable uniforms.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Largest value over [H/2, H] relative to the largest over [0, H/2).
template <typename Get>
double late_rise(const std::vector<MonitorRecord>& rec, double horizon, Get get) {
  double early = -std::numeric_limits<double>::infinity();
  double late = early;
  for (const auto& r : rec) {
    const double v = get(r);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    if (r.t < 0.5 * horizon - 1e-9) {
      early = std::max(early, v);
    } else {
      late = std::max(late, v);
    }
  }
  return (late - early) / std::abs(early);
}

const Check* find_check(const std::vector<Check>& checks, const std::string& prefix) {
  for (const auto& c : checks) {
    if (c.name.rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

}  // namespace

HermMat random_pd_matrix(std::mt19937_64& rng, int n, double lo, double hi) {
  HermMat z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = cd(gaussian(rng), gaussian(rng));
  }
  const HermMat q = Eigen::HouseholderQR<HermMat>(z).householderQ();
  HermMat d = HermMat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = uniform(rng, lo, hi);
  HermMat a = q * d * q.adjoint();
  return 0.5 * (a + a.adjoint());
}

NormalFrameInstance random_normal_frame_instance(std::mt19937_64& rng, int n) {
  NormalFrameInstance inst;
  inst.g0 = random_pd_matrix(rng, n, 0.5, 2.0);
  for (int k = 0; k < n; ++k) {
    CMat t(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) t(i, j) = cd(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
    }
    inst.dg0.push_back(t);
  }
  HermMat h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = uniform(rng, -1.0, 1.0);
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = cd(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
      h(j, i) = std::conj(h(i, j));
    }
  }
  inst.hess0 = h;
  return inst;
}

NormalFrameResiduals normal_frame_residuals(const NormalFrame& nf,
                                            const NormalFrameInstance& inst, double h) {
  const int n = nf.dim;
  NormalFrameResiduals r;
  const HermMat gt = pull_back(nf.linear_map, inst.g0);
  const HermMat ht = pull_back(nf.linear_map, inst.hess0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r.metric = std::max(r.metric, std::abs(gt(i, j) - (i == j ? 1.0 : 0.0)));
      if (i != j) r.hessian_offdiag = std::max(r.hessian_offdiag, std::abs(ht(i, j)));
    }
  }

  auto metric_at = [&](const std::array<cd, 2>& w) {
    const auto z = nf.map(w);
    HermMat g = inst.g0;
    for (int k = 0; k < n; ++k) {
      g += z[k] * inst.dg0[k] + std::conj(z[k]) * inst.dg0[k].adjoint();
    }
    return pull_back(nf.jacobian(w), g);
  };
  for (int j = 0; j < n; ++j) {
    // ∂_j = (∂_x - i ∂_y)/2 along w^j = x + i y.
    auto along = [&](cd step) {
      std::array<cd, 2> w{0.0, 0.0};
      w[j] = step;
      return metric_at(w);
    };
    // Fourth-order stencil; g̃ is a polynomial of degree 4 along each line.
    auto diff = [&](cd e) {
      return HermMat((along(-2.0 * e) - 8.0 * along(-e) + 8.0 * along(e) - along(2.0 * e)) /
                     (12.0 * h));
    };
    const HermMat dx = diff(h);
    const HermMat dy = diff(cd(0, h));
    for (int i = 0; i < n; ++i) {
      const cd d = 0.5 * (dx(i, i) - cd(0, 1) * dy(i, i));
      r.first_derivative = std::max(r.first_derivative, std::abs(d));
    }
  }
  return r;
}

std::string format_result(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s criterion %d: %s (%.2f s)", r.pass ? "PASS" : "FAIL", r.id,
                r.title.c_str(), r.seconds);
  std::string out = buf;
  for (const auto& c : r.checks) out += "\n    " + format_check(c);
  return out;
}

RunConfig acceptance_config(int which) {
  KeyValues kv;
  if (which == 1) {
    kv = KeyValues::parse(R"(
      grid.n = 1
      grid.N = 64
      metric.preset = hermitian_nonkahler
      metric.param = 0.3
      source.kind = manufactured
      source.terms = 0.004 1 0 0; 0.002 0 1 0.5; 0.001 1 1 1.0
      source.b = 0
      flow.horizon = 30
      step.scheme = implicit_euler
      run.seed = 1
    )");
  } else if (which == 2) {
    kv = KeyValues::parse(R"(
      grid.n = 2
      grid.N = 16
      metric.preset = hermitian_nonkahler
      metric.param = 0.3
      source.kind = random
      source.seed = 7
      source.count = 6
      source.kmax = 1
      source.amplitude = 0.1
      flow.horizon = 4
      step.scheme = implicit_euler
      holder.alpha = 0.5
      holder.epsilon = 0.5
      elliptic.oracle = true
      elliptic.tol = 1e-10
      run.seed = 2
    )");
  } else {
    throw std::invalid_argument("acceptance runs are numbered 1 and 2");
  }
  return load_run_config(kv);
}

AcceptanceSuite::AcceptanceSuite(std::ostream* progress) : progress_(progress) {}
AcceptanceSuite::~AcceptanceSuite() = default;

const FlowRun& AcceptanceSuite::flow_run(int which) {
  auto& slot = which == 1 ? run1_ : run2_;
  if (!slot) {
    if (progress_) *progress_ << "running reference flow " << which << "...\n" << std::flush;
    slot = std::make_unique<FlowRun>(run_flow(acceptance_config(which)));
    if (progress_) {
      *progress_ << "reference flow " << which << " done in " << slot->seconds << " s\n"
                 << std::flush;
    }
  }
  return *slot;
}

std::vector<CriterionResult> AcceptanceSuite::run(const std::vector<int>& ids) {
  std::vector<int> list = ids;
  if (list.empty()) {
    for (int i = 1; i <= 11; ++i) list.push_back(i);
  }
  std::vector<CriterionResult> out;
  for (int id : list) out.push_back(run(id));
  return out;
}

CriterionResult AcceptanceSuite::run(int id) {
  CriterionResult r;
  r.id = id;
  const auto t0 = Clock::now();
  auto& ck = r.checks;

  switch (id) {
    case 1: {
      r.title = "manufactured-solution convergence (n=1, N=64, horizon 30)";
      const FlowRun& f = flow_run(1);
      ck.push_back(upper("|phitilde - psitilde|_inf",
                         sup_difference(f.final_state.phi_tilde, *f.psi_tilde), kC1PhiTol));
      ck.push_back(upper("|b_measured - b_exact|", std::abs(f.b_flow - *f.b_exact), kC1BTol));
      ck.push_back(upper("runtime [s]", f.seconds, kC1Seconds));
      break;
    }
    case 2: {
      r.title = "flow vs Newton (n=2, N=16, hermitian_nonkahler(0.3), random F)";
      const FlowRun& f = flow_run(2);
      ck.push_back(upper("|phitilde_flow - phitilde_newton|_inf",
                         sup_difference(f.final_state.phi_tilde, f.oracle->phi_tilde_inf),
                         kC2PhiTol));
      ck.push_back(upper("|b_flow - b_newton|", std::abs(f.b_flow - f.oracle->b), kC2BTol));
      ck.push_back(upper("runtime [s]", f.seconds, kC2Seconds));
      break;
    }
    case 3: {
      r.title = "exponential decay on run 1";
      const FlowRun& f = flow_run(1);
      const auto& c = f.report.contraction;
      ck.push_back(lower("decay fit samples", c.fit.samples, 10));
      ck.push_back(lower("eta (> 0)", c.fit.eta, std::numeric_limits<double>::min()));
      ck.push_back(lower("r_squared", c.fit.r_squared, kC3MinR2));
      ck.push_back(lower("resolved contraction ratios", c.ratios, 1));
      ck.push_back({"delta (< 1)", c.delta < 1.0, c.delta, 1.0, false});
      break;
    }
    case 4: {
      r.title = "maximum principle and normalization on runs 1-2";
      for (int w : {1, 2}) {
        const FlowRun& f = flow_run(w);
        for (const char* name : {"max_principle", "mean_phitilde"}) {
          Check c = *find_check(f.invariants, name);
          c.name = "run " + std::to_string(w) + ": " + c.name;
          ck.push_back(c);
        }
      }
      break;
    }
    case 5: {
      r.title = "uniform parabolicity witnesses on runs 1-2";
      for (int w : {1, 2}) {
        const FlowRun& f = flow_run(w);
        const auto& rec = f.report.series.records;
        const std::string p = "run " + std::to_string(w) + ": ";
        double emin = std::numeric_limits<double>::infinity();
        for (const auto& x : rec) emin = std::min(emin, x.eig_min);
        ck.push_back(lower(p + "min eig of g^-1 g'", emin, kC5MinEig));
        ck.push_back(upper(p + "trace_max late rise over early max (relative)",
                           late_rise(rec, f.config.horizon, [](auto& x) { return x.trace_max; }),
                           kC5Plateau));
        ck.push_back(upper(p + "Q_max late rise over early max (relative)",
                           late_rise(rec, f.config.horizon, [](auto& x) { return x.Q_max; }),
                           kC5Plateau));
        Check id = *find_check(f.invariants, "trace_identity");
        id.name = p + id.name;
        ck.push_back(id);
      }
      break;
    }
    case 6: {
      r.title = "Holder seminorm boundedness on run 2 (alpha 0.5, eps 0.5)";
      const FlowRun& f = flow_run(2);
      const auto& rec = f.report.series.records;
      const double H = f.config.horizon;
      double mid = 0.0, end = rec.back().holder_seminorm;
      for (const auto& x : rec) {
        if (std::abs(x.t - 0.5 * H) <= 1e-9) mid = x.holder_seminorm;
      }
      ck.push_back(lower("[g']_{alpha} at horizon/2 (> 0)", mid, std::numeric_limits<double>::min()));
      ck.push_back(upper("relative growth horizon/2 -> horizon", mid > 0 ? end / mid - 1.0 : 1e300,
                         kC6Growth));
      break;
    }
    case 7: {
      r.title = "frame decomposition of 1000 random PD matrices";
      std::mt19937_64 rng(kSeedC7);
      double recon = 0.0, margin = std::numeric_limits<double>::infinity(), c1 = margin;
      bool poles = true;
      for (int k = 0; k < kC7Count; ++k) {
        const HermMat a = random_pd_matrix(rng, 2, kC7Lo, kC7Hi);
        const FrameDecomposition d = frame_decompose(a, {kC7Lo, kC7Hi});
        recon = std::max(recon, (d.reconstruct() - a).cwiseAbs().maxCoeff());
        c1 = std::min(c1, d.C1);
        for (double b : d.betas) margin = std::min(margin, b - d.C1);
        poles = poles && d.frame.size() >= 2 && (d.frame[0] - CVec::Unit(2, 0)).norm() == 0.0 &&
                (d.frame[1] - CVec::Unit(2, 1)).norm() == 0.0;
      }
      ck.push_back(upper("max reconstruction error", recon, kC7Tol));
      ck.push_back(lower("min (beta - C1)", margin, 0.0));
      ck.push_back(lower("min C1 (> 0)", c1, std::numeric_limits<double>::min()));
      ck.push_back(flag("frame starts with e1, e2", poles));
      ck.push_back(upper("runtime [s]", seconds_since(t0), kC7Seconds));
      break;
    }
    case 8: {
      r.title = "normal frames of 100 random instances";
      std::mt19937_64 rng(kSeedC8);
      NormalFrameResiduals worst;
      for (int k = 0; k < kC8Count; ++k) {
        const auto inst = random_normal_frame_instance(rng, 2);
        const NormalFrame nf = normal_frame(inst.g0, inst.dg0, inst.hess0);
        const auto res = normal_frame_residuals(nf, inst, kC8Step);
        worst.metric = std::max(worst.metric, res.metric);
        worst.hessian_offdiag = std::max(worst.hessian_offdiag, res.hessian_offdiag);
        worst.first_derivative = std::max(worst.first_derivative, res.first_derivative);
      }
      ck.push_back(upper("max |pulled-back metric - I|", worst.metric, kC8Tol));
      ck.push_back(upper("max off-diagonal pulled-back Hessian", worst.hessian_offdiag, kC8Tol));
      ck.push_back(upper("max |d_j g_{i ibar}| (4th-order differences, h = 1e-3)",
                         worst.first_derivative, kC8FdTol));
      ck.push_back(upper("runtime [s]", seconds_since(t0), kC8Seconds));
      break;
    }
    case 9: {
      r.title = "Newton linearization on 20 random instances";
      std::mt19937_64 rng(kSeedC9);
      const MetricPreset presets[] = {MetricPreset::flat(), MetricPreset::kahler_bump(),
                                      MetricPreset::hermitian_nonkahler()};
      double worst = 0.0;
      for (int k = 0; k < kC9Count; ++k) {
        const int n = 1 + k % 2;
        const TorusGrid grid(n, n == 1 ? 32 : 8);
        const MetricField g = build_metric(grid, presets[k % 3]);
        const double lam = g.min_eigenvalue();
        const std::uint64_t s1 = rng(), s2 = rng();
        const ScalarField phi =
            TrigPoly::random(s1, 2 * n, grid.period(), 4, 2, 0.05 * lam).sample(grid);
        const ScalarField dir = TrigPoly::random(s2, 2 * n, grid.period(), 4, 2, lam).sample(grid);
        worst = std::max(worst, linearization_check(g, phi, dir, 1e-4));
      }
      ck.push_back(upper("max relative linearization error", worst, kC9Tol));
      break;
    }
    case 10: {
      r.title = "Li-Yau envelope and Harnack on run 1 surrogates";
      const FlowRun& f = flow_run(1);
      int resolved = 0;
      bool nonpos = false, env = true, harn = true;
      double c1 = 0.0, c2 = 0.0, h1 = 0.0;
      for (const auto& w : f.report.windows) {
        if (!w.resolved) continue;
        ++resolved;
        nonpos = nonpos || w.nonpositive;
        for (const auto* e : {&w.envelope_xi, &w.envelope_psi}) {
          env = env && e->certified;
          c1 = std::max(c1, std::abs(e->C1));
          c2 = std::max(c2, e->C2);
        }
        for (const auto* h : {&w.harnack_xi, &w.harnack_psi}) {
          harn = harn && h->holds && h->fit.finite && !h->unverifiable;
          h1 = std::max(h1, h->fit.C1);
        }
      }
      ck.push_back(lower("resolved unit windows", resolved, 1));
      ck.push_back(flag("NonPositiveU never raised on surrogates", !nonpos));
      ck.push_back(flag("envelope |df|^2 - alpha f_t <= C1 + C2/t certified", env));
      ck.push_back(upper("max |C1| of envelopes (finite)", c1, std::numeric_limits<double>::max()));
      ck.push_back(upper("max C2 of envelopes (finite)", c2, std::numeric_limits<double>::max()));
      ck.push_back(flag("Harnack at (1/2, 1) holds in every resolved window", harn));
      ck.push_back(upper("max fitted Harnack C1 (finite)", h1, std::numeric_limits<double>::max()));
      break;
    }
    case 11: {
      r.title = "determinism of run 2";
      const FlowRun& first = flow_run(2);
      if (progress_) *progress_ << "repeating reference flow 2...\n" << std::flush;
      const FlowRun again = run_flow(acceptance_config(2));
      ck.push_back(flag("CSV byte-identical", again.csv == first.csv));
      ck.push_back(flag("JSON summary byte-identical", again.summary_json == first.summary_json));
      break;
    }
    default:
      throw std::invalid_argument("criterion " + std::to_string(id) + " does not exist");
  }

  r.pass = !ck.empty() && std::all_of(ck.begin(), ck.end(), [](const Check& c) { return c.pass; });
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace maflow
