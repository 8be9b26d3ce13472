#include "maflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maflow/errors.hpp"
#include "maflow/herm.hpp"
#include "maflow/krylov.hpp"

namespace maflow {

namespace {

constexpr int kNewtonMaxIter = 20;
constexpr int kBacktrackMax = 12;
constexpr double kLinearTol = 1e-10;

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

HermMat mean_matrix(const HermitianField& a) {
  const int n = a.dim();
  std::vector<double> m(a.num_components(), 0.0);
  for (int c = 0; c < a.num_components(); ++c) {
    double s = 0.0;
    for (double v : a.component(c)) s += v;
    m[c] = s / static_cast<double>(a.size());
  }
  HermMat out(n, n);
  if (n == 1) {
    out(0, 0) = m[0];
  } else {
    out(0, 0) = m[0];
    out(1, 1) = m[1];
    out(0, 1) = cd(m[2], m[3]);
    out(1, 0) = cd(m[2], -m[3]);
  }
  return out;
}

}  // namespace

TimeScheme scheme_from_name(const std::string& name) {
  if (name == "rk4") return TimeScheme::rk4;
  if (name == "implicit_euler") return TimeScheme::implicit_euler;
  throw ConfigError("unknown time scheme '" + name + "'");
}

std::string scheme_name(TimeScheme s) {
  return s == TimeScheme::rk4 ? "rk4" : "implicit_euler";
}

void StepControl::validate() const {
  if (!(dt_min > 0.0) || !(dt_min <= dt_max)) throw ConfigError("need 0 < dt_min <= dt_max");
  if (!(cfl_factor > 0.0) || cfl_factor > 1.0) throw ConfigError("need 0 < cfl_factor <= 1");
  if (!(eps_pd > 0.0)) throw ConfigError("eps_pd must be positive");
  if (retry_limit < 0) throw ConfigError("retry_limit must be non-negative");
  if (!(snapshot_interval > 0.0)) throw ConfigError("snapshot_interval must be positive");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
}

FlowEngine::FlowEngine(MetricField g, ScalarField F)
    : g_(std::move(g)),
      F_(std::move(F)),
      w_(volume_weights(g_)),
      g_inv_(g_.grid()),
      ops_(std::make_unique<SpectralOps>(g_.grid())),
      hess_(g_.grid()) {
  if (F_.grid != g_.grid()) throw GridMismatch("source and metric live on different grids");
  if (!kernels::invert(g_.samples(), g_inv_)) {
    throw PositivityViolation("metric is not positive-definite");
  }
}

FlowEngine::~FlowEngine() = default;

kernels::RhsStats FlowEngine::rhs(const std::vector<double>& phi, HermitianField& gprime,
                                  std::vector<double>& out) {
  ops_->complex_hessian_into(phi, hess_);
  return kernels::flow_rhs(g_.samples(), g_inv_, hess_, F_.values, gprime, out);
}

void FlowEngine::finish_state(FlowState& s) {
  const auto st = rhs(s.phi.values, s.gprime, s.dphi_dt.values);
  if (!st.ok()) throw PositivityViolation("g + ∂∂̄φ left the positive cone", st.bad_point);
  s.min_eig = st.min_eig;
  s.max_inverse_trace = st.max_inverse_trace;
  const double m = integrate(s.phi, w_);
  for (std::size_t p = 0; p < s.phi.size(); ++p) s.phi_tilde[p] = s.phi[p] - m;
}

FlowState FlowEngine::initial_state() { return make_state(0.0, ScalarField(grid())); }

FlowState FlowEngine::make_state(double t, const ScalarField& phi) {
  FlowState s(grid());
  s.t = t;
  s.phi = phi;
  finish_state(s);
  return s;
}

double FlowEngine::cfl_dt(const FlowState& s, const StepControl& c) const {
  const double h = grid().spacing();
  return std::min(c.dt_max, c.cfl_factor * h * h / s.max_inverse_trace);
}

FlowState FlowEngine::step(const FlowState& s, const StepControl& c) {
  const double dt = c.scheme == TimeScheme::rk4 ? cfl_dt(s, c) : c.dt_max;
  return step(s, c, dt);
}

FlowState FlowEngine::step(const FlowState& s, const StepControl& c, double dt) {
  FlowState out(grid());
  std::size_t bad = PositivityViolation::npos;
  for (int attempt = 0; attempt <= c.retry_limit && dt >= c.dt_min; ++attempt) {
    const bool ok = c.scheme == TimeScheme::rk4 ? try_rk4(s, c, dt, out, bad)
                                                : try_implicit(s, c, dt, out, bad);
    if (ok) {
      out.halvings = attempt;
      return out;
    }
    dt *= 0.5;
  }
  throw StepFailure("step failed at t = " + std::to_string(s.t) + " with dt = " +
                        std::to_string(dt) + " (grid point " +
                        (bad == PositivityViolation::npos ? std::string("none")
                                                          : std::to_string(bad)) +
                        ")",
                    s.t, dt, bad);
}

bool FlowEngine::try_rk4(const FlowState& s, const StepControl& c, double dt, FlowState& out,
                         std::size_t& bad) {
  const std::size_t P = grid().size();
  const auto& phi = s.phi.values;
  const auto& k1 = s.dphi_dt.values;
  std::vector<double> k2(P), k3(P), k4(P), stage(P);
  HermitianField& gp = out.gprime;
  auto eval = [&](const std::vector<double>& k, double a, std::vector<double>& dst) {
    for (std::size_t p = 0; p < P; ++p) stage[p] = phi[p] + a * k[p];
    const auto st = rhs(stage, gp, dst);
    if (!st.ok()) {
      bad = st.bad_point;
      return false;
    }
    return st.min_eig >= c.eps_pd;
  };
  if (!eval(k1, 0.5 * dt, k2)) return false;
  if (!eval(k2, 0.5 * dt, k3)) return false;
  if (!eval(k3, dt, k4)) return false;

  out.t = s.t + dt;
  out.step_count = s.step_count + 1;
  out.dt_last = dt;
  for (std::size_t p = 0; p < P; ++p) {
    out.phi[p] = phi[p] + dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  }
  const auto st = rhs(out.phi.values, out.gprime, out.dphi_dt.values);
  if (!st.ok()) {
    bad = st.bad_point;
    return false;
  }
  if (st.min_eig < c.eps_pd) return false;
  out.min_eig = st.min_eig;
  out.max_inverse_trace = st.max_inverse_trace;
  const double m = integrate(out.phi, w_);
  for (std::size_t p = 0; p < P; ++p) out.phi_tilde[p] = out.phi[p] - m;
  return true;
}

// Backward Euler: solve φ - dt R(φ) = φ_n by damped Newton. The linear
// system (I - dt Δ') δ = -G is preconditioned by I - dt L0, where L0 is the
// Laplacian of the grid-mean inverse metric.
bool FlowEngine::try_implicit(const FlowState& s, const StepControl& c, double dt, FlowState& out,
                              std::size_t& bad) {
  const std::size_t P = grid().size();
  const auto& phi_n = s.phi.values;
  std::vector<double> phi(P), R(P), G(P), delta(P), trial(P), Rt(P), Gt(P), tmp(P);
  HermitianField gp(grid()), gp_trial(grid()), inv(grid()), hd(grid());

  auto residual = [&](const std::vector<double>& x, const std::vector<double>& r,
                      std::vector<double>& g) {
    for (std::size_t p = 0; p < P; ++p) g[p] = x[p] - phi_n[p] - dt * r[p];
  };

  // Predictor: explicit Euler if it stays in the cone.
  for (std::size_t p = 0; p < P; ++p) phi[p] = phi_n[p] + dt * s.dphi_dt[p];
  auto st = rhs(phi, gp, R);
  if (!st.ok() || st.min_eig < c.eps_pd) {
    phi = phi_n;
    st = rhs(phi, gp, R);
    if (!st.ok()) {
      bad = st.bad_point;
      return false;
    }
  }
  residual(phi, R, G);
  double gnorm = sup_abs(G);
  // newton_tol bounds the implied error in ∂φ/∂t; the floor is rounding in G.
  const double tol = std::max(c.newton_tol * dt,
                              16.0 * std::numeric_limits<double>::epsilon() * sup_abs(phi_n));

  int it = 0;
  while (gnorm > tol) {
    if (++it > kNewtonMaxIter) return false;
    kernels::invert(gp, inv);
    const HermMat a0 = mean_matrix(inv);
    LinearOp A = [&](const std::vector<double>& x, std::vector<double>& y) {
      ops_->complex_hessian_into(x, hd);
      kernels::contract(inv, hd, y);
      for (std::size_t p = 0; p < P; ++p) y[p] = x[p] - dt * y[p];
    };
    LinearOp M = [&](const std::vector<double>& x, std::vector<double>& y) {
      for (std::size_t p = 0; p < P; ++p) tmp[p] = x[p] / dt;
      ops_->solve_constant(tmp, a0, 1.0 / dt, y);
    };
    std::vector<double> rhs_vec(P);
    for (std::size_t p = 0; p < P; ++p) rhs_vec[p] = -G[p];
    std::fill(delta.begin(), delta.end(), 0.0);
    gmres(A, M, rhs_vec, delta, kLinearTol);

    double lam = 1.0;
    bool accepted = false;
    for (int b = 0; b < kBacktrackMax; ++b, lam *= 0.5) {
      for (std::size_t p = 0; p < P; ++p) trial[p] = phi[p] + lam * delta[p];
      const auto tst = rhs(trial, gp_trial, Rt);
      if (!tst.ok() || tst.min_eig < c.eps_pd) {
        if (!tst.ok()) bad = tst.bad_point;
        continue;
      }
      residual(trial, Rt, Gt);
      const double tn = sup_abs(Gt);
      if (tn < gnorm) {
        phi.swap(trial);
        R.swap(Rt);
        G.swap(Gt);
        std::swap(gp, gp_trial);
        st = tst;
        gnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  if (st.min_eig < c.eps_pd) return false;

  out.t = s.t + dt;
  out.step_count = s.step_count + 1;
  out.dt_last = dt;
  out.phi.values = phi;
  out.dphi_dt.values = R;
  out.gprime = gp;
  out.min_eig = st.min_eig;
  out.max_inverse_trace = st.max_inverse_trace;
  const double m = integrate(out.phi, w_);
  for (std::size_t p = 0; p < P; ++p) out.phi_tilde[p] = out.phi[p] - m;
  return true;
}

FlowState FlowEngine::run(double horizon, const StepControl& c,
                          const std::function<void(const FlowState&)>& on_snapshot) {
  c.validate();
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  FlowState s = initial_state();
  if (on_snapshot) on_snapshot(s);
  long k = 1;
  while (true) {
    const double target = std::min(static_cast<double>(k) * c.snapshot_interval, horizon);
    const double dt0 = c.scheme == TimeScheme::rk4 ? cfl_dt(s, c) : c.dt_max;
    // Absorb a short remainder into this step rather than leaving a sliver.
    const bool clipped = s.t + 1.25 * dt0 >= target;
    s = step(s, c, clipped ? target - s.t : dt0);
    if (!clipped || s.halvings > 0) continue;
    s.t = target;
    const double tail = ops_->spectral_tail(s.phi);
    if (tail > c.tail_limit) {
      throw TailAlarm("spectral tail of φ is " + std::to_string(tail) + " at t = " +
                          std::to_string(s.t),
                      tail);
    }
    if (on_snapshot) on_snapshot(s);
    if (target >= horizon) return s;
    ++k;
  }
}

std::pair<ScalarField, HermitianField> flow_rhs(const ScalarField& phi, const MetricField& g,
                                                const ScalarField& F) {
  if (phi.grid != g.grid() || F.grid != g.grid()) {
    throw GridMismatch("flow_rhs arguments live on different grids");
  }
  SpectralOps ops(g.grid());
  HessianField h(g.grid());
  ops.complex_hessian_into(phi, h);
  HermitianField g_inv(g.grid());
  if (!kernels::invert(g.samples(), g_inv)) throw PositivityViolation("metric is not positive-definite");
  ScalarField out(g.grid());
  HermitianField gp(g.grid());
  const auto st = kernels::flow_rhs(g.samples(), g_inv, h, F.values, gp, out.values);
  if (!st.ok()) throw PositivityViolation("g + ∂∂̄φ is not positive-definite", st.bad_point);
  return {std::move(out), std::move(gp)};
}

}  // namespace maflow
