#include "maflow/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maflow/errors.hpp"
#include "maflow/kernels.hpp"
#include "maflow/krylov.hpp"
#include "maflow/spectral.hpp"

namespace maflow {

namespace {

constexpr int kBacktrackMax = 30;

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double plain_mean(const std::vector<double>& v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  return s / static_cast<double>(n);
}

HermMat mean_matrix(const HermitianField& a) {
  const int n = a.dim();
  double m[4] = {0, 0, 0, 0};
  for (int c = 0; c < a.num_components(); ++c) m[c] = plain_mean(a.component(c), a.size());
  HermMat out(n, n);
  out(0, 0) = m[0];
  if (n == 2) {
    out(1, 1) = m[1];
    out(0, 1) = cd(m[2], m[3]);
    out(1, 0) = cd(m[2], -m[3]);
  }
  return out;
}

// log det(g + ∂∂̄φ) - log det g - F into out; false if outside the cone.
struct Residual {
  SpectralOps& ops;
  const MetricField& g;
  const HermitianField& g_inv;
  const std::vector<double>& F;
  HessianField hess;

  bool operator()(const std::vector<double>& phi, HermitianField& gp, std::vector<double>& out) {
    ops.complex_hessian_into(phi, hess);
    return kernels::flow_rhs(g.samples(), g_inv, hess, F, gp, out).ok();
  }
};

}  // namespace

EllipticSolution solve_elliptic(const MetricField& g, const ScalarField& F, double tol,
                                const ScalarField* initial, const EllipticOptions& opt) {
  if (F.grid != g.grid()) throw GridMismatch("source and metric live on different grids");
  const TorusGrid& grid = g.grid();
  const std::size_t P = grid.size();
  SpectralOps ops(grid);
  const VolumeWeights w = volume_weights(g);
  HermitianField g_inv(grid);
  if (!kernels::invert(g.samples(), g_inv)) throw PositivityViolation("metric is not positive-definite");
  Residual lr{ops, g, g_inv, F.values, HessianField(grid)};

  std::vector<double> phi(P, 0.0);
  if (initial) {
    if (initial->grid != grid) throw GridMismatch("initial guess lives on a different grid");
    phi = initial->values;
    const double m = plain_mean(phi, P);
    for (double& v : phi) v -= m;
  }
  HermitianField gp(grid), gp_trial(grid), inv(grid), hd(grid);
  std::vector<double> G(P), Gt(P), phi_t(P), tmp(P);
  if (!lr(phi, gp, G)) throw PositivityViolation("initial guess is outside the positive cone");

  auto weighted_mean = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t p = 0; p < P; ++p) s += v[p] * w.weights[p];
    return s;
  };
  auto residual_sup = [&](const std::vector<double>& v, double b) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x - b));
    return m;
  };

  double b = weighted_mean(G);
  double res = residual_sup(G, b);
  int iters = 0;
  while (res > tol) {
    if (iters >= opt.max_iter) {
      throw MaxIterations("Newton did not converge in " + std::to_string(opt.max_iter) +
                          " iterations (residual " + std::to_string(res) + ")");
    }
    ++iters;
    kernels::invert(gp, inv);
    const HermMat a0 = mean_matrix(inv);
    // Unknown (ψ, β) packed as a vector of length P + 1.
    LinearOp A = [&](const std::vector<double>& x, std::vector<double>& y) {
      std::copy(x.begin(), x.begin() + P, tmp.begin());
      ops.complex_hessian_into(tmp, hd);
      y.resize(P + 1);
      std::vector<double> lap(P);
      kernels::contract(inv, hd, lap);
      for (std::size_t p = 0; p < P; ++p) y[p] = lap[p] - x[P];
      y[P] = plain_mean(x, P);
    };
    LinearOp M = [&](const std::vector<double>& x, std::vector<double>& y) {
      const double mr = plain_mean(x, P);
      std::vector<double> r(x.begin(), x.begin() + P), u;
      for (double& v : r) v -= mr;
      ops.solve_constant(r, a0, 0.0, u);
      y.resize(P + 1);
      for (std::size_t p = 0; p < P; ++p) y[p] = -u[p] + x[P];
      y[P] = -mr;
    };
    std::vector<double> rhs(P + 1), x(P + 1, 0.0);
    for (std::size_t p = 0; p < P; ++p) rhs[p] = -(G[p] - b);
    rhs[P] = 0.0;
    const auto gr = gmres(A, M, rhs, x, opt.linear_tol, opt.gmres_restart, opt.gmres_max_iter);
    if (!gr.converged) {
      throw LinearSolveStagnation("GMRES relative residual " + std::to_string(gr.rel_residual) +
                                  " after " + std::to_string(gr.iterations) + " iterations");
    }

    const double newton_norm = residual_sup(G, b);
    double lam = 1.0;
    bool accepted = false;
    for (int k = 0; k < kBacktrackMax; ++k, lam *= 0.5) {
      for (std::size_t p = 0; p < P; ++p) phi_t[p] = phi[p] + lam * x[p];
      if (!lr(phi_t, gp_trial, Gt)) continue;
      const double bt = b + lam * x[P];
      if (residual_sup(Gt, bt) < newton_norm) {
        phi.swap(phi_t);
        G.swap(Gt);
        std::swap(gp, gp_trial);
        b = bt;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw LineSearchFailure("no damped Newton step reduced the residual");
    res = residual_sup(G, weighted_mean(G));
  }

  EllipticSolution sol(grid);
  sol.b_newton = b;
  sol.b = weighted_mean(G);
  sol.residual_sup = residual_sup(G, sol.b);
  sol.newton_iters = iters;
  double m = 0.0;
  for (std::size_t p = 0; p < P; ++p) m += phi[p] * w.weights[p];
  for (std::size_t p = 0; p < P; ++p) sol.phi_tilde_inf[p] = phi[p] - m;
  return sol;
}

double linearization_check(const MetricField& g, const ScalarField& phi, const ScalarField& dir,
                           double h_fd) {
  const TorusGrid& grid = g.grid();
  const std::size_t P = grid.size();
  SpectralOps ops(grid);
  HermitianField g_inv(grid);
  if (!kernels::invert(g.samples(), g_inv)) throw PositivityViolation("metric is not positive-definite");
  const std::vector<double> zero(P, 0.0);
  Residual lr{ops, g, g_inv, zero, HessianField(grid)};

  HermitianField gp(grid), scratch(grid), inv(grid), hd(grid);
  std::vector<double> plus(P), minus(P), x(P), base(P);
  if (!lr(phi.values, gp, base)) throw PositivityViolation("φ is outside the positive cone");
  for (std::size_t p = 0; p < P; ++p) x[p] = phi[p] + h_fd * dir[p];
  if (!lr(x, scratch, plus)) throw PositivityViolation("φ + h d is outside the positive cone");
  for (std::size_t p = 0; p < P; ++p) x[p] = phi[p] - h_fd * dir[p];
  if (!lr(x, scratch, minus)) throw PositivityViolation("φ - h d is outside the positive cone");

  kernels::invert(gp, inv);
  ops.complex_hessian_into(dir.values, hd);
  std::vector<double> lin(P);
  kernels::contract(inv, hd, lin);
  double gap = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    gap = std::max(gap, std::abs((plus[p] - minus[p]) / (2.0 * h_fd) - lin[p]));
  }
  const double scale = sup_abs(lin);
  return scale > 0.0 ? gap / scale : gap;
}

}  // namespace maflow
