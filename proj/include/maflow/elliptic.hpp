#pragma once

#include "maflow/grid.hpp"
#include "maflow/torus_geometry.hpp"

namespace maflow {

struct EllipticOptions {
  int max_iter = 50;
  /// Relative residual the inner GMRES must reach.
  double linear_tol = 1e-10;
  int gmres_restart = 40;
  int gmres_max_iter = 600;
};

/// log det(g + ∂∂̄φ)/det g = F + b with ∫ φ ω^n = 0.
struct EllipticSolution {
  double b = 0.0;
  ScalarField phi_tilde_inf;
  /// ‖log det ratio - F - b‖∞ at the returned pair.
  double residual_sup = 0.0;
  int newton_iters = 0;
  /// The b carried by the Newton iteration; b itself is ∫(log ratio - F) ω^n.
  double b_newton = 0.0;

  explicit EllipticSolution(const TorusGrid& grid) : phi_tilde_inf(grid) {}
};

/// Damped Newton on (φ, b). Each step solves the bordered system
/// Δ'ψ - β = -(log ratio - F - b), mean ψ = 0, by GMRES preconditioned with
/// the constant-coefficient inverse Laplacian. `initial` (optional) is any
/// admissible starting potential.
/// Throws LineSearchFailure, MaxIterations, LinearSolveStagnation.
EllipticSolution solve_elliptic(const MetricField& g, const ScalarField& F, double tol,
                                const ScalarField* initial = nullptr,
                                const EllipticOptions& opt = {});

/// Relative sup-norm gap between the centred difference
/// (G(φ + h d) - G(φ - h d)) / 2h and Δ' d, with G the log det ratio.
/// Returns the absolute gap when Δ' d vanishes.
double linearization_check(const MetricField& g, const ScalarField& phi, const ScalarField& dir,
                           double h_fd);

}  // namespace maflow
