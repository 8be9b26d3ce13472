#pragma once

#include <functional>
#include <vector>

namespace maflow {

using LinearOp = std::function<void(const std::vector<double>& in, std::vector<double>& out)>;

struct GmresResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning: solves A x = b starting from
/// the incoming x. Stops when ‖b - A x‖₂ ≤ tol ‖b‖₂ or after max_iter inner
/// iterations. Reductions are serial, so results are reproducible.
GmresResult gmres(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                  std::vector<double>& x, double tol, int restart = 40, int max_iter = 400);

}  // namespace maflow
