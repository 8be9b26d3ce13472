#include "maflow/krylov.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace maflow {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

GmresResult gmres(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                  std::vector<double>& x, double tol, int restart, int max_iter) {
  const std::size_t n = b.size();
  x.resize(n, 0.0);
  GmresResult res;
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), w(n), z(n);
  std::vector<std::vector<double>> V(restart + 1, std::vector<double>(n));
  std::vector<std::vector<double>> Z(restart, std::vector<double>(n));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
  std::vector<double> cs(restart), sn(restart), g(restart + 1);

  while (true) {
    A(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = norm(r);
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iter) return res;

    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    H.setZero();
    int k = 0;
    for (; k < restart && res.iterations < max_iter; ++k) {
      ++res.iterations;
      precond(V[k], Z[k]);
      A(Z[k], w);
      // Modified Gram-Schmidt.
      for (int j = 0; j <= k; ++j) {
        H(j, k) = dot(w, V[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H(j, k) * V[j][i];
      }
      H(k + 1, k) = norm(w);
      if (H(k + 1, k) > 0.0)
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / H(k + 1, k);
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H(j, k) + sn[j] * H(j + 1, k);
        H(j + 1, k) = -sn[j] * H(j, k) + cs[j] * H(j + 1, k);
        H(j, k) = t;
      }
      const double d = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = d > 0.0 ? H(k, k) / d : 1.0;
      sn[k] = d > 0.0 ? H(k + 1, k) / d : 0.0;
      H(k, k) = d;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / bnorm <= tol) {
        ++k;
        break;
      }
    }
    // Back substitution for the k x k triangular system.
    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * Z[j][i];
  }
}

}  // namespace maflow
