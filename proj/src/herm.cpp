#include "maflow/herm.hpp"

#include <algorithm>
#include <cmath>

#include "maflow/errors.hpp"

namespace maflow {

namespace {

// Cholesky of a Hermitian matrix with n <= 2; returns false if not PD.
bool cholesky_log_det(const HermMat& a, double& out) {
  if (a.rows() == 1) return packed::log_det1(a(0, 0).real(), out);
  return packed::log_det2(a(0, 0).real(), a(1, 1).real(), a(0, 1).real(), a(0, 1).imag(), out);
}

}  // namespace

double log_det(const HermMat& a) {
  double v = 0.0;
  if (!cholesky_log_det(a, v)) throw PositivityViolation("matrix is not positive-definite");
  return v;
}

double log_det_ratio(const HermMat& gp, const HermMat& g) { return log_det(gp) - log_det(g); }

double trace_pair(const HermMat& g_inv, const HermMat& gp) {
  cd s = 0.0;
  const int n = static_cast<int>(gp.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += g_inv(i, j) * gp(j, i);
  return s.real();
}

bool is_positive_definite(const HermMat& a) {
  double v = 0.0;
  return cholesky_log_det(a, v);
}

HermMat hermitian_inverse(const HermMat& a) {
  const int n = static_cast<int>(a.rows());
  HermMat inv(n, n);
  if (n == 1) {
    if (!(a(0, 0).real() > 0.0)) throw PositivityViolation("matrix is not positive-definite");
    inv(0, 0) = 1.0 / a(0, 0).real();
    return inv;
  }
  const double p = a(0, 0).real();
  const double q = a(1, 1).real();
  const cd b = a(0, 1);
  const double det = p * q - std::norm(b);
  if (!(p > 0.0) || !(det > 0.0)) throw PositivityViolation("matrix is not positive-definite");
  inv(0, 0) = q / det;
  inv(1, 1) = p / det;
  inv(0, 1) = -b / det;
  inv(1, 0) = -std::conj(b) / det;
  return inv;
}

std::pair<double, double> eigen_range(const HermMat& a) {
  if (a.rows() == 1) return {a(0, 0).real(), a(0, 0).real()};
  const double p = a(0, 0).real();
  const double q = a(1, 1).real();
  const double m = 0.5 * (p + q);
  const double r = std::hypot(0.5 * (p - q), std::abs(a(0, 1)));
  return {m - r, m + r};
}

std::pair<double, double> relative_eigen_range(const HermMat& g, const HermMat& gp) {
  if (g.rows() == 1) {
    const double v = gp(0, 0).real() / g(0, 0).real();
    return {v, v};
  }
  // g^{-1} gp is similar to the Hermitian L^{-1} gp L^{-*}, g = L L^*.
  Eigen::LLT<HermMat> llt(g);
  if (llt.info() != Eigen::Success) throw PositivityViolation("relative_eigen_range: g is not PD");
  const auto L = llt.matrixL();
  HermMat c = L.solve(gp);
  c = L.solve(HermMat(c.adjoint())).adjoint();
  return eigen_range(c);
}

double hermitian_defect(const HermMat& a) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
  return d;
}

}  // namespace maflow
