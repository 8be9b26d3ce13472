#pragma once

#include <cmath>
#include <utility>

#include "maflow/grid.hpp"

namespace maflow {

/// log det(gp) - log det(g) via Cholesky factors. Throws PositivityViolation
/// if either matrix is not positive-definite.
double log_det_ratio(const HermMat& gp, const HermMat& g);

/// log det via Cholesky, sum of 2 log L_ii.
double log_det(const HermMat& a);

/// Re tr(g_inv * gp), i.e. g^{ij̄} gp_{ij̄} with g_inv = G^{-1}.
double trace_pair(const HermMat& g_inv, const HermMat& gp);

bool is_positive_definite(const HermMat& a);

HermMat hermitian_inverse(const HermMat& a);

/// Eigenvalues (ascending) of a Hermitian matrix.
std::pair<double, double> eigen_range(const HermMat& a);

/// Smallest and largest eigenvalue of g^{-1} gp (both Hermitian, g PD).
std::pair<double, double> relative_eigen_range(const HermMat& g, const HermMat& gp);

/// Max |a_ij - conj(a_ji)|.
double hermitian_defect(const HermMat& a);

// Packed kernels used on the structure-of-arrays hot paths. Components follow
// HermitianField: (a, d, br, bi) is [[a, br + i bi], [br - i bi, d]].
namespace packed {

/// Returns false if the 2x2 matrix is not PD; otherwise writes log det.
inline bool log_det2(double a, double d, double br, double bi, double& out);
inline bool log_det1(double a, double& out);

inline bool log_det1(double a, double& out) {
  if (!(a > 0.0)) return false;
  out = std::log(a);
  return true;
}

inline bool log_det2(double a, double d, double br, double bi, double& out) {
  if (!(a > 0.0)) return false;
  const double schur = d - (br * br + bi * bi) / a;
  if (!(schur > 0.0)) return false;
  out = std::log(a) + std::log(schur);
  return true;
}

/// Smallest eigenvalue of [[a, b], [conj b, d]].
inline double min_eig2(double a, double d, double br, double bi) {
  const double m = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), std::hypot(br, bi));
  return m - r;
}

}  // namespace packed

}  // namespace maflow
