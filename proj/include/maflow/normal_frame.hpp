#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

/// General complex n x n matrix (same storage as HermMat).
using CMat = HermMat;

/// Holomorphic coordinates w centred at a base point:
///   z^i = J_{ip} (w^p + ½ b^p_{qr} w^q w^r).
/// In w the metric is the identity at 0, the φ-Hessian is diagonal with
/// descending entries, and every ∂_r g_{pp̄} vanishes at 0.
struct NormalFrame {
  std::size_t base_point = 0;
  int dim = 1;
  /// J = dz/dw at the base point.
  CMat linear_map;
  /// b^p_{qr} at index (p * n + q) * n + r; symmetric in (q, r).
  std::array<cd, 8> quadratic_coeffs{};

  cd b(int p, int q, int r) const { return quadratic_coeffs[(p * dim + q) * dim + r]; }
  /// z(w), relative to the base point.
  std::array<cd, 2> map(const std::array<cd, 2>& w) const;
  /// dz/dw at w.
  CMat jacobian(const std::array<cd, 2>& w) const;
};

/// dg0[k](i, j) = ∂_k g_{ij̄} at the base point, with ∂_k the holomorphic
/// derivative. The matrices are general complex; ∂_k̄ g_{ij̄} is conj(dg0[k](j, i)).
/// Throws PositivityViolation if g0 is not positive-definite.
NormalFrame normal_frame(const HermMat& g0, const std::vector<CMat>& dg0, const HermMat& hess0,
                         std::size_t base_point = 0);

/// J^T A conj(J): a (1,1)-form pulled back through the linear part.
HermMat pull_back(const CMat& J, const HermMat& a);

}  // namespace maflow
