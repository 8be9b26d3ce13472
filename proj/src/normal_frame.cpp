#include "maflow/normal_frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maflow/errors.hpp"

namespace maflow {

std::array<cd, 2> NormalFrame::map(const std::array<cd, 2>& w) const {
  std::array<cd, 2> v{};
  for (int p = 0; p < dim; ++p) {
    v[p] = w[p];
    for (int q = 0; q < dim; ++q)
      for (int r = 0; r < dim; ++r) v[p] += 0.5 * b(p, q, r) * w[q] * w[r];
  }
  std::array<cd, 2> z{};
  for (int i = 0; i < dim; ++i)
    for (int p = 0; p < dim; ++p) z[i] += linear_map(i, p) * v[p];
  return z;
}

CMat NormalFrame::jacobian(const std::array<cd, 2>& w) const {
  CMat dv = CMat::Identity(dim, dim);
  for (int p = 0; p < dim; ++p)
    for (int q = 0; q < dim; ++q)
      for (int r = 0; r < dim; ++r) dv(p, q) += b(p, q, r) * w[r];
  return linear_map * dv;
}

HermMat pull_back(const CMat& J, const HermMat& a) { return J.transpose() * a * J.conjugate(); }

NormalFrame normal_frame(const HermMat& g0, const std::vector<CMat>& dg0, const HermMat& hess0,
                         std::size_t base_point) {
  const int n = static_cast<int>(g0.rows());
  Eigen::LLT<HermMat> llt(g0);
  if (llt.info() != Eigen::Success || !(g0.diagonal().real().minCoeff() > 0.0)) {
    throw PositivityViolation("base metric is not positive-definite");
  }
  // g0 = L L^*, P = L^{-*} gives P^* g0 P = I.
  const CMat L = llt.matrixL();
  const CMat P = L.adjoint().triangularView<Eigen::Upper>().solve(CMat::Identity(n, n));

  HermMat H = P.adjoint() * hess0 * P;
  H = 0.5 * (H + H.adjoint()).eval();
  CMat U = CMat::Identity(n, n);
  const bool diagonal = n == 1 || std::abs(H(0, 1)) == 0.0;
  if (diagonal) {
    if (n == 2 && H(1, 1).real() > H(0, 0).real()) {
      U << 0.0, 1.0, 1.0, 0.0;
    }
  } else {
    Eigen::SelfAdjointEigenSolver<HermMat> es(H);
    // Ascending from Eigen; reverse to descending.
    for (int c = 0; c < n; ++c) {
      CVec v = es.eigenvectors().col(n - 1 - c);
      int big = 0;
      for (int i = 1; i < n; ++i)
        if (std::abs(v(i)) > std::abs(v(big))) big = i;
      v *= std::conj(v(big)) / std::abs(v(big));
      U.col(c) = v;
    }
  }

  NormalFrame nf;
  nf.base_point = base_point;
  nf.dim = n;
  nf.linear_map = (P * U).conjugate();
  const CMat& J = nf.linear_map;

  // T_r(p, q) = Σ J_{ip} conj(J_{jq}) J_{kr} ∂_k g_{ij̄}, the first derivative
  // of the linearly pulled-back metric.
  auto T = [&](int r, int p, int q) {
    cd s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += J(i, p) * std::conj(J(j, q)) * J(k, r) * dg0[k](i, j);
    return s;
  };
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) {
      const cd v = -T(r, p, p);
      nf.quadratic_coeffs[(p * n + p) * n + r] = v;
      nf.quadratic_coeffs[(p * n + r) * n + p] = v;
    }
  return nf;
}

}  // namespace maflow
