#include "maflow/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "maflow/errors.hpp"
#include "maflow/herm.hpp"

namespace maflow::kernels {

namespace {
constexpr std::size_t npos = static_cast<std::size_t>(-1);
}

void set_thread_cap(int threads) {
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
}

int thread_count() { return omp_get_max_threads(); }

RhsStats flow_rhs(const HermitianField& g, const HermitianField& g_inv,
                  const HermitianField& hess, const std::vector<double>& source,
                  HermitianField& gprime, std::vector<double>& rhs) {
  const std::ptrdiff_t P = static_cast<std::ptrdiff_t>(g.size());
  rhs.resize(g.size());
  std::size_t bad = npos;
  double min_eig = std::numeric_limits<double>::infinity();
  double max_tr = 0.0;
  // log det(g + h)/det g = log det(I + g^{-1} h) is evaluated as
  // log1p(tr(g^{-1} h) + det h / det g), free of the cancellation between
  // two O(1) logarithms.
  if (g.dim() == 1) {
    const double* g0 = g.component(0).data();
    const double* i0 = g_inv.component(0).data();
    const double* h0 = hess.component(0).data();
    double* o0 = gprime.component(0).data();
#pragma omp parallel for schedule(static) reduction(min : bad, min_eig) reduction(max : max_tr)
    for (std::ptrdiff_t p = 0; p < P; ++p) {
      const double a = g0[p] + h0[p];
      o0[p] = a;
      if (!(a > 0.0)) {
        bad = std::min(bad, static_cast<std::size_t>(p));
        rhs[p] = 0.0;
        continue;
      }
      rhs[p] = std::log1p(i0[p] * h0[p]) - source[p];
      min_eig = std::min(min_eig, a);
      max_tr = std::max(max_tr, 1.0 / a);
    }
  } else {
    const double *g0 = g.component(0).data(), *g1 = g.component(1).data();
    const double *g2 = g.component(2).data(), *g3 = g.component(3).data();
    const double *i0 = g_inv.component(0).data(), *i1 = g_inv.component(1).data();
    const double *i2 = g_inv.component(2).data(), *i3 = g_inv.component(3).data();
    const double *h0 = hess.component(0).data(), *h1 = hess.component(1).data();
    const double *h2 = hess.component(2).data(), *h3 = hess.component(3).data();
    double *o0 = gprime.component(0).data(), *o1 = gprime.component(1).data();
    double *o2 = gprime.component(2).data(), *o3 = gprime.component(3).data();
#pragma omp parallel for schedule(static) reduction(min : bad, min_eig) reduction(max : max_tr)
    for (std::ptrdiff_t p = 0; p < P; ++p) {
      const double a = g0[p] + h0[p];
      const double d = g1[p] + h1[p];
      const double br = g2[p] + h2[p];
      const double bi = g3[p] + h3[p];
      o0[p] = a;
      o1[p] = d;
      o2[p] = br;
      o3[p] = bi;
      const double schur = a > 0.0 ? d - (br * br + bi * bi) / a : -1.0;
      if (!(schur > 0.0)) {
        bad = std::min(bad, static_cast<std::size_t>(p));
        rhs[p] = 0.0;
        continue;
      }
      const double tr = i0[p] * h0[p] + i1[p] * h1[p] + 2.0 * (i2[p] * h2[p] + i3[p] * h3[p]);
      const double det_h = h0[p] * h1[p] - (h2[p] * h2[p] + h3[p] * h3[p]);
      const double det_inv = i0[p] * i1[p] - (i2[p] * i2[p] + i3[p] * i3[p]);
      rhs[p] = std::log1p(tr + det_h * det_inv) - source[p];
      min_eig = std::min(min_eig, packed::min_eig2(a, d, br, bi));
      max_tr = std::max(max_tr, (a + d) / (a * schur));
    }
  }
  RhsStats s;
  s.bad_point = bad;
  s.min_eig = min_eig;
  s.max_inverse_trace = max_tr;
  return s;
}

bool invert(const HermitianField& a, HermitianField& inv, std::size_t* bad_point) {
  const std::ptrdiff_t P = static_cast<std::ptrdiff_t>(a.size());
  std::size_t bad = npos;
  if (a.dim() == 1) {
    const double* a0 = a.component(0).data();
    double* o0 = inv.component(0).data();
#pragma omp parallel for schedule(static) reduction(min : bad)
    for (std::ptrdiff_t p = 0; p < P; ++p) {
      if (!(a0[p] > 0.0)) {
        bad = std::min(bad, static_cast<std::size_t>(p));
        o0[p] = 0.0;
        continue;
      }
      o0[p] = 1.0 / a0[p];
    }
  } else {
    const double *a0 = a.component(0).data(), *a1 = a.component(1).data();
    const double *a2 = a.component(2).data(), *a3 = a.component(3).data();
    double *o0 = inv.component(0).data(), *o1 = inv.component(1).data();
    double *o2 = inv.component(2).data(), *o3 = inv.component(3).data();
#pragma omp parallel for schedule(static) reduction(min : bad)
    for (std::ptrdiff_t p = 0; p < P; ++p) {
      const double det = a0[p] * a1[p] - (a2[p] * a2[p] + a3[p] * a3[p]);
      if (!(a0[p] > 0.0) || !(det > 0.0)) {
        bad = std::min(bad, static_cast<std::size_t>(p));
        o0[p] = o1[p] = o2[p] = o3[p] = 0.0;
        continue;
      }
      o0[p] = a1[p] / det;
      o1[p] = a0[p] / det;
      o2[p] = -a2[p] / det;
      o3[p] = -a3[p] / det;
    }
  }
  if (bad_point) *bad_point = bad;
  return bad == npos;
}

void contract(const HermitianField& inv, const HermitianField& hess, std::vector<double>& out) {
  const std::ptrdiff_t P = static_cast<std::ptrdiff_t>(inv.size());
  out.resize(inv.size());
  if (inv.dim() == 1) {
    const double* a0 = inv.component(0).data();
    const double* h0 = hess.component(0).data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < P; ++p) out[p] = a0[p] * h0[p];
  } else {
    const double *a0 = inv.component(0).data(), *a1 = inv.component(1).data();
    const double *a2 = inv.component(2).data(), *a3 = inv.component(3).data();
    const double *h0 = hess.component(0).data(), *h1 = hess.component(1).data();
    const double *h2 = hess.component(2).data(), *h3 = hess.component(3).data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < P; ++p) {
      // tr(AB) = a11 b11 + a22 b22 + 2 Re(a12 conj(b12))
      out[p] = a0[p] * h0[p] + a1[p] * h1[p] + 2.0 * (a2[p] * h2[p] + a3[p] * h3[p]);
    }
  }
}

std::vector<double> log_det(const HermitianField& a) {
  std::vector<double> out(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    double v = 0.0;
    const bool ok = a.dim() == 1 ? packed::log_det1(a.component(0)[p], v)
                                 : packed::log_det2(a.component(0)[p], a.component(1)[p],
                                                    a.component(2)[p], a.component(3)[p], v);
    if (!ok) throw PositivityViolation("metric sample is not positive-definite", p);
    out[p] = v;
  }
  return out;
}

namespace reference {

RhsStats flow_rhs(const HermitianField& g, const HermitianField& g_inv,
                  const HermitianField& hess, const std::vector<double>& source,
                  HermitianField& gprime, std::vector<double>& rhs) {
  (void)g_inv;
  RhsStats s;
  rhs.assign(g.size(), 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const HermMat gp = g.at(p) + hess.at(p);
    gprime.set(p, gp);
    if (!is_positive_definite(gp)) {
      if (s.bad_point == npos) s.bad_point = p;
      continue;
    }
    rhs[p] = log_det_ratio(gp, g.at(p)) - source[p];
    s.min_eig = std::min(s.min_eig, eigen_range(gp).first);
    s.max_inverse_trace = std::max(s.max_inverse_trace, hermitian_inverse(gp).trace().real());
  }
  return s;
}

bool invert(const HermitianField& a, HermitianField& inv, std::size_t* bad_point) {
  std::size_t bad = npos;
  for (std::size_t p = 0; p < a.size(); ++p) {
    const HermMat m = a.at(p);
    if (!is_positive_definite(m)) {
      if (bad == npos) bad = p;
      inv.set(p, HermMat::Zero(m.rows(), m.cols()));
      continue;
    }
    inv.set(p, hermitian_inverse(m));
  }
  if (bad_point) *bad_point = bad;
  return bad == npos;
}

void contract(const HermitianField& inv, const HermitianField& hess, std::vector<double>& out) {
  out.assign(inv.size(), 0.0);
  for (std::size_t p = 0; p < inv.size(); ++p) {
    out[p] = (inv.at(p) * hess.at(p)).trace().real();
  }
}

}  // namespace reference

}  // namespace maflow::kernels
