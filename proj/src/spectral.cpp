#include "maflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "maflow/errors.hpp"

namespace maflow {

namespace {

fftw_plan as_plan(void* p) { return static_cast<fftw_plan>(p); }

}  // namespace

SpectralOps::SpectralOps(const TorusGrid& grid) : grid_(grid) {
  const int d = grid.real_dim();
  const int N = grid.points_per_axis();
  real_size_ = grid.size();
  spec_size_ = real_size_ / N * (N / 2 + 1);

  rbuf_ = fftw_alloc_real(real_size_);
  cbuf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spec_size_));
  cwork_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spec_size_));

  int dims[4] = {N, N, N, N};
  // FFTW_ESTIMATE keeps plan selection, and hence round-off, reproducible.
  plan_fwd_ = fftw_plan_dft_r2c(d, dims, rbuf_, reinterpret_cast<fftw_complex*>(cbuf_),
                                FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_c2r(d, dims, reinterpret_cast<fftw_complex*>(cwork_), rbuf_,
                                FFTW_ESTIMATE);

  const double s = 2.0 * std::numbers::pi / grid.period();
  k_full_.resize(spec_size_);
  k_odd_.resize(spec_size_);
  k_inf_.resize(spec_size_);
  for (std::size_t q = 0; q < spec_size_; ++q) {
    std::size_t rem = q;
    std::array<int, 4> idx{0, 0, 0, 0};
    idx[d - 1] = static_cast<int>(rem % (N / 2 + 1));
    rem /= (N / 2 + 1);
    for (int a = d - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % N);
      rem /= N;
    }
    std::array<double, 4> kf{0, 0, 0, 0}, ko{0, 0, 0, 0};
    int kinf = 0;
    for (int a = 0; a < d; ++a) {
      const int j = idx[a];
      const int k = j <= N / 2 ? j : j - N;
      kf[a] = s * k;
      ko[a] = (j == N / 2) ? 0.0 : s * k;
      kinf = std::max(kinf, std::abs(k));
    }
    k_full_[q] = kf;
    k_odd_[q] = ko;
    k_inf_[q] = kinf;
  }

  const int n = grid.complex_dim();
  const double inv_size = 1.0 / static_cast<double>(real_size_);
  hess_symbols_.assign(static_cast<std::size_t>(n * n), std::vector<double>(spec_size_));
  for (std::size_t q = 0; q < spec_size_; ++q) {
    auto D = [&](int a, int b) { return second_symbol(q, a, b); };
    hess_symbols_[0][q] = 0.25 * (D(0, 0) + D(1, 1)) * inv_size;
    if (n == 2) {
      hess_symbols_[1][q] = 0.25 * (D(2, 2) + D(3, 3)) * inv_size;
      hess_symbols_[2][q] = 0.25 * (D(0, 2) + D(1, 3)) * inv_size;
      hess_symbols_[3][q] = 0.25 * (D(0, 3) - D(1, 2)) * inv_size;
    }
  }
}

SpectralOps::~SpectralOps() {
  fftw_destroy_plan(as_plan(plan_fwd_));
  fftw_destroy_plan(as_plan(plan_bwd_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
  fftw_free(cwork_);
}

double SpectralOps::second_symbol(std::size_t q, int a, int b) const {
  if (a == b) return -k_full_[q][a] * k_full_[q][a];
  return -k_odd_[q][a] * k_odd_[q][b];
}

void SpectralOps::forward(const std::vector<double>& in) {
  std::memcpy(rbuf_, in.data(), real_size_ * sizeof(double));
  fftw_execute(as_plan(plan_fwd_));
}

void SpectralOps::inverse_with_symbol(const std::vector<double>& symbol,
                                      std::vector<double>& out) {
  for (std::size_t q = 0; q < spec_size_; ++q) cwork_[q] = cbuf_[q] * symbol[q];
  fftw_execute(as_plan(plan_bwd_));
  out.resize(real_size_);
  std::memcpy(out.data(), rbuf_, real_size_ * sizeof(double));
}

ScalarField SpectralOps::d_real(const ScalarField& f, int axis) {
  if (f.grid != grid_) throw GridMismatch("field does not live on this transform's grid");
  if (axis < 0 || axis >= grid_.real_dim()) throw InvalidGrid("axis out of range");
  forward(f.values);
  const double inv_size = 1.0 / static_cast<double>(real_size_);
  for (std::size_t q = 0; q < spec_size_; ++q) {
    cwork_[q] = cbuf_[q] * std::complex<double>(0.0, k_odd_[q][axis] * inv_size);
  }
  fftw_execute(as_plan(plan_bwd_));
  ScalarField out(grid_);
  std::memcpy(out.values.data(), rbuf_, real_size_ * sizeof(double));
  return out;
}

ComplexField SpectralOps::d_holo(const ScalarField& f, int i) {
  if (i < 0 || i >= grid_.complex_dim()) throw InvalidGrid("complex index out of range");
  const ScalarField dx = d_real(f, 2 * i);
  const ScalarField dy = d_real(f, 2 * i + 1);
  ComplexField out(grid_);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = 0.5 * cd(dx[p], -dy[p]);
  return out;
}

ComplexField SpectralOps::d_antiholo(const ScalarField& f, int i) {
  if (i < 0 || i >= grid_.complex_dim()) throw InvalidGrid("complex index out of range");
  const ScalarField dx = d_real(f, 2 * i);
  const ScalarField dy = d_real(f, 2 * i + 1);
  ComplexField out(grid_);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = 0.5 * cd(dx[p], dy[p]);
  return out;
}

HessianField SpectralOps::complex_hessian(const ScalarField& f) {
  HessianField h(grid_);
  complex_hessian_into(f, h);
  return h;
}

void SpectralOps::complex_hessian_into(const ScalarField& f, HessianField& out) {
  if (f.grid != grid_) throw GridMismatch("field does not live on this transform's grid");
  complex_hessian_into(f.values, out);
}

void SpectralOps::complex_hessian_into(const std::vector<double>& f, HessianField& out) {
  if (out.grid() != grid_ || f.size() != real_size_) {
    throw GridMismatch("field does not live on this transform's grid");
  }
  forward(f);
  for (int c = 0; c < out.num_components(); ++c) {
    inverse_with_symbol(hess_symbols_[c], out.component(c));
  }
}

ScalarField SpectralOps::laplacian(const ScalarField& f, const MetricInverseField& metric_inv) {
  if (metric_inv.grid() != grid_) throw GridMismatch("inverse metric grid mismatch");
  const HessianField h = complex_hessian(f);
  ScalarField out(grid_);
  const int n = grid_.complex_dim();
  for (std::size_t p = 0; p < out.size(); ++p) {
    const HermMat a = metric_inv.at(p);
    const HermMat b = h.at(p);
    cd s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += a(i, j) * b(j, i);
    if (std::abs(s.imag()) > 1e-10) {
      throw ImaginaryResidue("complex Laplacian has imaginary part " + std::to_string(s.imag()));
    }
    out[p] = s.real();
  }
  return out;
}

void SpectralOps::solve_constant(const std::vector<double>& r, const HermMat& a_inv, double shift,
                                 std::vector<double>& u) {
  forward(r);
  const bool two = grid_.complex_dim() == 2;
  const double a = a_inv(0, 0).real();
  const double d = two ? a_inv(1, 1).real() : 0.0;
  const double ar = two ? a_inv(0, 1).real() : 0.0;
  const double ai = two ? a_inv(0, 1).imag() : 0.0;
  const double inv_size = 1.0 / static_cast<double>(real_size_);
  for (std::size_t q = 0; q < spec_size_; ++q) {
    // Hessian symbols are stored pre-divided by the transform size.
    double sym = a * hess_symbols_[0][q];
    if (two) {
      sym += d * hess_symbols_[1][q] + 2.0 * (ar * hess_symbols_[2][q] + ai * hess_symbols_[3][q]);
    }
    // (shift - sym * size) scaled by 1/size, so u_hat = r_hat / size^2 / denom.
    const double denom = shift * inv_size - sym;
    cwork_[q] = (q == 0 && shift == 0.0) ? std::complex<double>(0.0)
                                         : cbuf_[q] * (inv_size * inv_size / denom);
  }
  fftw_execute(as_plan(plan_bwd_));
  u.resize(real_size_);
  std::memcpy(u.data(), rbuf_, real_size_ * sizeof(double));
}

double SpectralOps::spectral_tail(const ScalarField& f) {
  forward(f.values);
  const int shell = grid_.points_per_axis() / 2;
  double all = 0.0, tail = 0.0;
  for (std::size_t q = 1; q < spec_size_; ++q) {
    const double m = std::abs(cbuf_[q]);
    all = std::max(all, m);
    if (k_inf_[q] >= shell) tail = std::max(tail, m);
  }
  return all > 0.0 ? tail / all : 0.0;
}

}  // namespace maflow
