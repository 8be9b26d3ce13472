#pragma once

#include <complex>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

/// Fourier differentiation on a TorusGrid.
///
/// Odd derivatives zero the Nyquist mode; pure second derivatives along one
/// axis keep it (symbol -k^2), mixed second derivatives zero it. With that
/// convention every nonconstant mode has a strictly negative complex
/// Laplacian symbol for any positive-definite constant metric.
///
/// Instances own FFTW plans and scratch buffers: not safe to share across
/// threads, cheap to create one per thread.
class SpectralOps {
 public:
  explicit SpectralOps(const TorusGrid& grid);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  const TorusGrid& grid() const { return grid_; }

  ScalarField d_real(const ScalarField& f, int axis);
  /// ∂_i f = (∂_{x_{2i}} - i ∂_{x_{2i+1}}) f / 2, with 0-based i.
  ComplexField d_holo(const ScalarField& f, int i);
  ComplexField d_antiholo(const ScalarField& f, int i);

  HessianField complex_hessian(const ScalarField& f);
  /// Allocation-free variant for the time loop.
  void complex_hessian_into(const ScalarField& f, HessianField& out);
  void complex_hessian_into(const std::vector<double>& f, HessianField& out);

  /// g^{ij̄} ∂_i ∂_j̄ f with metric_inv holding G^{-1} pointwise.
  /// Throws ImaginaryResidue if the contraction is not real to 1e-10.
  ScalarField laplacian(const ScalarField& f, const MetricInverseField& metric_inv);

  /// Solves (shift - A^{ij̄} ∂_i ∂_j̄) u = r for a constant inverse metric
  /// A = a_inv. With shift = 0 the zero mode of u is set to zero and the
  /// zero mode of r ignored.
  void solve_constant(const std::vector<double>& r, const HermMat& a_inv, double shift,
                      std::vector<double>& u);

  /// Largest Fourier coefficient magnitude on the Nyquist shell
  /// (max_a |k_a| = N/2), relative to the largest nonconstant coefficient;
  /// 0 for constants.
  double spectral_tail(const ScalarField& f);

 private:
  void forward(const std::vector<double>& in);
  // Multiplies the stored spectrum by a real symbol and inverts into out.
  void inverse_with_symbol(const std::vector<double>& symbol, std::vector<double>& out);
  double second_symbol(std::size_t q, int a, int b) const;

  TorusGrid grid_;
  std::size_t real_size_;
  std::size_t spec_size_;
  double* rbuf_;
  std::complex<double>* cbuf_;
  std::complex<double>* cwork_;
  void* plan_fwd_;
  void* plan_bwd_;
  // Per spectral index: signed wavenumbers (physical) per axis, and the same
  // with Nyquist zeroed.
  std::vector<std::array<double, 4>> k_full_;
  std::vector<std::array<double, 4>> k_odd_;
  std::vector<int> k_inf_;
  std::vector<std::vector<double>> hess_symbols_;
};

}  // namespace maflow
