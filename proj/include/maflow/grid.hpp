#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace maflow {

using cd = std::complex<double>;

/// n x n complex matrix with n <= 2, stored without heap allocation.
using HermMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2, 2>;
using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

/// Uniform periodic grid on the real 2n-torus [0, L)^{2n}.
///
/// Points are stored row-major with real axis 0 slowest. Real axis 2i is
/// Re z^{i+1} and axis 2i+1 is Im z^{i+1}.
class TorusGrid {
 public:
  static constexpr std::size_t kDefaultMaxPoints = std::size_t{1} << 24;

  TorusGrid(int complex_dim, int points_per_axis, double period = 2.0 * std::numbers::pi,
            std::size_t max_points = kDefaultMaxPoints);

  int complex_dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  int points_per_axis() const { return N_; }
  double period() const { return L_; }
  double spacing() const { return L_ / N_; }
  std::size_t size() const { return size_; }
  /// Lebesgue volume of one cell, h^{2n}.
  double cell_volume() const;

  /// Integer index along each real axis.
  std::array<int, 4> multi_index(std::size_t p) const;
  std::size_t flat_index(const std::array<int, 4>& idx) const;
  /// Real coordinates of point p (unused trailing entries are zero).
  std::array<double, 4> coords(std::size_t p) const;

  bool operator==(const TorusGrid& o) const {
    return n_ == o.n_ && N_ == o.N_ && L_ == o.L_;
  }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

 private:
  int n_;
  int N_;
  double L_;
  std::size_t size_;
};

/// Real function sampled on the grid.
struct ScalarField {
  TorusGrid grid;
  std::vector<double> values;

  explicit ScalarField(const TorusGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t p) { return values[p]; }
  double operator[](std::size_t p) const { return values[p]; }
};

/// Complex function sampled on the grid.
struct ComplexField {
  TorusGrid grid;
  std::vector<cd> values;

  explicit ComplexField(const TorusGrid& g) : grid(g), values(g.size()) {}
  std::size_t size() const { return values.size(); }
  cd& operator[](std::size_t p) { return values[p]; }
  cd operator[](std::size_t p) const { return values[p]; }
};

/// Field of Hermitian n x n matrices in structure-of-arrays layout.
///
/// Component arrays: n = 1 -> {a11}; n = 2 -> {a11, a22, Re a12, Im a12},
/// where a12 is the (row 0, column 1) entry and a21 = conj(a12).
class HermitianField {
 public:
  explicit HermitianField(const TorusGrid& g);

  const TorusGrid& grid() const { return grid_; }
  int dim() const { return grid_.complex_dim(); }
  std::size_t size() const { return grid_.size(); }
  int num_components() const { return static_cast<int>(comps_.size()); }

  std::vector<double>& component(int c) { return comps_[c]; }
  const std::vector<double>& component(int c) const { return comps_[c]; }

  HermMat at(std::size_t p) const;
  void set(std::size_t p, const HermMat& m);

 private:
  TorusGrid grid_;
  std::vector<std::vector<double>> comps_;
};

using HessianField = HermitianField;
/// Pointwise matrix inverse G^{-1} of a metric field. With this storage the
/// complex Laplacian g^{ij̄} ∂_i ∂_j̄ f equals tr(G^{-1} Hess f).
using MetricInverseField = HermitianField;

double sup_abs(const ScalarField& f);
double max_value(const ScalarField& f);
double min_value(const ScalarField& f);
/// Plain (unweighted) grid average.
double grid_mean(const ScalarField& f);

}  // namespace maflow
