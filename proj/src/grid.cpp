#include "maflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maflow/errors.hpp"

namespace maflow {

TorusGrid::TorusGrid(int complex_dim, int points_per_axis, double period, std::size_t max_points)
    : n_(complex_dim), N_(points_per_axis), L_(period), size_(1) {
  if (n_ != 1 && n_ != 2) {
    throw InvalidGrid("complex dimension must be 1 or 2, got " + std::to_string(n_));
  }
  if (N_ < 8 || N_ % 2 != 0) {
    throw InvalidGrid("points per axis must be even and >= 8, got " + std::to_string(N_));
  }
  if (!(L_ > 0.0) || !std::isfinite(L_)) {
    throw InvalidGrid("period must be positive and finite");
  }
  for (int a = 0; a < 2 * n_; ++a) {
    size_ *= static_cast<std::size_t>(N_);
  }
  if (size_ > max_points) {
    throw InvalidGrid("grid of " + std::to_string(size_) + " points exceeds the budget of " +
                      std::to_string(max_points));
  }
}

double TorusGrid::cell_volume() const { return std::pow(spacing(), real_dim()); }

std::array<int, 4> TorusGrid::multi_index(std::size_t p) const {
  std::array<int, 4> idx{0, 0, 0, 0};
  for (int a = real_dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(p % N_);
    p /= N_;
  }
  return idx;
}

std::size_t TorusGrid::flat_index(const std::array<int, 4>& idx) const {
  std::size_t p = 0;
  for (int a = 0; a < real_dim(); ++a) {
    const int i = ((idx[a] % N_) + N_) % N_;
    p = p * N_ + static_cast<std::size_t>(i);
  }
  return p;
}

std::array<double, 4> TorusGrid::coords(std::size_t p) const {
  const auto idx = multi_index(p);
  std::array<double, 4> x{0, 0, 0, 0};
  const double h = spacing();
  for (int a = 0; a < real_dim(); ++a) x[a] = idx[a] * h;
  return x;
}

HermitianField::HermitianField(const TorusGrid& g) : grid_(g) {
  const int n = g.complex_dim();
  comps_.assign(static_cast<std::size_t>(n * n), std::vector<double>(g.size(), 0.0));
}

HermMat HermitianField::at(std::size_t p) const {
  const int n = dim();
  HermMat m(n, n);
  if (n == 1) {
    m(0, 0) = comps_[0][p];
  } else {
    m(0, 0) = comps_[0][p];
    m(1, 1) = comps_[1][p];
    m(0, 1) = cd(comps_[2][p], comps_[3][p]);
    m(1, 0) = std::conj(m(0, 1));
  }
  return m;
}

void HermitianField::set(std::size_t p, const HermMat& m) {
  if (dim() == 1) {
    comps_[0][p] = m(0, 0).real();
  } else {
    comps_[0][p] = m(0, 0).real();
    comps_[1][p] = m(1, 1).real();
    const cd b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    comps_[2][p] = b.real();
    comps_[3][p] = b.imag();
  }
}

double sup_abs(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s = std::max(s, std::abs(v));
  return s;
}

double max_value(const ScalarField& f) {
  return *std::max_element(f.values.begin(), f.values.end());
}

double min_value(const ScalarField& f) {
  return *std::min_element(f.values.begin(), f.values.end());
}

double grid_mean(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s / static_cast<double>(f.size());
}

}  // namespace maflow
