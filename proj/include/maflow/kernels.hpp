#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow::kernels {

/// Result of the pointwise right-hand-side assembly.
struct RhsStats {
  /// Smallest grid index whose g' failed Cholesky; npos if none.
  std::size_t bad_point = static_cast<std::size_t>(-1);
  double min_eig = std::numeric_limits<double>::infinity();
  double max_inverse_trace = 0.0;
  bool ok() const { return bad_point == static_cast<std::size_t>(-1); }
};

/// Sets the worker thread cap; 0 restores the OpenMP default.
void set_thread_cap(int threads);
int thread_count();

// OpenMP-parallel pointwise kernels. Min/max reductions only, so results are
// bitwise independent of the thread count.

/// gprime = g + hess; rhs = log det gprime / det g - source. g_inv holds g^{-1}.
RhsStats flow_rhs(const HermitianField& g, const HermitianField& g_inv,
                  const HermitianField& hess, const std::vector<double>& source,
                  HermitianField& gprime, std::vector<double>& rhs);

/// Pointwise inverse; returns false (and the first bad index) on failure.
bool invert(const HermitianField& a, HermitianField& inv, std::size_t* bad_point = nullptr);

/// out = tr(inv * hess) pointwise.
void contract(const HermitianField& inv, const HermitianField& hess, std::vector<double>& out);

/// Pointwise log det; throws PositivityViolation on failure.
std::vector<double> log_det(const HermitianField& a);

namespace reference {

// Serial implementations through the generic HermMat routines; kept as the
// oracle for the parallel kernels and as the benchmark baseline.

RhsStats flow_rhs(const HermitianField& g, const HermitianField& g_inv,
                  const HermitianField& hess, const std::vector<double>& source,
                  HermitianField& gprime, std::vector<double>& rhs);

bool invert(const HermitianField& a, HermitianField& inv, std::size_t* bad_point = nullptr);

void contract(const HermitianField& inv, const HermitianField& hess, std::vector<double>& out);

}  // namespace reference

}  // namespace maflow::kernels
