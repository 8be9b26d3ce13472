#pragma once

#include <utility>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

/// a = Σ β_ν γ_ν γ_ν^* with unit γ_ν and C1 <= β_ν <= C2.
///
/// For n = 2 the frame is the set of Bloch-sphere points of a subdivided
/// octahedron (level k gives 4k² + 2 vectors, the two poles being e1 and
/// e2). The level is the smallest one whose inscribed radius admits the
/// requested eigenvalue range, so the frame depends only on (λ, Λ).
struct FrameDecomposition {
  int dim = 1;
  int level = 0;
  std::vector<CVec> frame;
  std::vector<double> betas;
  double C1 = 0.0;
  double C2 = 0.0;
  /// Positivity shift actually used.
  double delta = 0.0;

  HermMat reconstruct() const;
};

/// Default δ schedule: λ/(2N), halved on failure down to λ/(64N).
/// Throws EigRangeViolation if an eigenvalue of a leaves [lambda, Lambda],
/// ShiftFailure if no δ in the schedule gives a frame fine enough.
FrameDecomposition frame_decompose(const HermMat& a, std::pair<double, double> eig_range);

/// Unit vectors of the level-k frame; first two are e1, e2.
std::vector<CVec> octahedral_frame(int level);
/// Smallest distance from the origin to the faces of the level-k polytope
/// inscribed in the Bloch sphere.
double octahedral_inradius(int level);

}  // namespace maflow
