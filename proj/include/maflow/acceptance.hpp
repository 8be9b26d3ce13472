#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "maflow/normal_frame.hpp"
#include "maflow/runner.hpp"

namespace maflow {

/// Hermitian matrix U diag(λ) U^* with λ uniform in [lo, hi] and U Haar-ish
/// (QR of a complex Gaussian matrix).
HermMat random_pd_matrix(std::mt19937_64& rng, int n, double lo, double hi);

struct NormalFrameInstance {
  HermMat g0;
  std::vector<CMat> dg0;
  HermMat hess0;
};
NormalFrameInstance random_normal_frame_instance(std::mt19937_64& rng, int n);

/// Residuals of a normal frame against the metric model
/// g(z) = g0 + Σ_k (z^k T_k + conj(z^k) T_k^*), T_k = dg0[k].
struct NormalFrameResiduals {
  /// max |J^T g0 conj(J) - I|.
  double metric = 0.0;
  /// max off-diagonal |J^T hess0 conj(J)|.
  double hessian_offdiag = 0.0;
  /// max over i, j of |∂_j g̃_{iī}(0)| by fourth-order centred differences of step h.
  double first_derivative = 0.0;
};
NormalFrameResiduals normal_frame_residuals(const NormalFrame& nf,
                                            const NormalFrameInstance& inst, double h);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<Check> checks;
  double seconds = 0.0;
};

/// One header line per criterion followed by its measured checks.
std::string format_result(const CriterionResult& r);

/// Configurations of the two reference flow runs (1: manufactured n = 1,
/// 2: random-source n = 2 with the Newton oracle).
RunConfig acceptance_config(int which);

/// Criteria 1-11. Runs 1 and 2 are computed once and shared.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(std::ostream* progress = nullptr);
  ~AcceptanceSuite();

  CriterionResult run(int id);
  /// Empty list runs every criterion.
  std::vector<CriterionResult> run(const std::vector<int>& ids);

 private:
  const FlowRun& flow_run(int which);

  std::ostream* progress_;
  std::unique_ptr<FlowRun> run1_;
  std::unique_ptr<FlowRun> run2_;
};

}  // namespace maflow
