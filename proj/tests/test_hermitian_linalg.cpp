#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "maflow/acceptance.hpp"
#include "maflow/errors.hpp"
#include "maflow/frame.hpp"
#include "maflow/normal_frame.hpp"
#include "support.hpp"

using namespace maflow;

namespace {

HermMat diag(std::initializer_list<double> d) {
  HermMat m = HermMat::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
  int i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

double det2(const HermMat& a) { return (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real(); }

}  // namespace

TEST_SUITE("hermitian_linalg") {

TEST_CASE("log_det_ratio") {
  std::mt19937_64 rng(21);
  const HermMat g = random_pd_matrix(rng, 2, 0.5, 3.0);
  CHECK(log_det_ratio(g, g) == 0.0);
  CHECK(log_det_ratio(HermMat(2.0 * g), g) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  double err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const HermMat a = random_pd_matrix(rng, 2, 0.2, 5.0), b = random_pd_matrix(rng, 2, 0.2, 5.0);
    err = std::max(err, std::abs(log_det_ratio(a, b) - std::log(det2(a) / det2(b))));
  }
  CHECK(err <= 1e-13);
  CHECK_THROWS_AS(log_det_ratio(diag({1.0, -1.0}), diag({1.0, 1.0})), PositivityViolation);
  CHECK_THROWS_AS(log_det_ratio(diag({1.0, 1.0}), diag({0.0, 1.0})), PositivityViolation);
}

TEST_CASE("packed kernels agree with the generic ones") {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 100; ++k) {
    const HermMat a = random_pd_matrix(rng, 2, 0.1, 4.0);
    double ld = 0.0;
    REQUIRE(packed::log_det2(a(0, 0).real(), a(1, 1).real(), a(0, 1).real(), a(0, 1).imag(), ld));
    CHECK(ld == doctest::Approx(log_det(a)).epsilon(1e-13));
    CHECK(packed::min_eig2(a(0, 0).real(), a(1, 1).real(), a(0, 1).real(), a(0, 1).imag()) ==
          doctest::Approx(eigen_range(a).first).epsilon(1e-12));
  }
  double out = 0.0;
  CHECK_FALSE(packed::log_det2(1.0, 1.0, 1.0, 0.5, out));
  CHECK_FALSE(packed::log_det1(0.0, out));
}

TEST_CASE("trace_pair") {
  CHECK(trace_pair(diag({1, 1}), diag({1, 1})) == 2.0);
  CHECK(trace_pair(diag({1}), diag({1})) == 1.0);
  CHECK(trace_pair(diag({1, 1}), diag({2.5, 0.25})) == 2.75);
  std::mt19937_64 rng(23);
  double err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const HermMat g = random_pd_matrix(rng, 2, 0.2, 5.0), gp = random_pd_matrix(rng, 2, 0.2, 5.0);
    const Eigen::Matrix2cd m = g.inverse() * gp;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m);
    const double sum = es.eigenvalues().sum().real();
    err = std::max(err, std::abs(trace_pair(hermitian_inverse(g), gp) - sum) / std::abs(sum));
  }
  CHECK(err <= 1e-12);
}

TEST_CASE("inverse and eigenvalue helpers") {
  std::mt19937_64 rng(24);
  const HermMat a = random_pd_matrix(rng, 2, 0.5, 2.0);
  CHECK((hermitian_inverse(a) * a - HermMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  const auto [lo, hi] = relative_eigen_range(diag({2, 4}), diag({1, 8}));
  CHECK(lo == doctest::Approx(0.5));
  CHECK(hi == doctest::Approx(2.0));
  CHECK(hermitian_defect(a) <= 1e-15);
  CHECK(is_positive_definite(a));
  CHECK_FALSE(is_positive_definite(diag({1, 0})));
}

TEST_CASE("normal_frame of an already normal point") {
  const std::vector<CMat> dg0(2, CMat::Zero(2, 2));
  const NormalFrame nf = normal_frame(diag({1, 1}), dg0, diag({2, 1}));
  CHECK((nf.linear_map - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  for (cd b : nf.quadratic_coeffs) CHECK(std::abs(b) == 0.0);
}

TEST_CASE("normal_frame rescales a diagonal metric") {
  const std::vector<CMat> dg0(2, CMat::Zero(2, 2));
  const NormalFrame nf = normal_frame(diag({4, 1}), dg0, diag({0, 0}));
  CHECK((nf.linear_map.cwiseAbs() - diag({0.5, 1}).real()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((pull_back(nf.linear_map, diag({4, 1})) - HermMat::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-15);
}

TEST_CASE("normal_frame of random instances") {
  std::mt19937_64 rng(8101);
  double metric = 0.0, hess = 0.0, deriv = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 2;
    const NormalFrameInstance inst = random_normal_frame_instance(rng, n);
    const NormalFrame nf = normal_frame(inst.g0, inst.dg0, inst.hess0);
    const NormalFrameResiduals r = normal_frame_residuals(nf, inst, 1e-3);
    metric = std::max(metric, r.metric);
    hess = std::max(hess, r.hessian_offdiag);
    deriv = std::max(deriv, r.first_derivative);
    // Hessian diagonal descending
    if (n == 2) {
      const HermMat h = pull_back(nf.linear_map, inst.hess0);
      CHECK(h(0, 0).real() >= h(1, 1).real() - 1e-12);
    }
  }
  CHECK(metric <= 1e-10);
  CHECK(hess <= 1e-10);
  CHECK(deriv <= 1e-10);
  CHECK_THROWS_AS(normal_frame(diag({1, -1}), std::vector<CMat>(2, CMat::Zero(2, 2)), diag({0, 0})),
                  PositivityViolation);
}

TEST_CASE("frame_decompose scalar case") {
  const FrameDecomposition d = frame_decompose(diag({3}), {1.0, 5.0});
  REQUIRE(d.frame.size() == 1);
  CHECK(std::abs(d.frame[0](0) - cd(1, 0)) == 0.0);
  REQUIRE(d.betas.size() == 1);
  CHECK(d.betas[0] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("frame_decompose of the identity") {
  const FrameDecomposition d = frame_decompose(diag({1, 1}), {0.5, 2.0});
  CHECK((d.reconstruct() - HermMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(d.C1 > 0.0);
  for (double b : d.betas) CHECK(b >= d.C1);
  for (double b : d.betas) CHECK(b <= d.C2);
}

TEST_CASE("frame_decompose of random matrices") {
  std::mt19937_64 rng(7101);
  double err = 0.0, min_beta = 1e300;
  std::size_t frame_size = 0;
  for (int k = 0; k < 1000; ++k) {
    const HermMat a = random_pd_matrix(rng, 2, 0.2, 5.0);
    const FrameDecomposition d = frame_decompose(a, {0.2, 5.0});
    err = std::max(err, (d.reconstruct() - a).cwiseAbs().maxCoeff());
    for (double b : d.betas) min_beta = std::min(min_beta, b - d.C1);
    if (k == 0) frame_size = d.frame.size();
    REQUIRE(d.frame.size() == frame_size);
  }
  CHECK(err <= 1e-12);
  CHECK(min_beta >= 0.0);
  CHECK_THROWS_AS(frame_decompose(diag({0.1, 1.0}), {0.2, 5.0}), EigRangeViolation);
}

TEST_CASE("octahedral frames") {
  for (int level = 1; level <= 4; ++level) {
    const auto f = octahedral_frame(level);
    CHECK(f.size() == static_cast<std::size_t>(4 * level * level + 2));
    CHECK(std::abs(f[0](0) - cd(1, 0)) <= 1e-15);
    CHECK(std::abs(f[1](1) - cd(1, 0)) <= 1e-15);
    for (const CVec& v : f) CHECK(std::abs(v.norm() - 1.0) <= 1e-14);
  }
  CHECK(octahedral_inradius(1) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(octahedral_inradius(4) > octahedral_inradius(2));
}

}  // TEST_SUITE
