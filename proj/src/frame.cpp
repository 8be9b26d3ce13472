#include "maflow/frame.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "maflow/errors.hpp"
#include "maflow/herm.hpp"

namespace maflow {

namespace {

constexpr int kMaxLevel = 32;
constexpr int kShiftHalvings = 5;

struct Polytope {
  std::vector<Eigen::Vector3d> pts;
  std::vector<std::array<int, 3>> tris;
};

Polytope build_polytope(int k) {
  Polytope poly;
  std::map<std::array<int, 3>, int> index;
  auto vertex = [&](int i, int j, int l, int sx, int sy, int sz) {
    const std::array<int, 3> key{sx * i, sy * j, sz * l};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    Eigen::Vector3d v(key[0], key[1], key[2]);
    poly.pts.push_back(v.normalized());
    const int id = static_cast<int>(poly.pts.size()) - 1;
    index.emplace(key, id);
    return id;
  };
  // Poles first so that e1 and e2 lead the frame.
  vertex(0, 0, k, 1, 1, 1);
  vertex(0, 0, k, 1, 1, -1);
  for (int sz : {1, -1})
    for (int sy : {1, -1})
      for (int sx : {1, -1}) {
        auto v = [&](int i, int j) { return vertex(i, j, k - i - j, sx, sy, sz); };
        for (int i = 0; i < k; ++i)
          for (int j = 0; i + j < k; ++j) {
            poly.tris.push_back({v(i, j), v(i + 1, j), v(i, j + 1)});
            if (i + j + 2 <= k) poly.tris.push_back({v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)});
          }
      }
  return poly;
}

double plane_distance(const Polytope& poly, const std::array<int, 3>& t) {
  const Eigen::Vector3d& a = poly.pts[t[0]];
  const Eigen::Vector3d n = (poly.pts[t[1]] - a).cross(poly.pts[t[2]] - a).normalized();
  return std::abs(n.dot(a));
}

CVec bloch_vector(const Eigen::Vector3d& p) {
  CVec g(2);
  if (p.z() <= -1.0 + 1e-15) {
    g << 0.0, 1.0;
    return g;
  }
  const double c = std::sqrt(0.5 * (1.0 + p.z()));
  g << cd(c, 0.0), cd(p.x(), p.y()) / (2.0 * c);
  return g.normalized();
}

// Weights w >= 0 with Σ w = 1 and Σ w p on the ray through dir, and the
// scale s with s * dir = Σ w p. Returns false if the ray misses the face.
bool pierce(const Polytope& poly, const std::array<int, 3>& t, const Eigen::Vector3d& dir,
            Eigen::Vector3d& w, double& s) {
  Eigen::Matrix3d P;
  P << poly.pts[t[0]], poly.pts[t[1]], poly.pts[t[2]];
  const Eigen::Vector3d raw = P.partialPivLu().solve(dir);
  const double sum = raw.sum();
  if (!(sum > 0.0)) return false;
  if (raw.minCoeff() < -1e-13 * sum) return false;
  w = raw.cwiseMax(0.0) / raw.cwiseMax(0.0).sum();
  s = 1.0 / sum;
  return true;
}

}  // namespace

std::vector<CVec> octahedral_frame(int level) {
  const Polytope poly = build_polytope(level);
  std::vector<CVec> out;
  out.reserve(poly.pts.size());
  for (const auto& p : poly.pts) out.push_back(bloch_vector(p));
  return out;
}

double octahedral_inradius(int level) {
  const Polytope poly = build_polytope(level);
  double r = 1.0;
  for (const auto& t : poly.tris) r = std::min(r, plane_distance(poly, t));
  return r;
}

HermMat FrameDecomposition::reconstruct() const {
  HermMat m = HermMat::Zero(dim, dim);
  for (std::size_t v = 0; v < frame.size(); ++v) m += betas[v] * frame[v] * frame[v].adjoint();
  return m;
}

FrameDecomposition frame_decompose(const HermMat& a, std::pair<double, double> eig_range) {
  const auto [lam, Lam] = eig_range;
  if (!(lam > 0.0) || !(lam <= Lam)) throw EigRangeViolation("eigenvalue range must satisfy 0 < λ <= Λ");
  const int n = static_cast<int>(a.rows());
  const auto [lo, hi] = eigen_range(a);
  const double slack = 1e-12 * Lam;
  if (lo < lam - slack || hi > Lam + slack) {
    throw EigRangeViolation("eigenvalues [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] outside [" + std::to_string(lam) + ", " + std::to_string(Lam) + "]");
  }

  FrameDecomposition out;
  out.dim = n;
  if (n == 1) {
    CVec e(1);
    e << 1.0;
    out.frame = {e};
    out.betas = {a(0, 0).real()};
    out.C1 = lam;
    out.C2 = Lam;
    return out;
  }

  for (int k = 1; k <= kMaxLevel; ++k) {
    const double inr = octahedral_inradius(k);
    const double N = 4.0 * k * k + 2.0;
    for (int h = 0; h <= kShiftHalvings; ++h) {
      const double delta = lam / (2.0 * N) / std::ldexp(1.0, h);
      const double rho = (Lam - lam) / (Lam + lam - delta * N);
      if (inr < rho) continue;

      const Polytope poly = build_polytope(k);
      // a' = a - δS with S = (N/2) I; Bloch form a' = (τ I + x.σ)/2.
      const double tau = a(0, 0).real() + a(1, 1).real() - delta * N;
      const Eigen::Vector3d x(2.0 * a(0, 1).real(), -2.0 * a(0, 1).imag(),
                              a(0, 0).real() - a(1, 1).real());
      const std::size_t M = poly.pts.size();
      std::vector<double> c(M, tau / static_cast<double>(M));
      const double r = x.norm();
      if (r > 0.0) {
        const Eigen::Vector3d dir = x / r;
        bool hit = false;
        for (const auto& t : poly.tris) {
          Eigen::Vector3d w;
          double s;
          if (!pierce(poly, t, dir, w, s)) continue;
          const double mu = r / (tau * s);
          if (mu > 1.0) break;
          for (auto& v : c) v *= (1.0 - mu);
          for (int q = 0; q < 3; ++q) c[t[q]] += tau * mu * w[q];
          hit = true;
          break;
        }
        if (!hit) continue;
      }

      out.level = k;
      out.delta = delta;
      out.frame.clear();
      for (const auto& p : poly.pts) out.frame.push_back(bloch_vector(p));
      out.betas.resize(M);
      // c >= 0 up to rounding; clamping keeps β >= δ exact.
      for (std::size_t v = 0; v < M; ++v) out.betas[v] = std::max(c[v], 0.0) + delta;
      out.C1 = delta;
      out.C2 = 2.0 * (Lam - 0.5 * delta * N) + delta;
      return out;
    }
  }
  throw ShiftFailure("no frame up to level " + std::to_string(kMaxLevel) +
                     " admits the eigenvalue range");
}

}  // namespace maflow
