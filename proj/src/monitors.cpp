#include "maflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "maflow/errors.hpp"
#include "maflow/herm.hpp"
#include "maflow/kernels.hpp"
#include "maflow/trig.hpp"

namespace maflow {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kResolvedMin = 1e-14;
constexpr double kTimeMatch = 1e-9;
constexpr int kMinFitSamples = 10;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Eigenvalues of A B for Hermitian positive-definite A, B: those of L^* B L
// with A = L L^*.
std::pair<double, double> product_eigs(const HermMat& a, const HermMat& b) {
  if (a.rows() == 1) {
    const double v = (a(0, 0) * b(0, 0)).real();
    return {v, v};
  }
  Eigen::LLT<HermMat> llt(a);
  const HermMat L = llt.matrixL();
  return eigen_range(HermMat(L.adjoint() * b * L));
}

bool is_resolved(double value, double floor) { return value > std::max(kResolvedMin, floor); }

std::ptrdiff_t find_time(const std::vector<double>& times, double t) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= kTimeMatch) return static_cast<std::ptrdiff_t>(k);
  }
  return -1;
}

// |∂f|²_{g'} = v^* G'^{-1} v with v_i = ∂_i f.
void gradient_norm2(SpectralOps& ops, const ScalarField& f, const MetricInverseField& inv,
                    std::vector<double>& out) {
  const int n = f.grid.complex_dim();
  const std::size_t P = f.size();
  out.assign(P, 0.0);
  if (n == 1) {
    const ComplexField d = ops.d_holo(f, 0);
    const auto& a = inv.component(0);
    for (std::size_t p = 0; p < P; ++p) out[p] = a[p] * std::norm(d[p]);
    return;
  }
  const ComplexField d0 = ops.d_holo(f, 0);
  const ComplexField d1 = ops.d_holo(f, 1);
  const auto& a11 = inv.component(0);
  const auto& a22 = inv.component(1);
  const auto& re = inv.component(2);
  const auto& im = inv.component(3);
  for (std::size_t p = 0; p < P; ++p) {
    const cd a12(re[p], im[p]);
    out[p] = a11[p] * std::norm(d0[p]) + a22[p] * std::norm(d1[p]) +
             2.0 * (std::conj(d0[p]) * a12 * d1[p]).real();
  }
}

}  // namespace

void HolderConfig::validate(double horizon) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("holder.alpha must lie in (0, 1)");
  if (!(epsilon >= 0.0) || !(epsilon < horizon)) {
    throw ConfigError("holder.epsilon must lie in [0, horizon)");
  }
  if (sample_pairs < 1) throw ConfigError("holder.sample_pairs must be positive");
}

void MonitorConfig::validate(double horizon) const {
  if (!(A > 0.0)) throw ConfigError("monitor.A must be positive");
  if (!(alpha_ly > 1.0 && alpha_ly < 2.0)) throw ConfigError("alpha_ly must lie in (1, 2)");
  holder.validate(horizon);
}

std::string MonitorSeries::to_csv() const {
  std::string out =
      "t,sup_dphidt,osc_u,trace_max,eig_min,eig_max,Q_max,holder_seminorm,liyau_max,"
      "mean_phitilde\n";
  char buf[32];
  for (const auto& r : records) {
    const double row[] = {r.t,       r.sup_dphidt, r.osc_u,           r.trace_max, r.eig_min,
                          r.eig_max, r.Q_max,      r.holder_seminorm, r.liyau_max, r.mean_phitilde};
    for (std::size_t c = 0; c < std::size(row); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out += buf;
      out += c + 1 < std::size(row) ? ',' : '\n';
    }
  }
  return out;
}

MonitorRecord monitor_basic(const FlowState& s, const MetricInverseField& g_inv,
                            const VolumeWeights& w, SpectralOps& ops) {
  const TorusGrid& grid = s.phi.grid;
  const std::size_t P = grid.size();
  MonitorRecord r;
  r.t = s.t;
  const auto& u = s.dphi_dt.values;
  r.sup_dphidt = sup_abs(u);
  r.osc_u = max_value(s.dphi_dt) - min_value(s.dphi_dt);

  std::vector<double> tr(P);
  kernels::contract(g_inv, s.gprime, tr);
  r.trace_max = *std::max_element(tr.begin(), tr.end());

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    const auto [a, b] = product_eigs(g_inv.at(p), s.gprime.at(p));
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  r.eig_min = lo;
  r.eig_max = hi;
  r.mean_phitilde = integrate(s.phi_tilde, w);

  const double mu = integrate(s.dphi_dt, w);
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v - mu));
  r.sup_dphitilde_dt = m;

  HessianField h(grid);
  ops.complex_hessian_into(s.phi_tilde, h);
  std::vector<double> lap(P);
  kernels::contract(g_inv, h, lap);
  r.max_laplacian_phitilde = *std::max_element(lap.begin(), lap.end());

  // Rounding in φ is amplified by at most the largest symbol of the
  // linearized operator, tr(g'^{-1}) k_max^2 / 2.
  const double kmax = std::numbers::pi * grid.points_per_axis() / grid.period();
  const double lam = s.max_inverse_trace * 0.5 * kmax * kmax;
  r.u_floor = 16.0 * kEps * (sup_abs(s.phi.values) * lam + r.sup_dphidt + 1.0);
  return r;
}

double monitor_Q(const FlowState& s, const MetricInverseField& g_inv, double A,
                 double sup_phitilde) {
  const std::size_t P = s.phi.size();
  std::vector<double> tr(P);
  kernels::contract(g_inv, s.gprime, tr);
  double q = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < P; ++p) {
    q = std::max(q, std::log(tr[p]) + std::exp(A * (sup_phitilde - s.phi_tilde[p])));
  }
  return q;
}

double parabolic_distance(const TorusGrid& grid, std::size_t x, double t, std::size_t y,
                          double s) {
  const auto ix = grid.multi_index(x);
  const auto iy = grid.multi_index(y);
  const int N = grid.points_per_axis();
  double d2 = 0.0;
  for (int a = 0; a < grid.real_dim(); ++a) {
    int d = std::abs(ix[a] - iy[a]);
    d = std::min(d, N - d);
    const double dx = d * grid.spacing();
    d2 += dx * dx;
  }
  return std::max(std::sqrt(d2), std::sqrt(std::abs(t - s)));
}

HolderEstimator::HolderEstimator(const TorusGrid& grid, HolderConfig cfg)
    : grid_(grid), cfg_(cfg) {}

double HolderEstimator::quotient(std::size_t x, std::size_t a, std::size_t y,
                                 std::size_t b) const {
  const double d = parabolic_distance(grid_, x, times_[a], y, times_[b]);
  if (d == 0.0) return 0.0;
  const HermitianField& fa = fields_[a];
  const HermitianField& fb = fields_[b];
  double diff = std::max(std::abs(fa.component(0)[x] - fb.component(0)[y]), 0.0);
  if (fa.dim() == 2) {
    diff = std::max(diff, std::abs(fa.component(1)[x] - fb.component(1)[y]));
    diff = std::max(diff, std::hypot(fa.component(2)[x] - fb.component(2)[y],
                                     fa.component(3)[x] - fb.component(3)[y]));
  }
  return diff / std::pow(d, cfg_.alpha);
}

double HolderEstimator::add(double t, const HermitianField& gprime) {
  if (gprime.grid() != grid_) throw GridMismatch("snapshot lives on a different grid");
  const std::uint64_t call = calls_++;
  if (t < cfg_.epsilon - kTimeMatch) return estimate_;
  times_.push_back(t);
  fields_.push_back(gprime);
  const std::size_t newest = times_.size() - 1;
  std::mt19937_64 rng(splitmix64(cfg_.rng_seed ^ splitmix64(call)));
  const std::size_t P = grid_.size();
  for (int k = 0; k < cfg_.sample_pairs; ++k) {
    const std::size_t x = uniform_index(rng, P);
    const std::size_t y = uniform_index(rng, P);
    const std::size_t b = uniform_index(rng, times_.size());
    estimate_ = std::max(estimate_, quotient(x, newest, y, b));
  }
  return estimate_;
}

namespace {

std::vector<std::size_t> omega_indices(
    const std::vector<std::pair<double, HermitianField>>& snapshots, const HolderConfig& cfg) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    if (snapshots[k].first >= cfg.epsilon - kTimeMatch) idx.push_back(k);
  }
  if (idx.size() < 2) {
    throw InsufficientSnapshots("need at least two snapshots with t >= epsilon, got " +
                                std::to_string(idx.size()));
  }
  return idx;
}

}  // namespace

double holder_seminorm(const std::vector<std::pair<double, HermitianField>>& snapshots,
                       const HolderConfig& cfg) {
  const auto idx = omega_indices(snapshots, cfg);
  HolderEstimator est(snapshots[idx[0]].second.grid(), cfg);
  for (std::size_t k : idx) est.add(snapshots[k].first, snapshots[k].second);
  return est.estimate();
}

double holder_seminorm_exhaustive(const std::vector<std::pair<double, HermitianField>>& snapshots,
                                  const HolderConfig& cfg) {
  const auto idx = omega_indices(snapshots, cfg);
  const TorusGrid& grid = snapshots[idx[0]].second.grid();
  const std::size_t P = grid.size();
  double best = 0.0;
  for (std::size_t ia = 0; ia < idx.size(); ++ia) {
    for (std::size_t ib = ia; ib < idx.size(); ++ib) {
      const auto& [ta, fa] = snapshots[idx[ia]];
      const auto& [tb, fb] = snapshots[idx[ib]];
      for (std::size_t x = 0; x < P; ++x) {
        for (std::size_t y = 0; y < P; ++y) {
          const double d = parabolic_distance(grid, x, ta, y, tb);
          if (d == 0.0) continue;
          double diff = std::abs(fa.component(0)[x] - fb.component(0)[y]);
          if (fa.dim() == 2) {
            diff = std::max(diff, std::abs(fa.component(1)[x] - fb.component(1)[y]));
            diff = std::max(diff, std::hypot(fa.component(2)[x] - fb.component(2)[y],
                                             fa.component(3)[x] - fb.component(3)[y]));
          }
          best = std::max(best, diff / std::pow(d, cfg.alpha));
        }
      }
    }
  }
  return best;
}

std::vector<double> liyau_bracket(const std::vector<double>& times,
                                  const std::vector<ScalarField>& u,
                                  const std::vector<MetricInverseField>& gprime_inv,
                                  double alpha_ly) {
  const std::size_t K = times.size();
  if (u.size() != K || gprime_inv.size() != K) {
    throw std::invalid_argument("liyau: times, u and g'^{-1} snapshot counts differ");
  }
  if (K < 2) throw InsufficientSnapshots("liyau: need at least two snapshots");
  const TorusGrid& grid = u[0].grid;
  const std::size_t P = grid.size();
  SpectralOps ops(grid);

  std::vector<ScalarField> f;
  f.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    ScalarField lf(grid);
    for (std::size_t p = 0; p < P; ++p) {
      const double v = u[k][p];
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw NonPositiveU("u = " + std::to_string(v) + " at t = " + std::to_string(times[k]) +
                           ", grid index " + std::to_string(p));
      }
      lf[p] = std::log(v);
    }
    f.push_back(std::move(lf));
  }

  std::vector<double> out(K), grad;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == K ? k : k + 1;
    const double dt = times[hi] - times[lo];
    gradient_norm2(ops, f[k], gprime_inv[k], grad);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < P; ++p) {
      const double ft = (f[hi][p] - f[lo][p]) / dt;
      m = std::max(m, grad[p] - alpha_ly * ft);
    }
    out[k] = m;
  }
  return out;
}

std::vector<double> liyau_quantity(const std::vector<double>& times,
                                   const std::vector<ScalarField>& u,
                                   const std::vector<MetricInverseField>& gprime_inv,
                                   double alpha_ly) {
  std::vector<double> q = liyau_bracket(times, u, gprime_inv, alpha_ly);
  for (std::size_t k = 0; k < q.size(); ++k) q[k] *= times[k];
  return q;
}

EnvelopeFit envelope_fit(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.empty()) throw std::invalid_argument("envelope_fit: bad sizes");
  const double K = static_cast<double>(t.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double x = 1.0 / t[k];
    sx += x;
    sy += y[k];
    sxx += x * x;
    sxy += x * y[k];
  }
  EnvelopeFit e;
  const double den = K * sxx - sx * sx;
  e.C2 = den > 0.0 ? (K * sxy - sx * sy) / den : 0.0;
  if (!(e.C2 > 0.0)) e.C2 = 0.0;
  e.C1 = (sy - e.C2 * sx) / K;
  double over = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) over = std::max(over, y[k] - e.C1 - e.C2 / t[k]);
  e.C1 += std::max(over, 0.0);
  e.C1 += 4.0 * kEps * (std::abs(e.C1) + e.C2 / *std::min_element(t.begin(), t.end()));
  e.certified = std::isfinite(e.C1) && std::isfinite(e.C2);
  for (std::size_t k = 0; k < t.size() && e.certified; ++k) {
    e.certified = y[k] <= e.C1 + e.C2 / t[k];
  }
  return e;
}

HarnackFit harnack_fit(const std::vector<double>& t, const std::vector<double>& sup_u,
                       const std::vector<double>& inf_u) {
  // Every constraint has positive coefficients in all three constants, so
  // C3 = C2 = 0 is always completable; the lexicographic minimum then only
  // needs the smallest admissible C1.
  HarnackFit h;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (!(t[j] > t[i])) continue;
      const double lhs = std::log(sup_u[i] / inf_u[j]);
      h.C1 = std::max(h.C1, lhs / (t[j] - t[i]));
    }
  }
  h.finite = std::isfinite(h.C1);
  return h;
}

HarnackResult harnack_check(const std::vector<double>& times, const std::vector<ScalarField>& u,
                            double t1, double t2) {
  if (!(t1 > 0.0) || !(t1 < t2)) throw std::invalid_argument("harnack_check needs 0 < t1 < t2");
  if (times.size() != u.size()) throw std::invalid_argument("harnack_check: size mismatch");
  const auto i1 = find_time(times, t1);
  const auto i2 = find_time(times, t2);
  if (i1 < 0 || i2 < 0) throw std::invalid_argument("harnack_check: t1, t2 must be snapshot times");
  HarnackResult r;
  r.sup_t1 = max_value(u[i1]);
  r.inf_t2 = min_value(u[i2]);
  if (!(r.inf_t2 > 0.0)) {
    r.unverifiable = true;
    return r;
  }
  std::vector<double> ts, sups, infs;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0)) continue;
    const double lo = min_value(u[k]);
    if (!(lo > 0.0)) {
      throw NonPositiveU("inf u = " + std::to_string(lo) + " at t = " + std::to_string(times[k]));
    }
    ts.push_back(times[k]);
    sups.push_back(max_value(u[k]));
    infs.push_back(lo);
  }
  r.fit = harnack_fit(ts, sups, infs);
  const double rhs = r.fit.C2 * std::log(t2 / t1) + r.fit.C3 / (t2 - t1) + r.fit.C1 * (t2 - t1);
  r.holds = r.fit.finite && std::log(r.sup_t1 / r.inf_t2) <= rhs * (1.0 + 4.0 * kEps);
  return r;
}

ContractionResult contraction_and_decay(const MonitorSeries& series) {
  const auto& rec = series.records;
  if (rec.empty()) throw SeriesTooShort("empty series");
  const int m_last = static_cast<int>(std::floor(rec.back().t + kTimeMatch));
  if (rec.front().t > kTimeMatch || m_last < 2) {
    throw SeriesTooShort("series must span at least three integer times");
  }

  // θ and its floor at integer m, interpolating between bracketing records.
  std::vector<double> theta, floor;
  std::size_t k = 0;
  for (int m = 0; m <= m_last; ++m) {
    while (k + 1 < rec.size() && rec[k + 1].t <= m + kTimeMatch) ++k;
    if (std::abs(rec[k].t - m) <= kTimeMatch || k + 1 == rec.size()) {
      theta.push_back(rec[k].osc_u);
      floor.push_back(rec[k].u_floor);
    } else {
      const double s = (m - rec[k].t) / (rec[k + 1].t - rec[k].t);
      theta.push_back((1.0 - s) * rec[k].osc_u + s * rec[k + 1].osc_u);
      floor.push_back(std::max(rec[k].u_floor, rec[k + 1].u_floor));
    }
  }

  ContractionResult out;
  out.theta = theta;
  for (int m = 2; m <= m_last; ++m) {
    if (!is_resolved(theta[m - 1], floor[m - 1])) continue;
    out.delta = std::max(out.delta, theta[m] / theta[m - 1]);
    ++out.ratios;
  }

  std::size_t seg = 0;
  while (seg < rec.size() && is_resolved(rec[seg].sup_dphitilde_dt, rec[seg].u_floor)) ++seg;
  std::size_t start = seg / 2;
  if (seg - start < static_cast<std::size_t>(kMinFitSamples)) {
    start = seg > static_cast<std::size_t>(kMinFitSamples) ? seg - kMinFitSamples : 0;
  }
  DecayFit& fit = out.fit;
  fit.samples = static_cast<int>(seg - start);
  if (fit.samples < 2) return out;
  fit.t_lo = rec[start].t;
  fit.t_hi = rec[seg - 1].t;

  double st = 0, sy = 0, stt = 0, sty = 0;
  const double K = fit.samples;
  for (std::size_t i = start; i < seg; ++i) {
    const double t = rec[i].t, y = std::log(rec[i].sup_dphitilde_dt);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double den = K * stt - st * st;
  const double slope = (K * sty - st * sy) / den;
  const double icpt = (sy - slope * st) / K;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / K;
  for (std::size_t i = start; i < seg; ++i) {
    const double y = std::log(rec[i].sup_dphitilde_dt);
    const double e = y - (icpt + slope * rec[i].t);
    ss_res += e * e;
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.eta = -slope;
  fit.C = std::exp(icpt);
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.degenerate = fit.samples < kMinFitSamples;
  return out;
}

RunMonitor::RunMonitor(FlowEngine& engine, MonitorConfig cfg)
    : engine_(engine),
      cfg_(cfg),
      ops_(std::make_unique<SpectralOps>(engine.grid())),
      holder_(engine.grid(), cfg.holder) {}

RunMonitor::~RunMonitor() = default;

void RunMonitor::operator()(const FlowState& s) {
  MonitorRecord r = monitor_basic(s, engine_.metric_inverse(), engine_.weights(), *ops_);
  sup_phitilde_ = std::max(sup_phitilde_, max_value(s.phi_tilde));
  r.Q_max = monitor_Q(s, engine_.metric_inverse(), cfg_.A, sup_phitilde_);
  r.holder_seminorm = holder_.add(s.t, s.gprime);
  series_.records.push_back(r);

  MetricInverseField inv(engine_.grid());
  std::size_t bad = 0;
  if (!kernels::invert(s.gprime, inv, &bad)) {
    throw PositivityViolation("g' is not positive-definite in a snapshot", bad);
  }
  times_.push_back(s.t);
  u_.push_back(s.dphi_dt);
  gp_inv_.push_back(std::move(inv));
}

RunReport RunMonitor::finish() {
  RunReport rep;
  auto& rec = series_.records;
  rep.sup_F = sup_abs(engine_.source());
  for (const auto& r : rec) {
    rep.C_star = std::max({rep.C_star, r.eig_max, 1.0 / r.eig_min});
  }

  const int m_last = rec.empty() ? 0 : static_cast<int>(std::floor(rec.back().t + kTimeMatch));
  for (int m = 1; m <= m_last; ++m) {
    const auto i0 = find_time(times_, m - 1.0);
    if (i0 < 0) continue;
    WindowDiagnostics w;
    w.m = m;
    w.theta_start = rec[i0].osc_u;
    w.resolved = is_resolved(w.theta_start, rec[i0].u_floor);
    if (w.resolved) {
      const double top = max_value(u_[i0]);
      const double bottom = min_value(u_[i0]);
      std::vector<double> tau;
      std::vector<ScalarField> xi, psi;
      std::vector<MetricInverseField> inv;
      std::vector<std::size_t> idx;
      for (std::size_t k = i0 + 1; k < times_.size(); ++k) {
        const double s = times_[k] - (m - 1.0);
        if (s > 1.1 + kTimeMatch) break;
        tau.push_back(s);
        ScalarField a(engine_.grid()), b(engine_.grid());
        for (std::size_t p = 0; p < a.size(); ++p) {
          a[p] = top - u_[k][p];
          b[p] = u_[k][p] - bottom;
        }
        xi.push_back(std::move(a));
        psi.push_back(std::move(b));
        inv.push_back(gp_inv_[k]);
        idx.push_back(k);
      }
      try {
        const auto bx = liyau_bracket(tau, xi, inv, cfg_.alpha_ly);
        const auto bp = liyau_bracket(tau, psi, inv, cfg_.alpha_ly);
        for (std::size_t k = 0; k < tau.size(); ++k) {
          if (tau[k] < 0.2 - kTimeMatch || tau[k] > 1.0 + kTimeMatch) continue;
          w.tau.push_back(tau[k]);
          w.bracket_xi.push_back(bx[k]);
          w.bracket_psi.push_back(bp[k]);
          MonitorRecord& r = rec[idx[k]];
          r.liyau_max = tau[k] * std::max(bx[k], bp[k]);
        }
        if (!w.tau.empty()) {
          w.envelope_xi = envelope_fit(w.tau, w.bracket_xi);
          w.envelope_psi = envelope_fit(w.tau, w.bracket_psi);
        }
        // Harnack on τ in (0, 1].
        std::size_t keep = 0;
        while (keep < tau.size() && tau[keep] <= 1.0 + kTimeMatch) ++keep;
        const std::vector<double> th(tau.begin(), tau.begin() + keep);
        const std::vector<ScalarField> xh(xi.begin(), xi.begin() + keep);
        const std::vector<ScalarField> ph(psi.begin(), psi.begin() + keep);
        if (find_time(th, 0.5) >= 0 && find_time(th, 1.0) >= 0) {
          w.harnack_xi = harnack_check(th, xh, 0.5, 1.0);
          w.harnack_psi = harnack_check(th, ph, 0.5, 1.0);
          const auto iend = find_time(times_, static_cast<double>(m));
          if (iend >= 0 && !w.harnack_xi.unverifiable) {
            rec[iend].harnack_ratio = w.harnack_xi.sup_t1 / w.harnack_xi.inf_t2;
          }
        }
      } catch (const NonPositiveU& e) {
        w.nonpositive = true;
        w.message = e.what();
      }
    }
    rep.windows.push_back(std::move(w));
  }

  rep.series = series_;
  if (m_last >= 2) rep.contraction = contraction_and_decay(series_);
  return rep;
}

RunReport simulate(FlowEngine& engine, double horizon, const StepControl& ctrl,
                   const MonitorConfig& cfg, FlowState* final_state) {
  cfg.validate(horizon);
  RunMonitor mon(engine, cfg);
  FlowState last = engine.run(horizon, ctrl, [&](const FlowState& s) { mon(s); });
  RunReport rep = mon.finish();
  if (final_state) *final_state = std::move(last);
  return rep;
}

}  // namespace maflow
