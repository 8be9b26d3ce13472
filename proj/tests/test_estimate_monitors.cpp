#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "maflow/errors.hpp"
#include "maflow/monitors.hpp"
#include "support.hpp"

using namespace maflow;
using test::kTwoPi;

namespace {

HermitianField identity_field(const TorusGrid& grid) {
  HermitianField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) f.set(p, HermMat::Identity(grid.complex_dim(), grid.complex_dim()));
  return f;
}

// Spatially constant u(t) = a e^{-t} on times 0, 0.1, ..., t_end.
struct ExpSeries {
  std::vector<double> times;
  std::vector<ScalarField> u;
  std::vector<MetricInverseField> ginv;

  ExpSeries(const TorusGrid& grid, double a, double t_end) {
    for (int k = 0; k * 0.1 <= t_end + 1e-12; ++k) {
      times.push_back(k * 0.1);
      u.emplace_back(grid, a * std::exp(-k * 0.1));
      ginv.push_back(identity_field(grid));
    }
  }
};

MonitorSeries exp_monitor_series(double t_end) {
  MonitorSeries s;
  for (int k = 0; k * 0.1 <= t_end + 1e-12; ++k) {
    MonitorRecord r;
    r.t = k * 0.1;
    r.osc_u = std::exp(-r.t);
    r.sup_dphitilde_dt = std::exp(-r.t);
    s.records.push_back(r);
  }
  return s;
}

}  // namespace

TEST_SUITE("estimate_monitors") {

TEST_CASE("records of the stationary flow") {
  for (int n : {1, 2}) {
    TorusGrid grid(n, 8);
    FlowEngine engine(build_metric(grid, MetricPreset::hermitian_nonkahler(0.3)), ScalarField(grid));
    SpectralOps ops(grid);
    const FlowState s = engine.initial_state();
    const MonitorRecord r = monitor_basic(s, engine.metric_inverse(), engine.weights(), ops);
    CHECK(r.sup_dphidt == 0.0);
    CHECK(r.osc_u == 0.0);
    CHECK(r.trace_max == doctest::Approx(n).epsilon(1e-14));
    CHECK(r.eig_min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.eig_max == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(monitor_Q(s, engine.metric_inverse(), 1.0, 0.0) ==
          doctest::Approx(std::log(static_cast<double>(n)) + 1.0).epsilon(1e-14));
  }
}

TEST_CASE("at t = 0 sup |dphi/dt| is sup |F|") {
  TorusGrid grid(2, 8);
  const ScalarField F = TrigPoly::random(81, 4, kTwoPi, 5, 2, 0.1).sample(grid);
  FlowEngine engine(build_metric(grid, MetricPreset::hermitian_nonkahler(0.3)), F);
  SpectralOps ops(grid);
  const MonitorRecord r = monitor_basic(engine.initial_state(), engine.metric_inverse(), engine.weights(), ops);
  CHECK(r.sup_dphidt == sup_abs(F));
}

TEST_CASE("simulate on a manufactured source") {
  TorusGrid grid(1, 16);
  const MetricField g = build_metric(grid, MetricPreset::hermitian_nonkahler(0.3));
  const TrigPoly psi = TrigPoly::parse("0.004 1 0 0; 0.002 0 1 0.5", 2, kTwoPi);
  const ScalarField F = flow_rhs(psi.sample(grid), g, ScalarField(grid)).first;
  FlowEngine engine(g, F);
  StepControl ctrl;
  ctrl.scheme = TimeScheme::implicit_euler;
  MonitorConfig cfg;
  cfg.holder.sample_pairs = 2000;
  const RunReport rep = simulate(engine, 3.0, ctrl, cfg);
  const auto& rec = rep.series.records;
  REQUIRE(rec.size() == 31);
  CHECK(rep.sup_F == sup_abs(F));
  for (std::size_t k = 0; k < rec.size(); ++k) {
    CAPTURE(k);
    CHECK(rec[k].Q_max >= std::log(rec[k].trace_max));
    CHECK(rec[k].sup_dphidt <= rep.sup_F + 1e-12);
    // non-increasing until θ reaches its round-off floor
    if (k > 0 && rec[k - 1].osc_u > 10.0 * rec[k - 1].u_floor) CHECK(rec[k].osc_u <= rec[k - 1].osc_u);
    if (k > 0) CHECK(rec[k].holder_seminorm >= rec[k - 1].holder_seminorm);
    CHECK(std::abs(rec[k].mean_phitilde) <= 1e-15);
  }
  CHECK(rep.C_star >= 1.0);
  CHECK(rep.contraction.theta.size() == 4);
  CHECK(rep.windows.size() == 3);

  const std::string csv = rep.series.to_csv();
  CHECK(csv.rfind("t,sup_dphidt,osc_u,trace_max,eig_min,eig_max,Q_max,holder_seminorm,liyau_max,"
                  "mean_phitilde\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 32);
}

TEST_CASE("parabolic distance is periodic") {
  TorusGrid grid(1, 8);
  const double h = grid.spacing();
  const std::size_t a = grid.flat_index({0, 0, 0, 0}), b = grid.flat_index({7, 0, 0, 0});
  CHECK(parabolic_distance(grid, a, 0.0, b, 0.0) == doctest::Approx(h));
  CHECK(parabolic_distance(grid, a, 0.0, a, 4.0) == doctest::Approx(2.0));
  CHECK(parabolic_distance(grid, a, 0.0, grid.flat_index({4, 4, 0, 0}), 0.0) ==
        doctest::Approx(std::sqrt(2.0) * std::numbers::pi));
}

TEST_CASE("Holder seminorm of a constant field is zero") {
  TorusGrid grid(1, 8);
  HolderConfig cfg;
  std::vector<std::pair<double, HermitianField>> snaps;
  for (double t : {0.5, 0.7, 0.9}) snaps.emplace_back(t, identity_field(grid));
  CHECK(holder_seminorm(snaps, cfg) == 0.0);
}

TEST_CASE("sampled Holder seminorm against the exhaustive value") {
  TorusGrid grid(1, 16);
  HermitianField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) f.component(0)[p] = 1.0 + 0.1 * std::cos(grid.coords(p)[0]);
  HolderConfig cfg;
  cfg.alpha = 0.5;
  cfg.epsilon = 0.5;
  std::vector<std::pair<double, HermitianField>> snaps;
  for (double t : {0.4, 0.5, 0.6}) snaps.emplace_back(t, f);
  const double S = holder_seminorm_exhaustive(snaps, cfg);
  REQUIRE(S > 0.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.rng_seed = seed;
    const double est = holder_seminorm(snaps, cfg);
    CHECK(est >= 0.9 * S);
    CHECK(est <= S);
  }
  snaps.pop_back();
  CHECK_THROWS_AS(holder_seminorm(snaps, cfg), InsufficientSnapshots);
}

TEST_CASE("Holder estimator is reproducible and monotone") {
  TorusGrid grid(1, 8);
  HolderConfig cfg;
  cfg.rng_seed = 99;
  cfg.sample_pairs = 500;
  auto field = [&](double t) {
    HermitianField f(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto x = grid.coords(p);
      f.component(0)[p] = 1.0 + 0.1 * std::sin(x[0] + t) * std::cos(x[1]);
    }
    return f;
  };
  HolderEstimator a(grid, cfg), b(grid, cfg);
  double prev = 0.0;
  for (double t : {0.0, 0.5, 1.0, 1.5}) {
    const double ea = a.add(t, field(t)), eb = b.add(t, field(t));
    CHECK(ea == eb);
    CHECK(ea >= prev);
    prev = ea;
  }
  CHECK(a.snapshots() == 3);
}

TEST_CASE("Li-Yau quantity closed forms") {
  TorusGrid grid(1, 8);
  std::vector<double> times{0.1, 0.2, 0.3};
  std::vector<ScalarField> u(3, ScalarField(grid, 2.0));
  std::vector<MetricInverseField> ginv(3, identity_field(grid));
  for (double q : liyau_quantity(times, u, ginv, 1.5)) CHECK(std::abs(q) <= 1e-15);

  const ExpSeries e(grid, 3.0, 1.0);
  const std::vector<double> q = liyau_quantity(e.times, e.u, e.ginv, 1.5);
  REQUIRE(q.size() == e.times.size());
  for (std::size_t k = 0; k < q.size(); ++k) CHECK(q[k] == doctest::Approx(1.5 * e.times[k]).epsilon(1e-12));
  const std::vector<double> br = liyau_bracket(e.times, e.u, e.ginv, 1.5);
  for (double v : br) CHECK(v == doctest::Approx(1.5).epsilon(1e-12));

  u[1][3] = -1.0;
  CHECK_THROWS_AS(liyau_quantity(times, u, ginv, 1.5), NonPositiveU);
}

TEST_CASE("Li-Yau bracket of a spatial profile") {
  // u = 2 + cos x1 frozen in time: f_t = 0 and |∂f|² = g^{11̄} |∂_1 f|^2.
  TorusGrid grid(1, 64);
  std::vector<double> times{0.1, 0.2};
  ScalarField u(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) u[p] = 2.0 + std::cos(grid.coords(p)[0]);
  const std::vector<ScalarField> us(2, u);
  const std::vector<MetricInverseField> ginv(2, identity_field(grid));
  double expect = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.coords(p)[0];
    const double d = -std::sin(x) / (2.0 + std::cos(x));
    expect = std::max(expect, 0.25 * d * d);
  }
  for (double v : liyau_bracket(times, us, ginv, 1.5)) CHECK(v == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("envelope fit") {
  std::vector<double> t, y;
  for (int k = 2; k <= 10; ++k) {
    t.push_back(0.1 * k);
    y.push_back(1.0 + 2.0 / (0.1 * k));
  }
  const EnvelopeFit f = envelope_fit(t, y);
  CHECK(f.C1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.C2 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.certified);
  y[4] += 0.5;
  const EnvelopeFit g = envelope_fit(t, y);
  CHECK(g.certified);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(y[k] <= g.C1 + g.C2 / t[k] + 1e-12);
}

TEST_CASE("Harnack check on an exponential") {
  TorusGrid grid(1, 8);
  const ExpSeries e(grid, 1.0, 1.0);
  const HarnackResult r = harnack_check(e.times, e.u, 0.5, 1.0);
  CHECK(r.fit.C1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.fit.C2 == 0.0);
  CHECK(r.fit.C3 == 0.0);
  CHECK(r.fit.finite);
  CHECK(r.holds);
  CHECK_FALSE(r.unverifiable);
  CHECK(r.sup_t1 / r.inf_t2 == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(harnack_check(e.times, e.u, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(harnack_check(e.times, e.u, 0.55, 1.0), std::invalid_argument);

  std::vector<ScalarField> u = e.u;
  u.back()[0] = 0.0;
  CHECK(harnack_check(e.times, u, 0.5, 1.0).unverifiable);
  u = e.u;
  u[3][0] = -1.0;
  CHECK_THROWS_AS(harnack_check(e.times, u, 0.5, 1.0), NonPositiveU);
}

TEST_CASE("contraction and decay") {
  MonitorSeries zero;
  for (int k = 0; k <= 30; ++k) {
    MonitorRecord r;
    r.t = 0.1 * k;
    zero.records.push_back(r);
  }
  const ContractionResult z = contraction_and_decay(zero);
  CHECK(z.delta == 0.0);
  CHECK(z.ratios == 0);
  CHECK(z.fit.degenerate);

  const ContractionResult e = contraction_and_decay(exp_monitor_series(5.0));
  CHECK(e.delta == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(e.ratios == 4);
  CHECK(e.fit.eta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.fit.C == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(e.fit.degenerate);
  CHECK(e.fit.t_hi == doctest::Approx(5.0));

  CHECK_THROWS_AS(contraction_and_decay(exp_monitor_series(1.5)), SeriesTooShort);
  CHECK_THROWS_AS(contraction_and_decay(MonitorSeries{}), SeriesTooShort);
}

TEST_CASE("unresolved samples are excluded") {
  MonitorSeries s = exp_monitor_series(5.0);
  for (auto& r : s.records) r.u_floor = std::exp(-2.5);
  const ContractionResult c = contraction_and_decay(s);
  // θ(m-1) resolved only for m - 1 in {0, 1, 2}
  CHECK(c.ratios == 2);
  CHECK(c.fit.t_hi <= 2.5);
  CHECK(c.fit.samples >= 10);
  CHECK(c.fit.eta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("monitor configuration validation") {
  MonitorConfig cfg;
  CHECK_NOTHROW(cfg.validate(2.0));
  cfg.alpha_ly = 2.0;
  CHECK_THROWS_AS(cfg.validate(2.0), ConfigError);
  cfg.alpha_ly = 1.5;
  cfg.holder.epsilon = 3.0;
  CHECK_THROWS_AS(cfg.validate(2.0), ConfigError);
  cfg.holder.epsilon = 0.5;
  cfg.holder.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(2.0), ConfigError);
}

}  // TEST_SUITE
