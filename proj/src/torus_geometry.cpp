#include "maflow/torus_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maflow/errors.hpp"
#include "maflow/herm.hpp"

namespace maflow {

namespace {

constexpr double kVolumeRoundoff = 1e-14;

}  // namespace

double volume_form_constant(int n) {
  double k = 1.0;
  for (int i = 1; i <= n; ++i) k *= 2.0 * i;
  return k;
}

MetricPreset MetricPreset::from_name(const std::string& name, double param) {
  if (name == "flat") return flat();
  if (name == "kahler_bump") return kahler_bump(param);
  if (name == "hermitian_nonkahler") return hermitian_nonkahler(param);
  throw ConfigError("unknown metric preset '" + name + "'");
}

std::string MetricPreset::name() const {
  switch (kind) {
    case Kind::flat:
      return "flat";
    case Kind::kahler_bump:
      return "kahler_bump";
    case Kind::hermitian_nonkahler:
      return "hermitian_nonkahler";
  }
  return "unknown";
}

std::vector<TrigPoly> MetricPreset::coefficients(int n, double period) const {
  const int d = 2 * n;
  std::vector<TrigPoly> c;
  if (n == 1) {
    c.emplace_back(d, period, 1.0);
  } else {
    c.emplace_back(d, period, 1.0);
    c.emplace_back(d, period, 1.0);
    c.emplace_back(d, period, 0.0);
    c.emplace_back(d, period, 0.0);
  }
  switch (kind) {
    case Kind::flat:
      break;
    case Kind::kahler_bump: {
      // g = I + ∂∂̄χ for a trigonometric potential χ; closed by construction.
      TrigPoly chi(d, period, 0.0);
      if (n == 1) {
        chi.add(param, {1, 0, 0, 0}).add(0.5 * param, {0, 1, 0, 0}, 0.7);
      } else {
        chi.add(param, {1, 0, 0, 0}).add(0.5 * param, {0, 0, 1, 0}, 0.3);
        chi.add(0.25 * param, {1, 0, 1, 0}, 1.1);
      }
      const double s = 2.0 * std::numbers::pi / period;
      for (const auto& t : chi.terms()) {
        // ∂_a ∂_b A cos(θ) = -A s² k_a k_b cos(θ)
        const double base = -0.25 * t.amp * s * s;
        auto kk = [&](int a, int b) { return static_cast<double>(t.k[a] * t.k[b]); };
        if (n == 1) {
          c[0].add(base * (kk(0, 0) + kk(1, 1)), t.k, t.phase);
        } else {
          c[0].add(base * (kk(0, 0) + kk(1, 1)), t.k, t.phase);
          c[1].add(base * (kk(2, 2) + kk(3, 3)), t.k, t.phase);
          c[2].add(base * (kk(0, 2) + kk(1, 3)), t.k, t.phase);
          c[3].add(base * (kk(0, 3) - kk(1, 2)), t.k, t.phase);
        }
      }
      break;
    }
    case Kind::hermitian_nonkahler: {
      const double e = param;
      const double half_pi = 0.5 * std::numbers::pi;
      if (n == 1) {
        c[0].add(0.5 * e, {1, 0, 0, 0}).add(0.5 * e, {0, 1, 0, 0}, -half_pi);
      } else {
        // g11 = 1 + ε cos x3, g22 = 1 + ε sin x1, g12 = (ε/2)(cos x2 + i sin x4)
        c[0].add(e, {0, 0, 1, 0});
        c[1].add(e, {1, 0, 0, 0}, -half_pi);
        c[2].add(0.5 * e, {0, 1, 0, 0});
        c[3].add(0.5 * e, {0, 0, 0, 1}, -half_pi);
      }
      break;
    }
  }
  return c;
}

MetricField::MetricField(const TorusGrid& grid, MetricPreset preset,
                         std::vector<TrigPoly> definition, double scale)
    : preset_(preset), definition_(std::move(definition)), scale_(scale), samples_(grid) {
  for (int c = 0; c < samples_.num_components(); ++c) {
    auto& comp = samples_.component(c);
    for (std::size_t p = 0; p < grid.size(); ++p) comp[p] = definition_[c].eval(grid.coords(p));
  }
}

HermMat MetricField::analytic(const std::array<double, 4>& x) const {
  const int n = dim();
  HermMat m(n, n);
  if (n == 1) {
    m(0, 0) = definition_[0].eval(x);
  } else {
    m(0, 0) = definition_[0].eval(x);
    m(1, 1) = definition_[1].eval(x);
    m(0, 1) = cd(definition_[2].eval(x), definition_[3].eval(x));
    m(1, 0) = std::conj(m(0, 1));
  }
  return m;
}

HermMat MetricField::analytic_derivative(const std::array<double, 4>& x, int axis) const {
  const int n = dim();
  HermMat m(n, n);
  auto d = [&](int c) { return definition_[c].derivative(axis).eval(x); };
  if (n == 1) {
    m(0, 0) = d(0);
  } else {
    m(0, 0) = d(0);
    m(1, 1) = d(1);
    m(0, 1) = cd(d(2), d(3));
    m(1, 0) = std::conj(m(0, 1));
  }
  return m;
}

MetricField MetricField::rescaled(double lambda) const {
  std::vector<TrigPoly> def;
  def.reserve(definition_.size());
  for (const auto& c : definition_) def.push_back(c.scaled(lambda));
  MetricField out = *this;
  out.definition_ = std::move(def);
  out.scale_ = scale_ * lambda;
  for (int c = 0; c < out.samples_.num_components(); ++c)
    for (double& v : out.samples_.component(c)) v *= lambda;
  return out;
}

double MetricField::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < samples_.size(); ++p) m = std::min(m, eigen_range(at(p)).first);
  return m;
}

MetricInverseField MetricField::inverse() const {
  MetricInverseField inv(grid());
  for (std::size_t p = 0; p < samples_.size(); ++p) inv.set(p, hermitian_inverse(at(p)));
  return inv;
}

MetricField build_metric(const TorusGrid& grid, const MetricPreset& preset, double lambda_floor) {
  MetricField raw(grid, preset, preset.coefficients(grid.complex_dim(), grid.period()), 1.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const HermMat m = raw.at(p);
    if (!is_positive_definite(m)) {
      throw PositivityViolation("metric preset " + preset.name() + " is not positive-definite",
                                p);
    }
    if (eigen_range(m).first < lambda_floor) {
      throw PositivityViolation("metric preset " + preset.name() +
                                    " violates the eigenvalue floor " +
                                    std::to_string(lambda_floor),
                                p);
    }
  }
  return volume_normalize(raw).first;
}

double discrete_volume(const MetricField& g) {
  const int n = g.dim();
  double s = 0.0;
  for (std::size_t p = 0; p < g.grid().size(); ++p) s += std::exp(log_det(g.at(p)));
  return s * g.grid().cell_volume() * volume_form_constant(n);
}

std::pair<MetricField, double> volume_normalize(const MetricField& g) {
  const double vol = discrete_volume(g);
  // Within quadrature round-off of 1: already normalized.
  if (std::abs(vol - 1.0) <= kVolumeRoundoff) return {g, 1.0};
  const double lambda = std::pow(vol, -1.0 / g.dim());
  return {g.rescaled(lambda), lambda};
}

VolumeWeights volume_weights(const MetricField& g) {
  VolumeWeights w{g.grid(), std::vector<double>(g.grid().size())};
  double s = 0.0;
  for (std::size_t p = 0; p < w.weights.size(); ++p) {
    w.weights[p] = std::exp(log_det(g.at(p)));
    s += w.weights[p];
  }
  for (double& v : w.weights) v /= s;
  return w;
}

double integrate(const ScalarField& f, const VolumeWeights& w) {
  if (f.grid != w.grid || f.size() != w.weights.size()) {
    throw GridMismatch("integrand and volume weights live on different grids");
  }
  double s = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) s += f[p] * w.weights[p];
  return s;
}

}  // namespace maflow
