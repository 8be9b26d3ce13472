#include "maflow/trig.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "maflow/errors.hpp"

namespace maflow {

double TrigPoly::wavenumber_scale() const { return 2.0 * std::numbers::pi / period_; }

TrigPoly& TrigPoly::add(double amp, std::array<int, 4> k, double phase) {
  terms_.push_back({amp, k, phase});
  return *this;
}

TrigPoly TrigPoly::scaled(double s) const {
  TrigPoly out = *this;
  out.constant_ *= s;
  for (auto& t : out.terms_) t.amp *= s;
  return out;
}

TrigPoly TrigPoly::plus(const TrigPoly& o) const {
  TrigPoly out = *this;
  out.constant_ += o.constant_;
  out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
  return out;
}

double TrigPoly::eval(const std::array<double, 4>& x) const {
  const double s = wavenumber_scale();
  double v = constant_;
  for (const auto& t : terms_) {
    double arg = t.phase;
    for (int a = 0; a < real_dim_; ++a) arg += s * t.k[a] * x[a];
    v += t.amp * std::cos(arg);
  }
  return v;
}

TrigPoly TrigPoly::derivative(int axis) const {
  const double s = wavenumber_scale();
  TrigPoly out(real_dim_, period_, 0.0);
  for (const auto& t : terms_) {
    if (t.k[axis] == 0) continue;
    // d/dx A cos(theta) = A s k cos(theta + pi/2)
    out.add(t.amp * s * t.k[axis], t.k, t.phase + 0.5 * std::numbers::pi);
  }
  return out;
}

HermMat TrigPoly::complex_hessian(const std::array<double, 4>& x) const {
  const int n = real_dim_ / 2;
  const double s = wavenumber_scale();
  HermMat h = HermMat::Zero(n, n);
  for (const auto& t : terms_) {
    double arg = t.phase;
    for (int a = 0; a < real_dim_; ++a) arg += s * t.k[a] * x[a];
    // ∂_a ∂_b A cos(theta) = -A s^2 k_a k_b cos(theta)
    const double c = -t.amp * s * s * std::cos(arg);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double ka = t.k[2 * i], kb = t.k[2 * i + 1];
        const double kc = t.k[2 * j], kd = t.k[2 * j + 1];
        h(i, j) += 0.25 * c * cd(ka * kc + kb * kd, ka * kd - kb * kc);
      }
    }
  }
  return h;
}

int TrigPoly::max_wavenumber() const {
  int m = 0;
  for (const auto& t : terms_)
    for (int a = 0; a < real_dim_; ++a) m = std::max(m, std::abs(t.k[a]));
  return m;
}

ScalarField TrigPoly::sample(const TorusGrid& grid) const {
  ScalarField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) f[p] = eval(grid.coords(p));
  return f;
}

TrigPoly TrigPoly::parse(const std::string& text, int real_dim, double period) {
  TrigPoly out(real_dim, period, 0.0);
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    std::stringstream ss(item);
    std::vector<double> nums;
    double v;
    while (ss >> v) nums.push_back(v);
    if (!ss.eof()) throw ConfigError("malformed trigonometric term '" + item + "'");
    if (nums.empty()) continue;
    if (static_cast<int>(nums.size()) != real_dim + 2) {
      throw ConfigError("trigonometric term '" + item + "' needs " + std::to_string(real_dim + 2) +
                        " numbers (amp, wave vector, phase)");
    }
    std::array<int, 4> k{0, 0, 0, 0};
    for (int a = 0; a < real_dim; ++a) {
      const double kv = nums[1 + a];
      if (kv != std::round(kv)) throw ConfigError("wave vector entries must be integers");
      k[a] = static_cast<int>(kv);
    }
    out.add(nums[0], k, nums[real_dim + 1]);
  }
  return out;
}

std::string TrigPoly::to_string() const {
  std::string s;
  char buf[64];
  auto append_term = [&](double amp, const std::array<int, 4>& k, double phase) {
    if (!s.empty()) s += "; ";
    std::snprintf(buf, sizeof buf, "%.17g", amp);
    s += buf;
    for (int a = 0; a < real_dim_; ++a) s += " " + std::to_string(k[a]);
    std::snprintf(buf, sizeof buf, " %.17g", phase);
    s += buf;
  };
  if (constant_ != 0.0) append_term(constant_, {0, 0, 0, 0}, 0.0);
  for (const auto& t : terms_) append_term(t.amp, t.k, t.phase);
  return s;
}

TrigPoly TrigPoly::random(std::uint64_t seed, int real_dim, double period, int count, int kmax,
                          double amplitude) {
  std::mt19937_64 rng(seed);
  TrigPoly out(real_dim, period, 0.0);
  double total = 0.0;
  for (int m = 0; m < count; ++m) {
    std::array<int, 4> k{0, 0, 0, 0};
    int kinf = 0;
    while (kinf == 0) {
      kinf = 0;
      for (int a = 0; a < real_dim; ++a) {
        k[a] = static_cast<int>(uniform_index(rng, 2 * kmax + 1)) - kmax;
        kinf = std::max(kinf, std::abs(k[a]));
      }
    }
    const double amp = uniform(rng, 0.2, 1.0);
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    out.add(amp, k, phase);
    total += amp;
  }
  return total > 0.0 ? out.scaled(amplitude / total) : out;
}

}  // namespace maflow
