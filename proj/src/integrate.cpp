#include "focklab/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "focklab/error.hpp"
#include "focklab/format.hpp"
#include "focklab/logsum.hpp"
#include "focklab/parallel.hpp"
#include "focklab/quadrature.hpp"

namespace focklab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kGridChunk = 4096;
constexpr std::size_t kMcBatch = std::size_t{1} << 16;
constexpr std::size_t kMaxGridPoints = 400'000'000;

int frame_dim(const GaussianFrame& frame) {
  if (frame.center.empty()) throw Error(ErrorKind::InvalidInput, "frame has no dimension");
  if (!(frame.rate > 0.0)) throw Error(ErrorKind::InvalidInput, "frame rate must be > 0");
  return static_cast<int>(frame.center.size());
}

// Reports the refined value. The difference to the coarse rule bounds its
// error whenever the rule converges at least linearly in the node count,
// which covers integrands with |x|^s kinks at zeros of f.
IntegralEstimate from_logs(double l_coarse, double l_fine, Method method) {
  double coarse = std::exp(l_coarse);
  double fine = std::exp(l_fine);
  return {fine, l_fine, std::abs(coarse - fine), method};
}

// Tensor Gauss-Hermite sum for int h(x) dx with x = center + s y.
double gh_log_integral(const LogIntegrand& h, const GaussianFrame& frame, int n) {
  const int m = frame_dim(frame);
  const auto& rule = quadrature::gauss_hermite(n);
  const double s = std::sqrt(2.0 / frame.rate);
  std::vector<double> log_w(n);
  for (int i = 0; i < n; ++i) log_w[i] = std::log(rule.weights[i]);

  std::size_t total = 1;
  for (int d = 0; d < m; ++d) {
    total *= static_cast<std::size_t>(n);
    if (total > kMaxGridPoints) {
      throw Error(ErrorKind::MethodUnavailable,
                  "tensor Gauss-Hermite grid too large; use Monte Carlo for this dimension");
    }
  }
  const std::size_t chunks = (total + kGridChunk - 1) / kGridChunk;
  auto partial = parallel_map(chunks, [&](std::size_t c) {
    LogSum acc;
    Point x(m);
    const std::size_t end = std::min(total, (c + 1) * kGridChunk);
    for (std::size_t flat = c * kGridChunk; flat < end; ++flat) {
      std::size_t rest = flat;
      double lw = 0.0, y2 = 0.0;
      for (int d = 0; d < m; ++d) {
        const std::size_t i = rest % n;
        rest /= n;
        const double y = rule.nodes[i];
        lw += log_w[i];
        y2 += y * y;
        x[d] = frame.center[d] + s * y;
      }
      const double l = h(x);
      if (l == kNegInf) continue;
      acc.add(lw + l + y2);
    }
    return acc;
  });
  LogSum sum;
  for (const auto& p : partial) sum.merge(p);
  return m * std::log(s) + sum.log();
}

struct Direction {
  Point omega;
  double log_weight;
};

std::vector<Direction> angular_rule(int m, int n) {
  std::vector<Direction> dirs;
  if (m == 1) {
    dirs.push_back({{1.0}, 0.0});
    dirs.push_back({{-1.0}, 0.0});
  } else if (m == 2) {
    const double w = std::log(2.0 * std::numbers::pi / n);
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / n;
      dirs.push_back({{std::cos(th), std::sin(th)}, w});
    }
  } else {
    const auto& leg = quadrature::gauss_legendre(n);
    const int n_phi = 2 * n;
    const double w_phi = std::log(2.0 * std::numbers::pi / n_phi);
    for (int i = 0; i < n; ++i) {
      const double ct = leg.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < n_phi; ++j) {
        const double ph = 2.0 * std::numbers::pi * (j + 0.5) / n_phi;
        dirs.push_back({{st * std::cos(ph), st * std::sin(ph), ct},
                        std::log(leg.weights[i]) + w_phi});
      }
    }
  }
  return dirs;
}

// int h(x) dx = s^m/2 * sum_i W_i sum_j V_j h(center + s sqrt(tau_i) omega_j) e^{tau_i}
double radial_log_integral(const LogIntegrand& h, const GaussianFrame& frame, int nr, int na) {
  const int m = frame_dim(frame);
  if (m > 3) {
    throw Error(ErrorKind::MethodUnavailable,
                "radial quadrature supports m <= 3; use Gauss-Hermite or Monte Carlo");
  }
  const auto& lag = quadrature::gauss_laguerre(nr, 0.5 * (m - 2));
  const auto dirs = angular_rule(m, na);
  const double s = std::sqrt(2.0 / frame.rate);
  auto partial = parallel_map(static_cast<std::size_t>(nr), [&](std::size_t i) {
    LogSum acc;
    Point x(m);
    const double tau = lag.nodes[i];
    const double r = s * std::sqrt(tau);
    const double lw = std::log(0.5 * lag.weights[i]) + tau;
    for (const auto& dir : dirs) {
      for (int d = 0; d < m; ++d) x[d] = frame.center[d] + r * dir.omega[d];
      const double l = h(x);
      if (l == kNegInf) continue;
      acc.add(lw + dir.log_weight + l);
    }
    return acc;
  });
  LogSum sum;
  for (const auto& p : partial) sum.merge(p);
  return m * std::log(s) + sum.log();
}

void require_integrable(const TestFunction& f, const FockParams& params) {
  params.validate();
  if (f.dim() != params.m) {
    throw Error(ErrorKind::InvalidInput, "function dimension " + std::to_string(f.dim()) +
                                             " does not match m = " + std::to_string(params.m));
  }
  if (f.radial_bound().quad >= 0.5 * params.alpha) {
    throw Error(ErrorKind::DivergentNorm,
                "norm diverges: growth rate c >= alpha/2 for " + f.to_spec());
  }
}

GaussianFrame density_frame(const TestFunction& f, const FockParams& params, double factor) {
  return {params.rate() * factor, f.gaussian_center(params).value_or(Point(params.m, 0.0))};
}

}  // namespace

std::string describe(const Method& method) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussHermite>) {
          return "gh(nodes=" + std::to_string(m.nodes) + ")";
        } else if constexpr (std::is_same_v<T, Radial>) {
          return "radial(radial_nodes=" + std::to_string(m.radial_nodes) +
                 ",angular_nodes=" + std::to_string(m.angular_nodes) + ")";
        } else {
          return "mc(samples=" + std::to_string(m.samples) + ",seed=" + std::to_string(m.seed) +
                 ")";
        }
      },
      method);
}

IntegralEstimate gauss_hermite_integrate(const LogIntegrand& integrand,
                                         const GaussianFrame& frame, int nodes_per_axis) {
  if (nodes_per_axis < 8 || nodes_per_axis > 150) {
    throw Error(ErrorKind::InvalidInput, "Gauss-Hermite nodes per axis must be in [8, 150]");
  }
  if (frame_dim(frame) > 6) {
    throw Error(ErrorKind::MethodUnavailable,
                "tensor Gauss-Hermite supports m <= 6; use Monte Carlo");
  }
  const double coarse = gh_log_integral(integrand, frame, nodes_per_axis);
  const double fine = gh_log_integral(integrand, frame, 2 * nodes_per_axis);
  return from_logs(coarse, fine, GaussHermite{nodes_per_axis});
}

IntegralEstimate radial_integrate(const LogIntegrand& integrand, const GaussianFrame& frame,
                                  int radial_nodes, int angular_nodes) {
  if (radial_nodes < 4 || radial_nodes > 80 || angular_nodes < 4 || angular_nodes > 256) {
    throw Error(ErrorKind::InvalidInput,
                "radial nodes must be in [4, 80] and angular nodes in [4, 256]");
  }
  const double coarse = radial_log_integral(integrand, frame, radial_nodes, angular_nodes);
  const double fine = radial_log_integral(integrand, frame, 2 * radial_nodes, 2 * angular_nodes);
  return from_logs(coarse, fine, Radial{radial_nodes, angular_nodes});
}

IntegralEstimate mc_integrate(const LogIntegrand& integrand, const GaussianFrame& frame,
                              std::size_t samples, std::uint64_t seed) {
  const int m = frame_dim(frame);
  if (samples < 1000) throw Error(ErrorKind::InvalidInput, "Monte Carlo needs >= 1000 samples");
  const double inv_sd = 1.0 / std::sqrt(frame.rate);
  const double log_q0 = 0.5 * m * std::log(frame.rate / (2.0 * std::numbers::pi));
  const std::size_t batches = (samples + kMcBatch - 1) / kMcBatch;

  struct Moments {
    LogSum first, second;
  };
  auto partial = parallel_map(batches, [&](std::size_t b) {
    auto engine = stream_engine(seed, b);
    std::normal_distribution<double> normal;
    Moments acc;
    Point x(m);
    const std::size_t count = std::min(kMcBatch, samples - b * kMcBatch);
    for (std::size_t i = 0; i < count; ++i) {
      double z2 = 0.0;
      for (int d = 0; d < m; ++d) {
        const double z = normal(engine);
        z2 += z * z;
        x[d] = frame.center[d] + z * inv_sd;
      }
      const double l = integrand(x);
      if (l == kNegInf) continue;
      const double ratio = l - (log_q0 - 0.5 * z2);
      acc.first.add(ratio);
      acc.second.add(2.0 * ratio);
    }
    return acc;
  });
  Moments total;
  for (const auto& p : partial) {
    total.first.merge(p.first);
    total.second.merge(p.second);
  }
  const MonteCarlo method{samples, seed};
  const double n = static_cast<double>(samples);
  if (total.first.sum == 0.0) return {0.0, kNegInf, 0.0, method};
  const double log_mean = total.first.log() - std::log(n);
  const double rel_var =
      std::max(0.0, n * std::exp(total.second.log() - 2.0 * total.first.log()) - 1.0);
  const double mean = std::exp(log_mean);
  return {mean, log_mean, mean * std::sqrt(rel_var / (n - 1.0)), method};
}

IntegralEstimate integrate(const LogIntegrand& integrand, const GaussianFrame& frame,
                           const Method& method) {
  return std::visit(
      [&](const auto& m) -> IntegralEstimate {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussHermite>) {
          return gauss_hermite_integrate(integrand, frame, m.nodes);
        } else if constexpr (std::is_same_v<T, Radial>) {
          return radial_integrate(integrand, frame, m.radial_nodes, m.angular_nodes);
        } else {
          return mc_integrate(integrand, frame, m.samples, m.seed);
        }
      },
      method);
}

IntegralEstimate integrate_density(const TestFunction& f, const FockParams& params,
                                   const Method& method) {
  require_integrable(f, params);
  auto log_u = [&](std::span<const double> x) { return log_density_unchecked(f, params, x); };
  return integrate(log_u, density_frame(f, params, 1.0), method);
}

double norm_constant(const FockParams& params) {
  params.validate();
  return std::pow(params.rate() / (2.0 * std::numbers::pi), 0.5 * params.m);
}

NormEstimate fock_norm(const TestFunction& f, const FockParams& params, const Method& method) {
  const IntegralEstimate integral = integrate_density(f, params, method);
  const double c = norm_constant(params);
  if (integral.value == 0.0) return {0.0, 0.0, kNegInf, 0.0, 0.0, method};
  const double log_raw = std::log(c) + integral.log_value;
  const double value = std::exp(log_raw / params.p);
  const double rel = integral.error / integral.value;
  return {value, std::exp(log_raw), log_raw,
          value * std::expm1(std::log1p(rel) / params.p), c * integral.error, method};
}

ConvexFunction ConvexFunction::power(double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidInput, "power functional needs exponent r >= 1");
  }
  ConvexFunction g;
  g.kind_ = Kind::Power;
  g.exponent_ = r;
  return g;
}

ConvexFunction ConvexFunction::piecewise_linear(std::vector<double> knots,
                                                std::vector<double> slopes) {
  if (slopes.size() != knots.size() + 1) {
    throw Error(ErrorKind::InvalidInput, "piecewise-linear needs one more slope than knots");
  }
  if (slopes[0] < 0.0) throw Error(ErrorKind::InvalidInput, "first slope must be >= 0");
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    if (slopes[i] < slopes[i - 1]) {
      throw Error(ErrorKind::InvalidInput, "slopes must be nondecreasing (convexity)");
    }
  }
  double prev = 0.0;
  for (double k : knots) {
    if (!(k > prev)) throw Error(ErrorKind::InvalidInput, "knots must be increasing and > 0");
    prev = k;
  }
  ConvexFunction g;
  g.kind_ = Kind::PiecewiseLinear;
  g.knots_.push_back(0.0);
  g.knots_.insert(g.knots_.end(), knots.begin(), knots.end());
  g.slopes_ = std::move(slopes);
  g.values_.push_back(0.0);
  for (std::size_t i = 1; i < g.knots_.size(); ++i) {
    g.values_.push_back(g.values_[i - 1] + g.slopes_[i - 1] * (g.knots_[i] - g.knots_[i - 1]));
  }
  return g;
}

ConvexFunction ConvexFunction::custom(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() < 2 || grid.size() != values.size()) {
    throw Error(ErrorKind::InvalidInput, "custom table needs >= 2 matching grid/value points");
  }
  if (grid[0] != 0.0) throw Error(ErrorKind::InvalidInput, "custom table must start at t = 0");
  ConvexFunction g;
  g.kind_ = Kind::Custom;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidInput, "grid must increase");
    g.slopes_.push_back((values[i] - values[i - 1]) / (grid[i] - grid[i - 1]));
  }
  for (std::size_t i = 1; i < g.slopes_.size(); ++i) {
    const double tol = 1e-12 * std::max(1.0, std::abs(g.slopes_[i]));
    if (g.slopes_[i] < g.slopes_[i - 1] - tol) {
      throw Error(ErrorKind::InvalidInput, "custom table is not convex");
    }
  }
  if (values[0] < 0.0 || g.slopes_[0] < 0.0) {
    throw Error(ErrorKind::InvalidInput, "custom table must be nonnegative and nondecreasing");
  }
  g.slopes_.push_back(g.slopes_.back());
  g.knots_ = std::move(grid);
  g.values_ = std::move(values);
  return g;
}

double ConvexFunction::operator()(double t) const {
  if (kind_ == Kind::Power) return std::pow(t, exponent_);
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin() - 1);
  return values_[i] + slopes_[i] * (t - knots_[i]);
}

double ConvexFunction::derivative(double t) const {
  if (kind_ == Kind::Power) {
    return exponent_ == 1.0 ? 1.0 : exponent_ * std::pow(t, exponent_ - 1.0);
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin() - 1);
  return slopes_[i];
}

double ConvexFunction::log_of(double log_t) const {
  if (log_t == kNegInf) return at_zero() > 0.0 ? std::log(at_zero()) : kNegInf;
  if (kind_ == Kind::Power) return exponent_ * log_t;
  const double t = std::exp(log_t);
  if (values_[0] == 0.0 && t <= knots_[1]) {
    // linear first segment; stays accurate for tiny t
    return slopes_[0] > 0.0 ? std::log(slopes_[0]) + log_t : kNegInf;
  }
  const double v = (*this)(t);
  return v > 0.0 ? std::log(v) : kNegInf;
}

double ConvexFunction::at_zero() const {
  return kind_ == Kind::Power ? 0.0 : values_[0];
}

std::string ConvexFunction::describe() const {
  switch (kind_) {
    case Kind::Power:
      return "power(" + format_double(exponent_) + ")";
    case Kind::PiecewiseLinear: {
      std::string s = "pwl(knots=";
      for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (i > 1) s += ',';
        s += format_double(knots_[i]);
      }
      s += ";slopes=";
      for (std::size_t i = 0; i < slopes_.size(); ++i) {
        if (i) s += ',';
        s += format_double(slopes_[i]);
      }
      return s + ")";
    }
    case Kind::Custom:
      return "custom(points=" + std::to_string(knots_.size()) + ")";
  }
  return "unknown";
}

FunctionalEstimate convex_functional(const TestFunction& f, const FockParams& params,
                                     const ConvexFunction& g, const Method& method) {
  if (g.at_zero() != 0.0) {
    throw Error(ErrorKind::UnsupportedFunctional,
                "G(0) != 0: the integral of G(u) over R^m diverges");
  }
  require_integrable(f, params);
  auto log_g = [&](std::span<const double> x) {
    const double l = log_density_unchecked(f, params, x);
    return std::isnan(l) ? kNegInf : g.log_of(l);
  };
  const IntegralEstimate r = integrate(log_g, density_frame(f, params, g.rate_factor()), method);
  return {r.value, r.error, r.method};
}

}  // namespace focklab
