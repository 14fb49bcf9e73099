#include "focklab/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "focklab/error.hpp"
#include "focklab/parallel.hpp"

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kReplicates = 16;

struct Simplex {
  Point x;
  double fx;
};

// Minimizes fn from x0. Standard reflection/expansion/contraction/shrink.
template <class F>
Simplex nelder_mead(F&& fn, const Point& x0, double step, int max_iter) {
  const std::size_t n = x0.size();
  std::vector<Simplex> s;
  s.push_back({x0, fn(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    Point x = x0;
    x[i] += step;
    s.push_back({x, fn(x)});
  }
  auto by_value = [](const Simplex& a, const Simplex& b) { return a.fx < b.fx; };
  auto affine = [&](const Point& c, const Point& w, double t) {
    Point out(n);
    for (std::size_t d = 0; d < n; ++d) out[d] = c[d] + t * (w[d] - c[d]);
    return out;
  };
  for (int iter = 0; iter < max_iter; ++iter) {
    std::sort(s.begin(), s.end(), by_value);
    double spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) spread = std::max(spread, std::abs(s[i].x[d] - s[0].x[d]));
    }
    const double fspread = s[n].fx - s[0].fx;
    if (std::isfinite(s[0].fx) && fspread <= 1e-15 * (1.0 + std::abs(s[0].fx)) &&
        spread <= 1e-9 * (1.0 + step)) {
      break;
    }
    Point centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < n; ++d) centroid[d] += s[i].x[d] / n;
    }
    Simplex refl{affine(centroid, s[n].x, -1.0), 0.0};
    refl.fx = fn(refl.x);
    if (refl.fx < s[0].fx) {
      Simplex exp{affine(centroid, s[n].x, -2.0), 0.0};
      exp.fx = fn(exp.x);
      s[n] = exp.fx < refl.fx ? exp : refl;
    } else if (refl.fx < s[n - 1].fx) {
      s[n] = refl;
    } else {
      const bool outside = refl.fx < s[n].fx;
      Simplex con{affine(centroid, outside ? refl.x : s[n].x, 0.5), 0.0};
      con.fx = fn(con.x);
      if (con.fx < std::min(s[n].fx, refl.fx)) {
        s[n] = con;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          s[i].x = affine(s[0].x, s[i].x, 0.5);
          s[i].fx = fn(s[i].x);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), by_value);
  return s[0];
}

void check_dims(const TestFunction& f, const FockParams& params) {
  params.validate();
  if (f.dim() != params.m) {
    throw Error(ErrorKind::InvalidInput, "function dimension does not match params.m");
  }
}

}  // namespace

MaxResult find_max(const TestFunction& f, const FockParams& params, int restarts,
                   std::uint64_t seed) {
  check_dims(f, params);
  if (restarts < 1) throw Error(ErrorKind::InvalidInput, "restarts must be >= 1");
  const int m = params.m;
  const double sd = 1.0 / std::sqrt(params.rate());
  auto neg_log_u = [&](const Point& x) {
    const double l = log_density_unchecked(f, params, x);
    return std::isnan(l) ? kInf : -l;
  };
  auto engine = stream_engine(seed, 0x6d6178);
  std::normal_distribution<double> normal;
  std::vector<Simplex> found;
  for (int r = 0; r < restarts; ++r) {
    Point x0(m);
    for (double& v : x0) v = normal(engine) * sd;
    Simplex best = nelder_mead(neg_log_u, x0, sd, 4000 * m);
    // restart from the optimum with shrinking simplices to polish
    for (double step : {1e-2 * sd, 1e-4 * sd}) {
      Simplex polished = nelder_mead(neg_log_u, best.x, step, 4000 * m);
      if (polished.fx <= best.fx) best = polished;
    }
    found.push_back(best);
  }
  auto best = std::min_element(found.begin(), found.end(),
                               [](const Simplex& a, const Simplex& b) { return a.fx < b.fx; });
  if (!std::isfinite(best->fx)) {
    throw Error(ErrorKind::OptimizationFailure,
                "no restart reached a finite value of log u (" + std::to_string(restarts) +
                    " restarts) for " + f.to_spec());
  }
  const double t_max = std::exp(-best->fx);
  int agreeing = 0;
  for (const auto& s : found) {
    if (std::isfinite(s.fx) && std::abs(std::exp(-s.fx) - t_max) <= 1e-8 * t_max) ++agreeing;
  }
  return {t_max, best->x, agreeing, restarts};
}

std::string to_string(IsoperimetricVariant v) {
  return v == IsoperimetricVariant::SharpBall ? "sharp-ball" : "paper-literal";
}

IsoperimetricVariant parse_variant(const std::string& text) {
  if (text == "sharp-ball" || text == "sharp") return IsoperimetricVariant::SharpBall;
  if (text == "paper-literal" || text == "literal") return IsoperimetricVariant::PaperLiteral;
  throw Error(ErrorKind::InvalidInput, "unknown isoperimetric variant '" + text + "'");
}

double isoperimetric_kappa(int m, IsoperimetricVariant variant) {
  const double arg = variant == IsoperimetricVariant::SharpBall ? 1.0 + 0.5 * m : 0.5 * m;
  return std::exp(std::lgamma(arg) * 2.0 / m) / (2.0 * std::numbers::pi);
}

double unit_ball_volume(int m) {
  return std::exp(0.5 * m * std::log(std::numbers::pi) - std::lgamma(1.0 + 0.5 * m));
}

MeasureEstimate superlevel_measure(const TestFunction& f, const FockParams& params, double t,
                                   std::size_t samples, std::uint64_t seed,
                                   std::optional<double> t_max) {
  check_dims(f, params);
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "level t must be > 0");
  if (samples < 1) throw Error(ErrorKind::InvalidInput, "samples must be >= 1");
  if (t_max && t >= *t_max) return {0.0, 0.0, samples, 0.0};
  const double radius = 1.05 * envelope_radius(f, params, t);
  if (radius == 0.0) return {0.0, 0.0, samples, 0.0};

  // kReplicates independent radially stratified samples: replicate b splits
  // (0, 1) into n_b strata of s = (r / radius)^m, draws one uniform s per
  // stratum and a uniform direction. Each point is marginally uniform in the
  // ball; the spread of the replicate means gives the standard error.
  const int m = params.m;
  const double log_t = std::log(t);
  const std::size_t reps = std::min<std::size_t>(kReplicates, samples);
  auto hits = parallel_map(reps, [&](std::size_t b) {
    const std::size_t n = samples / reps + (b < samples % reps ? 1 : 0);
    auto engine = stream_engine(seed, b);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    std::size_t count = 0;
    Point dir(m), x(m);
    for (std::size_t i = 0; i < n; ++i) {
      // odd strata reuse the previous direction reversed (antithetic pairs)
      if (i % 2 == 0) {
        double z2 = 0.0;
        for (int d = 0; d < m; ++d) {
          dir[d] = normal(engine);
          z2 += dir[d] * dir[d];
        }
        const double inv = 1.0 / std::sqrt(z2);
        for (double& v : dir) v *= inv;
      } else {
        for (double& v : dir) v = -v;
      }
      const double s = (static_cast<double>(i) + uniform(engine)) / static_cast<double>(n);
      const double r = radius * std::pow(s, 1.0 / m);
      for (int d = 0; d < m; ++d) x[d] = r * dir[d];
      if (log_density_unchecked(f, params, x) > log_t) ++count;
    }
    return std::pair{count, n};
  });
  std::size_t total = 0;
  for (const auto& h : hits) total += h.first;
  const double volume = unit_ball_volume(m) * std::pow(radius, m);
  const double n_total = static_cast<double>(samples);
  const double frac = static_cast<double>(total) / n_total;
  double var = 0.0;
  if (reps > 1) {
    for (const auto& [count, n] : hits) {
      const double w = static_cast<double>(n) / n_total;
      const double dev = static_cast<double>(count) / static_cast<double>(n) - frac;
      var += w * w * dev * dev;
    }
    var *= static_cast<double>(reps) / static_cast<double>(reps - 1);
  }
  // never report less than the resolution of a single hit
  const double stderr_ = std::max(std::sqrt(var), 1.0 / n_total);
  return {volume * frac, volume * stderr_, samples, radius};
}

std::vector<double> level_grid(double t_max, const GridSpec& grid) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidInput, "t_max must be > 0");
  if (!(grid.ratio > 0.0 && grid.ratio < 1.0) || grid.count < 1) {
    throw Error(ErrorKind::InvalidInput, "grid ratio must be in (0, 1) and count >= 1");
  }
  std::vector<double> t;
  for (int k = 1; k <= grid.count; ++k) t.push_back(t_max * std::pow(grid.ratio, k));
  return t;
}

bool LevelProfile::violated_at(std::size_t i) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.t_lo == t[i]; });
}

double g_value(double t, double mu, const FockParams& params, IsoperimetricVariant variant) {
  const double kappa = isoperimetric_kappa(params.m, variant);
  return t * std::exp(kappa * params.rate() * std::pow(mu, 2.0 / params.m));
}

double mu_from_g(double g, double t, const FockParams& params, IsoperimetricVariant variant) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "t must be > 0");
  if (!(g >= t)) throw Error(ErrorKind::InvalidInput, "g must be >= t (log(g/t) < 0)");
  const double kappa = isoperimetric_kappa(params.m, variant);
  return std::pow(std::log(g / t) / (kappa * params.rate()), 0.5 * params.m);
}

LevelProfile assemble_profile(const FockParams& params, IsoperimetricVariant variant,
                              double t_max, std::vector<double> t, std::vector<double> mu,
                              std::vector<double> mu_stderr) {
  if (t.size() != mu.size() || t.size() != mu_stderr.size()) {
    throw Error(ErrorKind::InvalidInput, "profile columns differ in length");
  }
  LevelProfile prof;
  prof.params = params;
  prof.variant = variant;
  prof.t_max = t_max;
  const double kr = isoperimetric_kappa(params.m, variant) * params.rate();
  const double e = 2.0 / params.m;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double g = g_value(t[i], mu[i], params, variant);
    prof.g.push_back(g);
    prof.g_stderr.push_back(
        g * std::expm1(kr * (std::pow(mu[i] + mu_stderr[i], e) - std::pow(mu[i], e))));
  }
  prof.t = std::move(t);
  prof.mu = std::move(mu);
  prof.mu_stderr = std::move(mu_stderr);
  for (std::size_t i = 0; i + 1 < prof.t.size(); ++i) {
    // t decreases along the grid, so a nonincreasing g must not drop here
    const double increase = prof.g[i] - prof.g[i + 1];
    prof.worst_increase = std::max(prof.worst_increase, increase);
    const double rounding = 1e-12 * std::max(prof.g[i], prof.g[i + 1]);
    const double margin =
        increase - 3.0 * (prof.g_stderr[i] + prof.g_stderr[i + 1]) - rounding;
    if (margin > 0.0) prof.violations.push_back({prof.t[i], prof.t[i + 1], margin});
  }
  return prof;
}

LevelProfile g_diagnostic(const TestFunction& f, const FockParams& params,
                          const GridSpec& grid, IsoperimetricVariant variant,
                          std::size_t samples, std::uint64_t seed) {
  const MaxResult top = find_max(f, params, 16, seed);
  std::vector<double> t = level_grid(top.t_max, grid);
  std::vector<double> mu, err;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto est = superlevel_measure(f, params, t[k], samples, derive_seed(seed, k + 1),
                                        top.t_max);
    mu.push_back(est.value);
    err.push_back(est.stderr_);
  }
  return assemble_profile(params, variant, top.t_max, std::move(t), std::move(mu),
                          std::move(err));
}

LayerCakeResult layer_cake(const TestFunction& f, const FockParams& params,
                           const ConvexFunction& g, const GridSpec& grid, std::size_t samples,
                           std::uint64_t seed, const Method& direct_method) {
  if (grid.count < 4 || grid.count % 4 != 0) {
    throw Error(ErrorKind::InvalidInput, "layer-cake level count must be a positive multiple of 4");
  }
  if (g.at_zero() != 0.0) {
    throw Error(ErrorKind::UnsupportedFunctional, "layer cake needs G(0) = 0");
  }
  const MaxResult top = find_max(f, params, 16, seed);
  const double h = -std::log(grid.ratio);
  const int n = grid.count;
  // integrand in s = log(t_max / t): mu(t) G'(t) t
  std::vector<double> phi(n + 1, 0.0), phi_err(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double t = top.t_max * std::pow(grid.ratio, k);
    const auto est = superlevel_measure(f, params, t, samples, derive_seed(seed, k), top.t_max);
    const double jac = g.derivative(t) * t;
    phi[k] = est.value * jac;
    phi_err[k] = est.stderr_ * jac;
  }
  auto simpson = [&](int stride, std::vector<double>* weights) {
    const double hs = h * stride;
    double sum = 0.0;
    const int intervals = n / stride;
    for (int j = 0; j <= intervals; ++j) {
      const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      sum += w * phi[j * stride];
      if (weights) (*weights)[j * stride] = w * hs / 3.0;
    }
    return sum * hs / 3.0;
  };
  std::vector<double> w(n + 1, 0.0);
  const double fine = simpson(1, &w);
  const double coarse = simpson(2, nullptr);
  double var = 0.0;
  for (int k = 0; k <= n; ++k) var += (w[k] * phi_err[k]) * (w[k] * phi_err[k]);

  const FunctionalEstimate direct = convex_functional(f, params, g, direct_method);
  LayerCakeResult out;
  out.value = fine;
  out.error = std::sqrt(var) + std::abs(fine - coarse) + phi[n];
  out.direct = direct.value;
  out.direct_error = direct.error;
  out.discrepancy = fine - direct.value;
  out.levels = static_cast<std::size_t>(n) + 1;
  return out;
}

}  // namespace focklab
