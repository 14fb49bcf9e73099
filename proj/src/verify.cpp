#include "focklab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "focklab/error.hpp"
#include "focklab/format.hpp"
#include "focklab/parallel.hpp"

namespace focklab {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double rounding_floor(double scale) { return 1e-12 * std::max(1.0, std::abs(scale)); }

VerificationReport make_report(std::string name, json inputs, double margin, double tolerance,
                               json details) {
  VerificationReport r;
  r.check_name = std::move(name);
  r.inputs = std::move(inputs);
  r.margin = margin;
  r.tolerance = tolerance;
  r.pass = margin >= -tolerance;
  r.details = std::move(details);
  return r;
}

Point prefix(std::initializer_list<double> values, int m) {
  Point out(m, 0.0);
  int i = 0;
  for (double v : values) {
    if (i >= m) break;
    out[i++] = v;
  }
  return out;
}

// ---- rearrangement lemma helpers ----

struct LemmaIntegrands {
  const lemma::GSpec& g;
  const lemma::PhiSpec& phi;
  const lemma::PsiSpec& psi;
  double t_max;

  double log_g(double log_c, double t) const {
    return std::visit(
        [&](const auto& spec) -> double {
          using T = std::decay_t<decltype(spec)>;
          if constexpr (std::is_same_v<T, lemma::PowerDecay>) {
            return log_c - spec.beta * std::log(t);
          } else if constexpr (std::is_same_v<T, lemma::ExpDecay>) {
            return log_c - spec.beta * t;
          } else {
            return log_c + std::log(interpolate(spec, t));
          }
        },
        g);
  }

  static double interpolate(const lemma::Tabulated& tab, double t) {
    if (t <= tab.t.front()) return tab.g.front();
    if (t >= tab.t.back()) return tab.g.back();
    const auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tab.t.begin()) - 1;
    const double w = (t - tab.t[i]) / (tab.t[i + 1] - tab.t[i]);
    return tab.g[i] + w * (tab.g[i + 1] - tab.g[i]);
  }

  double phi_of_log(double log_s) const {
    return std::visit(
        [&](const auto& spec) -> double {
          using T = std::decay_t<decltype(spec)>;
          if constexpr (std::is_same_v<T, lemma::PowerPhi>) {
            return std::exp(spec.gamma * log_s);
          } else {
            return log_s <= 0.0 ? 0.0
                                : spec.prefactor * std::pow(spec.scale * log_s, spec.exponent);
          }
        },
        phi);
  }

  double psi_of(double t) const { return psi.r == 1.0 ? 1.0 : psi.r * std::pow(t, psi.r - 1.0); }

  // Points in (0, T) where an integrand is not smooth.
  std::vector<double> breakpoints(double log_c) const {
    std::vector<double> pts;
    if (std::holds_alternative<lemma::LogPowerPhi>(phi)) {
      if (t_max > 1.0) pts.push_back(1.0);
      // g(t) = t is the kink of log+(g/t); g/t is decreasing in t
      auto h = [&](double t) { return log_g(log_c, t) - std::log(t); };
      if (h(t_max) < 0.0) {
        double lo = t_max, hi = t_max;
        while (h(lo) < 0.0 && lo > 1e-300) lo *= 0.5;
        for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
          const double mid = 0.5 * (lo + hi);
          (h(mid) < 0.0 ? hi : lo) = mid;
        }
        pts.push_back(0.5 * (lo + hi));
      }
    }
    if (const auto* tab = std::get_if<lemma::Tabulated>(&g)) {
      for (double t : tab->t) pts.push_back(t);
    }
    std::erase_if(pts, [&](double t) { return !(t > 0.0 && t < t_max); });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  template <class F>
  double integrate(F&& fn, const std::vector<double>& pts) const {
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0.0, a = 0.0;
    std::vector<double> ends = pts;
    ends.push_back(t_max);
    for (double b : ends) {
      if (b <= a) continue;
      double err = 0.0;
      total += ts.integrate(fn, a, b, 1e-13, &err);
      a = b;
    }
    return total;
  }

  double constrained(double log_c, bool weighted) const {
    auto fn = [&](double t) {
      const double v = phi_of_log(log_g(log_c, t) - std::log(t));
      return weighted ? v * psi_of(t) : v;
    };
    return integrate(fn, breakpoints(log_c));
  }

  double reference(bool weighted) const {
    auto fn = [&](double t) {
      const double v = phi_of_log(-std::log(t));
      return weighted ? v * psi_of(t) : v;
    };
    std::vector<double> pts;
    if (std::holds_alternative<lemma::LogPowerPhi>(phi) && t_max > 1.0) pts.push_back(1.0);
    return integrate(fn, pts);
  }

  // Non-integrable Phi(g/t) near t = 0 makes the constraint meaningless.
  std::string integrability_problem() const {
    const auto* pw = std::get_if<lemma::PowerPhi>(&phi);
    if (!pw) return {};
    double blowup = 1.0;
    if (const auto* pd = std::get_if<lemma::PowerDecay>(&g)) blowup = 1.0 + pd->beta;
    if (pw->gamma * blowup >= 1.0 || pw->gamma >= 1.0) {
      return "Phi(g/t) ~ t^{-" + format_double(pw->gamma * blowup) +
             "} is not integrable at t = 0";
    }
    return {};
  }
};

void validate_lemma(const lemma::GSpec& g, const lemma::PhiSpec& phi, const lemma::PsiSpec& psi,
                    double t_max) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidInput, "t_max must be > 0");
  if (!(psi.r >= 1.0)) throw Error(ErrorKind::InvalidInput, "Psi = r t^{r-1} needs r >= 1");
  std::visit(
      [](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, lemma::Tabulated>) {
          if (spec.t.size() < 2 || spec.t.size() != spec.g.size()) {
            throw Error(ErrorKind::InvalidInput, "tabulated g needs >= 2 matching points");
          }
          for (std::size_t i = 0; i < spec.t.size(); ++i) {
            if (!(spec.g[i] > 0.0)) throw Error(ErrorKind::InvalidInput, "g must be positive");
            if (i && !(spec.t[i] > spec.t[i - 1])) {
              throw Error(ErrorKind::InvalidInput, "tabulated t must increase");
            }
            if (i && spec.g[i] > spec.g[i - 1]) {
              throw Error(ErrorKind::InvalidInput, "tabulated g must be nonincreasing");
            }
          }
        } else {
          if (!(spec.beta >= 0.0)) {
            throw Error(ErrorKind::InvalidInput, "g decay rate beta must be >= 0");
          }
        }
      },
      g);
  std::visit(
      [](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, lemma::PowerPhi>) {
          if (!(spec.gamma > 0.0)) throw Error(ErrorKind::InvalidInput, "Phi exponent must be > 0");
        } else {
          if (!(spec.scale > 0.0 && spec.exponent > 0.0 && spec.prefactor > 0.0)) {
            throw Error(ErrorKind::InvalidInput, "log-power Phi needs positive parameters");
          }
        }
      },
      phi);
}

}  // namespace

json to_json(const VerificationReport& r) {
  return json{{"check_name", r.check_name}, {"inputs", r.inputs},     {"pass", r.pass},
              {"margin", r.margin},         {"tolerance", r.tolerance}, {"skipped", r.skipped},
              {"details", r.details}};
}

json to_json(const FockParams& params) {
  return json{{"m", params.m}, {"p", params.p}, {"alpha", params.alpha}};
}

std::vector<TestFunction> default_families(int m, double alpha) {
  std::vector<TestFunction> out;
  out.push_back(TestFunction::constant(m, 1.0));
  out.push_back(TestFunction::constant(m, 2.5));
  out.push_back(TestFunction::coherent(prefix({0.5, -0.3, 0.2}, m), alpha));
  out.push_back(TestFunction::exp_quadratic(m, alpha / 8.0));
  out.push_back(TestFunction::sum_of_coherent(
      m, {{0.6, prefix({0.4, 0.0, 0.1}, m)}, {0.4, prefix({-0.5, 0.3, 0.0}, m)}}, alpha));
  if (m % 2 == 0) {
    const int n = m / 2;
    std::vector<int> k1(n, 0), k2(n, 0);
    k1[0] = 1;
    k2[0] = 2;
    out.push_back(TestFunction::monomial(m, k1));
    out.push_back(TestFunction::monomial(m, k2));
    out.push_back(TestFunction::polynomial(
        m, {{std::vector<int>(n, 0), {1.0, 0.0}}, {k1, {1.0, 0.0}}, {k2, {0.0, 0.5}}}));
  }
  return out;
}

VerificationReport check_contraction(const TestFunction& f, double p, double q, double alpha,
                                     const Method& method) {
  if (!(p > 0.0 && p < q)) throw Error(ErrorKind::InvalidInput, "contraction needs 0 < p < q");
  const int m = f.dim();
  const NormEstimate np = fock_norm(f, {m, p, alpha}, method);
  const NormEstimate nq = fock_norm(f, {m, q, alpha}, method);
  const double margin = np.value - nq.value;
  const double tol = 3.0 * (np.error_bound + nq.error_bound) + rounding_floor(np.value);
  const bool extremal = f.is_extremal();
  json details{{"norm_p", np.value},
               {"norm_p_error", np.error_bound},
               {"norm_q", nq.value},
               {"norm_q_error", nq.error_bound},
               {"extremal_input", extremal},
               {"equality_margin", std::abs(margin)},
               {"equality_flagged", extremal && std::abs(margin) <= 1e-6}};
  json inputs{{"fn", f.to_spec()}, {"m", m}, {"p", p}, {"q", q}, {"alpha", alpha},
              {"method", describe(method)}};
  return make_report("contraction(p=" + format_double(p) + ",q=" + format_double(q) + ")",
                     std::move(inputs), margin, tol, std::move(details));
}

VerificationReport check_monotone_g(const LevelProfile& profile) {
  double worst = 0.0;
  json viol = json::array();
  for (const auto& v : profile.violations) {
    worst = std::max(worst, v.margin);
    viol.push_back({{"t_hi", v.t_hi}, {"t_lo", v.t_lo}, {"excess", v.margin}});
  }
  double max_dev_from_one = 0.0;
  for (double g : profile.g) max_dev_from_one = std::max(max_dev_from_one, std::abs(g - 1.0));
  json details{{"levels", profile.t.size()},
               {"t_max", profile.t_max},
               {"violations", viol},
               {"worst_raw_increase", profile.worst_increase},
               {"max_abs_g_minus_1", max_dev_from_one},
               {"g_first", profile.g.empty() ? 0.0 : profile.g.front()},
               {"g_last", profile.g.empty() ? 0.0 : profile.g.back()}};
  json inputs{{"params", to_json(profile.params)}, {"variant", to_string(profile.variant)}};
  return make_report("monotone_g(" + to_string(profile.variant) + ")", std::move(inputs), -worst,
                     0.0, std::move(details));
}

VerificationReport check_pointwise_bound(const TestFunction& f, const FockParams& params,
                                         std::size_t n_points, std::uint64_t seed,
                                         const Method& method) {
  const NormEstimate norm = fock_norm(f, params, method);
  const double bound = norm.raw_integral;
  const int m = params.m;
  auto engine = stream_engine(seed, 0x707477);
  std::normal_distribution<double> normal;
  const double sd = 1.0 / std::sqrt(params.rate());

  std::vector<Point> points;
  for (std::size_t i = 0; i < n_points; ++i) {
    Point x(m);
    for (double& v : x) v = normal(engine) * sd;
    points.push_back(std::move(x));
  }
  const MaxResult top = find_max(f, params, 16, seed);
  points.push_back(top.argmax);
  const auto center = f.gaussian_center(params);
  if (center) points.push_back(*center);

  double margin = std::numeric_limits<double>::infinity();
  Point worst;
  for (const auto& x : points) {
    const double slack = bound - eval_density(f, params, x).u;
    if (slack < margin) {
      margin = slack;
      worst = x;
    }
  }
  json details{{"norm_p", bound},
               {"norm_p_error", norm.raw_error},
               {"worst_point", worst},
               {"t_max", top.t_max},
               {"argmax", top.argmax},
               {"residual_at_argmax", bound - top.t_max}};
  if (center) {
    details["extremizer"] = *center;
    details["residual_at_extremizer"] = bound - eval_density(f, params, *center).u;
  }
  json inputs{{"fn", f.to_spec()}, {"params", to_json(params)}, {"n_points", n_points},
              {"seed", seed}, {"method", describe(method)}};
  return make_report("pointwise_bound", std::move(inputs), margin,
                     3.0 * norm.raw_error + rounding_floor(bound), std::move(details));
}

std::vector<Point> default_directions(int m, int random_count, std::uint64_t seed) {
  std::vector<Point> dirs;
  for (int i = 0; i < m; ++i) {
    for (double s : {1.0, -1.0}) {
      Point e(m, 0.0);
      e[i] = s;
      dirs.push_back(e);
    }
  }
  auto engine = stream_engine(seed, 0x646972);
  std::normal_distribution<double> normal;
  for (int k = 0; k < random_count; ++k) {
    Point d(m);
    double n2 = 0.0;
    for (double& v : d) {
      v = normal(engine);
      n2 += v * v;
    }
    for (double& v : d) v /= std::sqrt(n2);
    dirs.push_back(d);
  }
  return dirs;
}

std::vector<double> default_radii(const TestFunction& f, double alpha, int count) {
  const FockParams free{f.dim(), 1.0, alpha};
  const double sup = find_max(f, free).t_max;
  const double r_end = 1.5 * envelope_radius(f, free, 1e-8 * sup) + 1.0;
  std::vector<double> radii;
  for (int i = 0; i <= count; ++i) radii.push_back(r_end * i / count);
  return radii;
}

VerificationReport check_decay(const TestFunction& f, double alpha,
                               const std::vector<Point>& directions,
                               const std::vector<double>& radii) {
  const double log_target = std::log(1e-6);
  double margin = std::numeric_limits<double>::infinity();
  json rays = json::array();
  for (const auto& dir : directions) {
    if (static_cast<int>(dir.size()) != f.dim()) {
      throw Error(ErrorKind::InvalidInput, "direction has wrong dimension");
    }
    std::vector<double> v;
    Point x(dir.size());
    for (double r : radii) {
      for (std::size_t d = 0; d < dir.size(); ++d) x[d] = r * dir[d];
      v.push_back(f.log_abs(x) - 0.5 * alpha * r * r);
    }
    const double vmax = *std::max_element(v.begin(), v.end());
    if (vmax == kNegInf) continue;
    std::size_t last_rise = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (v[i + 1] > v[i]) last_rise = i + 1;
    }
    const bool eventually_decreasing = last_rise + 2 < v.size();
    double ray_margin = (log_target - (v.back() - vmax)) / std::log(10.0);
    if (!eventually_decreasing) ray_margin = std::min(ray_margin, -1.0);
    margin = std::min(margin, ray_margin);
    rays.push_back({{"direction", dir},
                    {"log_max", vmax},
                    {"log_last", v.back()},
                    {"eventually_decreasing", eventually_decreasing},
                    {"margin_decades", ray_margin}});
  }
  if (!std::isfinite(margin)) margin = 0.0;
  json inputs{{"fn", f.to_spec()}, {"alpha", alpha}, {"directions", directions.size()},
              {"radii", radii.size()}, {"r_max", radii.empty() ? 0.0 : radii.back()}};
  return make_report("decay", std::move(inputs), margin, 0.0, json{{"rays", rays}});
}

double extrapolate_limit(const std::vector<double>& p_ladder, const std::vector<double>& norms) {
  const std::size_t n = std::min<std::size_t>(4, p_ladder.size());
  if (n == 0 || norms.size() != p_ladder.size()) {
    throw Error(ErrorKind::InvalidInput, "extrapolation needs a nonempty matching ladder");
  }
  const std::size_t off = p_ladder.size() - n;
  // dense n x n solve by Gaussian elimination with partial pivoting
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const double p = p_ladder[off + i];
    const double basis[4] = {1.0, std::log(p) / p, 1.0 / p, 1.0 / (p * p)};
    for (std::size_t j = 0; j < n; ++j) a[i][j] = basis[j];
    a[i][n] = std::log(norms[off + i]);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double factor = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j) a[r][j] -= factor * a[c][j];
    }
  }
  return std::exp(a[0][n] / a[0][0]);
}

VerificationReport check_limit_norm(const TestFunction& f, double alpha,
                                    const std::vector<double>& p_ladder,
                                    double extrapolation_tol) {
  if (p_ladder.empty()) throw Error(ErrorKind::InvalidInput, "empty p ladder");
  for (std::size_t i = 1; i < p_ladder.size(); ++i) {
    if (!(p_ladder[i] > p_ladder[i - 1])) {
      throw Error(ErrorKind::InvalidInput, "p ladder must be increasing");
    }
  }
  const int m = f.dim();
  std::vector<double> norms, errs;
  json ladder = json::array();
  for (double p : p_ladder) {
    const int nodes = std::clamp(static_cast<int>(std::ceil(p)) + 16, 32, 150);
    const NormEstimate est = fock_norm(f, {m, p, alpha}, GaussHermite{nodes});
    norms.push_back(est.value);
    errs.push_back(est.error_bound);
    ladder.push_back({{"p", p}, {"norm", est.value}, {"error", est.error_bound}, {"nodes", nodes}});
  }
  const MaxResult top = find_max(f, {m, 1.0, alpha});
  const double sup = top.t_max;

  double margin = std::numeric_limits<double>::infinity();
  bool strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
    const double slack = norms[i] - norms[i + 1] + 3.0 * (errs[i] + errs[i + 1]) +
                         rounding_floor(norms[i]);
    margin = std::min(margin, slack);
    strictly_decreasing = strictly_decreasing && norms[i + 1] < norms[i];
  }
  for (std::size_t i = 0; i < norms.size(); ++i) {
    margin = std::min(margin, norms[i] - sup + 3.0 * errs[i] + rounding_floor(sup));
  }
  const double limit = extrapolate_limit(p_ladder, norms);
  const double gap = std::abs(limit - sup);
  margin = std::min(margin, extrapolation_tol - gap);

  json small_p = json::array();
  std::vector<double> small_norms;
  for (double p : {0.5, 0.25, 0.1}) {
    const NormEstimate est = fock_norm(f, {m, p, alpha}, GaussHermite{64});
    small_norms.push_back(est.value);
    small_p.push_back({{"p", p}, {"norm", est.value}, {"error", est.error_bound}});
  }
  json details{{"ladder", ladder},
               {"sup_norm", sup},
               {"argmax", top.argmax},
               {"extrapolated_limit", limit},
               {"extrapolation_gap", gap},
               {"inf_over_ladder", *std::min_element(norms.begin(), norms.end())},
               {"strictly_decreasing", strictly_decreasing},
               {"small_p", small_p},
               {"small_p_growing",
                small_norms[2] > small_norms[1] && small_norms[1] > small_norms[0]}};
  json inputs{{"fn", f.to_spec()}, {"alpha", alpha}, {"p_ladder", p_ladder},
              {"extrapolation_tol", extrapolation_tol}};
  return make_report("limit_norm", std::move(inputs), margin, 0.0, std::move(details));
}

VerificationReport check_extremal_convex(const TestFunction& f, const FockParams& params,
                                         const ConvexFunction& g, const Method& method) {
  const NormEstimate norm = fock_norm(f, params, method);
  if (!(norm.value > 0.0)) throw Error(ErrorKind::InvalidInput, "f has zero norm");
  const TestFunction normalized = f.scaled(1.0 / norm.value);
  const TestFunction extremal = TestFunction::coherent(Point(params.m, 0.0), params.alpha);
  const FunctionalEstimate cf = convex_functional(normalized, params, g, method);
  const FunctionalEstimate ce = convex_functional(extremal, params, g, method);
  const double norm_rel = norm.error_bound / norm.value;
  const double propagated = cf.value * params.p * g.rate_factor() * norm_rel;
  const double margin = ce.value - cf.value;
  const double tol = 3.0 * (cf.error + ce.error + propagated) + rounding_floor(ce.value);
  json details{{"norm", norm.value},
               {"norm_error", norm.error_bound},
               {"functional_normalized", cf.value},
               {"functional_normalized_error", cf.error},
               {"functional_extremal", ce.value},
               {"functional_extremal_error", ce.error}};
  json inputs{{"fn", f.to_spec()}, {"params", to_json(params)}, {"G", g.describe()},
              {"method", describe(method)}};
  return make_report("extremal_convex(" + g.describe() + ")", std::move(inputs), margin, tol,
                     std::move(details));
}

namespace lemma {

std::string describe(const GSpec& g) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerDecay>) return "c*t^-" + format_double(s.beta);
        else if constexpr (std::is_same_v<T, ExpDecay>) return "c*exp(-" + format_double(s.beta) + "t)";
        else return "c*table(" + std::to_string(s.t.size()) + ")";
      },
      g);
}

std::string describe(const PhiSpec& phi) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerPhi>) return "s^" + format_double(s.gamma);
        else
          return format_double(s.prefactor) + "*(" + format_double(s.scale) + "*log+ s)^" +
                 format_double(s.exponent);
      },
      phi);
}

}  // namespace lemma

VerificationReport check_rearrangement_lemma(const lemma::GSpec& g, const lemma::PhiSpec& phi,
                                             const lemma::PsiSpec& psi, double t_max) {
  validate_lemma(g, phi, psi, t_max);
  json inputs{{"g", lemma::describe(g)}, {"phi", lemma::describe(phi)},
              {"psi_r", psi.r}, {"t_max", t_max}};
  const LemmaIntegrands li{g, phi, psi, t_max};

  auto skip = [&](const std::string& why) {
    VerificationReport r;
    r.check_name = "rearrangement_lemma";
    r.inputs = inputs;
    r.skipped = true;
    r.pass = false;
    r.details = json{{"skipped", why}};
    return r;
  };
  if (auto problem = li.integrability_problem(); !problem.empty()) return skip(problem);

  const double target = li.reference(false);
  if (!std::isfinite(target)) return skip("reference integral is not finite");
  auto residual = [&](double log_c) { return li.constrained(log_c, false) - target; };

  double log_c = 0.0;
  double r0 = residual(0.0);
  if (r0 != 0.0) {
    double lo = 0.0, hi = 0.0;
    double r_lo = r0, r_hi = r0;
    for (int i = 0; i < 80 && r_lo > 0.0; ++i) r_lo = residual(lo -= 1.0);
    for (int i = 0; i < 80 && r_hi < 0.0; ++i) r_hi = residual(hi += 1.0);
    if (!(r_lo <= 0.0 && r_hi >= 0.0) || !std::isfinite(r_lo) || !std::isfinite(r_hi)) {
      return skip("no constant c in [e^-80, e^80] satisfies the integral constraint");
    }
    if (r0 > 0.0) hi = 0.0, r_hi = r0;
    else lo = 0.0, r_lo = r0;
    if (r_lo == 0.0) log_c = lo;
    else if (r_hi == 0.0) log_c = hi;
    else {
      std::uintmax_t iters = 200;
      auto [a, b] = boost::math::tools::toms748_solve(
          residual, lo, hi, r_lo, r_hi, boost::math::tools::eps_tolerance<double>(52), iters);
      log_c = 0.5 * (a + b);
    }
  }
  const double weighted_ref = li.reference(true);
  const double weighted_g = li.constrained(log_c, true);
  const double margin = weighted_ref - weighted_g;
  json details{{"c", std::exp(log_c)},
               {"constraint_target", target},
               {"constraint_residual", residual(log_c)},
               {"weighted_reference", weighted_ref},
               {"weighted_g", weighted_g}};
  return make_report("rearrangement_lemma", std::move(inputs), margin,
                     1e-8 * std::max(1.0, std::abs(weighted_ref)), std::move(details));
}

std::vector<LemmaInstance> random_lemma_instances(std::size_t count, std::uint64_t seed) {
  auto engine = stream_engine(seed, 0x6c656d);
  std::uniform_real_distribution<double> u01;
  std::vector<LemmaInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    LemmaInstance inst{lemma::PowerDecay{0.0}, lemma::PowerPhi{0.5}, lemma::PowerPsi{1.0}, 1.0};
    double blowup = 1.0;
    if (u01(engine) < 0.5) {
      const double beta = u01(engine);
      inst.g = lemma::PowerDecay{beta};
      blowup = 1.0 + beta;
    } else {
      inst.g = lemma::ExpDecay{3.0 * u01(engine)};
    }
    if (u01(engine) < 0.5) {
      inst.phi = lemma::PowerPhi{(0.05 + 0.85 * u01(engine)) / blowup};
    } else {
      const int m = 1 + static_cast<int>(3.0 * u01(engine));
      inst.phi = lemma::LogPowerPhi{0.5 + u01(engine), 0.5 * m, 1.0};
    }
    inst.psi = lemma::PowerPsi{1.0 + 3.0 * u01(engine)};
    inst.t_max = 0.2 + 0.8 * u01(engine);
    out.push_back(std::move(inst));
  }
  return out;
}

VerificationReport check_isoperimetric_variant(int m, const std::vector<double>& radii) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "m must be >= 1");
  if (radii.empty()) throw Error(ErrorKind::InvalidInput, "need at least one radius");
  const double omega = unit_ball_volume(m);
  const double sharp_const = m * m * std::numbers::pi *
                             std::exp(-2.0 / m * std::lgamma(1.0 + 0.5 * m));
  const double literal_const = m * m * std::numbers::pi * std::exp(-2.0 / m * std::lgamma(0.5 * m));
  double worst = 0.0;
  double excess = 0.0;
  json rows = json::array();
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidInput, "radii must be > 0");
    const double volume = omega * std::pow(r, m);
    const double area = m * omega * std::pow(r, m - 1);
    const double area2 = area * area;
    const double vol_term = std::pow(volume, 2.0 * (m - 1) / m);
    const double sharp = sharp_const * vol_term;
    const double literal = literal_const * vol_term;
    const double rel = std::abs(sharp - area2) / area2;
    worst = std::max(worst, rel);
    excess = literal / area2;
    rows.push_back({{"r", r},
                    {"boundary_measure_sq", area2},
                    {"volume", volume},
                    {"sharp_bound", sharp},
                    {"literal_bound", literal},
                    {"sharp_rel_error", rel},
                    {"literal_excess_factor", literal / area2}});
  }
  json details{{"radii", rows},
               {"literal_excess_factor", excess},
               {"literal_exceeds_boundary", excess > 1.0 + 1e-12},
               {"variants_coincide", std::abs(excess - 1.0) <= 1e-12}};
  return make_report("isoperimetric_variant(m=" + std::to_string(m) + ")",
                     json{{"m", m}, {"radii", radii}}, -worst, 1e-10, std::move(details));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"contraction", "monotone", "pointwise",
                                              "decay",       "limit",    "extremal",
                                              "lemma",       "isoperimetric", "all"};
  return names;
}

std::vector<VerificationReport> run_suite(std::string_view suite, const TestFunction& f,
                                          const SuiteOptions& o) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw Error(ErrorKind::InvalidInput, "unknown suite '" + std::string(suite) + "'");
  }
  const bool all = suite == "all";
  auto wants = [&](std::string_view name) { return all || suite == name; };
  std::vector<std::function<VerificationReport()>> jobs;

  if (wants("contraction")) {
    for (std::size_t i = 0; i < o.p_list.size(); ++i) {
      for (std::size_t j = i + 1; j < o.p_list.size(); ++j) {
        const double p = o.p_list[i], q = o.p_list[j];
        jobs.push_back([&, p, q] { return check_contraction(f, p, q, o.params.alpha, o.method); });
      }
    }
  }
  if (wants("monotone")) {
    jobs.push_back([&] {
      return check_monotone_g(g_diagnostic(f, o.params, o.grid, o.variant, o.samples, o.seed));
    });
  }
  if (wants("pointwise")) {
    jobs.push_back([&] { return check_pointwise_bound(f, o.params, 10'000, o.seed, o.method); });
  }
  if (wants("decay")) {
    jobs.push_back([&] {
      auto dirs = default_directions(f.dim(), 8, o.seed);
      if (auto c = f.gaussian_center(o.params)) {
        double n2 = 0.0;
        for (double v : *c) n2 += v * v;
        if (n2 > 0.0) {
          Point d = *c;
          for (double& v : d) v /= std::sqrt(n2);
          dirs.push_back(d);
        }
      }
      return check_decay(f, o.params.alpha, dirs, default_radii(f, o.params.alpha));
    });
  }
  if (wants("limit")) {
    jobs.push_back([&] { return check_limit_norm(f, o.params.alpha, o.p_ladder); });
  }
  if (wants("extremal")) {
    jobs.push_back([&] {
      return check_extremal_convex(f, o.params, ConvexFunction::power(2.0), o.method);
    });
    jobs.push_back([&] {
      return check_extremal_convex(
          f, o.params, ConvexFunction::piecewise_linear({0.25, 0.5}, {0.0, 1.0, 3.0}), o.method);
    });
  }
  if (wants("lemma")) {
    const auto draws = random_lemma_instances(o.lemma_draws, o.seed);
    for (std::size_t i = 0; i < draws.size(); ++i) {
      jobs.push_back([inst = draws[i], i] {
        auto r = check_rearrangement_lemma(inst.g, inst.phi, inst.psi, inst.t_max);
        char buf[16];
        std::snprintf(buf, sizeof buf, "[%04zu]", i);
        r.check_name += buf;
        return r;
      });
    }
  }
  if (wants("isoperimetric")) {
    jobs.push_back([&] { return check_isoperimetric_variant(o.params.m, {0.5, 1.0, 2.0}); });
  }
  auto reports = parallel_map(jobs.size(), [&](std::size_t i) { return jobs[i](); });
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.check_name < b.check_name; });
  return reports;
}

}  // namespace focklab
