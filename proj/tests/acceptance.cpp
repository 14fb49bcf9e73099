// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails. Tolerances are fixed here and never adjusted at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "focklab/cli.hpp"
#include "focklab/format.hpp"
#include "focklab/funcspec.hpp"
#include "focklab/integrate.hpp"
#include "focklab/levelset.hpp"
#include "focklab/verify.hpp"

using namespace focklab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// sqrt(2/p) Gamma(1 + p/2)^{1/p}, through log-Gamma
double monomial_oracle(double p) {
  return std::exp(0.5 * std::log(2.0 / p) + std::lgamma(1.0 + 0.5 * p) / p);
}

Outcome normalization() {
  double worst = 0.0;
  for (int m : {1, 2, 3}) {
    for (double p : {0.5, 1.0, 2.0, 4.0}) {
      for (double alpha : {0.5, 1.0, 2.0}) {
        const auto est = fock_norm(TestFunction::constant(m, 1.0), {m, p, alpha}, GaussHermite{32});
        worst = std::max(worst, std::abs(est.value - 1.0));
      }
    }
  }
  return {worst <= 1e-8, "max |norm - 1| = " + num(worst) + " over 36 cases (tol 1e-8)"};
}

Outcome coherent_unit_norm() {
  double worst = 0.0;
  const auto f = TestFunction::coherent({1.0, 0.0}, 1.0);
  for (double p : {1.0, 2.0, 4.0}) {
    worst = std::max(worst, std::abs(fock_norm(f, {2, p, 1.0}, GaussHermite{32}).value - 1.0));
  }
  return {worst <= 1e-6, "max |norm - 1| = " + num(worst) + " (tol 1e-6)"};
}

Outcome radial_oracle() {
  double worst = 0.0;
  std::string values;
  const auto z = TestFunction::monomial(2, {1});
  for (double p : {2.0, 4.0, 8.0}) {
    const double got = fock_norm(z, {2, p, 1.0}, GaussHermite{32}).value;
    const double want = monomial_oracle(p);
    worst = std::max(worst, std::abs(got - want));
    char buf[80];
    std::snprintf(buf, sizeof buf, "p=%g: %.6f vs %.6f; ", p, got, want);
    values += buf;
  }
  return {worst <= 1e-6, values + "max diff " + num(worst) + " (tol 1e-6)"};
}

Outcome contraction_suite() {
  const std::vector<double> ps{0.5, 1.0, 2.0, 4.0};
  int checks = 0, failures = 0, equality_checks = 0, equality_misses = 0;
  double worst_margin = INFINITY, worst_equality = 0.0;
  for (int m : {1, 2, 3}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      for (const auto& f : default_families(m, alpha)) {
        const bool coherent = std::holds_alternative<family::Coherent>(f.family());
        for (std::size_t i = 0; i < ps.size(); ++i) {
          for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const auto r = check_contraction(f, ps[i], ps[j], alpha);
            ++checks;
            if (!r.pass) ++failures;
            worst_margin = std::min(worst_margin, r.margin + r.tolerance);
            if (coherent) {
              ++equality_checks;
              const double em = r.details["equality_margin"].get<double>();
              worst_equality = std::max(worst_equality, em);
              if (!(em <= 1e-6) || !r.details["equality_flagged"].get<bool>()) ++equality_misses;
            }
          }
        }
      }
    }
  }
  return {failures == 0 && equality_misses == 0 && equality_checks > 0,
          std::to_string(checks) + " checks, " + std::to_string(failures) +
              " failures, min(margin + tol) = " + num(worst_margin) + "; coherent |equality margin| <= " +
              num(worst_equality) + " over " + std::to_string(equality_checks) + " (tol 1e-6)"};
}

Outcome monotone_g() {
  const GridSpec grid{0.9, 60};
  const std::size_t samples = 1'000'000;
  struct Case {
    TestFunction f;
    bool coherent;
  };
  std::vector<Case> cases{
      {TestFunction::coherent({0.5}, 1.0), true},
      {TestFunction::coherent({0.5, -0.3}, 1.0), true},
      {TestFunction::coherent({0.5, -0.3, 0.2}, 1.0), true},
      {TestFunction::monomial(2, {1}), false},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const int m = c.f.dim();
    const auto prof =
        g_diagnostic(c.f, {m, 2.0, 1.0}, grid, IsoperimetricVariant::SharpBall, samples, 1);
    const auto r = check_monotone_g(prof);
    const double dev = r.details["max_abs_g_minus_1"].get<double>();
    const bool ok = r.pass && (!c.coherent || dev <= 1e-2);
    pass = pass && ok;
    detail += (c.coherent ? "coherent m=" + std::to_string(m) : std::string("z")) + ": " +
              std::to_string(prof.violations.size()) + " violations" +
              (c.coherent ? ", max|g-1| = " + num(dev) : std::string()) + "; ";
  }
  return {pass, detail + "60 levels x 1e6 samples (tol |g-1| <= 1e-2)"};
}

Outcome constant_variant() {
  const FockParams params{3, 2.0, 1.0};
  const auto f = TestFunction::coherent({0.0, 0.0, 0.0}, 1.0);
  const GridSpec grid{0.9, 60};
  const auto literal =
      g_diagnostic(f, params, grid, IsoperimetricVariant::PaperLiteral, 1'000'000, 2);
  const auto sharp = g_diagnostic(f, params, grid, IsoperimetricVariant::SharpBall, 1'000'000, 2);
  const double expo = 1.0 - std::pow(2.0 / 3.0, 2.0 / 3.0);
  double worst = 0.0, worst_quoted = 0.0;
  for (std::size_t i = 0; i < literal.t.size(); ++i) {
    worst = std::max(worst, std::abs(literal.g[i] - std::pow(literal.t[i], expo)));
    worst_quoted = std::max(worst_quoted, std::abs(literal.g[i] - std::pow(literal.t[i], 0.2373)));
  }
  const bool flagged = !literal.violations.empty();
  const bool sharp_ok = check_monotone_g(sharp).pass;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", expo);
  return {worst <= 2e-2 && flagged && sharp_ok,
          "literal vs t^" + std::string(buf) + ": max diff " + num(worst) +
              " (vs t^0.2373: " + num(worst_quoted) + ", tol 2e-2); literal flagged: " +
              (flagged ? "yes (" + std::to_string(literal.violations.size()) + " steps)" : std::string("no")) +
              "; sharp-ball passes: " + (sharp_ok ? "yes" : "no")};
}

Outcome layer_cake_equivalence() {
  const FockParams params{2, 2.0, 1.0};
  const GridSpec grid{0.8, 120};
  const auto one = layer_cake(TestFunction::constant(2, 1.0), params, ConvexFunction::power(1.0),
                              grid, 1'000'000, 3);
  const double dev = std::abs(one.value - std::numbers::pi);
  const auto z = layer_cake(TestFunction::monomial(2, {1}), params, ConvexFunction::power(2.0),
                            grid, 1'000'000, 4);
  const double combined = z.error + z.direct_error;
  const double gap = std::abs(z.value - z.direct);
  return {dev <= 1e-3 && gap <= 3.0 * combined,
          "const: |layer cake - pi| = " + num(dev) + " (tol 1e-3); z, G=t^2: |layer cake - direct| = " +
              num(gap) + " vs 3 x combined error " + num(3.0 * combined)};
}

Outcome pointwise_bound() {
  int checks = 0, failures = 0;
  double worst_equality = 0.0;
  for (int m : {1, 2, 3}) {
    for (double p : {1.0, 2.0}) {
      for (const auto& f : default_families(m, 1.0)) {
        const auto r = check_pointwise_bound(f, {m, p, 1.0}, 10'000, 1);
        ++checks;
        if (!r.pass) ++failures;
        if (std::holds_alternative<family::Coherent>(f.family())) {
          worst_equality =
              std::max(worst_equality, std::abs(r.details["residual_at_extremizer"].get<double>()));
        }
      }
    }
  }
  return {failures == 0 && worst_equality <= 1e-9,
          std::to_string(checks) + " members x 1e4 points, " + std::to_string(failures) +
              " violations; coherent residual at x = a: " + num(worst_equality) + " (tol 1e-9)"};
}

Outcome limit_norm() {
  const std::vector<double> ladder{2, 4, 8, 16, 32, 64};
  const auto z = check_limit_norm(TestFunction::monomial(2, {1}), 1.0, ladder, 1e-3);
  const auto& d = z.details;
  const double sup = d["sup_norm"].get<double>();
  const double gap = d["extrapolation_gap"].get<double>();
  bool bounded = true;
  for (const auto& row : d["ladder"]) bounded = bounded && row["norm"].get<double>() >= sup;
  const bool decreasing = d["strictly_decreasing"].get<bool>();
  const auto coh = check_limit_norm(TestFunction::coherent({1.0, 0.0}, 1.0), 1.0, ladder, 1e-3);
  double coh_dev = 0.0;
  for (const auto& row : coh.details["ladder"]) {
    coh_dev = std::max(coh_dev, std::abs(row["norm"].get<double>() - 1.0));
  }
  return {z.pass && decreasing && bounded && gap <= 1e-3 && coh_dev <= 1e-6,
          std::string("z: strictly decreasing ") + (decreasing ? "yes" : "no") + ", >= sup " +
              (bounded ? "yes" : "no") + ", sup = " + format_double(sup).substr(0, 10) +
              ", extrapolation gap " + num(gap) + " (tol 1e-3); coherent max|norm-1| = " +
              num(coh_dev) + " (tol 1e-6)"};
}

Outcome rearrangement_lemma() {
  const auto instances = random_lemma_instances(1000, 10);
  int failures = 0, skipped = 0;
  double worst = INFINITY;
  for (const auto& inst : instances) {
    const auto r = check_rearrangement_lemma(inst.g, inst.phi, inst.psi, inst.t_max);
    if (r.skipped) ++skipped;
    else if (!r.pass) ++failures;
    if (!r.skipped) worst = std::min(worst, r.margin / std::max(1.0, r.tolerance * 1e8));
  }
  return {failures == 0 && skipped == 0,
          "1000 instances, " + std::to_string(failures) + " negative beyond tolerance, " +
              std::to_string(skipped) + " skipped; min scaled margin " + num(worst) +
              " (tol 1e-8 relative)"};
}

Outcome isoperimetric() {
  const auto r = check_isoperimetric_variant(3, {0.5, 1.0, 2.0});
  const double excess = r.details["literal_excess_factor"].get<double>();
  const double want = std::pow(1.5, 2.0 / 3.0);
  const double sharp_err = -r.margin;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10f", excess);
  return {sharp_err <= 1e-10 && std::abs(excess - want) <= 1e-10,
          "sharp-ball relative error " + num(sharp_err) + " (tol 1e-10); literal excess " + buf +
              " vs (3/2)^(2/3), diff " + num(std::abs(excess - want)) + " (tol 1e-10)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "focklab_acceptance_repro";
  fs::remove_all(root);
  std::vector<cli::RunConfig> configs;
  {
    cli::RunConfig c;
    c.command = "norm";
    c.fn = "sumcoherent:alpha=1;atoms=0.6@0.4,0|0.4@-0.5,0.3";
    c.method = "mc";
    c.samples = 500'000;
    configs.push_back(c);
    c = {};
    c.command = "profile";
    c.params = {3, 2.0, 1.0};
    c.fn = "coherent:a=0,0,0;alpha=1";
    c.samples = 100'000;
    c.format = "json";
    configs.push_back(c);
    c = {};
    c.command = "verify";
    c.fn = "monomial:k=1";
    c.suite = "all";
    c.samples = 50'000;
    c.lemma_draws = 50;
    configs.push_back(c);
    c = {};
    c.command = "sweep";
    c.fn = "coherent:a=1,0";
    configs.push_back(c);
    c = {};
    c.command = "limit";
    c.fn = "monomial:k=1";
    configs.push_back(c);
  }
  // The second pass changes the worker count, which must not matter.
  auto pass = [&](const char* name, const char* threads) {
    ::setenv("FOCKLAB_THREADS", threads, 1);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      auto c = configs[i];
      c.out = (root / name / (std::to_string(i) + (c.command == "verify" ? "" : ".out"))).string();
      std::ostringstream out, err;
      cli::run(c, out, err);
      std::ofstream(root / name / (std::to_string(i) + ".stdout"), std::ios::binary) << out.str();
    }
    ::unsetenv("FOCKLAB_THREADS");
  };
  pass("a", "1");
  pass("b", "4");
  int files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root / "a");
    std::string a = slurp(entry.path());
    std::string b = slurp(root / "b" / rel);
    // out= lines name the run directory and are expected to differ
    auto strip = [](std::string s) {
      for (const std::string dir : {"/a/", "/b/"}) {
        for (auto pos = s.find(dir); pos != std::string::npos; pos = s.find(dir, pos)) {
          s.replace(pos, dir.size(), "/_/");
        }
      }
      return s;
    };
    ++files;
    if (strip(a) != strip(b)) ++differing;
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0,
          std::to_string(files) + " artifacts from norm(mc)/profile/verify/sweep/limit, " +
              std::to_string(differing) + " differ between runs (1 vs 4 workers)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1", "normalization", normalization},
      {"2", "coherent-state unit norm", coherent_unit_norm},
      {"3", "radial oracle", radial_oracle},
      {"4", "contraction suite", contraction_suite},
      {"5", "monotone g (sharp-ball)", monotone_g},
      {"6", "constant-variant discriminator", constant_variant},
      {"7", "layer-cake equivalence", layer_cake_equivalence},
      {"8", "pointwise bound", pointwise_bound},
      {"9", "limit norm", limit_norm},
      {"10", "rearrangement lemma", rearrangement_lemma},
      {"11", "isoperimetric variants", isoperimetric},
      {"12", "reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
