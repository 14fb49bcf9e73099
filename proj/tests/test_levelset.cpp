#include <doctest.h>

#include <cmath>
#include <numbers>

#include "focklab/error.hpp"
#include "focklab/levelset.hpp"

using namespace focklab;

namespace {

// Root of x e^{-x} = y on the branch containing x0, by bisection.
double solve_xexp(double y, double lo, double hi) {
  auto h = [y](double x) { return x * std::exp(-x) - y; };
  const bool rising = h(lo) < h(hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((h(mid) < 0.0) == rising ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Exact measure of {u > t} for u = e^{-rate |x - a|^2 / 2} in R^m.
double gaussian_ball_measure(int m, double rate, double t) {
  return unit_ball_volume(m) * std::pow(2.0 * std::log(1.0 / t) / rate, 0.5 * m);
}

}  // namespace

TEST_CASE("unit ball volumes and isoperimetric constants") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  // both variants coincide for m = 2: Gamma(1) = Gamma(2) = 1
  CHECK(isoperimetric_kappa(2, IsoperimetricVariant::SharpBall) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  CHECK(isoperimetric_kappa(2, IsoperimetricVariant::PaperLiteral) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  const double ratio = isoperimetric_kappa(3, IsoperimetricVariant::PaperLiteral) /
                       isoperimetric_kappa(3, IsoperimetricVariant::SharpBall);
  CHECK(ratio == doctest::Approx(std::pow(2.0 / 3.0, 2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("variant names") {
  CHECK(to_string(IsoperimetricVariant::SharpBall) == "sharp-ball");
  CHECK(to_string(IsoperimetricVariant::PaperLiteral) == "paper-literal");
  CHECK(parse_variant("paper-literal") == IsoperimetricVariant::PaperLiteral);
  CHECK(parse_variant("sharp") == IsoperimetricVariant::SharpBall);
  CHECK_THROWS_AS(parse_variant("round"), Error);
}

TEST_CASE("find_max on closed forms") {
  const auto coh = find_max(TestFunction::coherent({0.5, -1.0, 2.0}, 1.0), {3, 2.0, 1.0});
  CHECK(coh.t_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coh.argmax[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(coh.argmax[2] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(coh.restarts_agreeing == coh.restarts);

  // |z^k|^p e^{-alpha p r^2 / 2} peaks at r^2 = k / alpha
  for (int k : {1, 2, 3}) {
    for (double p : {1.0, 2.0, 5.0}) {
      for (double alpha : {0.5, 2.0}) {
        const auto r = find_max(TestFunction::monomial(2, {k}), {2, p, alpha});
        const double want = std::exp(0.5 * k * p * (std::log(k / alpha) - 1.0));
        INFO("k=", k, " p=", p, " alpha=", alpha);
        CHECK(r.t_max == doctest::Approx(want).epsilon(1e-10));
        CHECK(std::hypot(r.argmax[0], r.argmax[1]) == doctest::Approx(std::sqrt(k / alpha)).epsilon(1e-5));
      }
    }
  }
  CHECK(find_max(TestFunction::constant(1, 3.0), {1, 2.0, 1.0}).t_max == doctest::Approx(9.0));
}

TEST_CASE("find_max is deterministic") {
  const auto f = TestFunction::sum_of_coherent(2, {{0.6, {0.4, 0.0}}, {0.4, {-0.5, 0.3}}}, 1.0);
  const auto a = find_max(f, {2, 2.0, 1.0}, 16, 9);
  const auto b = find_max(f, {2, 2.0, 1.0}, 16, 9);
  CHECK(a.t_max == b.t_max);
  CHECK(a.argmax == b.argmax);
}

TEST_CASE("superlevel measure of coherent states") {
  const double t = 0.3;
  for (int m : {1, 2, 3}) {
    const FockParams params{m, 2.0, 1.0};
    Point a(m, 0.0);
    a[0] = 0.7;
    const auto est = superlevel_measure(TestFunction::coherent(a, 1.0), params, t, 200'000, 4);
    const double want = gaussian_ball_measure(m, params.rate(), t);
    INFO("m=", m);
    CHECK(std::abs(est.value - want) <= 4.0 * est.stderr_);
    CHECK(est.stderr_ < 0.01 * want);
  }
}

TEST_CASE("superlevel measure of the monomial annulus") {
  // u = r^2 e^{-r^2}; {u > e^{-1}/2} is the annulus x1 < r^2 < x2 with x e^{-x} = e^{-1}/2
  const double t = 0.5 * std::exp(-1.0);
  const double x1 = solve_xexp(t, 0.0, 1.0);
  const double x2 = solve_xexp(t, 1.0, 20.0);
  CHECK(x1 == doctest::Approx(0.232).epsilon(1e-3));
  CHECK(x2 == doctest::Approx(2.678).epsilon(1e-3));
  const double want = std::numbers::pi * (x2 - x1);
  CHECK(want == doctest::Approx(7.69).epsilon(1e-3));
  const auto est = superlevel_measure(TestFunction::monomial(2, {1}), {2, 2.0, 1.0}, t, 400'000, 2);
  CHECK(std::abs(est.value - want) <= 4.0 * est.stderr_);
}

TEST_CASE("superlevel measure edge cases") {
  const auto z = TestFunction::monomial(2, {1});
  const FockParams params{2, 2.0, 1.0};
  const auto above = superlevel_measure(z, params, 1.0, 10'000, 1);
  CHECK(above.value == 0.0);
  CHECK(above.stderr_ == 0.0);
  CHECK(superlevel_measure(z, params, std::exp(-1.0), 10'000, 1, std::exp(-1.0)).value == 0.0);
  CHECK_THROWS_AS(superlevel_measure(z, params, 0.0, 10'000, 1), Error);
  CHECK_THROWS_AS(superlevel_measure(TestFunction::exp_quadratic(2, 0.5), params, 0.1, 10'000, 1),
                  Error);
  const auto a = superlevel_measure(z, params, 0.1, 50'000, 5);
  const auto b = superlevel_measure(z, params, 0.1, 50'000, 5);
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("level grid") {
  const auto t = level_grid(2.0, {0.5, 3});
  REQUIRE(t.size() == 3);
  CHECK(t[0] == 1.0);
  CHECK(t[2] == 0.25);
  CHECK_THROWS_AS(level_grid(1.0, {1.5, 3}), Error);
  CHECK_THROWS_AS(level_grid(1.0, {0.5, 0}), Error);
}

TEST_CASE("g and its inverse round-trip") {
  for (int m : {1, 2, 3, 5}) {
    for (auto v : {IsoperimetricVariant::SharpBall, IsoperimetricVariant::PaperLiteral}) {
      const FockParams params{m, 1.5, 0.8};
      for (double mu : {0.0, 1e-3, 0.7, 12.0}) {
        const double t = 0.03;
        const double g = g_value(t, mu, params, v);
        CHECK(mu_from_g(g, t, params, v) == doctest::Approx(mu).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(mu_from_g(0.1, 0.2, {2, 2.0, 1.0}, IsoperimetricVariant::SharpBall), Error);
}

TEST_CASE("exact coherent measures give g = 1 (sharp) and t^{1-(2/m)^{2/m}} (literal)") {
  for (int m : {1, 2, 3, 4}) {
    const FockParams params{m, 2.0, 1.0};
    const auto t = level_grid(1.0, {0.9, 40});
    std::vector<double> mu, zero(t.size(), 0.0);
    for (double ti : t) mu.push_back(gaussian_ball_measure(m, params.rate(), ti));
    const auto sharp = assemble_profile(params, IsoperimetricVariant::SharpBall, 1.0, t, mu, zero);
    for (double g : sharp.g) CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
    const auto literal =
        assemble_profile(params, IsoperimetricVariant::PaperLiteral, 1.0, t, mu, zero);
    const double expo = 1.0 - std::pow(2.0 / m, 2.0 / m);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(literal.g[i] == doctest::Approx(std::pow(t[i], expo)).epsilon(1e-12));
    }
    INFO("m=", m);
    if (m >= 3) {
      CHECK(literal.violations.size() == t.size() - 1);
      CHECK_FALSE(literal.violated_at(0));
      CHECK(literal.violated_at(1));
    } else {
      // m = 1 makes g decreasing in t, m = 2 makes it constant
      CHECK(literal.violations.empty());
    }
  }
}

TEST_CASE("g_diagnostic on a coherent state stays near 1") {
  const FockParams params{2, 2.0, 1.0};
  const auto prof = g_diagnostic(TestFunction::coherent({0.3, 0.1}, 1.0), params, {0.8, 12},
                                 IsoperimetricVariant::SharpBall, 100'000, 3);
  CHECK(prof.t_max == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(prof.g.size() == 12);
  CHECK(prof.violations.empty());
  for (std::size_t i = 0; i < prof.g.size(); ++i) {
    CHECK(std::abs(prof.g[i] - 1.0) <= 4.0 * prof.g_stderr[i]);
  }
  const auto again = g_diagnostic(TestFunction::coherent({0.3, 0.1}, 1.0), params, {0.8, 12},
                                  IsoperimetricVariant::SharpBall, 100'000, 3);
  CHECK(again.g == prof.g);
}

TEST_CASE("g_diagnostic on a monomial is nonincreasing within noise") {
  const auto prof = g_diagnostic(TestFunction::monomial(2, {1}), {2, 2.0, 1.0}, {0.8, 16},
                                 IsoperimetricVariant::SharpBall, 100'000, 8);
  CHECK(prof.violations.empty());
  // far below the peak the monomial behaves like a constant and g -> 1 from above
  CHECK(prof.g.back() > prof.g.front());
}

TEST_CASE("layer cake reproduces pi for the constant function") {
  const auto r = layer_cake(TestFunction::constant(2, 1.0), {2, 2.0, 1.0}, ConvexFunction::power(1.0),
                            {0.8, 120}, 100'000, 1);
  CHECK(r.direct == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  CHECK(std::abs(r.value - std::numbers::pi) <= r.error);
  CHECK(r.error < 5e-3);
  CHECK(r.levels == 121);
}

TEST_CASE("layer cake requires a Simpson-compatible grid") {
  CHECK_THROWS_AS(layer_cake(TestFunction::constant(2, 1.0), {2, 2.0, 1.0},
                             ConvexFunction::power(1.0), {0.8, 30}, 10'000, 1),
                  Error);
}
