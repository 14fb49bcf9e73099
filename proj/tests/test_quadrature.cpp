#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "focklab/error.hpp"
#include "focklab/quadrature.hpp"

using namespace focklab;
namespace q = focklab::quadrature;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double moment(const q::Rule& rule, int k) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
  return s;
}

}  // namespace

TEST_CASE("Gauss-Hermite weights and even moments") {
  for (int n : {8, 9, 20, 32, 64, 150, 201, 300}) {
    const auto& r = q::gauss_hermite(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    CHECK(sum(r.weights) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    // exact through degree 2n - 1
    for (int k = 2; k <= std::min(2 * n - 2, 20); k += 2) {
      INFO("n=", n, " k=", k);
      CHECK(moment(r, k) == doctest::Approx(std::tgamma(0.5 * (k + 1))).epsilon(1e-12));
      CHECK(std::abs(moment(r, k - 1)) < 1e-12 * std::tgamma(0.5 * (k + 1)));
    }
  }
}

TEST_CASE("Gauss-Hermite nodes are distinct and symmetric") {
  const auto& r = q::gauss_hermite(33);
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) CHECK(r.nodes[i] != r.nodes[i + 1]);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes[i] == doctest::Approx(-r.nodes[r.nodes.size() - 1 - i]).epsilon(1e-14));
  }
}

TEST_CASE("Gauss-Laguerre moments") {
  for (double a : {0.0, 0.5, 1.0, 2.5}) {
    for (int n : {4, 16, 48, 160}) {
      const auto& r = q::gauss_laguerre(n, a);
      for (int k = 0; k <= std::min(2 * n - 1, 12); ++k) {
        INFO("alpha=", a, " n=", n, " k=", k);
        CHECK(moment(r, k) == doctest::Approx(std::tgamma(k + a + 1.0)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("Gauss-Legendre moments") {
  for (int n : {4, 17, 100}) {
    const auto& r = q::gauss_legendre(n);
    CHECK(sum(r.weights) == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 2; k <= std::min(2 * n - 2, 30); k += 2) {
      CHECK(moment(r, k) == doctest::Approx(2.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("rules are cached") {
  CHECK(&q::gauss_hermite(40) == &q::gauss_hermite(40));
  CHECK(&q::gauss_laguerre(10, 1.5) == &q::gauss_laguerre(10, 1.5));
}

TEST_CASE("invalid rule requests") {
  CHECK_THROWS_AS(q::gauss_hermite(0), Error);
  CHECK_THROWS_AS(q::gauss_hermite(100000), Error);
  CHECK_THROWS_AS(q::gauss_laguerre(8, -1.0), Error);
  CHECK_THROWS_AS(q::gauss_legendre(-3), Error);
}
