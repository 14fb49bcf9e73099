#include "focklab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "focklab/error.hpp"

// Laguerre and Legendre use Newton iteration on the three-term recurrences
// with the classical asymptotic initial guesses for the roots.

namespace focklab::quadrature {

namespace {

constexpr double kEps = 3.0e-15;
constexpr int kMaxIter = 100;

// psi_n(z) and psi_{n-1}(z) for the orthonormal Hermite functions
// psi_j(z) = p_j(z) e^{-z^2/2}.
std::pair<double, double> hermite_functions(int n, double z) {
  double p1 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * z * z), p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  return {p1, p2};
}

Rule compute_hermite(int n) {
  // Roots are bracketed by a sign scan finer than their smallest spacing
  // (about pi / sqrt(2n)), then bisected. All roots lie below sqrt(2n + 1).
  std::vector<double> pos;
  const double step = 0.1 / std::sqrt(2.0 * n + 1.0);
  const double z_end = std::sqrt(2.0 * n + 1.0) + 1.0;
  double a = n % 2 ? 0.5 * step : 0.0;
  double fa = hermite_functions(n, a).first;
  while (a < z_end && static_cast<int>(pos.size()) < n / 2) {
    const double b = a + step;
    const double fb = hermite_functions(n, b).first;
    if ((fa < 0.0) != (fb < 0.0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > kEps * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = hermite_functions(n, mid).first;
        if ((fm < 0.0) == (flo < 0.0)) lo = mid, flo = fm;
        else hi = mid;
      }
      pos.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  if (static_cast<int>(pos.size()) != n / 2) {
    throw Error(ErrorKind::InvalidInput, "Gauss-Hermite root search failed for n = " + std::to_string(n));
  }
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  auto weight = [n](double z) {
    const double pp = std::sqrt(2.0 * n) * hermite_functions(n, z).second;
    return 2.0 * std::exp(-z * z) / (pp * pp);
  };
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    const double z = pos[half - 1 - i];
    r.nodes[i] = z;
    r.nodes[n - 1 - i] = -z;
    r.weights[i] = r.weights[n - 1 - i] = weight(z);
  }
  if (n % 2) {
    r.nodes[half] = 0.0;
    r.weights[half] = weight(0.0);
  }
  return r;
}

Rule compute_laguerre(int n, double alf) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = (1.0 + alf) * (3.0 + 0.92 * alf) / (1.0 + 2.4 * n + 1.8 * alf);
    } else if (i == 1) {
      z += (15.0 + 6.25 * alf) / (1.0 + 0.9 * alf + 2.5 * n);
    } else {
      double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alf / (1.0 + 3.5 * ai)) *
           (z - r.nodes[i - 2]) / (1.0 + 0.3 * alf);
    }
    double pp = 0.0, p2 = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2 * j + 1 + alf - z) * p2 - (j + alf) * p3) / (j + 1);
      }
      pp = (n * p1 - (n + alf) * p2) / z;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps * std::max(1.0, std::abs(z))) break;
    }
    r.nodes[i] = z;
    r.weights[i] = -std::exp(std::lgamma(alf + n) - std::lgamma(static_cast<double>(n))) /
                   (pp * n * p2);
  }
  return r;
}

Rule compute_legendre(int n) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}

template <class Key, class Make>
const Rule& cached(std::map<Key, Rule>& cache, std::mutex& mu, const Key& key, Make make) {
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make()).first;
  return it->second;
}

void require_nodes(int n, int max_n) {
  if (n < 1 || n > max_n) {
    throw Error(ErrorKind::InvalidInput,
                "quadrature node count must be in [1, " + std::to_string(max_n) + "]");
  }
}

}  // namespace

const Rule& gauss_hermite(int n) {
  require_nodes(n, 300);
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, [n] { return compute_hermite(n); });
}

const Rule& gauss_laguerre(int n, double alpha) {
  require_nodes(n, 160);
  if (!(alpha > -1.0)) throw Error(ErrorKind::InvalidInput, "Laguerre alpha must be > -1");
  static std::map<std::pair<int, double>, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, std::pair{n, alpha}, [=] { return compute_laguerre(n, alpha); });
}

const Rule& gauss_legendre(int n) {
  require_nodes(n, 1000);
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, [n] { return compute_legendre(n); });
}

}  // namespace focklab::quadrature
