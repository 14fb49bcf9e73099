#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "focklab/funcmodel.hpp"

namespace focklab {

struct GaussHermite {
  int nodes = 32;
};

struct Radial {
  int radial_nodes = 32;
  int angular_nodes = 32;
};

struct MonteCarlo {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

using Method = std::variant<GaussHermite, Radial, MonteCarlo>;

std::string describe(const Method& method);

/// The Gaussian e^{-rate |x - center|^2 / 2} that the integrators adapt to:
/// quadrature nodes are scaled to it and Monte Carlo draws from it.
struct GaussianFrame {
  double rate;
  Point center;
};

/// log of a nonnegative integrand on R^m; -inf marks zeros.
using LogIntegrand = std::function<double(std::span<const double>)>;

struct IntegralEstimate {
  double value;
  double log_value;
  double error;  // |coarse - refined| for quadrature, standard error for MC
  Method method;
};

IntegralEstimate gauss_hermite_integrate(const LogIntegrand& integrand,
                                         const GaussianFrame& frame, int nodes_per_axis);
IntegralEstimate radial_integrate(const LogIntegrand& integrand, const GaussianFrame& frame,
                                  int radial_nodes, int angular_nodes);
IntegralEstimate mc_integrate(const LogIntegrand& integrand, const GaussianFrame& frame,
                              std::size_t samples, std::uint64_t seed);
IntegralEstimate integrate(const LogIntegrand& integrand, const GaussianFrame& frame,
                           const Method& method);

/// Integral of the density u over R^m against Lebesgue measure.
IntegralEstimate integrate_density(const TestFunction& f, const FockParams& params,
                                   const Method& method);

/// (alpha p / (2 pi))^{m/2}
double norm_constant(const FockParams& params);

struct NormEstimate {
  double value;         // ||f||_{p,alpha}
  double raw_integral;  // value^p = c_{p,alpha} * int u dA
  double log_raw;
  double error_bound;   // on value
  double raw_error;     // on raw_integral
  Method method;
};

NormEstimate fock_norm(const TestFunction& f, const FockParams& params, const Method& method);

/// Convex G on [0, inf) with G >= 0. Power(r) is t^r; PiecewiseLinear has
/// slopes[0] on [0, knots[0]], slopes[i] on [knots[i-1], knots[i]] and the
/// last slope beyond; Custom interpolates a table linearly and extends it
/// with the last slope.
class ConvexFunction {
 public:
  enum class Kind { Power, PiecewiseLinear, Custom };

  static ConvexFunction power(double r);
  static ConvexFunction piecewise_linear(std::vector<double> knots, std::vector<double> slopes);
  static ConvexFunction custom(std::vector<double> grid, std::vector<double> values);

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }

  double operator()(double t) const;
  double derivative(double t) const;
  double log_of(double log_t) const;
  double at_zero() const;
  /// Decay rate of G(u) relative to u for Gaussian u.
  double rate_factor() const { return kind_ == Kind::Power ? exponent_ : 1.0; }
  std::string describe() const;

 private:
  ConvexFunction() = default;

  Kind kind_ = Kind::Power;
  double exponent_ = 1.0;
  // breakpoints/values/slopes shared by the piecewise kinds
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

struct FunctionalEstimate {
  double value;
  double error;
  Method method;
};

/// int_{R^m} G(u(x)) dA(x). Requires G(0) = 0.
FunctionalEstimate convex_functional(const TestFunction& f, const FockParams& params,
                                     const ConvexFunction& g, const Method& method);

}  // namespace focklab
