#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "focklab/funcmodel.hpp"
#include "focklab/integrate.hpp"

namespace focklab {

struct MaxResult {
  double t_max;  // max of u over R^m
  Point argmax;
  int restarts_agreeing;
  int restarts;
};

/// Multistart Nelder-Mead ascent on log u from Gaussian-sampled starts.
MaxResult find_max(const TestFunction& f, const FockParams& params, int restarts = 16,
                   std::uint64_t seed = 1);

/// Which Gamma factor enters the isoperimetric constant: SharpBall uses
/// Gamma(1 + m/2) and is attained by balls; PaperLiteral uses Gamma(m/2).
enum class IsoperimetricVariant { SharpBall, PaperLiteral };

std::string to_string(IsoperimetricVariant v);
IsoperimetricVariant parse_variant(const std::string& text);

/// Gamma(.)^{2/m} / (2 pi) for the chosen variant.
double isoperimetric_kappa(int m, IsoperimetricVariant variant);

/// Volume of the unit ball in R^m.
double unit_ball_volume(int m);

struct MeasureEstimate {
  double value;
  double stderr_;
  std::size_t samples;
  double ball_radius;
};

/// Lebesgue measure of {u > t} by hit counting in the envelope ball.
/// A known t_max short-circuits levels at or above the maximum.
MeasureEstimate superlevel_measure(const TestFunction& f, const FockParams& params, double t,
                                   std::size_t samples, std::uint64_t seed,
                                   std::optional<double> t_max = std::nullopt);

/// Geometric levels t_k = t_max * ratio^k for k = 1..count.
struct GridSpec {
  double ratio = 0.9;
  int count = 60;
};

std::vector<double> level_grid(double t_max, const GridSpec& grid);

struct Violation {
  double t_hi;
  double t_lo;
  double margin;  // g(t_hi) - g(t_lo) - 3 * propagated error - rounding floor
};

struct LevelProfile {
  FockParams params;
  IsoperimetricVariant variant = IsoperimetricVariant::SharpBall;
  double t_max = 0.0;
  std::vector<double> t;  // decreasing
  std::vector<double> mu;
  std::vector<double> mu_stderr;
  std::vector<double> g;
  std::vector<double> g_stderr;
  std::vector<Violation> violations;
  /// worst g(t_hi) - g(t_lo) over adjacent pairs, before the error allowance
  double worst_increase = 0.0;

  /// True when the step from level i - 1 down to level i is a violation.
  bool violated_at(std::size_t i) const;
};

/// g(t) = t exp[kappa alpha p mu^{2/m}]
double g_value(double t, double mu, const FockParams& params, IsoperimetricVariant variant);

/// Inverse of g_value in mu. Requires g >= t > 0.
double mu_from_g(double g, double t, const FockParams& params, IsoperimetricVariant variant);

/// Builds g, its propagated error and the violation list from measured mu.
LevelProfile assemble_profile(const FockParams& params, IsoperimetricVariant variant,
                              double t_max, std::vector<double> t, std::vector<double> mu,
                              std::vector<double> mu_stderr);

LevelProfile g_diagnostic(const TestFunction& f, const FockParams& params,
                          const GridSpec& grid, IsoperimetricVariant variant,
                          std::size_t samples, std::uint64_t seed);

struct LayerCakeResult {
  double value;   // int_0^{t_max} mu(t) G'(t) dt
  double error;   // MC error + grid refinement difference + truncated tail
  double direct;  // convex_functional
  double direct_error;
  double discrepancy;  // value - direct
  std::size_t levels;
};

/// Levels are t_max * ratio^k for k = 0..count; count must be a multiple of 4.
LayerCakeResult layer_cake(const TestFunction& f, const FockParams& params,
                           const ConvexFunction& g, const GridSpec& grid, std::size_t samples,
                           std::uint64_t seed, const Method& direct_method = GaussHermite{});

}  // namespace focklab
