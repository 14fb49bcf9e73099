#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "focklab/funcmodel.hpp"
#include "focklab/integrate.hpp"
#include "focklab/levelset.hpp"

namespace focklab {

/// Outcome of one executable inequality check. pass <=> margin >= -tolerance,
/// except for skipped checks, which never pass.
struct VerificationReport {
  std::string check_name;
  nlohmann::json inputs;
  bool pass = false;
  double margin = 0.0;
  double tolerance = 0.0;
  nlohmann::json details;
  bool skipped = false;
};

nlohmann::json to_json(const VerificationReport& report);

/// Family members exercised by the suites and sweeps for dimension m and
/// weight parameter alpha. Holomorphic families are included for even m.
std::vector<TestFunction> default_families(int m, double alpha);

nlohmann::json to_json(const FockParams& params);

VerificationReport check_contraction(const TestFunction& f, double p, double q, double alpha,
                                     const Method& method = GaussHermite{});

VerificationReport check_monotone_g(const LevelProfile& profile);

VerificationReport check_pointwise_bound(const TestFunction& f, const FockParams& params,
                                         std::size_t n_points, std::uint64_t seed,
                                         const Method& method = GaussHermite{});

/// Coordinate axes in both orientations plus random_count seeded directions.
std::vector<Point> default_directions(int m, int random_count, std::uint64_t seed);

/// Uniform radii from 0 out past the radius where the p-free density has
/// fallen below 1e-8 of its maximum.
std::vector<double> default_radii(const TestFunction& f, double alpha, int count = 200);

VerificationReport check_decay(const TestFunction& f, double alpha,
                               const std::vector<Point>& directions,
                               const std::vector<double>& radii);

VerificationReport check_limit_norm(const TestFunction& f, double alpha,
                                    const std::vector<double>& p_ladder,
                                    double extrapolation_tol = 1e-3);

/// Extrapolates ||f||_{p,alpha} to p -> inf by fitting log-norm on the last
/// (up to four) ladder points in the basis {1, log(p)/p, 1/p, 1/p^2}.
double extrapolate_limit(const std::vector<double>& p_ladder, const std::vector<double>& norms);

VerificationReport check_extremal_convex(const TestFunction& f, const FockParams& params,
                                         const ConvexFunction& g,
                                         const Method& method = GaussHermite{});

namespace lemma {

/// g(t) = c t^{-beta}
struct PowerDecay {
  double beta;
};
/// g(t) = c e^{-beta t}
struct ExpDecay {
  double beta;
};
/// g(t) = c * (piecewise-linear interpolation of the table), constant
/// beyond both ends. t increasing, g nonincreasing and positive.
struct Tabulated {
  std::vector<double> t;
  std::vector<double> g;
};
using GSpec = std::variant<PowerDecay, ExpDecay, Tabulated>;

/// Phi(s) = s^gamma
struct PowerPhi {
  double gamma;
};
/// Phi(s) = prefactor * (scale * max(0, log s))^exponent
struct LogPowerPhi {
  double scale = 1.0;
  double exponent = 1.0;
  double prefactor = 1.0;
};
using PhiSpec = std::variant<PowerPhi, LogPowerPhi>;

/// Psi(t) = r t^{r-1}, the derivative of t^r
struct PowerPsi {
  double r;
};
using PsiSpec = PowerPsi;

std::string describe(const GSpec& g);
std::string describe(const PhiSpec& phi);

}  // namespace lemma

/// The free constant c of g is fixed by bisection so that
/// int_0^T Phi(g/t) dt = int_0^T Phi(1/t) dt before the weighted comparison.
VerificationReport check_rearrangement_lemma(const lemma::GSpec& g, const lemma::PhiSpec& phi,
                                             const lemma::PsiSpec& psi, double t_max);

/// Random instance drawn from the supported parametric families.
struct LemmaInstance {
  lemma::GSpec g;
  lemma::PhiSpec phi;
  lemma::PsiSpec psi;
  double t_max;
};
std::vector<LemmaInstance> random_lemma_instances(std::size_t count, std::uint64_t seed);

VerificationReport check_isoperimetric_variant(int m, const std::vector<double>& radii);

struct SuiteOptions {
  FockParams params;
  Method method = GaussHermite{};
  std::vector<double> p_list{0.5, 1.0, 2.0, 4.0};
  std::vector<double> p_ladder{2, 4, 8, 16, 32, 64};
  GridSpec grid;
  IsoperimetricVariant variant = IsoperimetricVariant::SharpBall;
  std::size_t samples = 200'000;
  std::uint64_t seed = 1;
  std::size_t lemma_draws = 100;
};

const std::vector<std::string>& suite_names();

/// Runs one named suite ("contraction", "monotone", "pointwise", "decay",
/// "limit", "extremal", "lemma", "isoperimetric" or "all"). Checks run
/// concurrently; the result is sorted by check name.
std::vector<VerificationReport> run_suite(std::string_view suite, const TestFunction& f,
                                          const SuiteOptions& options);

}  // namespace focklab
