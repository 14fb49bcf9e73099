#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace focklab {

using Point = std::vector<double>;

/// Dimension m, exponent p and weight parameter alpha of the weight
/// e^{-alpha p |x|^2 / 2} on R^m.
struct FockParams {
  int m = 2;
  double p = 2.0;
  double alpha = 1.0;

  void validate() const;
  double rate() const { return alpha * p; }

  bool operator==(const FockParams&) const = default;
};

struct DensityValue {
  double log_u;
  double u;
};

namespace family {

struct Constant {
  double c;
};

/// |f(x)| = e^{alpha <a,x> - alpha |a|^2 / 2}.
struct Coherent {
  Point a;
  double alpha;
};

/// prod_j z_j^{k_j} with z_j = x_{2j} + i x_{2j+1}.
struct Monomial {
  std::vector<int> k;
};

struct PolyTerm {
  std::vector<int> k;
  std::complex<double> coef;
};

struct Polynomial {
  std::vector<PolyTerm> terms;
};

/// |f(x)| = e^{c |x|^2}.
struct ExpQuadratic {
  double c;
};

struct CoherentAtom {
  double weight;
  Point a;
};

struct SumOfCoherent {
  std::vector<CoherentAtom> atoms;
  double alpha;
};

}  // namespace family

using Family = std::variant<family::Constant, family::Coherent, family::Monomial,
                            family::Polynomial, family::ExpQuadratic,
                            family::SumOfCoherent>;

/// Upper bound log|f(x)| <= quad r^2 + lin r + log_coef log r + constant,
/// valid for |x| = r >= r_min. Every family provides one.
struct RadialBound {
  double quad = 0.0;
  double lin = 0.0;
  double log_coef = 0.0;
  double constant = 0.0;
  double r_min = 0.0;
  bool vanishes = false;  // f == 0 identically
};

/// A member of one of the closed-form families whose modulus is
/// log-subharmonic on R^m. Immutable once constructed.
class TestFunction {
 public:
  static TestFunction constant(int m, double c);
  static TestFunction coherent(Point a, double alpha);
  static TestFunction monomial(int m, std::vector<int> k);
  static TestFunction polynomial(int m, std::vector<family::PolyTerm> terms);
  static TestFunction exp_quadratic(int m, double c);
  static TestFunction sum_of_coherent(int m, std::vector<family::CoherentAtom> atoms,
                                      double alpha);

  int dim() const { return m_; }
  const Family& family() const { return family_; }
  double log_scale() const { return log_scale_; }
  double scale() const { return scale_; }

  /// Returns factor * f. factor must be positive.
  TestFunction scaled(double factor) const;

  double log_abs(std::span<const double> x) const;
  RadialBound radial_bound() const;

  /// Center of the Gaussian that u is proportional to, for families where
  /// u is itself a Gaussian bump (Constant, Coherent).
  std::optional<Point> gaussian_center(const FockParams& params) const;

  /// True when f is a positive multiple of an extremizer f_a. The set does
  /// not depend on alpha: e^{beta <a,x>} is a multiple of f_{beta a / alpha}.
  bool is_extremal() const;

  bool is_holomorphic() const;

  /// Spec string in the CLI grammar; parse_function_spec inverts it.
  std::string to_spec() const;

 private:
  TestFunction(int m, Family family) : m_(m), family_(std::move(family)) {}

  int m_;
  Family family_;
  double scale_ = 1.0;
  double log_scale_ = 0.0;
};

double eval_log_abs(const TestFunction& f, std::span<const double> x);
DensityValue eval_density(const TestFunction& f, const FockParams& params,
                          std::span<const double> x);

/// log u(x) without dimension checks; the hot path for integrators.
inline double log_density_unchecked(const TestFunction& f, const FockParams& params,
                                    std::span<const double> x) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return params.p * f.log_abs(x) - 0.5 * params.rate() * r2;
}

/// Radius R with u(x) < t whenever |x| > R. Zero when the bound shows the
/// superlevel set is empty.
double envelope_radius(const TestFunction& f, const FockParams& params, double t);

struct SpotCheck {
  double laplacian;
  double tolerance;
  bool violation;
};

/// Centered finite-difference Laplacian of log|f| at x. Returns nullopt when
/// a stencil point hits a zero of f.
std::optional<SpotCheck> subharmonicity_spot_check(const TestFunction& f,
                                                   std::span<const double> x,
                                                   double h);

}  // namespace focklab
