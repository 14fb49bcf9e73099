#include "focklab/funcmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "focklab/error.hpp"
#include "focklab/format.hpp"

namespace focklab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return dot(a, a); }

void require_even(int m, const char* family) {
  if (m < 2 || m % 2 != 0) {
    throw Error(ErrorKind::InvalidInput,
                std::string(family) +
                    ": holomorphic family needs even dimension m = 2n, got m = " +
                    std::to_string(m));
  }
}

void require_dim(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "dimension must be >= 1");
}

void require_multi_index(const std::vector<int>& k, int m) {
  if (static_cast<int>(k.size()) != m / 2) {
    throw Error(ErrorKind::InvalidInput, "multi-index length must be m/2 = " +
                                             std::to_string(m / 2));
  }
  for (int kj : k) {
    if (kj < 0) throw Error(ErrorKind::InvalidInput, "negative multi-index entry");
  }
}

std::complex<double> ipow(std::complex<double> z, int k) {
  std::complex<double> r = 1.0;
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

std::string join_point(const Point& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += format_double(a[i]);
  }
  return s;
}

std::string join_index(const std::vector<int>& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(k[i]);
  }
  return s;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::NoEnvelope: return "no-envelope";
    case ErrorKind::DivergentNorm: return "divergent-norm";
    case ErrorKind::MethodUnavailable: return "method-unavailable";
    case ErrorKind::UnsupportedFunctional: return "unsupported-functional";
    case ErrorKind::OptimizationFailure: return "optimization-failure";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void FockParams::validate() const {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "m must be >= 1");
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidInput, "p must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidInput, "alpha must be > 0");
  }
}

TestFunction TestFunction::constant(int m, double c) {
  require_dim(m);
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::InvalidInput, "constant must be finite and >= 0");
  }
  return TestFunction(m, family::Constant{c});
}

TestFunction TestFunction::coherent(Point a, double alpha) {
  int m = static_cast<int>(a.size());
  require_dim(m);
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "coherent alpha must be > 0");
  return TestFunction(m, family::Coherent{std::move(a), alpha});
}

TestFunction TestFunction::monomial(int m, std::vector<int> k) {
  require_even(m, "monomial");
  require_multi_index(k, m);
  return TestFunction(m, family::Monomial{std::move(k)});
}

TestFunction TestFunction::polynomial(int m, std::vector<family::PolyTerm> terms) {
  require_even(m, "poly");
  if (terms.empty()) throw Error(ErrorKind::InvalidInput, "polynomial needs at least one term");
  for (const auto& t : terms) require_multi_index(t.k, m);
  return TestFunction(m, family::Polynomial{std::move(terms)});
}

TestFunction TestFunction::exp_quadratic(int m, double c) {
  require_dim(m);
  if (!(c >= 0.0)) throw Error(ErrorKind::InvalidInput, "expquad needs c >= 0");
  return TestFunction(m, family::ExpQuadratic{c});
}

TestFunction TestFunction::sum_of_coherent(int m, std::vector<family::CoherentAtom> atoms,
                                           double alpha) {
  require_dim(m);
  if (atoms.empty()) throw Error(ErrorKind::InvalidInput, "sumcoherent needs atoms");
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "sumcoherent alpha must be > 0");
  for (const auto& atom : atoms) {
    if (static_cast<int>(atom.a.size()) != m) {
      throw Error(ErrorKind::InvalidInput, "sumcoherent atom has wrong dimension");
    }
    if (!(atom.weight >= 0.0)) throw Error(ErrorKind::InvalidInput, "atom weight must be >= 0");
  }
  return TestFunction(m, family::SumOfCoherent{std::move(atoms), alpha});
}

TestFunction TestFunction::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorKind::InvalidInput, "scale factor must be finite and > 0");
  }
  TestFunction out = *this;
  out.scale_ *= factor;
  out.log_scale_ = std::log(out.scale_);
  return out;
}

double TestFunction::log_abs(std::span<const double> x) const {
  double v = std::visit(
      Overloaded{
          [](const family::Constant& f) { return f.c > 0.0 ? std::log(f.c) : kNegInf; },
          [&](const family::Coherent& f) {
            return f.alpha * dot(f.a, x) - 0.5 * f.alpha * norm2(f.a);
          },
          [&](const family::Monomial& f) {
            double s = 0.0;
            for (std::size_t j = 0; j < f.k.size(); ++j) {
              if (f.k[j] == 0) continue;
              double r = std::hypot(x[2 * j], x[2 * j + 1]);
              if (r == 0.0) return kNegInf;
              s += f.k[j] * std::log(r);
            }
            return s;
          },
          [&](const family::Polynomial& f) {
            std::complex<double> sum = 0.0;
            for (const auto& term : f.terms) {
              std::complex<double> v = term.coef;
              for (std::size_t j = 0; j < term.k.size(); ++j) {
                v *= ipow({x[2 * j], x[2 * j + 1]}, term.k[j]);
              }
              sum += v;
            }
            double a = std::abs(sum);
            return a > 0.0 ? std::log(a) : kNegInf;
          },
          [&](const family::ExpQuadratic& f) { return f.c * norm2(x); },
          [&](const family::SumOfCoherent& f) {
            // log-sum-exp over the atoms
            double mx = kNegInf;
            for (const auto& atom : f.atoms) {
              if (atom.weight <= 0.0) continue;
              double e = std::log(atom.weight) + f.alpha * dot(atom.a, x) -
                         0.5 * f.alpha * norm2(atom.a);
              mx = std::max(mx, e);
            }
            if (mx == kNegInf) return kNegInf;
            double s = 0.0;
            for (const auto& atom : f.atoms) {
              if (atom.weight <= 0.0) continue;
              double e = std::log(atom.weight) + f.alpha * dot(atom.a, x) -
                         0.5 * f.alpha * norm2(atom.a);
              s += std::exp(e - mx);
            }
            return mx + std::log(s);
          },
      },
      family_);
  return v + log_scale_;
}

RadialBound TestFunction::radial_bound() const {
  RadialBound b = std::visit(
      Overloaded{
          [](const family::Constant& f) {
            RadialBound r;
            if (f.c == 0.0) r.vanishes = true;
            else r.constant = std::log(f.c);
            return r;
          },
          [](const family::Coherent& f) {
            RadialBound r;
            double na = std::sqrt(norm2(f.a));
            r.lin = f.alpha * na;
            r.constant = -0.5 * f.alpha * na * na;
            return r;
          },
          [](const family::Monomial& f) {
            RadialBound r;
            r.log_coef = std::accumulate(f.k.begin(), f.k.end(), 0);
            return r;
          },
          [](const family::Polynomial& f) {
            // |sum c_k z^k| <= (sum |c_k|) r^deg for r >= 1
            RadialBound r;
            double total = 0.0;
            int deg = 0;
            for (const auto& t : f.terms) {
              total += std::abs(t.coef);
              deg = std::max(deg, std::accumulate(t.k.begin(), t.k.end(), 0));
            }
            if (total == 0.0) {
              r.vanishes = true;
              return r;
            }
            r.constant = std::log(total);
            r.log_coef = deg;
            r.r_min = 1.0;
            return r;
          },
          [](const family::ExpQuadratic& f) {
            RadialBound r;
            r.quad = f.c;
            return r;
          },
          [](const family::SumOfCoherent& f) {
            RadialBound r;
            double total = 0.0, amax = 0.0;
            for (const auto& atom : f.atoms) {
              total += atom.weight;
              amax = std::max(amax, std::sqrt(norm2(atom.a)));
            }
            if (total == 0.0) {
              r.vanishes = true;
              return r;
            }
            r.constant = std::log(total);
            r.lin = f.alpha * amax;
            return r;
          },
      },
      family_);
  b.constant += log_scale_;
  return b;
}

std::optional<Point> TestFunction::gaussian_center(const FockParams& params) const {
  if (std::holds_alternative<family::Constant>(family_)) return Point(m_, 0.0);
  if (const auto* c = std::get_if<family::Coherent>(&family_)) {
    Point center = c->a;
    for (double& v : center) v *= c->alpha / params.alpha;
    return center;
  }
  return std::nullopt;
}

bool TestFunction::is_extremal() const {
  // e^{beta <a,x>} = const * f_{beta a / alpha} for every weight parameter alpha
  if (const auto* c = std::get_if<family::Constant>(&family_)) return c->c > 0.0;
  if (std::holds_alternative<family::Coherent>(family_)) return true;
  if (const auto* s = std::get_if<family::SumOfCoherent>(&family_)) {
    return s->atoms.size() == 1 && s->atoms[0].weight > 0.0;
  }
  return false;
}

bool TestFunction::is_holomorphic() const {
  return std::holds_alternative<family::Monomial>(family_) ||
         std::holds_alternative<family::Polynomial>(family_);
}

std::string TestFunction::to_spec() const {
  std::string s = std::visit(
      Overloaded{
          [](const family::Constant& f) { return "const:" + format_double(f.c); },
          [](const family::Coherent& f) {
            return "coherent:a=" + join_point(f.a) + ";alpha=" + format_double(f.alpha);
          },
          [](const family::Monomial& f) { return "monomial:k=" + join_index(f.k); },
          [](const family::Polynomial& f) {
            std::string out = "poly:";
            for (std::size_t i = 0; i < f.terms.size(); ++i) {
              const auto& t = f.terms[i];
              if (i) out += '+';
              out += '(' + format_double(t.coef.real());
              out += t.coef.imag() < 0 || std::signbit(t.coef.imag()) ? "" : "+";
              out += format_double(t.coef.imag()) + "i)";
              for (std::size_t j = 0; j < t.k.size(); ++j) {
                if (t.k[j] == 0) continue;
                out += "*z" + std::to_string(j);
                if (t.k[j] != 1) out += '^' + std::to_string(t.k[j]);
              }
            }
            return out;
          },
          [](const family::ExpQuadratic& f) { return "expquad:c=" + format_double(f.c); },
          [](const family::SumOfCoherent& f) {
            std::string out = "sumcoherent:alpha=" + format_double(f.alpha) + ";atoms=";
            for (std::size_t i = 0; i < f.atoms.size(); ++i) {
              if (i) out += '|';
              out += format_double(f.atoms[i].weight) + '@' + join_point(f.atoms[i].a);
            }
            return out;
          },
      },
      family_);
  if (log_scale_ != 0.0) s += ";scale=" + format_double(scale_);
  return s;
}

double eval_log_abs(const TestFunction& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.dim()) {
    throw Error(ErrorKind::InvalidInput, "point has dimension " + std::to_string(x.size()) +
                                             ", function has m = " + std::to_string(f.dim()));
  }
  return f.log_abs(x);
}

DensityValue eval_density(const TestFunction& f, const FockParams& params,
                          std::span<const double> x) {
  params.validate();
  if (params.m != f.dim()) {
    throw Error(ErrorKind::InvalidInput, "params.m does not match function dimension");
  }
  double log_abs = eval_log_abs(f, x);
  double log_u = log_abs == kNegInf ? kNegInf : log_density_unchecked(f, params, x);
  return {log_u, log_u == kNegInf ? 0.0 : std::exp(log_u)};
}

double envelope_radius(const TestFunction& f, const FockParams& params, double t) {
  params.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "level t must be > 0");
  RadialBound b = f.radial_bound();
  if (b.vanishes) return 0.0;
  if (b.quad >= 0.5 * params.alpha) {
    throw Error(ErrorKind::NoEnvelope,
                "u does not decay: growth rate c >= alpha/2, function is not in the space");
  }
  // h(r) = p B(r) - alpha p r^2 / 2 - log t, concave on r > 0
  const double a = params.p * (b.quad - 0.5 * params.alpha);
  const double bl = params.p * b.lin;
  const double cl = params.p * b.log_coef;
  const double d = params.p * b.constant - std::log(t);
  auto h = [&](double r) {
    return a * r * r + bl * r + (cl > 0.0 ? cl * std::log(r) : 0.0) + d;
  };

  double root = 0.0;
  if (cl == 0.0) {
    double disc = bl * bl - 4.0 * a * d;
    if (disc < 0.0) return b.r_min;
    root = (-bl - std::sqrt(disc)) / (2.0 * a);
  } else {
    double r_peak = (-bl - std::sqrt(bl * bl - 8.0 * a * cl)) / (4.0 * a);
    if (h(r_peak) <= 0.0) return b.r_min;
    double lo = r_peak, hi = std::max(2.0 * r_peak, 1.0);
    while (h(hi) >= 0.0) {
      lo = hi;
      hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      (h(mid) >= 0.0 ? lo : hi) = mid;
    }
    root = hi;
  }
  return std::max({root, b.r_min, 0.0});
}

std::optional<SpotCheck> subharmonicity_spot_check(const TestFunction& f,
                                                   std::span<const double> x, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "step h must be > 0");
  const double center = eval_log_abs(f, x);
  if (center == kNegInf) return std::nullopt;
  Point y(x.begin(), x.end());
  double lap = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double xi = y[i];
    y[i] = xi + h;
    const double plus = f.log_abs(y);
    y[i] = xi - h;
    const double minus = f.log_abs(y);
    y[i] = xi;
    if (plus == kNegInf || minus == kNegInf) return std::nullopt;
    lap += (plus - 2.0 * center + minus) / (h * h);
  }
  const double tol = 10.0 * h * h + 1e-9;
  return SpotCheck{lap, tol, lap < -tol};
}

}  // namespace focklab
