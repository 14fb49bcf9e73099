#include "focklab/funcspec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "focklab/error.hpp"

namespace focklab {

namespace {

struct Field {
  std::string_view value;
  std::size_t pos;  // offset of value in the full text
};

// Reads a double at text[i..], advancing i. Leading '+' is accepted.
std::optional<double> read_number(std::string_view text, std::size_t& i) {
  std::size_t j = i;
  if (j < text.size() && text[j] == '+') ++j;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data() + j, text.data() + text.size(), v);
  if (ec != std::errc() || !std::isfinite(v)) return std::nullopt;
  i = static_cast<std::size_t>(ptr - text.data());
  return v;
}

double parse_real(const Field& f, const char* what) {
  std::size_t i = 0;
  auto v = read_number(f.value, i);
  if (!v || i != f.value.size()) {
    throw ParseError(f.pos + i, std::string("expected a number for ") + what);
  }
  return *v;
}

int parse_int(std::string_view s, std::size_t pos, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(pos, std::string("expected an integer for ") + what);
  }
  return v;
}

std::vector<double> parse_list(const Field& f, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = f.value.find(',', start);
    std::string_view item = f.value.substr(start, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - start);
    out.push_back(parse_real({item, f.pos + start}, what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_index_list(const Field& f) {
  std::vector<int> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = f.value.find(',', start);
    std::string_view item = f.value.substr(start, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - start);
    int k = parse_int(item, f.pos + start, "k");
    if (k < 0) throw ParseError(f.pos + start, "multi-index entries must be >= 0");
    out.push_back(k);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class Fields {
 public:
  Fields(std::string_view body, std::size_t offset, bool allow_positional) {
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t semi = body.find(';', start);
      std::size_t end = semi == std::string_view::npos ? body.size() : semi;
      std::string_view part = body.substr(start, end - start);
      std::size_t eq = part.find('=');
      if (eq == std::string_view::npos) {
        if (!(allow_positional && start == 0)) {
          throw ParseError(offset + start, "expected key=value");
        }
        positional_ = Field{part, offset + start};
      } else {
        std::string key(part.substr(0, eq));
        if (key.empty()) throw ParseError(offset + start, "empty key");
        if (fields_.count(key)) throw ParseError(offset + start, "duplicate key '" + key + "'");
        fields_[key] = Field{part.substr(eq + 1), offset + start + eq + 1};
        key_pos_[key] = offset + start;
      }
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
  }

  std::optional<Field> take(const std::string& key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) return std::nullopt;
    Field f = it->second;
    fields_.erase(it);
    return f;
  }

  Field require(const std::string& key, std::size_t family_pos) {
    auto f = take(key);
    if (!f) throw ParseError(family_pos, "missing key '" + key + "'");
    return *f;
  }

  std::optional<Field> positional() const { return positional_; }

  void finish() const {
    if (!fields_.empty()) {
      const auto& key = fields_.begin()->first;
      throw ParseError(key_pos_.at(key), "unknown key '" + key + "'");
    }
  }

 private:
  std::map<std::string, Field> fields_;
  std::map<std::string, std::size_t> key_pos_;
  std::optional<Field> positional_;
};

// Polynomial body grammar:
//   poly   := term (('+' | '-') term)*
//   term   := coef ('*' factor)* | factor ('*' factor)*
//   coef   := real | real 'i' | real ('+'|'-') real 'i' | '(' complex ')'
//   factor := 'z' int ('^' int)?
class PolyParser {
 public:
  PolyParser(std::string_view s, std::size_t offset, int n) : s_(s), off_(offset), n_(n) {}

  std::vector<family::PolyTerm> parse() {
    std::vector<family::PolyTerm> terms;
    double sign = 1.0;
    if (peek() == '-') {
      sign = -1.0;
      ++i_;
    } else if (peek() == '+') {
      ++i_;
    }
    while (true) {
      terms.push_back(term(sign));
      if (i_ == s_.size()) break;
      char c = s_[i_];
      if (c != '+' && c != '-') fail("expected '+' or '-' between terms");
      sign = c == '-' ? -1.0 : 1.0;
      ++i_;
    }
    return terms;
  }

 private:
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(off_ + i_, msg); }

  // Tries a complex literal "a+bi" / "a-bi" / "bi" / "a" at i_; on success
  // advances. The two-part form is only taken when it is followed by '*' or
  // the end of the term, so "1+z0" still splits into two terms.
  std::optional<std::complex<double>> bare_coef() {
    std::size_t save = i_;
    auto a = read_number(s_, i_);
    if (!a) {
      i_ = save;
      return std::nullopt;
    }
    if (peek() == 'i') {
      ++i_;
      return std::complex<double>(0.0, *a);
    }
    std::size_t after_real = i_;
    if (peek() == '+' || peek() == '-') {
      double sgn = peek() == '-' ? -1.0 : 1.0;
      ++i_;
      if (peek() != '+' && peek() != '-') {
        auto b = read_number(s_, i_);
        if (b && peek() == 'i') {
          ++i_;
          char next = peek();
          if (next == '*' || next == '\0') return std::complex<double>(*a, sgn * *b);
        }
      }
      i_ = after_real;  // backtrack: the sign starts the next term
    }
    return std::complex<double>(*a, 0.0);
  }

  std::complex<double> paren_coef() {
    ++i_;  // '('
    auto a = read_number(s_, i_);
    if (!a) fail("expected a number in coefficient");
    std::complex<double> v;
    if (peek() == 'i') {
      ++i_;
      v = {0.0, *a};
    } else if (peek() == '+' || peek() == '-') {
      double sgn = peek() == '-' ? -1.0 : 1.0;
      ++i_;
      auto b = read_number(s_, i_);
      if (!b) fail("expected imaginary part");
      if (peek() != 'i') fail("expected 'i'");
      ++i_;
      v = {*a, sgn * *b};
    } else {
      v = {*a, 0.0};
    }
    if (peek() != ')') fail("expected ')'");
    ++i_;
    return v;
  }

  void factor(std::vector<int>& k) {
    if (peek() != 'z') fail("expected 'z<index>'");
    ++i_;
    std::size_t start = i_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
    if (start == i_) fail("expected variable index after 'z'");
    int j = parse_int(s_.substr(start, i_ - start), off_ + start, "variable index");
    if (j >= n_) {
      throw ParseError(off_ + start, "variable z" + std::to_string(j) + " out of range for m = " +
                                         std::to_string(2 * n_));
    }
    int power = 1;
    if (peek() == '^') {
      ++i_;
      start = i_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
      if (start == i_) fail("expected exponent after '^'");
      power = parse_int(s_.substr(start, i_ - start), off_ + start, "exponent");
    }
    k[j] += power;
  }

  family::PolyTerm term(double sign) {
    family::PolyTerm t{std::vector<int>(n_, 0), {sign, 0.0}};
    if (peek() != 'z') {
      if (peek() == '(') {
        t.coef *= paren_coef();
      } else {
        auto c = bare_coef();
        if (!c) fail("expected a coefficient or 'z<index>'");
        t.coef *= *c;
      }
      if (peek() != '*') return t;
      ++i_;
    }
    factor(t.k);
    while (peek() == '*') {
      ++i_;
      factor(t.k);
    }
    return t;
  }

  std::string_view s_;
  std::size_t off_;
  int n_;
  std::size_t i_ = 0;
};

TestFunction apply_scale(TestFunction f, std::optional<Field> scale) {
  if (!scale) return f;
  double s = parse_real(*scale, "scale");
  if (!(s > 0.0)) throw ParseError(scale->pos, "scale must be > 0");
  return f.scaled(s);
}

std::vector<family::CoherentAtom> parse_atoms(const Field& f) {
  std::vector<family::CoherentAtom> atoms;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = f.value.find('|', start);
    std::size_t end = bar == std::string_view::npos ? f.value.size() : bar;
    std::string_view atom = f.value.substr(start, end - start);
    std::size_t at = atom.find('@');
    if (at == std::string_view::npos) throw ParseError(f.pos + start, "expected weight@point");
    double w = parse_real({atom.substr(0, at), f.pos + start}, "atom weight");
    auto a = parse_list({atom.substr(at + 1), f.pos + start + at + 1}, "atom point");
    atoms.push_back({w, std::move(a)});
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return atoms;
}

// Rewraps construction errors from the factories as parse errors at pos.
template <class Fn>
TestFunction build(std::size_t pos, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(pos, e.what());
  }
}

}  // namespace

TestFunction parse_function_spec(std::string_view text, int m, double default_alpha) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "dimension must be >= 1");
  std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError(0, "expected 'family:parameters'");
  std::string fam(text.substr(0, colon));
  std::string_view body = text.substr(colon + 1);
  const std::size_t off = colon + 1;

  auto require_even = [&] {
    if (m % 2 != 0) {
      throw ParseError(0, fam + ": holomorphic family needs even dimension m = 2n, got m = " +
                              std::to_string(m));
    }
  };
  auto check_arity = [&](std::size_t got, std::size_t want, std::size_t pos, const char* what) {
    if (got != want) {
      throw ParseError(pos, std::string(what) + " has " + std::to_string(got) +
                                " entries, expected " + std::to_string(want));
    }
  };

  if (fam == "poly") {
    require_even();
    std::optional<Field> scale;
    std::size_t semi = body.find(';');
    if (semi != std::string_view::npos) {
      Fields extra(body.substr(semi + 1), off + semi + 1, false);
      scale = extra.take("scale");
      extra.finish();
      body = body.substr(0, semi);
    }
    if (body.empty()) throw ParseError(off, "empty polynomial");
    auto terms = PolyParser(body, off, m / 2).parse();
    return apply_scale(build(0, [&] { return TestFunction::polynomial(m, std::move(terms)); }),
                       scale);
  }

  Fields fields(body, off, fam == "const");
  std::optional<TestFunction> f;
  if (fam == "const") {
    auto c = fields.take("c");
    auto pos = fields.positional();
    if (c && pos) throw ParseError(pos->pos, "constant given twice");
    if (!c && !pos) throw ParseError(off, "missing constant value");
    Field v = c ? *c : *pos;
    double cv = parse_real(v, "c");
    f = build(v.pos, [&] { return TestFunction::constant(m, cv); });
  } else if (fam == "coherent") {
    Field af = fields.require("a", 0);
    auto a = parse_list(af, "a");
    check_arity(a.size(), static_cast<std::size_t>(m), af.pos, "a");
    double alpha = default_alpha;
    if (auto al = fields.take("alpha")) alpha = parse_real(*al, "alpha");
    f = build(af.pos, [&] { return TestFunction::coherent(std::move(a), alpha); });
  } else if (fam == "monomial") {
    require_even();
    Field kf = fields.require("k", 0);
    auto k = parse_index_list(kf);
    check_arity(k.size(), static_cast<std::size_t>(m / 2), kf.pos, "k");
    f = build(kf.pos, [&] { return TestFunction::monomial(m, std::move(k)); });
  } else if (fam == "expquad") {
    Field cf = fields.require("c", 0);
    double c = parse_real(cf, "c");
    f = build(cf.pos, [&] { return TestFunction::exp_quadratic(m, c); });
  } else if (fam == "sumcoherent") {
    Field af = fields.require("atoms", 0);
    auto atoms = parse_atoms(af);
    for (const auto& atom : atoms) check_arity(atom.a.size(), static_cast<std::size_t>(m), af.pos, "atom point");
    double alpha = default_alpha;
    if (auto al = fields.take("alpha")) alpha = parse_real(*al, "alpha");
    f = build(af.pos, [&] { return TestFunction::sum_of_coherent(m, std::move(atoms), alpha); });
  } else {
    throw ParseError(0, "unknown family '" + fam + "'");
  }
  auto scale = fields.take("scale");
  fields.finish();
  return apply_scale(*f, scale);
}

}  // namespace focklab
