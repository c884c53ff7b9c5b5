#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace tkoszul {

inline constexpr int kMaxDim = 4;
inline constexpr int kNumVars = 2 * kMaxDim;

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownCoordinate : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotTPolynomial : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DiagonalPole : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutsideMultiplicativeSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Variables 0..3 are z^1..z^4, 4..7 are zeta^1..zeta^4 (0-based coordinate index).
constexpr int z_var(int i) { return i; }
constexpr int zeta_var(int i) { return kMaxDim + i; }
constexpr bool is_zeta_var(int v) { return v >= kMaxDim; }
constexpr int coordinate_of(int v) { return v % kMaxDim; }

inline std::string var_name(int v) {
  return (is_zeta_var(v) ? "zeta" : "z") + std::to_string(coordinate_of(v) + 1);
}

// "z2" -> 1, "zeta1" -> 4; checks the coordinate against dimension n.
inline int parse_var(const std::string& name, int n) {
  int base = 0;
  std::string digits;
  if (name.rfind("zeta", 0) == 0) {
    base = kMaxDim;
    digits = name.substr(4);
  } else if (name.rfind("z", 0) == 0) {
    digits = name.substr(1);
  } else {
    throw UnknownCoordinate("unknown coordinate '" + name + "'");
  }
  if (digits.empty() || digits.size() > 1 || !std::isdigit(static_cast<unsigned char>(digits[0])))
    throw UnknownCoordinate("unknown coordinate '" + name + "'");
  int i = digits[0] - '0';
  if (i < 1 || i > n || i > kMaxDim) throw UnknownCoordinate("unknown coordinate '" + name + "'");
  return base + i - 1;
}

using Monomial = std::array<std::uint8_t, kNumVars>;

inline int degree(const Monomial& m) {
  int d = 0;
  for (auto e : m) d += e;
  return d;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r{};
  for (int i = 0; i < kNumVars; ++i) {
    int e = a[i] + b[i];
    if (e > 255) throw std::overflow_error("monomial exponent overflow");
    r[i] = static_cast<std::uint8_t>(e);
  }
  return r;
}

inline Monomial unit_monomial(int v, int e = 1) {
  Monomial m{};
  m[v] = static_cast<std::uint8_t>(e);
  return m;
}

class Polynomial {
 public:
  using Terms = std::map<Monomial, Rat>;

  Polynomial() = default;
  Polynomial(const Rat& c) {
    if (c != 0) terms_[Monomial{}] = c;
  }
  Polynomial(long c) : Polynomial(Rat(c)) {}
  Polynomial(int c) : Polynomial(Rat(c)) {}

  static Polynomial variable(int v) { return term(unit_monomial(v), 1); }
  static Polynomial term(const Monomial& m, const Rat& c) {
    Polynomial p;
    p.add_term(m, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && tkoszul::degree(terms_.begin()->first) == 0); }
  Rat coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rat(0) : it->second;
  }
  Rat constant_term() const { return coefficient(Monomial{}); }
  int degree() const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, tkoszul::degree(m));
    return d;
  }
  int max_var() const {
    int v = -1;
    for (auto& [m, c] : terms_)
      for (int i = 0; i < kNumVars; ++i)
        if (m[i]) v = std::max(v, i);
    return v;
  }
  bool uses_z() const { return uses_block(false); }
  bool uses_zeta() const { return uses_block(true); }

  void add_term(const Monomial& m, const Rat& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(const Rat& s) {
    if (s == 0) {
      terms_.clear();
    } else {
      for (auto& [m, c] : terms_) c *= s;
    }
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rat(-1); }
  friend Polynomial operator*(Polynomial a, const Rat& s) { return a *= s; }
  friend Polynomial operator*(const Rat& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Polynomial& a, const Polynomial& b) { return a.terms_ < b.terms_; }

  Polynomial pow(int k) const {
    Polynomial r(1), base = *this;
    for (; k > 0; k >>= 1) {
      if (k & 1) r *= base;
      if (k > 1) base = base * base;
    }
    return r;
  }

  Polynomial partial(int v) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
      if (!m[v]) continue;
      Monomial d = m;
      --d[v];
      r.add_term(d, c * m[v]);
    }
    return r;
  }

  // Replaces variable v by images[v].
  Polynomial substitute(const std::array<Polynomial, kNumVars>& images) const {
    std::array<std::vector<Polynomial>, kNumVars> powers;
    Polynomial r;
    for (auto& [m, c] : terms_) {
      Polynomial t(c);
      for (int v = 0; v < kNumVars; ++v) {
        if (!m[v]) continue;
        auto& pv = powers[v];
        if (pv.empty()) pv.push_back(Polynomial(1));
        while (static_cast<int>(pv.size()) <= m[v]) pv.push_back(pv.back() * images[v]);
        t *= pv[m[v]];
      }
      r += t;
    }
    return r;
  }

 private:
  bool uses_block(bool zeta) const {
    for (auto& [m, c] : terms_)
      for (int i = 0; i < kMaxDim; ++i)
        if (m[(zeta ? kMaxDim : 0) + i]) return true;
    return false;
  }
  Terms terms_;
};

inline std::array<Polynomial, kNumVars> identity_images() {
  std::array<Polynomial, kNumVars> im;
  for (int v = 0; v < kNumVars; ++v) im[v] = Polynomial::variable(v);
  return im;
}

// Quotient N / L when L (linear, lead coefficient 1 in variable k) divides N exactly.
inline std::optional<Polynomial> divide_linear(const Polynomial& num, const Polynomial& form, int lead) {
  Polynomial rest = form - Polynomial::variable(lead);
  Polynomial rem = num, quot;
  while (true) {
    const std::pair<const Monomial, Rat>* pick = nullptr;
    for (auto it = rem.terms().rbegin(); it != rem.terms().rend(); ++it)
      if (it->first[lead]) {
        pick = &*it;
        break;
      }
    if (!pick) break;
    Monomial m = pick->first;
    --m[lead];
    Polynomial q = Polynomial::term(m, pick->second);
    quot += q;
    rem -= q * form;
  }
  if (!rem.is_zero()) return std::nullopt;
  return quot;
}

inline int lead_var(const Polynomial& linear) {
  for (int v = 0; v < kNumVars; ++v)
    if (linear.coefficient(unit_monomial(v)) != 0) return v;
  return -1;
}

// Splits a degree-1 polynomial as scale * form with form's lead coefficient 1.
inline std::pair<Rat, Polynomial> normalize_linear(const Polynomial& p) {
  if (p.degree() != 1) throw std::invalid_argument("not a linear form");
  Rat s = p.coefficient(unit_monomial(lead_var(p)));
  return {s, p * Rat(1 / s)};
}

class CoeffFunction {
 public:
  using Denominator = std::map<Polynomial, int>;

  // n = 0 marks a dimension-free constant (adopts the other operand's dimension).
  CoeffFunction() = default;
  CoeffFunction(int n, Polynomial num) : n_(n), num_(std::move(num)) { check_vars(); }
  CoeffFunction(int n, Polynomial num, Denominator den) : n_(n), num_(std::move(num)), den_(std::move(den)) {
    check_vars();
    canonicalize();
  }

  static CoeffFunction constant(int n, const Rat& c) { return CoeffFunction(n, Polynomial(c)); }
  static CoeffFunction variable(int n, const std::string& name) {
    return CoeffFunction(n, Polynomial::variable(parse_var(name, n)));
  }
  static CoeffFunction variable(int n, int v) { return CoeffFunction(n, Polynomial::variable(v)); }
  // 1 / form^mult, form any degree-1 polynomial.
  static CoeffFunction inverse_form(int n, const Polynomial& form, int mult = 1) {
    auto [s, f] = normalize_linear(form);
    return CoeffFunction(n, Polynomial(Rat(1 / pow_rat(s, mult))), Denominator{{f, mult}});
  }

  int dimension() const { return n_; }
  const Polynomial& numerator() const { return num_; }
  const Denominator& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }
  bool is_constant() const { return den_.empty() && num_.is_constant(); }
  bool uses_zeta() const {
    if (num_.uses_zeta()) return true;
    for (auto& [f, m] : den_)
      if (f.uses_zeta()) return true;
    return false;
  }
  bool uses_z() const {
    if (num_.uses_z()) return true;
    for (auto& [f, m] : den_)
      if (f.uses_z()) return true;
    return false;
  }

  friend bool operator==(const CoeffFunction& a, const CoeffFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  friend CoeffFunction operator+(const CoeffFunction& a, const CoeffFunction& b) {
    int n = join_dim(a, b);
    if (a.den_.empty() && b.den_.empty()) return CoeffFunction(n, a.num_ + b.num_, {});
    if (a.is_zero()) return b.with_dim(n);
    if (b.is_zero()) return a.with_dim(n);
    Denominator den = a.den_;
    for (auto& [f, m] : b.den_) den[f] = std::max(den[f], m);
    return CoeffFunction(n, a.num_ * lift(a.den_, den) + b.num_ * lift(b.den_, den), den);
  }
  friend CoeffFunction operator-(const CoeffFunction& a) {
    CoeffFunction r = a;
    r.num_ *= Rat(-1);
    return r;
  }
  friend CoeffFunction operator-(const CoeffFunction& a, const CoeffFunction& b) { return a + (-b); }
  friend CoeffFunction operator*(const CoeffFunction& a, const CoeffFunction& b) {
    int n = join_dim(a, b);
    if (a.den_.empty() && b.den_.empty()) return CoeffFunction(n, a.num_ * b.num_, {});
    Denominator den = a.den_;
    for (auto& [f, m] : b.den_) den[f] += m;
    return CoeffFunction(n, a.num_ * b.num_, den);
  }
  friend CoeffFunction operator*(const CoeffFunction& a, const Rat& s) {
    if (s == 0) return CoeffFunction(a.n_, Polynomial());
    CoeffFunction r = a;
    r.num_ *= s;
    return r;
  }
  friend CoeffFunction operator*(const Rat& s, const CoeffFunction& a) { return a * s; }
  CoeffFunction& operator+=(const CoeffFunction& o) { return *this = *this + o; }
  CoeffFunction& operator-=(const CoeffFunction& o) { return *this = *this - o; }
  CoeffFunction& operator*=(const CoeffFunction& o) { return *this = *this * o; }

  CoeffFunction partial(int v) const {
    if (v < 0 || v >= kNumVars || coordinate_of(v) >= n_) throw UnknownCoordinate("unknown coordinate " + std::to_string(v));
    if (den_.empty()) return CoeffFunction(n_, num_.partial(v), {});
    // d(N / prod L^m) = (N' prod L - N sum m L' prod_{other} L) / prod L^{m+1}
    Polynomial all(1);
    for (auto& [f, m] : den_) all *= f;
    Polynomial top = num_.partial(v) * all;
    for (auto& [f, m] : den_) {
      Rat c = f.coefficient(unit_monomial(v));
      if (c == 0) continue;
      Polynomial others(1);
      for (auto& [g, k] : den_)
        if (!(g == f)) others *= g;
      top -= num_ * others * Rat(c * m);
    }
    Denominator den = den_;
    for (auto& [f, m] : den) ++m;
    return CoeffFunction(n_, top, den);
  }
  CoeffFunction partial(const std::string& name) const { return partial(parse_var(name, n_)); }

  // Substitutes polynomials for variables; denominators must stay linear.
  CoeffFunction substitute(const std::array<Polynomial, kNumVars>& images) const {
    Polynomial num = num_.substitute(images);
    Denominator den;
    for (auto& [f, m] : den_) {
      Polynomial g = f.substitute(images);
      if (g.is_zero()) throw DiagonalPole("denominator vanishes under substitution");
      if (g.degree() == 0) {
        num *= Rat(1 / pow_rat(g.constant_term(), m));
        continue;
      }
      if (g.degree() != 1) throw std::domain_error("substitution makes a denominator nonlinear");
      auto [s, h] = normalize_linear(g);
      num *= Rat(1 / pow_rat(s, m));
      den[h] += m;
    }
    return CoeffFunction(n_, num, den);
  }

  // f(z, z)
  CoeffFunction restrict_diagonal() const {
    auto im = identity_images();
    for (int i = 0; i < kMaxDim; ++i) im[zeta_var(i)] = Polynomial::variable(z_var(i));
    return substitute_or_pole(im);
  }
  // f(zeta, zeta)
  CoeffFunction zeta_pullback() const {
    auto im = identity_images();
    for (int i = 0; i < kMaxDim; ++i) im[z_var(i)] = Polynomial::variable(zeta_var(i));
    return substitute_or_pole(im);
  }

  CoeffFunction with_dim(int n) const {
    CoeffFunction r = *this;
    r.n_ = n;
    return r;
  }

  std::string to_string() const;

 private:
  static Rat pow_rat(const Rat& s, int k) {
    Rat r = 1;
    for (int i = 0; i < k; ++i) r *= s;
    return r;
  }
  static int join_dim(const CoeffFunction& a, const CoeffFunction& b) {
    if (a.n_ == 0) return b.n_;
    if (b.n_ == 0 || a.n_ == b.n_) return a.n_;
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a.n_) + " vs " + std::to_string(b.n_));
  }
  static Polynomial lift(const Denominator& from, const Denominator& to) {
    Polynomial r(1);
    for (auto& [f, m] : to) {
      auto it = from.find(f);
      int have = it == from.end() ? 0 : it->second;
      if (m > have) r *= f.pow(m - have);
    }
    return r;
  }
  CoeffFunction substitute_or_pole(const std::array<Polynomial, kNumVars>& im) const {
    for (auto& [f, m] : den_)
      if (f.substitute(im).is_zero()) throw DiagonalPole("denominator (" + poly_text(f) + ") vanishes on the diagonal");
    return substitute(im);
  }
  void check_vars() const {
    int v = num_.max_var();
    for (auto& [f, m] : den_) v = std::max(v, f.max_var());
    if (v < 0) return;
    int lim = std::max(n_, 0);
    auto bad = [&](const Polynomial& p) {
      for (auto& [mono, c] : p.terms())
        for (int i = 0; i < kNumVars; ++i)
          if (mono[i] && coordinate_of(i) >= lim) return true;
      return false;
    };
    if (bad(num_)) throw UnknownCoordinate("coordinate beyond dimension " + std::to_string(n_));
    for (auto& [f, m] : den_)
      if (bad(f)) throw UnknownCoordinate("coordinate beyond dimension " + std::to_string(n_));
  }
  void canonicalize() {
    if (num_.is_zero()) {
      den_.clear();
      return;
    }
    for (auto it = den_.begin(); it != den_.end();) {
      if (it->second < 0) throw std::invalid_argument("negative denominator multiplicity");
      int lead = lead_var(it->first);
      while (it->second > 0) {
        auto q = divide_linear(num_, it->first, lead);
        if (!q) break;
        num_ = std::move(*q);
        --it->second;
      }
      it = it->second == 0 ? den_.erase(it) : std::next(it);
    }
  }
  static std::string poly_text(const Polynomial& p);
  friend std::string poly_to_string(const Polynomial& p);

  int n_ = 0;
  Polynomial num_;
  Denominator den_;
};

inline std::string poly_to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const Monomial& m = it->first;
    Rat c = it->second;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (int v = 0; v < kNumVars; ++v) {
      if (!m[v]) continue;
      if (!mono.empty()) mono += "*";
      mono += var_name(v);
      if (m[v] > 1) mono += "^" + std::to_string(m[v]);
    }
    if (mono.empty()) {
      out += to_string(c);
    } else {
      if (c != 1) out += to_string(c) + "*";
      out += mono;
    }
  }
  return out;
}

inline std::string CoeffFunction::poly_text(const Polynomial& p) { return poly_to_string(p); }

inline std::string CoeffFunction::to_string() const {
  std::string top = poly_to_string(num_);
  if (den_.empty()) return top;
  if (num_.terms().size() > 1) top = "(" + top + ")";
  std::string bottom;
  for (auto& [f, m] : den_) {
    if (!bottom.empty()) bottom += "*";
    bottom += "(" + poly_to_string(f) + ")";
    if (m > 1) bottom += "^" + std::to_string(m);
  }
  if (den_.size() > 1) bottom = "(" + bottom + ")";
  return top + "/" + bottom;
}

struct TPolynomial {
  std::vector<CoeffFunction> coeffs;

  void trim() {
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
  }
  CoeffFunction evaluate(const Rat& t) const {
    CoeffFunction r, tk = CoeffFunction::constant(0, 1);
    for (auto& c : coeffs) {
      r += c * tk;
      tk = tk * t;
    }
    return r;
  }
  friend bool operator==(const TPolynomial& a, const TPolynomial& b) { return a.coeffs == b.coeffs; }
};

namespace detail {

// Integer-free t-polynomial with polynomial coefficients.
using TPoly = std::vector<Polynomial>;

inline TPoly tpoly_mul(const TPoly& a, const TPoly& b) {
  if (a.empty() || b.empty()) return {};
  TPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// t-expansion of a polynomial under z^i -> zeta^i + t (z^i - zeta^i).
inline TPoly segment_expand(const Polynomial& p) {
  std::array<std::vector<TPoly>, kMaxDim> powers;
  TPoly out;
  for (auto& [m, c] : p.terms()) {
    Monomial zeta_part = m;
    for (int i = 0; i < kMaxDim; ++i) zeta_part[z_var(i)] = 0;
    TPoly t{Polynomial::term(zeta_part, c)};
    for (int i = 0; i < kMaxDim; ++i) {
      int e = m[z_var(i)];
      if (!e) continue;
      auto& pw = powers[i];
      if (pw.empty()) {
        pw.push_back(TPoly{Polynomial(1)});
        pw.push_back(TPoly{Polynomial::variable(zeta_var(i)),
                           Polynomial::variable(z_var(i)) - Polynomial::variable(zeta_var(i))});
      }
      while (static_cast<int>(pw.size()) <= e) pw.push_back(tpoly_mul(pw.back(), pw[1]));
      t = tpoly_mul(t, pw[e]);
    }
    if (out.size() < t.size()) out.resize(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) out[k] += t[k];
  }
  while (!out.empty() && out.back().is_zero()) out.pop_back();
  return out;
}

// int_0^1 t^k p(seg) dt on the polynomial level.
inline Polynomial segment_integral(const Polynomial& p, int k) {
  TPoly t = segment_expand(p);
  Polynomial r;
  for (std::size_t m = 0; m < t.size(); ++m) r += t[m] * frac(1, static_cast<long>(k + m + 1));
  return r;
}

inline void require_t_free(const CoeffFunction& f) {
  for (auto& [form, m] : f.denominator())
    if (form.uses_z())
      throw NotTPolynomial("segment substitution makes the denominator (" + poly_to_string(form) + ") depend on t");
}

}  // namespace detail

inline TPolynomial segment_substitute(const CoeffFunction& f) {
  detail::require_t_free(f);
  TPolynomial out;
  for (auto& c : detail::segment_expand(f.numerator()))
    out.coeffs.emplace_back(f.dimension(), c, f.denominator());
  out.trim();
  return out;
}

inline CoeffFunction integrate_weighted(const TPolynomial& p, int k) {
  CoeffFunction r;
  for (std::size_t m = 0; m < p.coeffs.size(); ++m) r += p.coeffs[m] * frac(1, static_cast<long>(k + m + 1));
  return r;
}

// int_0^1 t^k f(zeta + t(z - zeta), zeta) dt
inline CoeffFunction segment_integral(const CoeffFunction& f, int k) {
  detail::require_t_free(f);
  return CoeffFunction(f.dimension(), detail::segment_integral(f.numerator(), k), f.denominator());
}

inline CoeffFunction restrict_diagonal(const CoeffFunction& f) { return f.restrict_diagonal(); }
inline CoeffFunction partial(const CoeffFunction& f, const std::string& var) { return f.partial(var); }

enum class ArithKind { add, mul, neg };

// Coefficient ring of a chart: dimension plus the declared multiplicative set of linear forms.
class CoeffRing {
 public:
  CoeffRing() = default;
  explicit CoeffRing(int n, std::vector<Polynomial> forms = {}, bool open = false) : n_(n), open_(open) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("dimension must be in 1.." + std::to_string(kMaxDim));
    for (auto& f : forms) forms_.push_back(normalize_linear(f).second);
  }
  // Ring accepting any linear denominator.
  static CoeffRing any(int n) { return CoeffRing(n, {}, true); }

  int dimension() const { return n_; }
  const std::vector<Polynomial>& forms() const { return forms_; }
  bool allows(const Polynomial& form) const {
    if (open_) return true;
    for (auto& f : forms_)
      if (f == form) return true;
    return false;
  }
  void check(const CoeffFunction& f) const {
    if (f.dimension() != 0 && f.dimension() != n_) throw DimensionMismatch("dimension mismatch");
    for (auto& [form, m] : f.denominator())
      if (!allows(form))
        throw OutsideMultiplicativeSet("denominator outside declared multiplicative set: " + poly_to_string(form));
  }
  CoeffFunction arith(const CoeffFunction& a, const CoeffFunction& b, ArithKind kind) const {
    check(a);
    check(b);
    switch (kind) {
      case ArithKind::add: return a + b;
      case ArithKind::mul: return a * b;
      case ArithKind::neg: return -a;
    }
    return a;
  }
  CoeffFunction parse(const std::string& text) const;

 private:
  int n_ = 1;
  bool open_ = false;
  std::vector<Polynomial> forms_;
};

namespace detail {

class CoeffParser {
 public:
  CoeffParser(const std::string& s, const CoeffRing& ring) : s_(s), ring_(ring) {}

  CoeffFunction run() {
    CoeffFunction r = expr().f;
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  // A parsed value, with a known factorization scale * prod forms^m into linear forms when available.
  struct Val {
    CoeffFunction f;
    bool factored = false;
    Rat scale = 1;
    CoeffFunction::Denominator forms;
  };

  Val plain(CoeffFunction f) { return Val{std::move(f)}; }
  Val of_poly(const Polynomial& p) {
    Val v{CoeffFunction(ring_.dimension(), p)};
    if (p.is_constant()) {
      v.factored = true;
      v.scale = p.constant_term();
    } else if (p.degree() == 1) {
      auto [s, f] = normalize_linear(p);
      v.factored = true;
      v.scale = s;
      v.forms[f] = 1;
    }
    return v;
  }
  Val times(const Val& a, const Val& b) {
    Val r{a.f * b.f};
    if (a.factored && b.factored && !r.f.is_zero()) {
      r.factored = true;
      r.scale = a.scale * b.scale;
      r.forms = a.forms;
      for (auto& [f, m] : b.forms) r.forms[f] += m;
    }
    return r;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("cannot parse '" + s_ + "' at " + std::to_string(pos_) + ": " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Val expr() {
    Val r = term();
    while (true) {
      if (eat('+')) r = sum(r, term(), 1);
      else if (eat('-')) r = sum(r, term(), -1);
      else return r;
    }
  }
  Val sum(const Val& a, const Val& b, int sign) {
    CoeffFunction f = sign > 0 ? a.f + b.f : a.f - b.f;
    if (f.is_polynomial()) return of_poly(f.numerator());
    return plain(f);
  }
  Val term() {
    Val r = unary();
    while (true) {
      if (eat('*')) r = times(r, unary());
      else if (eat('/')) r = divide(r, unary());
      else return r;
    }
  }
  Val unary() {
    if (eat('-')) {
      Val v = unary();
      v.f = -v.f;
      v.scale = -v.scale;
      return v;
    }
    if (eat('+')) return unary();
    return power();
  }
  Val power() {
    Val base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer");
      int e = std::stoi(s_.substr(start, pos_ - start));
      Val r = of_poly(Polynomial(1));
      for (int i = 0; i < e; ++i) r = times(r, base);
      return r;
    }
    return base;
  }
  Val atom() {
    skip();
    if (eat('(')) {
      Val r = expr();
      if (!eat(')')) fail("missing ')'");
      return r;
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return of_poly(Polynomial(Rat(mpz_class(s_.substr(start, pos_ - start)))));
    }
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return of_poly(Polynomial::variable(parse_var(s_.substr(start, pos_ - start), ring_.dimension())));
    }
    fail("expected a number, coordinate or '('");
  }
  Val divide(const Val& a, const Val& b) {
    if (b.f.is_zero()) fail("division by zero");
    if (b.f.is_constant()) {
      Val r = a;
      Rat s = 1 / b.f.numerator().constant_term();
      r.f = r.f * s;
      r.scale *= s;
      return r;
    }
    Rat scale = 1;
    CoeffFunction::Denominator den;
    if (b.factored) {
      scale = b.scale;
      den = b.forms;
    } else {
      if (!b.f.is_polynomial()) fail("cannot invert a quotient");
      Polynomial rest = b.f.numerator();
      for (auto& f : ring_.forms()) {
        int lead = lead_var(f);
        while (auto q = divide_linear(rest, f, lead)) {
          rest = *q;
          ++den[f];
        }
      }
      if (!rest.is_constant())
        throw OutsideMultiplicativeSet("denominator outside declared multiplicative set: " + b.f.to_string());
      scale = rest.constant_term();
    }
    for (auto& [f, m] : den)
      if (!ring_.allows(f))
        throw OutsideMultiplicativeSet("denominator outside declared multiplicative set: " + poly_to_string(f));
    return plain(a.f * CoeffFunction(ring_.dimension(), Polynomial(Rat(1 / scale)), den));
  }

  const std::string& s_;
  const CoeffRing& ring_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline CoeffFunction CoeffRing::parse(const std::string& text) const {
  CoeffFunction r = detail::CoeffParser(text, *this).run();
  return r.with_dim(n_);
}

// Parses with any linear form admissible as a denominator.
inline CoeffFunction parse_coeff(const std::string& text, int n) { return CoeffRing::any(n).parse(text); }

}  // namespace tkoszul
