#pragma once

#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "atlas.hpp"
#include "homotopy.hpp"
#include "random.hpp"
#include "twist.hpp"

namespace tkoszul {

struct DegreeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using BarWord = std::vector<Monomial>;

// Element of B^{-q}: sums of (q+2)-tuples of monomials in z1..zn, expanded multilinearly.
struct BarTensor {
  int n = 1;
  int q = 0;
  int chart = -1;
  std::map<BarWord, Rat> terms;

  BarTensor() = default;
  BarTensor(int n_, int q_, int chart_ = -1) : n(n_), q(q_), chart(chart_) {
    if (q < 0) throw std::invalid_argument("bar degree must be non-negative");
  }

  static BarTensor pure(int n, const std::vector<Polynomial>& entries, int chart = -1) {
    if (entries.size() < 2) throw std::invalid_argument("bar tensor needs at least two entries");
    BarTensor b(n, static_cast<int>(entries.size()) - 2, chart);
    for (auto& e : entries)
      for (auto& [m, c] : e.terms())
        for (int v = n; v < kNumVars; ++v)
          if (m[v]) throw std::invalid_argument("bar entries must be polynomials in z1..z" + std::to_string(n));
    BarWord w(entries.size());
    std::function<void(std::size_t, Rat)> rec = [&](std::size_t i, Rat c) {
      if (i == entries.size()) {
        b.add(w, c);
        return;
      }
      for (auto& [m, k] : entries[i].terms()) {
        w[i] = m;
        rec(i + 1, c * k);
      }
    };
    rec(0, Rat(1));
    return b;
  }
  static BarTensor unit(int n, int chart = -1) { return pure(n, {Polynomial(1), Polynomial(1)}, chart); }

  bool is_zero() const { return terms.empty(); }
  void add(const BarWord& w, const Rat& c) {
    if (c == 0) return;
    auto [it, fresh] = terms.try_emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
  BarTensor like() const { return BarTensor(n, q, chart); }

  BarTensor& operator+=(const BarTensor& o) {
    check(o);
    for (auto& [w, c] : o.terms) add(w, c);
    return *this;
  }
  BarTensor& operator-=(const BarTensor& o) {
    check(o);
    for (auto& [w, c] : o.terms) add(w, -c);
    return *this;
  }
  friend BarTensor operator+(BarTensor a, const BarTensor& b) { return a += b; }
  friend BarTensor operator-(BarTensor a, const BarTensor& b) { return a -= b; }
  friend BarTensor operator-(const BarTensor& a) { return Rat(-1) * a; }
  friend BarTensor operator*(const Rat& k, const BarTensor& a) {
    BarTensor r = a.like();
    for (auto& [w, c] : a.terms) r.add(w, k * c);
    return r;
  }
  friend bool operator==(const BarTensor& a, const BarTensor& b) { return a.q == b.q && a.terms == b.terms; }

  // Outer entries merged into the first slot, last slot 1.
  BarTensor on_diagonal() const {
    BarTensor r = like();
    for (auto& [w, c] : terms) {
      BarWord v = w;
      v.front() = mono_mul(w.front(), w.back());
      v.back() = Monomial{};
      r.add(v, c);
    }
    return r;
  }

  void check(const BarTensor& o) const {
    if (o.q != q) throw DegreeMismatch("bar degree mismatch");
    if (chart >= 0 && o.chart >= 0 && o.chart != chart) throw ChartMismatch("bar chart mismatch");
  }
};

inline std::string to_string(const BarTensor& b) {
  if (b.terms.empty()) return "0";
  std::string s;
  for (auto& [w, c] : b.terms) {
    if (!s.empty()) s += " + ";
    if (c != 1) s += to_string(c) + "*";
    s += "[";
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += " | ";
      s += poly_to_string(Polynomial::term(w[i], 1));
    }
    s += "]";
  }
  return s;
}

// sum_i (-1)^i f0 (x) .. (x) f_i f_{i+1} (x) ..
inline BarTensor bar_diff(const BarTensor& b) {
  if (b.q < 1) throw DegreeMismatch("bar differential needs degree >= 1");
  BarTensor r(b.n, b.q - 1, b.chart);
  for (auto& [w, c] : b.terms)
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      BarWord v;
      v.reserve(w.size() - 1);
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (k == i) v.push_back(mono_mul(w[i], w[i + 1]));
        else if (k != i + 1) v.push_back(w[k]);
      }
      r.add(v, i % 2 ? -c : c);
    }
  return r;
}

namespace detail {

inline Monomial to_zeta(const Monomial& m) {
  Monomial r{};
  for (int i = 0; i < kMaxDim; ++i) r[zeta_var(i)] = m[z_var(i)];
  return r;
}

inline Rat factorial(int q) {
  Rat f(1);
  for (int i = 2; i <= q; ++i) f *= i;
  return f;
}

}  // namespace detail

// Comparison map B -> K on a diagonal chart, memoized on the inner word.
class PhiEngine {
 public:
  explicit PhiEngine(int n) : n_(n) {}

  KoszulElement operator()(const BarTensor& b) {
    KoszulElement r(b.chart);
    if (b.q > n_) return r;
    for (auto& [w, c] : b.terms) {
      const KoszulElement& in = inner(BarWord(w.begin() + 1, w.end() - 1));
      if (in.is_zero()) continue;
      Polynomial outer = Polynomial::term(mono_mul(w.front(), detail::to_zeta(w.back())), c);
      CoeffFunction k(n_, outer);
      for (auto& [m, f] : in.terms) r.add(m, k * f);
    }
    return r;
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  // P Phi(d(1 (x) w (x) 1)) for the inner word w
  const KoszulElement& inner(const BarWord& w) {
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;
    KoszulElement r;
    if (w.empty()) {
      r.add(0, CoeffFunction::constant(n_, 1));
    } else if (static_cast<int>(w.size()) <= n_) {
      BarWord full;
      full.reserve(w.size() + 2);
      full.push_back(Monomial{});
      full.insert(full.end(), w.begin(), w.end());
      full.push_back(Monomial{});
      BarTensor b(n_, static_cast<int>(w.size()));
      b.add(full, Rat(1));
      r = homotopy((*this)(bar_diff(b)), ChartKind::diagonal, n_);
      r.chart = -1;
    }
    return memo_.emplace(w, std::move(r)).first->second;
  }

  int n_;
  std::map<BarWord, KoszulElement> memo_;
};

inline PhiEngine& phi_engine(int n) {
  static thread_local std::map<int, PhiEngine> engines;
  return engines.try_emplace(n, n).first->second;
}

inline KoszulElement phi(const BarTensor& b) { return phi_engine(b.n)(b); }

// Restriction of phi to the diagonal, as a form.
inline Form phi_tilde(const BarTensor& b) {
  Form r = restrict_diagonal(phi(b));
  r.chart = b.chart;
  return r;
}

// (1/q!) f0 f_{q+1} df_1 ^ .. ^ df_q
inline Form phi_tilde_closed(const BarTensor& b) {
  Form r(b.chart);
  Rat inv = 1 / detail::factorial(b.q);
  for (auto& [w, c] : b.terms) {
    Form acc = Form::basis(0, CoeffFunction(b.n, Polynomial::term(mono_mul(w.front(), w.back()), c * inv)));
    for (int l = 1; l <= b.q; ++l) {
      Polynomial f = Polynomial::term(w[l], 1);
      Form df;
      for (int j = 0; j < b.n; ++j) df.add(bit(j + 1), CoeffFunction(b.n, f.partial(z_var(j))));
      acc = wedge(acc, df);
    }
    for (auto& [m, k] : acc.terms) r.add(m, k);
  }
  return r;
}

// x # y: signed sum over shuffles of the inner entries, outer entries multiplied into the first slot.
inline BarTensor shuffle(const BarTensor& x, const BarTensor& y) {
  if (x.chart >= 0 && y.chart >= 0 && x.chart != y.chart) throw ChartMismatch("shuffle needs tensors on one chart");
  if (x.n != y.n) throw DimensionMismatch("shuffle dimension mismatch");
  int p = x.q, q = y.q;
  BarTensor r(x.n, p + q, x.chart >= 0 ? x.chart : y.chart);
  std::vector<int> pick(p + q, 0);
  std::fill(pick.begin() + q, pick.end(), 1);  // 1 marks a slot taken from x
  do {
    int inversions = 0, seen_y = 0;
    for (int s : pick) {
      if (s) inversions += seen_y;
      else ++seen_y;
    }
    for (auto& [a, ca] : x.terms)
      for (auto& [b, cb] : y.terms) {
        BarWord w;
        w.reserve(p + q + 2);
        w.push_back(mono_mul(mono_mul(a.front(), a.back()), mono_mul(b.front(), b.back())));
        int ix = 1, iy = 1;
        for (int s : pick) w.push_back(s ? a[ix++] : b[iy++]);
        w.push_back(Monomial{});
        Rat c = ca * cb;
        r.add(w, inversions % 2 ? -c : c);
      }
  } while (std::next_permutation(pick.begin(), pick.end()));
  return r;
}

// HKR(v)(b) = sum_J v_J (1/q!) f0 f_{q+1} det(d_{j_k} f_l), restricted to the diagonal.
inline CoeffFunction hkr(const PolyvectorField& v, const BarTensor& b) {
  for (auto& [m, c] : v.terms)
    if (grade(m) != b.q) throw DegreeMismatch("polyvector degree " + std::to_string(grade(m)) + " vs bar degree " + std::to_string(b.q));
  CoeffFunction r = CoeffFunction::constant(b.n, 0);
  Rat inv = 1 / detail::factorial(b.q);
  MultiIndex cols(b.q);
  std::iota(cols.begin(), cols.end(), 1);
  for (auto& [w, c] : b.terms) {
    std::vector<std::vector<Polynomial>> jac(b.n, std::vector<Polynomial>(std::max(b.q, 1)));
    for (int j = 0; j < b.n; ++j)
      for (int l = 0; l < b.q; ++l) jac[j][l] = Polynomial::term(w[l + 1], 1).partial(z_var(j));
    Polynomial outer = Polynomial::term(mono_mul(w.front(), w.back()), c * inv);
    for (auto& [m, vc] : v.terms) {
      Polynomial d = minor_det(jac, indices(m), cols);
      if (!d.is_zero()) r += vc.restrict_diagonal() * CoeffFunction(b.n, outer * d);
    }
  }
  return r;
}

// Psi(f)(b) = K^0 part of f(Phi(b)), restricted to the diagonal.
inline CoeffFunction psi(const HomElement& f, const BarTensor& b) {
  KoszulElement x = phi(b);
  KoszulElement y(f.target);
  for (auto& [k, c] : f.terms) {
    if (k.first != 0) continue;
    auto it = x.terms.find(k.second);
    if (it != x.terms.end()) y.add(0, c * it->second);
  }
  CoeffFunction r = y.coeff(0);
  return r.is_zero() ? CoeffFunction::constant(b.n, 0) : r.restrict_diagonal();
}

// Hochschild cochain with values in functions on the diagonal, evaluated extensionally.
struct HochschildCochain {
  enum class Kind { polyvector, pullback, coboundary, cup };
  Kind kind = Kind::polyvector;
  int degree = 0;
  PolyvectorField v;
  HomElement f;
  std::shared_ptr<const HochschildCochain> left, right;

  static HochschildCochain from_polyvector(const PolyvectorField& v, int q) {
    HochschildCochain h;
    h.kind = Kind::polyvector;
    h.degree = q;
    h.v = v;
    return h;
  }
  // R o f o Phi for a Hom element, restricted to its degree-q part.
  static HochschildCochain pullback(const HomElement& f, int q) {
    HochschildCochain h;
    h.kind = Kind::pullback;
    h.degree = q;
    h.f = f.degree_part(q);
    return h;
  }

  CoeffFunction operator()(const BarTensor& b) const {
    CoeffFunction zero = CoeffFunction::constant(b.n, 0);
    if (b.q != degree) return zero;
    switch (kind) {
      case Kind::polyvector: {
        PolyvectorField part = v.grade_part(degree);
        return part.is_zero() ? zero : hkr(part, b);
      }
      case Kind::pullback:
        return psi(f, b);
      case Kind::coboundary: {
        if (b.q == 0) return zero;
        CoeffFunction x = (*left)(bar_diff(b));
        return degree % 2 ? -x : x;  // (-1)^{deg(inner)+1}
      }
      case Kind::cup: {
        CoeffFunction acc = zero;
        int p = left->degree;
        for (auto& [w, c] : b.terms) {
          BarTensor l(b.n, p, b.chart), r(b.n, degree - p, b.chart);
          BarWord lw(w.begin(), w.begin() + p + 1), rw(w.begin() + p + 1, w.end());
          lw.push_back(Monomial{});
          rw.insert(rw.begin(), Monomial{});
          l.add(lw, c);
          r.add(rw, Rat(1));
          acc += (*left)(l) * (*right)(r);
        }
        return acc;
      }
    }
    return zero;
  }
};

// (d phi)(b) = (-1)^{deg phi + 1} phi(d b)
inline HochschildCochain hochschild_cochain_diff(const HochschildCochain& h) {
  HochschildCochain d;
  d.kind = HochschildCochain::Kind::coboundary;
  d.degree = h.degree + 1;
  d.left = std::make_shared<HochschildCochain>(h);
  return d;
}

// (phi u psi)(f0 (x) .. (x) f_{p+q+1}) = phi(f0 (x) .. (x) f_p (x) 1) psi(1 (x) f_{p+1} (x) .. )
inline HochschildCochain hochschild_cup(const HochschildCochain& a, const HochschildCochain& b) {
  HochschildCochain h;
  h.kind = HochschildCochain::Kind::cup;
  h.degree = a.degree + b.degree;
  h.left = std::make_shared<HochschildCochain>(a);
  h.right = std::make_shared<HochschildCochain>(b);
  return h;
}

// Tensors 1 (x) m_1 (x) .. (x) m_q (x) 1 over monomials of degree <= max_deg; with `outer`, outer entries of degree <= 1.
inline std::vector<BarTensor> monomial_test_basis(int n, int q, int max_deg, bool outer = false) {
  std::vector<Monomial> monos;
  std::function<void(int, int, Monomial&)> gen = [&](int var, int left, Monomial& m) {
    if (var == n) {
      monos.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      m[z_var(var)] = static_cast<std::uint8_t>(e);
      gen(var + 1, left - e, m);
    }
    m[z_var(var)] = 0;
  };
  Monomial m{};
  gen(0, max_deg, m);
  std::vector<Monomial> ends{Monomial{}};
  if (outer)
    for (int j = 0; j < n; ++j) ends.push_back(unit_monomial(z_var(j)));
  std::vector<BarTensor> out;
  BarWord w(q + 2);
  std::function<void(int)> fill = [&](int i) {
    if (i == q + 1) {
      for (auto& a : ends)
        for (auto& b : ends) {
          w.front() = a;
          w.back() = b;
          BarTensor t(n, q);
          t.add(w, Rat(1));
          out.push_back(std::move(t));
        }
      return;
    }
    for (auto& mm : monos) {
      w[i] = mm;
      fill(i + 1);
    }
  };
  fill(1);
  return out;
}

// Random tensor with `terms` pure summands whose entries are random z-polynomials.
inline BarTensor random_bar_tensor(Rng& rng, int n, int q, int max_deg = 3, int terms = 2) {
  BarTensor b(n, q);
  for (int t = 0; t < terms; ++t) {
    std::vector<Polynomial> entries;
    for (int i = 0; i < q + 2; ++i) entries.push_back(rng.polynomial(n, max_deg, 2, true, false));
    b += BarTensor::pure(n, entries);
  }
  return b;
}

// Antisymmetrization 1 (x) f_1 # .. # f_q: the shuffle of degree-1 tensors.
inline BarTensor alternation(int n, const std::vector<Polynomial>& entries) {
  BarTensor acc = BarTensor::unit(n);
  for (auto& e : entries) acc = shuffle(acc, BarTensor::pure(n, {Polynomial(1), e, Polynomial(1)}));
  return acc;
}

}  // namespace tkoszul
