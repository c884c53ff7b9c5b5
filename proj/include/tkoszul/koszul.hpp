#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chart.hpp"
#include "coeff.hpp"

namespace tkoszul {

// Increasing multi-index as a bit set: bit i-1 holds index i.
using Mask = std::uint32_t;
using MultiIndex = std::vector<int>;

struct ChartMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr Mask bit(int i) { return Mask(1) << (i - 1); }
inline int grade(Mask m) { return std::popcount(m); }
inline Mask full_mask(int n) { return n >= 32 ? ~Mask(0) : (Mask(1) << n) - 1; }

// Number of indices of m strictly below i.
inline int below(Mask m, int i) { return std::popcount(m & (bit(i) - 1)); }

// Sign of e^a ^ e^b against e^{a|b}; 0 when they share an index.
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inv = 0;
  for (Mask r = b; r; r &= r - 1) {
    int y = std::countr_zero(r) + 1;
    inv += std::popcount(a & ~((bit(y) << 1) - 1));
  }
  return inv % 2 ? -1 : 1;
}

inline MultiIndex indices(Mask m) {
  MultiIndex out;
  for (int i = 1; m; ++i, m >>= 1)
    if (m & 1) out.push_back(i);
  return out;
}

inline Mask mask_of(const MultiIndex& idx, int n = kMaxDim) {
  Mask m = 0;
  int last = 0;
  for (int i : idx) {
    if (i <= last || i > n) throw std::invalid_argument("multi-index must be strictly increasing in 1..n");
    m |= bit(i);
    last = i;
  }
  return m;
}

inline std::string index_text(Mask m) {
  std::string s;
  for (int i : indices(m)) s += std::to_string(i);
  return s;
}

enum class Side { chain, cochain };

constexpr Side opposite(Side s) { return s == Side::chain ? Side::cochain : Side::chain; }
// chain basis e^I sits in degree -|I|, cochain basis in +|I|.
inline int side_degree(Side s, Mask m) { return s == Side::chain ? -grade(m) : grade(m); }
constexpr int parity_sign(int k) { return k % 2 == 0 ? 1 : -1; }

// Exterior element over e (chain) or e-check (cochain).
template <Side S>
struct Ext {
  int chart = -1;
  int coords = -1;  // chart whose coordinates the coefficients use; -1 means `chart`
  std::map<Mask, CoeffFunction> terms;

  int coordinate_chart() const { return coords >= 0 ? coords : chart; }

  Ext() = default;
  explicit Ext(int chart_id) : chart(chart_id) {}
  static Ext basis(Mask m, CoeffFunction c = CoeffFunction::constant(0, 1), int chart_id = -1) {
    Ext x(chart_id);
    x.add(m, c);
    return x;
  }

  bool is_zero() const { return terms.empty(); }
  void add(Mask m, const CoeffFunction& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  CoeffFunction coeff(Mask m) const {
    auto it = terms.find(m);
    return it == terms.end() ? CoeffFunction() : it->second;
  }
  Ext grade_part(int g) const {
    Ext r = like();
    for (auto& [m, c] : terms)
      if (grade(m) == g) r.terms.emplace(m, c);
    return r;
  }

  Ext& operator+=(const Ext& o) {
    join_chart(o);
    for (auto& [m, c] : o.terms) add(m, c);
    return *this;
  }
  Ext& operator-=(const Ext& o) {
    join_chart(o);
    for (auto& [m, c] : o.terms) add(m, -c);
    return *this;
  }
  friend Ext operator+(Ext a, const Ext& b) { return a += b; }
  friend Ext operator-(Ext a, const Ext& b) { return a -= b; }
  friend Ext operator-(const Ext& a) {
    Ext r = a.like();
    for (auto& [m, c] : a.terms) r.terms.emplace(m, -c);
    return r;
  }
  friend Ext operator*(const CoeffFunction& f, const Ext& a) {
    Ext r = a.like();
    for (auto& [m, c] : a.terms) r.add(m, f * c);
    return r;
  }
  friend Ext operator*(const Rat& s, const Ext& a) { return CoeffFunction::constant(0, s) * a; }
  friend bool operator==(const Ext& a, const Ext& b) { return a.terms == b.terms; }

  // Empty element with the same chart tags.
  Ext like() const {
    Ext r(chart);
    r.coords = coords;
    return r;
  }
  void join_chart(const Ext& o) {
    if (chart < 0) chart = o.chart;
    else if (o.chart >= 0 && o.chart != chart) throw ChartMismatch("chart mismatch");
    if (coords < 0) coords = o.coords;
    else if (o.coords >= 0 && o.coords != coords) throw ChartMismatch("coordinate mismatch");
  }
};

using KoszulElement = Ext<Side::chain>;
using DualKoszulElement = Ext<Side::cochain>;

template <Side S>
Ext<S> wedge(const Ext<S>& x, const Ext<S>& y) {
  Ext<S> r = x.like();
  r.join_chart(y);
  for (auto& [a, ca] : x.terms)
    for (auto& [b, cb] : y.terms)
      if (int s = wedge_sign(a, b)) r.add(a | b, s > 0 ? ca * cb : -(ca * cb));
  return r;
}

// Removes index j from m (interior product by the dual basis vector); sign (-1)^{position-1}.
inline int interior_sign(Mask m, int j) { return (m & bit(j)) ? parity_sign(below(m, j)) : 0; }

// Section operator on side S: for chain, contraction by sum s_j e-check^j; for cochain, left wedge by sum s_j e-check^j.
template <Side S, class Emit>
void apply_section(Mask m, const Section& s, Emit&& emit) {
  for (int j = 1; j <= static_cast<int>(s.size()); ++j) {
    const CoeffFunction& sj = s[j - 1];
    if (sj.is_zero()) continue;
    bool has = m & bit(j);
    if constexpr (S == Side::chain) {
      if (has) emit(m & ~bit(j), parity_sign(below(m, j)), sj);
    } else {
      if (!has) emit(m | bit(j), parity_sign(below(m, j)), sj);
    }
  }
}

template <Side S>
Ext<S> apply_section(const Ext<S>& x, const Section& s) {
  Ext<S> r = x.like();
  for (auto& [m, c] : x.terms)
    apply_section<S>(m, s, [&](Mask out, int sign, const CoeffFunction& sj) { r.add(out, sign > 0 ? sj * c : -(sj * c)); });
  return r;
}

// Interior product by a degree-1 dual element c = sum c_j e-check^j.
inline KoszulElement contract(const KoszulElement& x, const DualKoszulElement& c) {
  Section s(kMaxDim);
  for (auto& [m, cj] : c.terms) {
    if (grade(m) != 1) throw std::invalid_argument("contraction needs a homogeneous degree-1 element");
    s[std::countr_zero(m)] = cj;
  }
  while (!s.empty() && s.back().is_zero()) s.pop_back();
  if (x.chart >= 0 && c.chart >= 0 && x.chart != c.chart) throw ChartMismatch("chart mismatch");
  return apply_section(x, s);
}

inline KoszulElement koszul_diff(const KoszulElement& x, const Section& s) { return apply_section(x, s); }
inline KoszulElement koszul_diff(const KoszulElement& x, const Chart& c) { return apply_section(x, section(c)); }
inline DualKoszulElement dual_koszul_diff(const DualKoszulElement& x, const Section& s) { return apply_section(x, s); }
inline DualKoszulElement dual_koszul_diff(const DualKoszulElement& x, const Chart& c) {
  return apply_section(x, section(c));
}

// Bi-graded element b1^I (x) b2^J; coefficients in the target (first) chart's coordinates.
template <Side A, Side B>
struct Bi {
  using Key = std::pair<Mask, Mask>;
  static constexpr Side first_side = A;
  static constexpr Side second_side = B;

  int target = -1;
  int source = -1;
  int coords = -1;  // chart whose coordinates the coefficients use; -1 means `target`
  std::map<Key, CoeffFunction> terms;

  int coordinate_chart() const { return coords >= 0 ? coords : target; }
  // Empty element with the same chart tags.
  Bi like() const {
    Bi r(target, source);
    r.coords = coords;
    return r;
  }

  Bi() = default;
  Bi(int t, int s) : target(t), source(s) {}
  static Bi basis(Mask i, Mask j, CoeffFunction c = CoeffFunction::constant(0, 1), int t = -1, int s = -1) {
    Bi x(t, s);
    x.add(i, j, c);
    return x;
  }

  static int term_degree(Mask i, Mask j) { return side_degree(A, i) + side_degree(B, j); }
  bool is_zero() const { return terms.empty(); }
  void add(Mask i, Mask j, const CoeffFunction& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms.try_emplace(Key{i, j}, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  CoeffFunction coeff(Mask i, Mask j) const {
    auto it = terms.find(Key{i, j});
    return it == terms.end() ? CoeffFunction() : it->second;
  }
  Bi degree_part(int q) const {
    Bi r = like();
    for (auto& [k, c] : terms)
      if (term_degree(k.first, k.second) == q) r.terms.emplace(k, c);
    return r;
  }
  std::vector<int> degrees() const {
    std::vector<int> d;
    for (auto& [k, c] : terms) {
      int q = term_degree(k.first, k.second);
      if (std::find(d.begin(), d.end(), q) == d.end()) d.push_back(q);
    }
    std::sort(d.begin(), d.end());
    return d;
  }

  Bi& operator+=(const Bi& o) {
    join(o);
    for (auto& [k, c] : o.terms) add(k.first, k.second, c);
    return *this;
  }
  Bi& operator-=(const Bi& o) {
    join(o);
    for (auto& [k, c] : o.terms) add(k.first, k.second, -c);
    return *this;
  }
  friend Bi operator+(Bi a, const Bi& b) { return a += b; }
  friend Bi operator-(Bi a, const Bi& b) { return a -= b; }
  friend Bi operator-(const Bi& a) {
    Bi r = a.like();
    for (auto& [k, c] : a.terms) r.terms.emplace(k, -c);
    return r;
  }
  friend Bi operator*(const CoeffFunction& f, const Bi& a) {
    Bi r = a.like();
    for (auto& [k, c] : a.terms) r.add(k.first, k.second, f * c);
    return r;
  }
  friend Bi operator*(const Rat& s, const Bi& a) {
    if (s == 0) return a.like();
    Bi r = a.like();
    for (auto& [k, c] : a.terms) r.terms.emplace(k, c * s);
    return r;
  }
  friend bool operator==(const Bi& a, const Bi& b) { return a.terms == b.terms; }

  void join(const Bi& o) {
    if (target < 0) target = o.target;
    else if (o.target >= 0 && o.target != target) throw ChartMismatch("target chart mismatch");
    if (source < 0) source = o.source;
    else if (o.source >= 0 && o.source != source) throw ChartMismatch("source chart mismatch");
    if (coords < 0) coords = o.coords;
    else if (o.coords >= 0 && o.coords != coords) throw ChartMismatch("coordinate mismatch");
  }
};

using HomElement = Bi<Side::chain, Side::cochain>;
using TensorElement = Bi<Side::chain, Side::chain>;
using DualHomElement = Bi<Side::cochain, Side::chain>;

template <class T, class F>
T map_coeffs(const T& x, F&& fn) {
  T r = x;
  for (auto& [k, c] : r.terms) c = fn(c);
  std::erase_if(r.terms, [](auto& kv) { return kv.second.is_zero(); });
  return r;
}

// f o g: pairs f's second factor against g's first (plain pairing, <b^J*, b^L> = delta_JL).
// Assumes g's coefficients are already in f's target coordinates.
template <Side A, Side B, Side C>
Bi<A, C> compose(const Bi<A, B>& f, const Bi<opposite(B), C>& g) {
  if (f.source >= 0 && g.target >= 0 && f.source != g.target) throw ChartMismatch("composition chart-chain mismatch");
  if (f.coordinate_chart() >= 0 && g.coordinate_chart() >= 0 && f.coordinate_chart() != g.coordinate_chart())
    throw ChartMismatch("composition needs both factors in the same coordinates");
  Bi<A, C> r(f.target, g.source);
  r.coords = f.coords;
  std::map<Mask, std::vector<std::pair<Mask, const CoeffFunction*>>> by_first;
  for (auto& [k, c] : g.terms) by_first[k.first].emplace_back(k.second, &c);
  for (auto& [k, c] : f.terms) {
    auto it = by_first.find(k.second);
    if (it == by_first.end()) continue;
    for (auto& [m, gc] : it->second) r.add(k.first, m, c * *gc);
  }
  return r;
}

// f(x) for x an exterior element on the opposite side of f's second factor.
template <Side A, Side B>
Ext<A> apply(const Bi<A, B>& f, const Ext<opposite(B)>& x) {
  if (f.source >= 0 && x.chart >= 0 && f.source != x.chart) throw ChartMismatch("application chart mismatch");
  if (f.coordinate_chart() >= 0 && x.coordinate_chart() >= 0 && f.coordinate_chart() != x.coordinate_chart())
    throw ChartMismatch("application needs both factors in the same coordinates");
  Ext<A> r(f.target);
  r.coords = f.coords;
  for (auto& [k, c] : f.terms) {
    auto it = x.terms.find(k.second);
    if (it != x.terms.end()) r.add(k.first, c * it->second);
  }
  return r;
}

// Differential data on an ordered pair of charts, all sections in target coordinates.
struct Link {
  int n = 1;
  ChartKind target_kind = ChartKind::diagonal;
  Section s_target;
  Section s_source;
  int target = -1;
  int source = -1;

  static Link local(const Chart& c, int id = -1) { return Link{c.n, c.kind, section(c), section(c), id, id}; }
};

// The element sum_L op(b^L) (x) b^L* representing the section operator of side A on one chart.
template <Side A>
Bi<A, opposite(A)> operator_element(const Link& l) {
  Bi<A, opposite(A)> r(l.target, l.target);
  for (Mask m = 0; m <= full_mask(l.n); ++m)
    apply_section<A>(m, l.s_target, [&](Mask out, int sign, const CoeffFunction& sj) { r.add(out, m, sign > 0 ? sj : -sj); });
  return r;
}

// First-factor part of the differential (d of the target complex, no sign).
template <Side A, Side B>
Bi<A, B> first_factor_d(const Bi<A, B>& f, const Section& s) {
  Bi<A, B> r = f.like();
  for (auto& [k, c] : f.terms)
    apply_section<A>(k.first, s, [&](Mask out, int sign, const CoeffFunction& sj) {
      r.add(out, k.second, sign > 0 ? sj * c : -(sj * c));
    });
  return r;
}

// Source-side part -(-1)^{|f|} f o d_source, acting as the transposed section operator on the second factor.
template <Side A, Side B>
Bi<A, B> second_factor_d(const Bi<A, B>& f, const Section& s) {
  Bi<A, B> r = f.like();
  for (auto& [k, c] : f.terms) {
    int sigma = -parity_sign(Bi<A, B>::term_degree(k.first, k.second));
    apply_section<B>(k.second, s, [&](Mask out, int sign, const CoeffFunction& sj) {
      r.add(k.first, out, sign * sigma > 0 ? sj * c : -(sj * c));
    });
  }
  return r;
}

// d f = d_target o f - (-1)^{|f|} f o d_source
template <Side A, Side B>
Bi<A, B> differential(const Bi<A, B>& f, const Link& l) {
  return first_factor_d(f, l.s_target) + second_factor_d(f, l.s_source);
}

inline HomElement hom_diff(const HomElement& f, const Link& l) { return differential(f, l); }
inline TensorElement tensor_diff(const TensorElement& f, const Link& l) { return differential(f, l); }

inline std::string basis_text(Side s, Mask m) {
  if (!m) return "1";
  return (s == Side::chain ? "e^" : "ech^") + index_text(m);
}

namespace detail {
inline std::string term_text(const CoeffFunction& c, const std::string& basis) {
  if (c == CoeffFunction::constant(0, 1)) return basis;
  return "(" + c.to_string() + ")*" + basis;
}
inline std::string join_terms(const std::vector<std::string>& parts) {
  if (parts.empty()) return "0";
  std::string s = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) s += " + " + parts[i];
  return s;
}
}  // namespace detail

template <Side S>
std::string to_string(const Ext<S>& x) {
  std::vector<std::string> parts;
  for (auto& [m, c] : x.terms) parts.push_back(detail::term_text(c, basis_text(S, m)));
  return detail::join_terms(parts);
}

template <Side A, Side B>
std::string to_string(const Bi<A, B>& x) {
  std::vector<std::string> parts;
  for (auto& [k, c] : x.terms) parts.push_back(detail::term_text(c, basis_text(A, k.first) + "(x)" + basis_text(B, k.second)));
  return detail::join_terms(parts);
}

inline HomElement hom_identity(int n, int t = -1, int s = -1) {
  HomElement r(t, s);
  for (Mask m = 0; m <= full_mask(n); ++m) r.add(m, m, CoeffFunction::constant(n, 1));
  return r;
}

}  // namespace tkoszul
