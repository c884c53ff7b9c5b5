#pragma once

#include <map>
#include <vector>

#include "atlas.hpp"

namespace tkoszul {

// Nerve-indexed family of graded values; the value on (a0..ap) uses a0's coordinates.
template <class V>
struct CechCochain {
  std::map<Simplex, V> values;

  bool is_zero() const { return values.empty(); }
  const V* at(const Simplex& s) const {
    auto it = values.find(s);
    return it == values.end() ? nullptr : &it->second;
  }
  void add(const Simplex& s, const V& v) {
    if (v.is_zero()) return;
    auto it = values.find(s);
    if (it == values.end()) {
      values.emplace(s, v);
    } else {
      it->second += v;
      if (it->second.is_zero()) values.erase(it);
    }
  }
  void sub(const Simplex& s, const V& v) { add(s, -v); }

  CechCochain& operator+=(const CechCochain& o) {
    for (auto& [s, v] : o.values) add(s, v);
    return *this;
  }
  CechCochain& operator-=(const CechCochain& o) {
    for (auto& [s, v] : o.values) sub(s, v);
    return *this;
  }
  friend CechCochain operator+(CechCochain a, const CechCochain& b) { return a += b; }
  friend CechCochain operator-(CechCochain a, const CechCochain& b) { return a -= b; }
  friend CechCochain operator-(const CechCochain& a) {
    CechCochain r;
    for (auto& [s, v] : a.values) r.values.emplace(s, -v);
    return r;
  }
  friend CechCochain operator*(const Rat& k, const CechCochain& a) {
    CechCochain r;
    for (auto& [s, v] : a.values) r.add(s, k * v);
    return r;
  }
  friend bool operator==(const CechCochain& a, const CechCochain& b) { return a.values == b.values; }

  // Restriction to simplices of Cech degree p.
  CechCochain of_degree(int p) const {
    CechCochain r;
    for (auto& [s, v] : values)
      if (static_cast<int>(s.size()) == p + 1) r.values.emplace(s, v);
    return r;
  }
};

using KCochain = CechCochain<KoszulElement>;
using HomCochain = CechCochain<HomElement>;
using TensorCochain = CechCochain<TensorElement>;
using DualHomCochain = CechCochain<DualHomElement>;

inline Simplex omit(const Simplex& s, std::size_t i) {
  Simplex r = s;
  r.erase(r.begin() + static_cast<long>(i));
  return r;
}
inline Simplex slice(const Simplex& s, std::size_t from, std::size_t to) {
  return Simplex(s.begin() + static_cast<long>(from), s.begin() + static_cast<long>(to) + 1);
}

namespace detail {

template <class V>
V empty_value(const Atlas&, const Simplex& s) {
  if constexpr (requires(V v) { v.target; }) {
    return V(s.front(), s.back());
  } else {
    return V(s.front());
  }
}

template <Side A, Side B>
int value_degree(const Bi<A, B>&, const std::pair<const typename Bi<A, B>::Key, CoeffFunction>& t) {
  return Bi<A, B>::term_degree(t.first.first, t.first.second);
}
template <Side S>
int value_degree(const Ext<S>&, const std::pair<const Mask, CoeffFunction>& t) {
  return side_degree(S, t.first);
}

template <class V>
V scale_terms(const V& v, int (*sign)(int, int), int extra) {
  V r = v.like();
  for (auto& t : v.terms) {
    int s = sign(value_degree(v, t), extra);
    if constexpr (requires { t.first.first; }) {
      r.add(t.first.first, t.first.second, s > 0 ? t.second : -t.second);
    } else {
      r.add(t.first, s > 0 ? t.second : -t.second);
    }
  }
  return r;
}

template <class V>
std::vector<std::pair<int, V>> degree_parts(const V& v) {
  std::map<int, V> parts;
  for (auto& t : v.terms) {
    int q = value_degree(v, t);
    auto it = parts.try_emplace(q, v.like()).first;
    it->second.terms.emplace(t.first, t.second);
  }
  return {parts.begin(), parts.end()};
}

template <Side A, Side B, Side C>
Bi<A, C> compose_value(const Bi<A, B>& f, const Bi<opposite(B), C>& g) {
  return compose(f, g);
}
template <Side A, Side B>
Ext<A> compose_value(const Bi<A, B>& f, const Ext<opposite(B)>& x) {
  return apply(f, x);
}

}  // namespace detail

// Partial coboundary at one simplex: faces first..last (inclusive) with sign (-1)^i.
template <class V>
V delta_at(const Atlas& atlas, const CechCochain<V>& c, const Simplex& s, std::size_t first, std::size_t last) {
  V r = detail::empty_value<V>(atlas, s);
  for (std::size_t i = first; i <= last && i < s.size(); ++i)
    if (const V* v = c.at(omit(s, i))) {
      if (i % 2) r -= *v;
      else r += *v;
    }
  return r;
}

// Hom-type values: inner faces 1..p; K-valued: faces 1..p+1.
template <Side A, Side B>
CechCochain<Bi<A, B>> delta(const Atlas& atlas, const CechCochain<Bi<A, B>>& c) {
  CechCochain<Bi<A, B>> r;
  for (auto& s : atlas.nerve)
    if (s.size() >= 3) r.add(s, delta_at(atlas, c, s, 1, s.size() - 2));
  return r;
}
template <Side S>
CechCochain<Ext<S>> delta(const Atlas& atlas, const CechCochain<Ext<S>>& c) {
  CechCochain<Ext<S>> r;
  for (auto& s : atlas.nerve)
    if (s.size() >= 2) r.add(s, delta_at(atlas, c, s, 1, s.size() - 1));
  return r;
}

// (f.g) on s = sum over split points k of (-1)^{q r} f_{s0..sk} o g_{sk..sp}, g converted to s0's coordinates.
template <class F, class G>
auto cup_at(const Atlas& atlas, const CechCochain<F>& f, const CechCochain<G>& g, const Simplex& s) {
  using R = decltype(detail::compose_value(std::declval<F>(), std::declval<G>()));
  R out = detail::empty_value<R>(atlas, s);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const F* fv = f.at(slice(s, 0, k));
    if (!fv) continue;
    const G* gv = g.at(slice(s, k, s.size() - 1));
    if (!gv) continue;
    int r = static_cast<int>(s.size() - 1 - k);
    G gc = atlas.convert(*gv, s.front());
    for (auto& [q, part] : detail::degree_parts(*fv)) {
      R prod = detail::compose_value(part, gc);
      if ((q * r) % 2) out -= prod;
      else out += prod;
    }
  }
  return out;
}

template <class F, class G>
auto cup(const Atlas& atlas, const CechCochain<F>& f, const CechCochain<G>& g) {
  using R = decltype(detail::compose_value(std::declval<F>(), std::declval<G>()));
  CechCochain<R> out;
  for (auto& s : atlas.nerve) out.add(s, cup_at(atlas, f, g, s));
  return out;
}

// Multiplies every term by (-1)^{total degree}, total degree = Cech degree + value degree.
template <class V>
CechCochain<V> total_degree_sign(const CechCochain<V>& c) {
  CechCochain<V> r;
  for (auto& [s, v] : c.values)
    r.add(s, detail::scale_terms(v, [](int q, int p) { return parity_sign(q + p); }, static_cast<int>(s.size()) - 1));
  return r;
}

// Total-degree components of a cochain.
template <class V>
std::map<int, CechCochain<V>> total_degree_parts(const CechCochain<V>& c) {
  std::map<int, CechCochain<V>> out;
  for (auto& [s, v] : c.values)
    for (auto& [q, part] : detail::degree_parts(v)) out[q + static_cast<int>(s.size()) - 1].add(s, part);
  return out;
}

using TwistingCochain = HomCochain;
using DualTwistingCochain = DualHomCochain;

// D_a c = delta c + a.c
inline KCochain D_a(const Atlas& atlas, const KCochain& c, const TwistingCochain& a) {
  return delta(atlas, c) + cup(atlas, a, c);
}

// D_{a,a} f = delta f + a.f + (-1)^{deg f + 1} f.a ; a has total degree 1 so the sign is (-1)^{deg(f.a)}.
inline HomCochain D_aa(const Atlas& atlas, const HomCochain& f, const TwistingCochain& a) {
  return delta(atlas, f) + cup(atlas, a, f) + total_degree_sign(cup(atlas, f, a));
}

// D_{a,acheck} c = delta c + a.c + (-1)^{deg c + 1} c.acheck
inline TensorCochain D_a_acheck(const Atlas& atlas, const TensorCochain& c, const TwistingCochain& a,
                                const DualTwistingCochain& acheck) {
  return delta(atlas, c) + cup(atlas, a, c) + total_degree_sign(cup(atlas, c, acheck));
}

}  // namespace tkoszul
