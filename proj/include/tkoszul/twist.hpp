#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cech.hpp"
#include "fixtures.hpp"
#include "homotopy.hpp"
#include "report.hpp"

namespace tkoszul {

// Polyvectors: e-check^J read as d_J. Forms: e^J read as dz^J.
// `chart` is the frame chart, `coords` the chart whose coordinates the coefficients use.
using PolyvectorField = Ext<Side::cochain>;
using Form = Ext<Side::chain>;
using PolyvectorCochain = CechCochain<PolyvectorField>;
using FormCochain = CechCochain<Form>;

template <Side S>
bool is_z_only(const Ext<S>& x) {
  for (auto& [m, c] : x.terms)
    if (c.uses_zeta()) return false;
  return true;
}

namespace detail {

template <Side A>
Bi<A, opposite(A)> twist_seed(int n, int target, int source) {
  Mask m = A == Side::chain ? Mask(0) : full_mask(n);
  return Bi<A, opposite(A)>::basis(m, m, CoeffFunction::constant(n, 1), target, source);
}

// A = A0 - P_H(d A0), a chain map K_beta -> K_alpha (or the dual analogue).
template <Side A>
Bi<A, opposite(A)> chain_extend_side(const Atlas& atlas, int alpha, int beta) {
  auto a0 = twist_seed<A>(atlas.dimension(), alpha, beta);
  if (alpha == beta) {
    Bi<A, opposite(A)> id(alpha, alpha);
    for (Mask m = 0; m <= full_mask(atlas.dimension()); ++m) id.add(m, m, CoeffFunction::constant(atlas.dimension(), 1));
    return id;
  }
  Link l = atlas.link(alpha, beta);
  return a0 - P_H(differential(a0, l), l);
}

template <Side A>
CechCochain<Bi<A, opposite(A)>> build_twist_side(const Atlas& atlas) {
  using V = Bi<A, opposite(A)>;
  CechCochain<V> a;
  for (auto& s : atlas.simplices(0)) a.add(s, operator_element<A>(atlas.link(s[0], s[0])));
  CechCochain<V> higher;
  for (auto& s : atlas.simplices(1)) higher.add(s, chain_extend_side<A>(atlas, s[0], s[1]));
  for (int i = 1; i < atlas.nerve_dimension(); ++i) {
    CechCochain<V> next;
    for (auto& s : atlas.simplices(i + 1)) {
      V x = delta_at(atlas, higher, s, 1, s.size() - 2) + cup_at(atlas, higher, higher, s);
      if (x.is_zero()) continue;
      Link l = atlas.link(s.front(), s.back());
      V v = P_H(x, l);
      next.add(s, i % 2 ? -v : v);
    }
    higher += next;
  }
  return a + higher;
}

template <class V>
json element_json(const Atlas& atlas, const Simplex& s, int q, const V& v) {
  json j = json::object();
  j["simplex"] = atlas.simplex_name(s);
  j["cech_degree"] = static_cast<int>(s.size()) - 1;
  j["value_degree"] = q;
  j["value"] = to_string(v);
  return j;
}

template <Side A>
Report verify_twist_side(const CechCochain<Bi<A, opposite(A)>>& a, const Atlas& atlas, const char* title) {
  Report rep{title, {}};
  auto eq = delta(atlas, a) + cup(atlas, a, a);
  for (auto& s : atlas.nerve) {
    json bad = json::array();
    if (const auto* v = eq.at(s))
      for (auto& [q, part] : degree_parts(*v)) bad.push_back(element_json(atlas, s, q, part));
    json d = json::object();
    if (!bad.empty()) d["nonzero_components"] = bad;
    rep.add("twisting equation on " + atlas.simplex_name(s), bad.empty(), d);
  }
  return rep;
}

}  // namespace detail

inline HomElement chain_extend(const Atlas& atlas, int alpha, int beta) {
  return detail::chain_extend_side<Side::chain>(atlas, alpha, beta);
}
inline DualHomElement chain_extend_dual(const Atlas& atlas, int alpha, int beta) {
  return detail::chain_extend_side<Side::cochain>(atlas, alpha, beta);
}

// a^{0,1} = d_K per chart, a^{1,0} from chain_extend, then a^{i+1,-i} = (-1)^i P_H(delta a^i + sum a^{r+1} a^{s+1}).
inline TwistingCochain build_twist(const Atlas& atlas) { return detail::build_twist_side<Side::chain>(atlas); }
inline DualTwistingCochain build_twist_dual(const Atlas& atlas) { return detail::build_twist_side<Side::cochain>(atlas); }

inline Report verify_twist(const TwistingCochain& a, const Atlas& atlas) {
  return detail::verify_twist_side<Side::chain>(a, atlas, "twist");
}
inline Report verify_twist_dual(const DualTwistingCochain& a, const Atlas& atlas) {
  return detail::verify_twist_side<Side::cochain>(a, atlas, "dual twist");
}

template <class V>
V restrict_diagonal(const V& x) {
  return map_coeffs(x, [](const CoeffFunction& c) { return c.restrict_diagonal(); });
}

// a^{i}|_diag = 0 for i != 1 and a^{1,0}_{ab}|_diag = wedge powers of d z_b / d z_a.
inline Report restrict_twist_diagonal(const TwistingCochain& a, const Atlas& atlas) {
  Report rep{"twist restricted to the diagonal", {}};
  int n = atlas.dimension();
  for (auto& s : atlas.nerve) {
    bool diag = true;
    for (int c : s) diag = diag && atlas.charts[c].is_diagonal();
    if (!diag) continue;
    const HomElement* v = a.at(s);
    HomElement r = v ? restrict_diagonal(*v) : HomElement(s.front(), s.back());
    std::string name = atlas.simplex_name(s);
    if (s.size() != 2) {
      json d = json::object();
      if (!r.is_zero()) d["restriction"] = to_string(r);
      rep.add("vanishes on the diagonal " + name, r.is_zero(), d);
      continue;
    }
    for (int q = 0; q <= n; ++q) {
      auto w = jacobian_wedge(atlas, s[0], s[1], q);
      json bad = json::array();
      for (Mask i = 0; i <= full_mask(n); ++i) {
        if (grade(i) != q) continue;
        for (Mask j = 0; j <= full_mask(n); ++j) {
          if (grade(j) != q) continue;
          auto it = w.find({j, i});
          CoeffFunction want = it == w.end() ? CoeffFunction() : it->second;
          CoeffFunction got = r.coeff(i, j);
          if (!(got == want)) {
            json e = json::object();
            e["component"] = basis_text(Side::chain, i) + "(x)" + basis_text(Side::cochain, j);
            e["restricted"] = got.to_string();
            e["jacobian_minor"] = want.to_string();
            bad.push_back(e);
          }
        }
      }
      json d = json::object();
      if (!bad.empty()) d["mismatches"] = bad;
      rep.add("jacobian wedge power " + std::to_string(q) + " on " + name, bad.empty(), d);
    }
    HomElement off = r;
    std::erase_if(off.terms, [](auto& kv) { return grade(kv.first.first) == grade(kv.first.second); });
    if (!off.is_zero()) rep.add("degree zero on " + name, false, json{{"restriction", to_string(off)}});
  }
  return rep;
}

// Polyvector in frame `from` rewritten in frame `to`: d^a_J = sum_K det(Jac_{a->b}[K, J]) d^b_K.
inline PolyvectorField transport_frame(const Atlas& atlas, const PolyvectorField& v, int to) {
  int from = v.chart;
  if (from == to) return v;
  int n = atlas.dimension();
  int coords = v.coordinate_chart();
  PolyvectorField r(to);
  r.coords = coords == to ? -1 : coords;
  std::map<int, WedgeMatrix> powers;
  for (auto& [j, c] : v.terms) {
    int q = grade(j);
    auto it = powers.find(q);
    if (it == powers.end()) it = powers.emplace(q, jacobian_wedge(atlas, from, to, q)).first;
    for (auto& [key, minor] : it->second)
      if (key.second == j) r.add(key.first, c * atlas.convert(minor, from, coords));
  }
  return r;
}

// Full alternating Cech coboundary on polyvector cochains (value on (a0..ap): a0 coordinates, ap frame).
inline PolyvectorCochain delta_full(const Atlas& atlas, const PolyvectorCochain& v) {
  PolyvectorCochain out;
  for (auto& s : atlas.nerve) {
    if (s.size() < 2) continue;
    PolyvectorField acc(s.back());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const PolyvectorField* f = v.at(omit(s, i));
      if (!f) continue;
      PolyvectorField g = *f;
      if (i == 0) g = atlas.convert(g, s.front());
      if (i + 1 == s.size()) g = transport_frame(atlas, g, s.back());
      g.coords = s.front() == g.chart ? -1 : s.front();
      if (i % 2) acc -= g;
      else acc += g;
    }
    out.add(s, acc);
  }
  return out;
}

// (v.w) on (a0..a_{p+r}) = (-1)^{qr} w' ^ v' with both factors moved to a0 coordinates and the last frame.
inline PolyvectorCochain polyvector_cup(const Atlas& atlas, const PolyvectorCochain& v, const PolyvectorCochain& w) {
  PolyvectorCochain out;
  for (auto& s : atlas.nerve) {
    PolyvectorField acc(s.back());
    acc.coords = s.front() == s.back() ? -1 : s.front();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const PolyvectorField* f = v.at(slice(s, 0, k));
      const PolyvectorField* g = w.at(slice(s, k, s.size() - 1));
      if (!f || !g) continue;
      int r = static_cast<int>(s.size() - 1 - k);
      PolyvectorField gc = atlas.convert(*g, s.front());
      PolyvectorField ft = transport_frame(atlas, *f, s.back());
      for (auto& [q, part] : detail::degree_parts(ft)) {
        PolyvectorField prod = wedge(gc, part);
        if ((q * r) % 2) acc -= prod;
        else acc += prod;
      }
    }
    out.add(s, acc);
  }
  return out;
}

// Keep the K^0-target components, restrict to the diagonal, read e-check^J as d_J.
inline PolyvectorField R_element(const HomElement& f) {
  PolyvectorField p(f.source);
  p.coords = f.coords;
  for (auto& [k, c] : f.terms)
    if (k.first == 0) p.add(k.second, c.restrict_diagonal());
  return p;
}

inline PolyvectorCochain R_map(const Atlas& atlas, const HomCochain& f) {
  PolyvectorCochain out;
  for (auto& [s, v] : f.values) {
    for (int c : s)
      if (!atlas.charts[c].is_diagonal()) throw std::invalid_argument("R_map needs diagonal charts");
    PolyvectorField p = R_element(v);
    p.coords = s.front() == s.back() ? -1 : s.front();
    out.add(s, p);
  }
  return out;
}

// Contraction by a polyvector as an endomorphism of K: iota_{d_J} = iota_{jk} o ... o iota_{j1}.
inline HomElement contraction_operator(const PolyvectorField& v, int n) {
  HomElement r(v.chart, v.chart);
  r.coords = v.coords;
  for (auto& [j, c] : v.terms) {
    auto idx = indices(j);
    for (Mask l = 0; l <= full_mask(n); ++l) {
      if ((l & j) != j) continue;
      Mask cur = l;
      int sign = 1;
      for (int i : idx) {
        sign *= interior_sign(cur, i);
        cur &= ~bit(i);
      }
      r.add(cur, l, sign > 0 ? c : -c);
    }
  }
  return r;
}

// f_s = A_{s0 sp} o iota(v_s), a Hom cochain with R(f) = v.
inline HomCochain contraction_cochain(const Atlas& atlas, const PolyvectorCochain& v) {
  HomCochain out;
  int n = atlas.dimension();
  for (auto& [s, p] : v.values) {
    HomElement t = contraction_operator(p, n);
    if (s.size() == 1) {
      out.add(s, t);
      continue;
    }
    out.add(s, compose(chain_extend(atlas, s.front(), s.back()), t));
  }
  return out;
}

struct TwistMutation {
  std::string name;
  std::string fixture;
  std::string description;
  std::function<void(const Atlas&, TwistingCochain&)> apply;
};

namespace detail {
inline Simplex chart_simplex(const Atlas& atlas, std::initializer_list<const char*> ids) {
  Simplex s;
  for (auto id : ids) s.push_back(atlas.index(id));
  return s;
}
inline HomElement& component(const Atlas& atlas, TwistingCochain& a, std::initializer_list<const char*> ids) {
  Simplex s = chart_simplex(atlas, ids);
  auto it = a.values.find(s);
  if (it == a.values.end()) it = a.values.emplace(s, HomElement(s.front(), s.back())).first;
  return it->second;
}
}  // namespace detail

// Single-component corruptions the twist check must reject.
inline std::vector<TwistMutation> shipped_mutations() {
  using detail::component;
  auto one = [](int n) { return CoeffFunction::constant(n, 1); };
  return {
      {"a10-plus-e1e1", "shear2", "a^{1,0} on (alpha,beta) plus e^1 (x) ech^1",
       [=](const Atlas& at, TwistingCochain& a) { component(at, a, {"alpha", "beta"}).add(bit(1), bit(1), one(2)); }},
      {"a01-sign-flip", "plane", "one coefficient of a^{0,1} on (u) negated",
       [](const Atlas& at, TwistingCochain& a) {
         auto& v = component(at, a, {"u"});
         CoeffFunction c = v.coeff(bit(2), bit(1) | bit(2));
         v.add(bit(2), bit(1) | bit(2), -2 * c);
       }},
      {"a2-negated", "shear3", "a^{2,-1} on (alpha,beta,gamma) negated",
       [](const Atlas& at, TwistingCochain& a) {
         auto& v = component(at, a, {"alpha", "beta", "gamma"});
         v = -v;
       }},
      {"a2-dropped", "shear3", "a^{2,-1} on (alpha,beta,gamma) removed",
       [](const Atlas& at, TwistingCochain& a) { a.values.erase(detail::chart_simplex(at, {"alpha", "beta", "gamma"})); }},
      {"a10-dropped", "trans3", "a^{1,0} on (beta,gamma) removed",
       [](const Atlas& at, TwistingCochain& a) { a.values.erase(detail::chart_simplex(at, {"beta", "gamma"})); }},
      {"a10-doubled", "shear3", "a^{1,0} on (alpha,gamma) doubled",
       [](const Atlas& at, TwistingCochain& a) {
         auto& v = component(at, a, {"alpha", "gamma"});
         v = Rat(2) * v;
       }},
      {"offdiag-a10-constant", "offdiag", "e^1 (x) ech^1 coefficient of a^{1,0} on (v,u) replaced by 1",
       [=](const Atlas& at, TwistingCochain& a) {
         auto& v = component(at, a, {"v", "u"});
         CoeffFunction c = v.coeff(bit(1), bit(1));
         v.add(bit(1), bit(1), one(1) - c);
       }},
  };
}

inline TwistingCochain mutated_twist(const TwistMutation& m, const Atlas& atlas) {
  TwistingCochain a = build_twist(atlas);
  m.apply(atlas, a);
  std::erase_if(a.values, [](auto& kv) { return kv.second.is_zero(); });
  return a;
}

}  // namespace tkoszul
