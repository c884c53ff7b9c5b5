#pragma once

#include <functional>
#include <optional>
#include <string>

#include "barhkr.hpp"
#include "cech.hpp"
#include "random.hpp"
#include "report.hpp"
#include "twist.hpp"

namespace tkoszul {

struct NotClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Form-valued cochains: value on (a0..ap) in a0 coordinates and the a0 frame.

// Rewrites a form in frame `to`: dz_b^J = sum_K det(Jac_{to->b}[J, K]) dz_to^K, coefficients in `to` coordinates.
inline Form transport_form(const Atlas& atlas, const Form& w, int to) {
  int from = w.chart;
  Form x = atlas.convert(w, to);
  if (from == to) return x;
  Form r(to);
  std::map<int, WedgeMatrix> powers;
  for (auto& [j, c] : x.terms) {
    int q = grade(j);
    auto it = powers.find(q);
    if (it == powers.end()) it = powers.emplace(q, jacobian_wedge(atlas, to, from, q)).first;
    for (auto& [key, minor] : it->second)
      if (key.first == j) r.add(key.second, c * minor);
  }
  return r;
}

inline FormCochain delta_full(const Atlas& atlas, const FormCochain& w) {
  FormCochain out;
  for (auto& s : atlas.nerve) {
    if (s.size() < 2) continue;
    Form acc(s.front());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Form* f = w.at(omit(s, i));
      if (!f) continue;
      Form g = i == 0 ? transport_form(atlas, *f, s.front()) : *f;
      if (i % 2) acc -= g;
      else acc += g;
    }
    out.add(s, acc);
  }
  return out;
}

// Interior product, iota_{d_J} = iota_{jk} o ... o iota_{j1}.
inline Form contraction(const PolyvectorField& v, const Form& w) {
  int top = -1;
  for (auto& [m, c] : w.terms) top = std::max(top, grade(m));
  Form r = w.like();
  for (auto& [j, cv] : v.terms) {
    if (grade(j) > top && top >= 0) throw DegreeMismatch("polyvector degree exceeds form degree");
    auto idx = indices(j);
    for (auto& [m, cw] : w.terms) {
      if ((m & j) != j) continue;
      Mask cur = m;
      int sign = 1;
      for (int i : idx) {
        sign *= interior_sign(cur, i);
        cur &= ~bit(i);
      }
      CoeffFunction c = cv * cw;
      r.add(cur, sign > 0 ? c : -c);
    }
  }
  return r;
}

// (v . w) on (a0..a_{p+r}) = (-1)^{qr} iota_{v_{a0..ak}} w_{ak..}, moved to the a0 frame.
inline FormCochain contract_cochain(const Atlas& atlas, const PolyvectorCochain& v, const FormCochain& w) {
  FormCochain out;
  for (auto& s : atlas.nerve) {
    Form acc(s.front());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const PolyvectorField* f = v.at(slice(s, 0, k));
      const Form* g = w.at(slice(s, k, s.size() - 1));
      if (!f || !g) continue;
      int r = static_cast<int>(s.size() - 1 - k);
      PolyvectorField fk = atlas.convert(*f, s[k]);
      for (auto& [q, part] : detail::degree_parts(fk)) {
        Form x = contraction(part, *g);
        x = transport_form(atlas, x, s.front());
        if ((q * r) % 2) acc -= x;
        else acc += x;
      }
    }
    out.add(s, acc);
  }
  return out;
}

inline TensorCochain action(const Atlas& atlas, const HomCochain& f, const TensorCochain& c) { return cup(atlas, f, c); }

// Second-factor grade 0, restricted to the diagonal, e^I read as dz^I.
inline FormCochain extract_raw(const TensorCochain& c) {
  FormCochain out;
  for (auto& [s, v] : c.values) {
    Form w(s.front());
    for (auto& [k, x] : v.terms)
      if (k.second == 0) w.add(k.first, x.restrict_diagonal());
    out.add(s, w);
  }
  return out;
}

inline FormCochain extract_class(const Atlas& atlas, const TensorCochain& c, const TwistingCochain& a,
                                 const DualTwistingCochain& ac) {
  auto d = D_a_acheck(atlas, c, a, ac);
  if (!d.is_zero()) throw NotClosed("tensor cochain is not closed under the twisted differential");
  return extract_raw(c);
}

// Graded product on K (x) K: (a (x) b)(c (x) d) = (-1)^{|b||c|} (a^c) (x) (b^d).
inline TensorElement tensor_mul(const TensorElement& x, const TensorElement& y) {
  TensorElement r = x.like();
  r.join(y);
  for (auto& [k, c] : x.terms)
    for (auto& [l, d] : y.terms) {
      int s1 = wedge_sign(k.first, l.first), s2 = wedge_sign(k.second, l.second);
      if (!s1 || !s2) continue;
      int s = s1 * s2 * parity_sign(grade(k.second) * grade(l.first));
      r.add(k.first | l.first, k.second | l.second, s > 0 ? c * d : -(c * d));
    }
  return r;
}

// g * E_{i1} ... E_{ik} with E_j = e^j (x) 1 - 1 (x) e^j, each term then signed by (-1)^{g(g-1)/2}, g the
// second-factor grade; this carries Koszul-sign cycles to cycles of the operator-form differential.
inline TensorElement local_tensor_class(int n, Mask I, const CoeffFunction& g, int chart = -1) {
  TensorElement r = TensorElement::basis(0, 0, g, chart, chart);
  for (int j : indices(I)) {
    TensorElement e(chart, chart);
    e.add(bit(j), 0, CoeffFunction::constant(n, 1));
    e.add(0, bit(j), CoeffFunction::constant(n, -1));
    r = tensor_mul(r, e);
  }
  for (auto& [k, c] : r.terms) {
    int gr = grade(k.second);
    if ((gr * (gr - 1) / 2) % 2) c = -c;
  }
  return r;
}

// Completes Cech-0 data to a cocycle of `D` by solving d f_s = -Y_s with P_H over increasing Cech degree.
template <class V>
CechCochain<V> lift_to_cocycle(const Atlas& atlas, CechCochain<V> f, const std::function<CechCochain<V>(const CechCochain<V>&)>& D) {
  for (int p = 1; p <= atlas.nerve_dimension(); ++p) {
    auto y = D(f).of_degree(p);
    for (auto& [s, v] : y.values) {
      V x = P_H(v, atlas.link(s.front(), s.back()));
      f.add(s, p % 2 ? x : -x);
    }
  }
  return f;
}

inline HomCochain lift_hom(const Atlas& atlas, const HomCochain& f0, const TwistingCochain& a) {
  return lift_to_cocycle<HomElement>(atlas, f0, [&](const HomCochain& f) { return D_aa(atlas, f, a); });
}
inline TensorCochain lift_tensor(const Atlas& atlas, const TensorCochain& c0, const TwistingCochain& a,
                                 const DualTwistingCochain& ac) {
  return lift_to_cocycle<TensorElement>(atlas, c0, [&](const TensorCochain& c) { return D_a_acheck(atlas, c, a, ac); });
}

// A global polyvector given in the first chart, restated on every chart in its own frame and coordinates.
inline PolyvectorCochain global_polyvector(const Atlas& atlas, const PolyvectorField& v0) {
  PolyvectorCochain out;
  for (auto& s : atlas.simplices(0)) {
    PolyvectorField p = transport_frame(atlas, v0, s[0]);
    p = atlas.convert(p, s[0]);
    out.add(s, p);
  }
  return out;
}
inline FormCochain global_form(const Atlas& atlas, const Form& w0) {
  FormCochain out;
  for (auto& s : atlas.simplices(0)) out.add(s, transport_form(atlas, w0, s[0]));
  return out;
}

// Closed Hom cochain from local contraction operators, and closed tensor cochain lifting a form.
inline HomCochain closed_hom(const Atlas& atlas, const PolyvectorCochain& v, const TwistingCochain& a) {
  HomCochain f0;
  for (auto& [s, p] : v.values)
    if (s.size() == 1) f0.add(s, contraction_operator(p, atlas.dimension()));
  return lift_hom(atlas, f0, a);
}
inline TensorCochain closed_tensor(const Atlas& atlas, const FormCochain& w, const TwistingCochain& a,
                                   const DualTwistingCochain& ac) {
  TensorCochain c0;
  int n = atlas.dimension();
  for (auto& [s, form] : w.values) {
    if (s.size() != 1) continue;
    TensorElement t(s[0], s[0]);
    for (auto& [m, g] : form.terms) t += local_tensor_class(n, m, g, s[0]);
    c0.add(s, t);
  }
  return lift_tensor(atlas, c0, a, ac);
}

namespace detail {

inline bool nerve_is_full_simplex(const Atlas& atlas) {
  std::size_t k = atlas.charts.size();
  return k < 20 && atlas.nerve.size() == (std::size_t(1) << k) - 1;
}

// On a full-simplex nerve the form-valued complex has no Cech cohomology above degree 0, so two cochains
// are cohomologous iff their difference is closed and vanishes in Cech degree 0.
inline std::optional<bool> same_class(const Atlas& atlas, const FormCochain& x, const FormCochain& y) {
  if (!nerve_is_full_simplex(atlas)) return std::nullopt;
  FormCochain d = x - y;
  return delta_full(atlas, d).is_zero() && d.of_degree(0).is_zero();
}

inline PolyvectorField random_polyvector(Rng& rng, int n, int q, int chart) {
  PolyvectorField v(chart);
  for (int t = 0; t < 2; ++t) v.add(rng.mask_of_grade(n, q), CoeffFunction(n, rng.polynomial(n, 2, 2, true, false)));
  return v;
}
inline Form random_form(Rng& rng, int n, int s, int chart) {
  Form w(chart);
  for (int t = 0; t < 2; ++t) w.add(rng.mask_of_grade(n, s), CoeffFunction(n, rng.polynomial(n, 2, 2, true, false)));
  return w;
}

}  // namespace detail

// Action against contraction: extract(f.c) against iota_{R f} extract(c) on constructed closed representatives.
inline Report check_action_contraction(const Atlas& atlas, int cases, std::uint64_t seed) {
  Report rep{"action versus contraction", {}};
  auto a = build_twist(atlas);
  auto ac = build_twist_dual(atlas);
  rep.add("twist verified", verify_twist(a, atlas).pass() && verify_twist_dual(ac, atlas).pass());
  Rng rng(seed);
  int n = atlas.dimension();
  for (int t = 0; t < cases; ++t) {
    int s = static_cast<int>(rng.uniform(0, n));
    int q = static_cast<int>(rng.uniform(0, s));
    auto v = global_polyvector(atlas, detail::random_polyvector(rng, n, q, 0));
    auto w = global_form(atlas, detail::random_form(rng, n, s, 0));
    HomCochain f = closed_hom(atlas, v, a);
    TensorCochain c = closed_tensor(atlas, w, a, ac);
    json d = json::object();
    d["polyvector_degree"] = q;
    d["form_degree"] = s;
    bool closed = D_aa(atlas, f, a).is_zero() && D_a_acheck(atlas, c, a, ac).is_zero();
    if (!closed) {
      d["error"] = "constructed representative is not closed";
      rep.add("case " + std::to_string(t), false, d);
      continue;
    }
    FormCochain lhs = extract_class(atlas, action(atlas, f, c), a, ac);
    FormCochain rhs = contract_cochain(atlas, R_map(atlas, f), extract_class(atlas, c, a, ac));
    bool cochain_level = lhs == rhs;
    std::optional<bool> cls = cochain_level ? std::optional<bool>(true) : detail::same_class(atlas, lhs, rhs);
    bool ok = cls.value_or(false);
    d["level"] = cochain_level ? "cochain" : (ok ? "class" : "none");
    if (!cls) d["error"] = "class comparison needs a full-simplex nerve";
    if (!ok) {
      json bad = json::array();
      for (auto& [sx, val] : (lhs - rhs).values) bad.push_back(json{{"simplex", atlas.simplex_name(sx)}, {"difference", to_string(val)}});
      d["witness"] = bad;
    }
    rep.add("case " + std::to_string(t), ok, d);
  }
  return rep;
}

// Phi on each simplex value followed by restriction to the diagonal.
inline FormCochain psi_tilde_hh(const Atlas& atlas, const CechCochain<BarTensor>& b) {
  FormCochain out;
  for (auto& [s, v] : b.values) {
    if (!atlas.charts[s.front()].is_diagonal()) throw std::invalid_argument("psi_tilde_hh needs diagonal charts");
    BarTensor x = v;
    x.chart = s.front();
    Form w = phi_tilde(x);
    w.chart = s.front();
    out.add(s, w);
  }
  return out;
}

}  // namespace tkoszul
