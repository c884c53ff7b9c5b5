#pragma once

#include <stdexcept>

#include "koszul.hpp"

namespace tkoszul {

namespace detail {

// Homotopy on one term f b^I of side S: P (chain) or P-check (cochain).
template <Side S, class Emit>
void homotopy_term(Mask m, const CoeffFunction& f, ChartKind kind, int n, Emit&& emit) {
  if (kind == ChartKind::offdiagonal) {
    // wedge by e^1 on K, contraction by e_1 on K-check
    if constexpr (S == Side::chain) {
      if (!(m & bit(1))) emit(m | bit(1), f);
    } else {
      if (m & bit(1)) emit(m & ~bit(1), f);
    }
    return;
  }
  int weight = S == Side::chain ? grade(m) : n - grade(m);
  for (int j = 1; j <= n; ++j) {
    bool has = m & bit(j);
    if (S == Side::chain ? has : !has) continue;
    CoeffFunction g = segment_integral(f.partial(z_var(j - 1)), weight);
    if (g.is_zero()) continue;
    Mask out = S == Side::chain ? (m | bit(j)) : (m & ~bit(j));
    emit(out, below(m, j) % 2 ? -g : g);
  }
}

// Residue projection on one term: grade 0 for K, top grade for K-check; f |-> f(zeta, zeta).
template <Side S>
CoeffFunction residue_term(Mask m, const CoeffFunction& f, ChartKind kind, int n) {
  if (kind == ChartKind::offdiagonal) return CoeffFunction();
  Mask keep = S == Side::chain ? Mask(0) : full_mask(n);
  if (m != keep) return CoeffFunction();
  return f.zeta_pullback();
}

}  // namespace detail

template <Side S>
Ext<S> homotopy(const Ext<S>& x, ChartKind kind, int n) {
  Ext<S> r = x.like();
  for (auto& [m, c] : x.terms) detail::homotopy_term<S>(m, c, kind, n, [&](Mask out, const CoeffFunction& g) { r.add(out, g); });
  return r;
}

template <Side S>
Ext<S> residue(const Ext<S>& x, ChartKind kind, int n) {
  Ext<S> r = x.like();
  for (auto& [m, c] : x.terms) r.add(m, detail::residue_term<S>(m, c, kind, n));
  return r;
}

inline KoszulElement P(const KoszulElement& x, const Chart& c) { return homotopy(x, c.kind, c.n); }
inline DualKoszulElement P_check(const DualKoszulElement& x, const Chart& c) { return homotopy(x, c.kind, c.n); }
inline KoszulElement res(const KoszulElement& x, const Chart& c) { return residue(x, c.kind, c.n); }
inline DualKoszulElement res_check(const DualKoszulElement& x, const Chart& c) { return residue(x, c.kind, c.n); }

// Homotopy applied to the first factor (target chart rule).
template <Side A, Side B>
Bi<A, B> first_factor_homotopy(const Bi<A, B>& f, const Link& l) {
  Bi<A, B> r = f.like();
  for (auto& [k, c] : f.terms)
    detail::homotopy_term<A>(k.first, c, l.target_kind, l.n, [&](Mask out, const CoeffFunction& g) { r.add(out, k.second, g); });
  return r;
}

template <Side A, Side B>
Bi<A, B> first_factor_residue(const Bi<A, B>& f, const Link& l) {
  Bi<A, B> r = f.like();
  for (auto& [k, c] : f.terms) r.add(k.first, k.second, detail::residue_term<A>(k.first, c, l.target_kind, l.n));
  return r;
}

// P_H f = sum_i (-1)^i P (d2 P)^i f with d2 the source-side part of the differential.
template <Side A, Side B>
Bi<A, B> P_H(const Bi<A, B>& f, const Link& l) {
  Bi<A, B> y = first_factor_homotopy(f, l);
  Bi<A, B> acc = y;
  for (int i = 1; !y.is_zero(); ++i) {
    if (i > l.n + 1) throw std::logic_error("P_H series did not terminate within n+1 terms");
    y = first_factor_homotopy(second_factor_d(y, l.s_source), l);
    if (i % 2) acc -= y;
    else acc += y;
  }
  return acc;
}

// r f = sum_i (-1)^i (P d2)^i res f
template <Side A, Side B>
Bi<A, B> r_op(const Bi<A, B>& f, const Link& l) {
  Bi<A, B> y = first_factor_residue(f, l);
  Bi<A, B> acc = y;
  for (int i = 1; !y.is_zero(); ++i) {
    if (i > l.n + 1) throw std::logic_error("r series did not terminate within n+1 terms");
    y = first_factor_homotopy(second_factor_d(y, l.s_source), l);
    if (i % 2) acc -= y;
    else acc += y;
  }
  return acc;
}

}  // namespace tkoszul
