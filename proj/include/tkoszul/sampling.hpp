#pragma once

#include <optional>

#include "cech.hpp"
#include "random.hpp"

namespace tkoszul {

struct SampleShape {
  int cech = -1;               // Cech degree, -1 for every simplex
  std::optional<int> degree;  // value degree, unset for mixed
  int max_deg = 2;
  int max_terms = 2;
};

namespace detail {

template <class V>
struct Sampler;

template <Side A, Side B>
struct Sampler<Bi<A, B>> {
  static Bi<A, B> draw(Rng& rng, int n, const Simplex& s, const SampleShape& sh) {
    if (sh.degree) return rng.bi_of_degree<A, B>(n, *sh.degree, sh.max_deg, sh.max_terms, s.front(), s.back());
    return rng.bi<A, B>(n, sh.max_deg, sh.max_terms, s.front(), s.back());
  }
};

template <Side S>
struct Sampler<Ext<S>> {
  static Ext<S> draw(Rng& rng, int n, const Simplex& s, const SampleShape& sh) {
    if (!sh.degree) return rng.ext<S>(n, sh.max_deg, sh.max_terms, s.front());
    int g = S == Side::chain ? -*sh.degree : *sh.degree;
    Ext<S> x(s.front());
    if (g < 0 || g > n) return x;
    int t = static_cast<int>(rng.uniform(1, sh.max_terms));
    for (int k = 0; k < t; ++k) x.add(rng.mask_of_grade(n, g), rng.coeff(n, sh.max_deg, 2));
    return x;
  }
};

}  // namespace detail

// Polynomial-coefficient cochain; each eligible simplex is filled with probability 3/4.
template <class V>
CechCochain<V> random_cochain(Rng& rng, const Atlas& atlas, const SampleShape& shape = {}) {
  CechCochain<V> c;
  for (auto& s : atlas.nerve) {
    if (shape.cech >= 0 && static_cast<int>(s.size()) != shape.cech + 1) continue;
    if (rng.uniform(0, 3) == 0) continue;
    c.add(s, detail::Sampler<V>::draw(rng, atlas.dimension(), s, shape));
  }
  return c;
}

}  // namespace tkoszul
