#pragma once

#include <cstdint>
#include <random>

#include "koszul.hpp"

namespace tkoszul {

// Seeded generator with its own integer distribution so streams match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform integer in [lo, hi].
  long uniform(long lo, long hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do x = gen_();
    while (x >= limit);
    return lo + static_cast<long>(x % span);
  }
  bool coin() { return uniform(0, 1) == 1; }

  Rat rational(long max_num = 5, long max_den = 3) {
    long p = uniform(-max_num, max_num);
    if (p == 0) p = 1;
    return frac(p, uniform(1, max_den));
  }

  Monomial monomial(int n, int max_deg, bool z = true, bool zeta = true) {
    Monomial m{};
    int d = static_cast<int>(uniform(0, max_deg));
    for (int k = 0; k < d; ++k) {
      int v = static_cast<int>(uniform(0, n - 1));
      bool use_zeta = zeta && (!z || coin());
      ++m[use_zeta ? zeta_var(v) : z_var(v)];
    }
    return m;
  }

  Polynomial polynomial(int n, int max_deg, int max_terms = 3, bool z = true, bool zeta = true) {
    Polynomial p;
    int t = static_cast<int>(uniform(1, max_terms));
    for (int k = 0; k < t; ++k) p.add_term(monomial(n, max_deg, z, zeta), rational());
    return p;
  }

  CoeffFunction coeff(int n, int max_deg, int max_terms = 3) { return CoeffFunction(n, polynomial(n, max_deg, max_terms)); }

  Mask mask(int n) { return static_cast<Mask>(uniform(0, static_cast<long>(full_mask(n)))); }
  Mask mask_of_grade(int n, int g) {
    while (true) {
      Mask m = mask(n);
      if (grade(m) == g) return m;
    }
  }

  template <Side S>
  Ext<S> ext(int n, int max_deg, int max_terms = 3, int chart = -1) {
    Ext<S> x(chart);
    int t = static_cast<int>(uniform(1, max_terms));
    for (int k = 0; k < t; ++k) x.add(mask(n), coeff(n, max_deg, 2));
    return x;
  }

  template <Side A, Side B>
  Bi<A, B> bi(int n, int max_deg, int max_terms = 3, int target = -1, int source = -1) {
    Bi<A, B> x(target, source);
    int t = static_cast<int>(uniform(1, max_terms));
    for (int k = 0; k < t; ++k) x.add(mask(n), mask(n), coeff(n, max_deg, 2));
    return x;
  }

  // Element whose terms all have degree q.
  template <Side A, Side B>
  Bi<A, B> bi_of_degree(int n, int q, int max_deg, int max_terms = 3, int target = -1, int source = -1) {
    Bi<A, B> x(target, source);
    int t = static_cast<int>(uniform(1, max_terms));
    for (int k = 0, tries = 0; k < t && tries < 1000; ++tries) {
      Mask i = mask(n), j = mask(n);
      if (Bi<A, B>::term_degree(i, j) != q) continue;
      x.add(i, j, coeff(n, max_deg, 2));
      ++k;
    }
    return x;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tkoszul
