#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cech.hpp"
#include "twist.hpp"

namespace tkoszul {

struct WeightNotPreserved : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ComplexKind { K, Kcheck, Hom, Tensor };

inline std::string to_string(ComplexKind k) {
  switch (k) {
    case ComplexKind::K: return "K";
    case ComplexKind::Kcheck: return "Kcheck";
    case ComplexKind::Hom: return "hom";
    case ComplexKind::Tensor: return "tensor";
  }
  return "?";
}

inline ComplexKind parse_complex_kind(const std::string& s) {
  if (s == "K" || s == "k") return ComplexKind::K;
  if (s == "Kcheck" || s == "kcheck") return ComplexKind::Kcheck;
  if (s == "hom" || s == "Hom") return ComplexKind::Hom;
  if (s == "tensor" || s == "Tensor") return ComplexKind::Tensor;
  throw std::invalid_argument("unknown complex kind '" + s + "'");
}

// Conserved weights: deg f + |I| (K), deg f - |J| (K-check), deg f + |I| - |J| (Hom), deg f + |I| + |J| (Tensor).
inline int weight_shift(ComplexKind k, Mask i, Mask j) {
  switch (k) {
    case ComplexKind::K: return grade(i);
    case ComplexKind::Kcheck: return -grade(j);
    case ComplexKind::Hom: return grade(i) - grade(j);
    case ComplexKind::Tensor: return grade(i) + grade(j);
  }
  return 0;
}
inline int value_degree(ComplexKind k, Mask i, Mask j) {
  switch (k) {
    case ComplexKind::K: return -grade(i);
    case ComplexKind::Kcheck: return grade(j);
    case ComplexKind::Hom: return grade(j) - grade(i);
    case ComplexKind::Tensor: return -grade(i) - grade(j);
  }
  return 0;
}

struct BasisEntry {
  Simplex simplex;
  Monomial mono{};
  Mask i = 0;
  Mask j = 0;
  int degree = 0;  // Cech degree + value degree
  auto key() const { return std::tie(simplex, mono, i, j); }
  friend bool operator<(const BasisEntry& a, const BasisEntry& b) { return a.key() < b.key(); }
};

struct WeightBasis {
  ComplexKind kind = ComplexKind::Hom;
  int n = 1;
  int weight = 0;
  std::vector<BasisEntry> entries;

  std::vector<BasisEntry> of_degree(int q) const {
    std::vector<BasisEntry> r;
    for (auto& e : entries)
      if (e.degree == q) r.push_back(e);
    return r;
  }
  std::pair<int, int> degree_range() const {
    if (entries.empty()) return {0, -1};
    int lo = entries.front().degree, hi = lo;
    for (auto& e : entries) {
      lo = std::min(lo, e.degree);
      hi = std::max(hi, e.degree);
    }
    return {lo, hi};
  }
};

// Monomials of exact degree d in z1..zn, zeta1..zetan.
inline std::vector<Monomial> monomials_of_degree(int n, int d) {
  std::vector<Monomial> out;
  if (d < 0) return out;
  std::vector<int> vars;
  for (int i = 0; i < n; ++i) vars.push_back(z_var(i));
  for (int i = 0; i < n; ++i) vars.push_back(zeta_var(i));
  Monomial m{};
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
    if (k + 1 == vars.size()) {
      m[vars[k]] = static_cast<std::uint8_t>(left);
      out.push_back(m);
      m[vars[k]] = 0;
      return;
    }
    for (int e = left; e >= 0; --e) {
      m[vars[k]] = static_cast<std::uint8_t>(e);
      rec(k + 1, left - e);
    }
    m[vars[k]] = 0;
  };
  rec(0, d);
  return out;
}

// Every basis monomial f e^I (x) e-check^J of the weight-w component on every nerve simplex.
inline WeightBasis enumerate_basis(ComplexKind kind, const Atlas& atlas, int w) {
  WeightBasis b{kind, atlas.dimension(), w, {}};
  int n = atlas.dimension();
  bool uses_i = kind != ComplexKind::Kcheck, uses_j = kind != ComplexKind::K;
  for (auto& s : atlas.nerve) {
    for (Mask i = 0; i <= (uses_i ? full_mask(n) : 0); ++i)
      for (Mask j = 0; j <= (uses_j ? full_mask(n) : 0); ++j) {
        int d = w - weight_shift(kind, i, j);
        for (auto& m : monomials_of_degree(n, d))
          b.entries.push_back(BasisEntry{s, m, i, j, static_cast<int>(s.size()) - 1 + value_degree(kind, i, j)});
      }
  }
  return b;
}

// Sparse exact matrix stored by columns.
struct ExactMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::map<int, Rat>> columns;

  Rat at(int r, int c) const {
    auto it = columns[c].find(r);
    return it == columns[c].end() ? Rat(0) : it->second;
  }
  bool is_zero() const {
    for (auto& c : columns)
      if (!c.empty()) return false;
    return true;
  }
  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matrix size mismatch");
    ExactMatrix r{a.rows, b.cols, std::vector<std::map<int, Rat>>(b.cols)};
    for (int c = 0; c < b.cols; ++c)
      for (auto& [k, x] : b.columns[c])
        for (auto& [row, y] : a.columns[k]) {
          Rat& e = r.columns[c][row];
          e += x * y;
          if (e == 0) r.columns[c].erase(row);
        }
    return r;
  }
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.columns == b.columns;
  }
};

// Rank by fraction-free sparse elimination: denominators cleared per vector, then integer row operations
// p*v - a*pivot with content removal.
inline int rank(const ExactMatrix& m) {
  using Row = std::map<int, mpz_class>;
  std::map<int, Row> pivots;
  for (auto& col : m.columns) {
    if (col.empty()) continue;
    mpz_class den = 1;
    for (auto& [r, x] : col) den = lcm(den, x.get_den());
    Row v;
    for (auto& [r, x] : col) v[r] = x.get_num() * (den / x.get_den());
    while (!v.empty()) {
      auto lead = v.begin();
      auto pv = pivots.find(lead->first);
      if (pv == pivots.end()) break;
      mpz_class a = lead->second, p = pv->second.begin()->second;
      mpz_class g = gcd(a, p);
      mpz_class fa = p / g, fp = a / g;
      Row next;
      for (auto& [k, x] : v) next[k] = x * fa;
      for (auto& [k, x] : pv->second) {
        mpz_class& e = next[k];
        e -= x * fp;
      }
      std::erase_if(next, [](auto& kv) { return kv.second == 0; });
      mpz_class content = 0;
      for (auto& [k, x] : next) content = gcd(content, x);
      if (content > 1)
        for (auto& [k, x] : next) x /= content;
      v = std::move(next);
    }
    if (!v.empty()) pivots.emplace(v.begin()->first, std::move(v));
  }
  return static_cast<int>(pivots.size());
}

enum class NamedOperator { d_K, d_Kcheck, d_Hom, d_tensor, D_a, D_aa, D_a_acheck };

inline std::string to_string(NamedOperator op) {
  switch (op) {
    case NamedOperator::d_K: return "d_K";
    case NamedOperator::d_Kcheck: return "d_Kcheck";
    case NamedOperator::d_Hom: return "d_Hom";
    case NamedOperator::d_tensor: return "d_tensor";
    case NamedOperator::D_a: return "D_a";
    case NamedOperator::D_aa: return "D_aa";
    case NamedOperator::D_a_acheck: return "D_a_acheck";
  }
  return "?";
}

inline ComplexKind operator_kind(NamedOperator op) {
  switch (op) {
    case NamedOperator::d_K:
    case NamedOperator::D_a: return ComplexKind::K;
    case NamedOperator::d_Kcheck: return ComplexKind::Kcheck;
    case NamedOperator::d_Hom:
    case NamedOperator::D_aa: return ComplexKind::Hom;
    case NamedOperator::d_tensor:
    case NamedOperator::D_a_acheck: return ComplexKind::Tensor;
  }
  return ComplexKind::Hom;
}

// Operator context: atlas and its twists, built once.
class OperatorContext {
 public:
  explicit OperatorContext(const Atlas& atlas) : atlas_(atlas), a_(build_twist(atlas)), ac_(build_twist_dual(atlas)) {}

  const Atlas& atlas() const { return atlas_; }

  // Image of one basis monomial, as (entry, coefficient) pairs.
  std::vector<std::pair<BasisEntry, Rat>> image(NamedOperator op, const BasisEntry& e) const {
    int n = atlas_.dimension();
    CoeffFunction c(n, Polynomial::term(e.mono, 1));
    const Simplex& s = e.simplex;
    std::vector<std::pair<BasisEntry, Rat>> out;
    auto emit_terms = [&](const Simplex& sx, Mask i, Mask j, const CoeffFunction& f) {
      if (!f.is_polynomial()) throw WeightNotPreserved("operator output has denominators");
      for (auto& [m, k] : f.numerator().terms()) out.push_back({BasisEntry{sx, m, i, j, 0}, k});
    };
    auto local = [&]() {
      if (s.size() != 1) throw std::invalid_argument(to_string(op) + " acts on single-chart values only");
      return Link::local(atlas_.charts[s[0]], s[0]);
    };
    switch (op) {
      case NamedOperator::d_K:
        for (auto& [m, f] : koszul_diff(KoszulElement::basis(e.i, c, s[0]), local().s_target).terms) emit_terms(s, m, 0, f);
        break;
      case NamedOperator::d_Kcheck:
        for (auto& [m, f] : dual_koszul_diff(DualKoszulElement::basis(e.j, c, s[0]), local().s_target).terms)
          emit_terms(s, 0, m, f);
        break;
      case NamedOperator::d_Hom:
        for (auto& [k, f] : hom_diff(HomElement::basis(e.i, e.j, c, s[0], s[0]), local()).terms)
          emit_terms(s, k.first, k.second, f);
        break;
      case NamedOperator::d_tensor:
        for (auto& [k, f] : tensor_diff(TensorElement::basis(e.i, e.j, c, s[0], s[0]), local()).terms)
          emit_terms(s, k.first, k.second, f);
        break;
      case NamedOperator::D_a: {
        KCochain x;
        x.add(s, KoszulElement::basis(e.i, c, s.front()));
        for (auto& [sx, v] : D_a(atlas_, x, a_).values)
          for (auto& [m, f] : v.terms) emit_terms(sx, m, 0, f);
        break;
      }
      case NamedOperator::D_aa: {
        HomCochain x;
        x.add(s, HomElement::basis(e.i, e.j, c, s.front(), s.back()));
        for (auto& [sx, v] : D_aa(atlas_, x, a_).values)
          for (auto& [k, f] : v.terms) emit_terms(sx, k.first, k.second, f);
        break;
      }
      case NamedOperator::D_a_acheck: {
        TensorCochain x;
        x.add(s, TensorElement::basis(e.i, e.j, c, s.front(), s.back()));
        for (auto& [sx, v] : D_a_acheck(atlas_, x, a_, ac_).values)
          for (auto& [k, f] : v.terms) emit_terms(sx, k.first, k.second, f);
        break;
      }
    }
    return out;
  }

 private:
  const Atlas& atlas_;
  TwistingCochain a_;
  DualTwistingCochain ac_;
};

inline ExactMatrix operator_matrix(const OperatorContext& ctx, NamedOperator op, const std::vector<BasisEntry>& in,
                                   const std::vector<BasisEntry>& out) {
  std::map<BasisEntry, int> index;
  for (std::size_t k = 0; k < out.size(); ++k) index.emplace(out[k], static_cast<int>(k));
  ExactMatrix m{static_cast<int>(out.size()), static_cast<int>(in.size()), std::vector<std::map<int, Rat>>(in.size())};
  for (std::size_t c = 0; c < in.size(); ++c)
    for (auto& [e, k] : ctx.image(op, in[c])) {
      auto it = index.find(e);
      if (it == index.end())
        throw WeightNotPreserved(to_string(op) + " leaves the weight component on " + ctx.atlas().simplex_name(e.simplex));
      Rat& x = m.columns[c][it->second];
      x += k;
      if (x == 0) m.columns[c].erase(it->second);
    }
  return m;
}

struct CohomologyRow {
  int weight = 0;
  std::map<int, int> dims;  // degree -> dimension (nonzero only)
};

inline NamedOperator default_operator(ComplexKind k) {
  switch (k) {
    case ComplexKind::K: return NamedOperator::D_a;
    case ComplexKind::Kcheck: return NamedOperator::d_Kcheck;
    case ComplexKind::Hom: return NamedOperator::D_aa;
    case ComplexKind::Tensor: return NamedOperator::D_a_acheck;
  }
  return NamedOperator::D_aa;
}

// dim ker - rank per total degree of the weight-w component.
inline CohomologyRow cohomology_dims(const OperatorContext& ctx, ComplexKind kind, int w) {
  NamedOperator op = default_operator(kind);
  WeightBasis b = enumerate_basis(kind, ctx.atlas(), w);
  CohomologyRow row{w, {}};
  auto [lo, hi] = b.degree_range();
  std::map<int, int> rk;
  std::map<int, int> size;
  for (int q = lo; q <= hi; ++q) {
    auto in = b.of_degree(q);
    size[q] = static_cast<int>(in.size());
    rk[q] = in.empty() ? 0 : rank(operator_matrix(ctx, op, in, b.of_degree(q + 1)));
  }
  for (int q = lo; q <= hi; ++q) {
    int d = size[q] - rk[q] - (rk.count(q - 1) ? rk[q - 1] : 0);
    if (d) row.dims[q] = d;
  }
  return row;
}

inline std::vector<CohomologyRow> cohomology_table(const Atlas& atlas, ComplexKind kind, int w_lo, int w_hi) {
  OperatorContext ctx(atlas);
  std::vector<CohomologyRow> rows;
  for (int w = w_lo; w <= w_hi; ++w) rows.push_back(cohomology_dims(ctx, kind, w));
  return rows;
}

}  // namespace tkoszul
