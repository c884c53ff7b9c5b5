#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "barhkr.hpp"
#include "fixtures.hpp"
#include "homotopy.hpp"
#include "jetcoh.hpp"
#include "report.hpp"
#include "sampling.hpp"
#include "tor.hpp"
#include "twist.hpp"

namespace tkoszul {

struct UnknownSuite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SuiteOptions {
  int cases = 50;
  int max_degree = 3;
  std::uint64_t seed = 1;
  std::optional<std::pair<int, int>> weights;
  std::optional<ComplexKind> kind;
  std::string mutation;
};

// One report line for a batch of randomized cases; keeps the first counterexample.
class Tally {
 public:
  explicit Tally(std::string name) : name_(std::move(name)) {}
  void record(bool ok, const std::function<json()>& witness) {
    ++cases_;
    if (ok) return;
    if (!failed_++) witness_ = witness();
  }
  void note(const std::string& key, json value) { extra_[key] = std::move(value); }
  void into(Report& r) const {
    json d = json::object();
    d["cases"] = cases_;
    for (auto& [k, v] : extra_.items()) d[k] = v;
    d["failures"] = failed_;
    if (failed_) d["witness"] = witness_;
    r.add(name_, failed_ == 0 && cases_ > 0, d);
  }

 private:
  std::string name_;
  int cases_ = 0;
  int failed_ = 0;
  json witness_;
  json extra_ = json::object();
};

template <class V>
json element_witness(const V& x, const std::string& where, std::optional<int> degree = {}) {
  json w = json::object();
  w["chart"] = where;
  if (degree) w["degree"] = *degree;
  w["element"] = to_string(x);
  return w;
}

namespace detail {

template <Side S>
Ext<S> homotopy_sample(Rng& rng, const Chart& c, int max_degree) {
  Ext<S> x = rng.ext<S>(c.n, max_degree, 4);
  if (!c.is_diagonal() && rng.coin()) x = c.ring.parse("1/(z1 - zeta1)") * x;
  return x;
}

}  // namespace detail

// Chain homotopies on K and K-check, and the Hom homotopy, on one chart.
inline void homotopy_chart_checks(Report& rep, const Chart& c, const SuiteOptions& opt, Rng& rng) {
  std::string at = c.id + " (n=" + std::to_string(c.n) + ")";
  bool diag = c.is_diagonal();
  Tally k(std::string(diag ? "d_K P + P d_K = 1 - res" : "d_K P + P d_K = 1") + " on " + at);
  Tally k_res("res vanishes outside degree 0 on " + at);
  Tally k_sq("P^2 = 0 on " + at);
  Tally kc(std::string(diag ? "d P-check + P-check d = 1 - res-check" : "d P-check + P-check d = 1") + " on " + at);
  Tally kc_sq("P-check^2 = 0 on " + at);
  for (int t = 0; t < opt.cases; ++t) {
    auto x = detail::homotopy_sample<Side::chain>(rng, c, opt.max_degree);
    auto rx = res(x, c);
    k.record(koszul_diff(P(x, c), c) + P(koszul_diff(x, c), c) == x - rx, [&] { return element_witness(x, c.id); });
    k_res.record(rx.grade_part(0) == rx, [&] { return element_witness(x, c.id); });
    k_sq.record(P(P(x, c), c).is_zero(), [&] { return element_witness(x, c.id); });
    auto y = detail::homotopy_sample<Side::cochain>(rng, c, opt.max_degree);
    kc.record(dual_koszul_diff(P_check(y, c), c) + P_check(dual_koszul_diff(y, c), c) == y - res_check(y, c),
              [&] { return element_witness(y, c.id); });
    kc_sq.record(P_check(P_check(y, c), c).is_zero(), [&] { return element_witness(y, c.id); });
  }
  for (auto* tl : {&k, &k_res, &k_sq, &kc, &kc_sq}) tl->into(rep);
}

inline void hom_homotopy_checks(Report& rep, const Chart& c, const SuiteOptions& opt, Rng& rng) {
  Link l = Link::local(c);
  Tally h("d_Hom P_H + P_H d_Hom = 1 - r on " + c.id + " (n=" + std::to_string(c.n) + ")");
  Tally sq("P_H^2 = 0 on " + c.id);
  for (int t = 0; t < opt.cases; ++t) {
    auto f = rng.bi<Side::chain, Side::cochain>(c.n, std::min(opt.max_degree, 3), 4);
    h.record(hom_diff(P_H(f, l), l) + P_H(hom_diff(f, l), l) == f - r_op(f, l), [&] { return element_witness(f, c.id); });
    sq.record(P_H(P_H(f, l), l).is_zero(), [&] { return element_witness(f, c.id); });
  }
  h.into(rep);
  sq.into(rep);
}

inline Report homotopy_suite(const Atlas& atlas, const SuiteOptions& opt) {
  Report rep{"homotopy", {}};
  Rng rng(opt.seed);
  for (auto& c : atlas.charts) {
    homotopy_chart_checks(rep, c, opt, rng);
    if (c.is_diagonal()) hom_homotopy_checks(rep, c, opt, rng);
  }
  return rep;
}

inline TwistingCochain suite_twist(const Atlas& atlas, const SuiteOptions& opt) {
  if (opt.mutation.empty()) return build_twist(atlas);
  for (auto& m : shipped_mutations())
    if (m.name == opt.mutation) {
      if (m.fixture != atlas.id) throw std::invalid_argument("mutation '" + m.name + "' applies to fixture " + m.fixture);
      return mutated_twist(m, atlas);
    }
  throw std::invalid_argument("unknown mutation '" + opt.mutation + "'");
}

// Which bidegrees a^{p,1-p} the twist carries on each simplex.
inline json twist_components(const Atlas& atlas, const TwistingCochain& a) {
  json out = json::array();
  for (auto& [s, v] : a.values) {
    if (v.is_zero()) continue;
    int p = static_cast<int>(s.size()) - 1;
    out.push_back(json{{"simplex", atlas.simplex_name(s)}, {"bidegree", json::array({p, 1 - p})},
                       {"element", to_string(v)}});
  }
  return out;
}

inline Report twist_suite(const Atlas& atlas, const SuiteOptions& opt) {
  Report rep{"twist", {}};
  TwistingCochain a = suite_twist(atlas, opt);
  rep.merge(verify_twist(a, atlas), "twist");
  if (opt.mutation.empty()) rep.merge(verify_twist_dual(build_twist_dual(atlas), atlas), "dual twist");
  bool diagonal_charts = true;
  for (auto& c : atlas.charts) diagonal_charts = diagonal_charts && c.is_diagonal();
  if (diagonal_charts) rep.merge(restrict_twist_diagonal(a, atlas), "diagonal");
  int top = 0;
  for (auto& [s, v] : a.values)
    if (!v.is_zero()) top = std::max(top, static_cast<int>(s.size()) - 1);
  rep.add("twist components", true, json{{"highest_cech_degree", top}, {"components", twist_components(atlas, a)}});
  return rep;
}

namespace detail {

inline PolyvectorCochain random_polyvector_cochain(Rng& rng, const Atlas& at) {
  PolyvectorCochain v;
  int n = at.dimension();
  for (auto& s : at.nerve) {
    if (!rng.coin()) continue;
    PolyvectorField p(s.back());
    p.coords = s.front() == s.back() ? -1 : s.front();
    for (int k = 0; k < 2; ++k) p.add(rng.mask(n), CoeffFunction(n, rng.polynomial(n, 2, 2, true, false)));
    v.add(s, p);
  }
  return v;
}

}  // namespace detail

// Bar-complex comparison maps in dimension n (single chart).
inline void phi_checks(Report& rep, int n, const SuiteOptions& opt, Rng& rng) {
  Section s = section(Chart::diagonal("u", n));
  std::string dim = " (n=" + std::to_string(n) + ")";
  for (int q = 0; q <= n + 1; ++q) {
    std::string deg = dim.substr(0, dim.size() - 1) + ", q=" + std::to_string(q) + ")";
    Tally chain("Phi is a chain map" + deg), closed("Phi-tilde closed form" + deg), vanish("Phi vanishes above n" + deg);
    for (int t = 0; t < opt.cases; ++t) {
      auto b = random_bar_tensor(rng, n, q, opt.max_degree);
      auto w = [&] { return json{{"bar_tensor", to_string(b)}}; };
      if (q >= 1) chain.record(koszul_diff(phi(b), s) == phi(bar_diff(b)), w);
      closed.record(phi_tilde(b) == phi_tilde_closed(b), w);
      if (q > n) vanish.record(phi(b).is_zero(), w);
    }
    if (q >= 1) chain.into(rep);
    closed.into(rep);
    if (q > n) vanish.into(rep);
  }
}

inline void shuffle_checks(Report& rep, int n, const SuiteOptions& opt, Rng& rng) {
  Tally sh("Phi-tilde(x # y) = Phi-tilde(x) ^ Phi-tilde(y) (n=" + std::to_string(n) + ")");
  for (int t = 0; t < opt.cases; ++t) {
    int p = static_cast<int>(rng.uniform(0, n)), q = static_cast<int>(rng.uniform(0, n - p));
    auto x = random_bar_tensor(rng, n, p, std::min(opt.max_degree, 2));
    auto y = random_bar_tensor(rng, n, q, std::min(opt.max_degree, 2));
    sh.record(phi_tilde(shuffle(x, y)) == wedge(phi_tilde(x), phi_tilde(y)),
              [&] { return json{{"x", to_string(x)}, {"y", to_string(y)}}; });
  }
  sh.into(rep);
}

// Psi(f) = HKR(R f) evaluated on every tensor of the monomial test basis.
inline void diagram_checks(Report& rep, int n, const SuiteOptions& opt, Rng& rng, int per_degree = 3) {
  for (int q = 0; q <= n; ++q) {
    Tally d("Psi(f) = HKR(R f) on the monomial basis (n=" + std::to_string(n) + ", q=" + std::to_string(q) +
            ", degree <= " + std::to_string(opt.max_degree) + ")");
    auto basis = monomial_test_basis(n, q, opt.max_degree, true);
    d.note("basis_tensors", basis.size());
    for (int t = 0; t < per_degree; ++t) {
      HomElement f = rng.bi_of_degree<Side::chain, Side::cochain>(n, q, 2, 3);
      auto lhs = HochschildCochain::pullback(f, q);
      auto rhs = HochschildCochain::from_polyvector(R_element(f), q);
      bool ok = true;
      json w;
      for (auto& b : basis)
        if (lhs(b) != rhs(b)) {
          ok = false;
          w = json{{"hom_element", to_string(f)}, {"bar_tensor", to_string(b)}, {"psi", lhs(b).to_string()},
                   {"hkr", rhs(b).to_string()}};
          break;
        }
      d.record(ok, [&] { return w; });
    }
    d.into(rep);
  }
}

// R is a chain map into polyvector cochains and preserves cup products (contraction-type cochains).
inline void r_checks(Report& rep, const Atlas& at, const SuiteOptions& opt, Rng& rng) {
  auto a = build_twist(at);
  Tally chain("R o D_aa = delta o R on " + at.id), cup_t("R(f.g) = R(f).R(g) on " + at.id);
  for (int t = 0; t < opt.cases; ++t) {
    auto h = random_cochain<HomElement>(rng, at);
    chain.record(R_map(at, D_aa(at, h, a)) == delta_full(at, R_map(at, h)), [&] { return json{{"cochain_values", static_cast<int>(h.values.size())}}; });
    auto v = detail::random_polyvector_cochain(rng, at), w = detail::random_polyvector_cochain(rng, at);
    auto F = contraction_cochain(at, v), G = contraction_cochain(at, w);
    cup_t.record(R_map(at, cup(at, F, G)) == polyvector_cup(at, R_map(at, F), R_map(at, G)), [&] {
      json j = json::array();
      for (auto& [s, x] : v.values) j.push_back(json{{"simplex", at.simplex_name(s)}, {"v", to_string(x)}});
      for (auto& [s, x] : w.values) j.push_back(json{{"simplex", at.simplex_name(s)}, {"w", to_string(x)}});
      return j;
    });
  }
  chain.into(rep);
  cup_t.into(rep);
}

inline Report hkr_suite(const Atlas& atlas, const SuiteOptions& opt) {
  Report rep{"hkr", {}};
  Rng rng(opt.seed);
  int n = atlas.dimension();
  phi_checks(rep, n, opt, rng);
  shuffle_checks(rep, n, opt, rng);
  diagram_checks(rep, n, opt, rng);
  r_checks(rep, atlas, opt, rng);
  return rep;
}

// Leibniz for D_{a,a-check}, associativity of the action, and the contraction correspondence.
inline Report tor_suite(const Atlas& at, const SuiteOptions& opt) {
  Report rep{"tor", {}};
  Rng rng(opt.seed);
  auto a = build_twist(at);
  auto ac = build_twist_dual(at);
  int n = at.dimension();
  Tally assoc("(f.g).c = f.(g.c) on " + at.id), leib("D(f.c) = Df.c +- f.Dc on " + at.id);
  for (int t = 0; t < opt.cases; ++t) {
    auto f = random_cochain<HomElement>(rng, at);
    auto g = random_cochain<HomElement>(rng, at);
    auto c = random_cochain<TensorElement>(rng, at);
    assoc.record(action(at, cup(at, f, g), c) == action(at, f, action(at, g, c)), [] { return json::object(); });
    int p = static_cast<int>(rng.uniform(0, std::min(1, at.nerve_dimension())));
    int q = static_cast<int>(rng.uniform(-n, n));
    auto h = random_cochain<HomElement>(rng, at, SampleShape{p, q});
    auto lhs = D_a_acheck(at, action(at, h, c), a, ac);
    auto rhs = action(at, D_aa(at, h, a), c);
    auto tail = action(at, h, D_a_acheck(at, c, a, ac));
    leib.record(lhs == ((p + q) % 2 ? rhs - tail : rhs + tail), [&] { return json{{"cech_degree", p}, {"degree", q}}; });
  }
  assoc.into(rep);
  leib.into(rep);
  rep.merge(check_action_contraction(at, opt.cases, opt.seed + 1), "contraction");
  if (at.id == "line") {
    HomCochain f;
    f.add({0}, HomElement::basis(0, bit(1), CoeffFunction::constant(1, 1), 0, 0));
    TensorCochain c;
    TensorElement e(0, 0);
    e.add(bit(1), 0, CoeffFunction::constant(1, 1));
    e.add(0, bit(1), CoeffFunction::constant(1, -1));
    c.add({0}, e);
    auto lhs = extract_class(at, action(at, f, c), a, ac);
    auto rhs = contract_cochain(at, R_map(at, f), extract_class(at, c, a, ac));
    FormCochain one;
    one.add({0}, Form::basis(0, CoeffFunction::constant(1, 1), 0));
    rep.add("worked case f = 1(x)ech^1, c = e(x)1 - 1(x)e", lhs == one && rhs == one,
            json{{"lhs", to_string(*lhs.at({0}))}, {"rhs", rhs.at({0}) ? to_string(*rhs.at({0})) : "0"}});
  }
  return rep;
}

inline long count_monomials(long vars, long degree) {
  if (degree < 0) return 0;
  long r = 1;
  for (long i = 1; i < vars; ++i) r = r * (degree + i) / i;
  return r;
}
inline long choose(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Lambda^q T counts for Hom, Omega^i counts for the tensor complex.
inline std::map<int, int> expected_dims(ComplexKind kind, int n, int w) {
  std::map<int, int> r;
  for (int q = 0; q <= n; ++q) {
    long d = kind == ComplexKind::Hom ? choose(n, q) * count_monomials(n, w + q) : choose(n, q) * count_monomials(n, w - q);
    if (d) r[kind == ComplexKind::Hom ? q : -q] = static_cast<int>(d);
  }
  return r;
}

inline json dims_json(const std::map<int, int>& d) {
  json j = json::object();
  for (auto& [q, v] : d) j[std::to_string(q)] = v;
  return j;
}

inline Report cohomology_suite(const Atlas& atlas, const SuiteOptions& opt) {
  Report rep{"cohomology", {}};
  int n = atlas.dimension();
  auto [lo, hi] = opt.weights.value_or(std::pair<int, int>{-n, 4});
  OperatorContext ctx(atlas);
  std::vector<ComplexKind> kinds = {ComplexKind::Hom, ComplexKind::Tensor};
  if (opt.kind) kinds = {*opt.kind};
  for (auto kind : kinds)
    for (int w = lo; w <= hi; ++w) {
      std::string name = "H(" + to_string(kind) + ") at weight " + std::to_string(w);
      try {
        auto row = cohomology_dims(ctx, kind, w);
        auto expect = expected_dims(kind, n, w);
        rep.add(name, row.dims == expect, json{{"dims", dims_json(row.dims)}, {"expected", dims_json(expect)}});
      } catch (const WeightNotPreserved& e) {
        rep.add(name, false, json{{"error", e.what()}});
      }
    }
  return rep;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"homotopy", "twist", "hkr", "tor", "cohomology"};
  return names;
}

inline Report run_suite(const std::string& name, const Atlas& atlas, const SuiteOptions& opt) {
  if (name == "homotopy") return homotopy_suite(atlas, opt);
  if (name == "twist") return twist_suite(atlas, opt);
  if (name == "hkr") return hkr_suite(atlas, opt);
  if (name == "tor") return tor_suite(atlas, opt);
  if (name == "cohomology") return cohomology_suite(atlas, opt);
  throw UnknownSuite("unknown suite '" + name + "'");
}

// Full report document; `timing` is the only run-dependent field.
inline json report_document(const std::string& suite, const Atlas& atlas, const SuiteOptions& opt, const Report& r,
                            double elapsed_ms) {
  json j = json::object();
  j["tool"] = "twisted-koszul";
  j["report_version"] = kReportVersion;
  j["suite"] = suite;
  j["atlas"] = atlas.id;
  j["seed"] = opt.seed;
  j["caps"] = json{{"cases", opt.cases}, {"max_degree", opt.max_degree}};
  if (!opt.mutation.empty()) j["mutation"] = opt.mutation;
  json body = r.to_json();
  j["pass"] = body["pass"];
  j["checks"] = body["checks"];
  j["timing"] = json{{"elapsed_ms", elapsed_ms}};
  return j;
}

inline json without_timing(json j) {
  j.erase("timing");
  return j;
}

template <class F>
auto timed(F&& f, double& ms) {
  auto t0 = std::chrono::steady_clock::now();
  auto r = f();
  ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace tkoszul
