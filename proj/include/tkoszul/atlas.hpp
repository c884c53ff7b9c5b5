#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "koszul.hpp"

namespace tkoszul {

struct InvalidAtlas : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingTransition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Transition z_to = map(z_from); components are z-block polynomials.
struct Transition {
  std::string from;
  std::string to;
  std::vector<Polynomial> map;
  std::vector<Polynomial> inverse;
};

using Simplex = std::vector<int>;

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;

  void fail(std::string why) {
    valid = false;
    violations.push_back(std::move(why));
  }
};

// n z-block polynomials in the variables of one chart, as substitution images (zeta images too).
inline std::array<Polynomial, kNumVars> coordinate_images(const std::vector<Polynomial>& zs) {
  auto im = identity_images();
  auto to_zeta = identity_images();
  for (int i = 0; i < kMaxDim; ++i) to_zeta[z_var(i)] = Polynomial::variable(zeta_var(i));
  for (std::size_t i = 0; i < zs.size(); ++i) {
    im[z_var(static_cast<int>(i))] = zs[i];
    im[zeta_var(static_cast<int>(i))] = zs[i].substitute(to_zeta);
  }
  return im;
}

// Composite c = outer o inner, both given as component lists.
inline std::vector<Polynomial> compose_maps(const std::vector<Polynomial>& outer, const std::vector<Polynomial>& inner) {
  auto im = coordinate_images(inner);
  std::vector<Polynomial> r;
  for (auto& p : outer) r.push_back(p.substitute(im));
  return r;
}

inline std::vector<Polynomial> identity_map(int n) {
  std::vector<Polynomial> r;
  for (int i = 0; i < n; ++i) r.push_back(Polynomial::variable(z_var(i)));
  return r;
}

inline std::string simplex_text(const std::vector<std::string>& ids) {
  std::string s = "(";
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + ids[i];
  return s + ")";
}

// Square matrix of coefficient functions indexed by multi-indices (rows, cols).
using WedgeMatrix = std::map<std::pair<Mask, Mask>, CoeffFunction>;

class Atlas {
 public:
  std::string id;
  std::vector<Chart> charts;
  std::vector<Transition> transitions;
  std::vector<Simplex> nerve;

  int dimension() const { return charts.empty() ? 0 : charts.front().n; }
  int index(const std::string& chart_id) const {
    for (std::size_t i = 0; i < charts.size(); ++i)
      if (charts[i].id == chart_id) return static_cast<int>(i);
    throw InvalidAtlas("unknown chart '" + chart_id + "'");
  }
  std::string simplex_name(const Simplex& s) const {
    std::vector<std::string> ids;
    for (int i : s) ids.push_back(i >= 0 && i < static_cast<int>(charts.size()) ? charts[i].id : "?");
    return simplex_text(ids);
  }
  bool in_nerve(const Simplex& s) const { return std::binary_search(nerve.begin(), nerve.end(), s, order); }
  std::vector<Simplex> simplices(int p) const {
    std::vector<Simplex> r;
    for (auto& s : nerve)
      if (static_cast<int>(s.size()) == p + 1) r.push_back(s);
    return r;
  }
  int nerve_dimension() const {
    int d = -1;
    for (auto& s : nerve) d = std::max(d, static_cast<int>(s.size()) - 1);
    return d;
  }

  // z_from expressed through z_to, i.e. the components substituted to move a coefficient from `from` to `to`.
  const std::vector<Polynomial>& chart_in(int from, int to) const {
    auto it = coords_.find({from, to});
    if (it == coords_.end())
      throw MissingTransition("no transition between " + simplex_name({from}) + " and " + simplex_name({to}));
    return it->second;
  }

  CoeffFunction convert(const CoeffFunction& c, int from, int to) const {
    if (from == to || from < 0 || c.is_zero() || c.is_constant()) return c;
    return c.substitute(images(from, to));
  }
  template <Side S>
  Ext<S> convert(const Ext<S>& x, int to) const {
    int from = x.coordinate_chart();
    Ext<S> r = x;
    if (from != to && from >= 0) {
      auto im = images(from, to);
      r = map_coeffs(x, [&](const CoeffFunction& c) { return c.is_constant() ? c : c.substitute(im); });
    }
    r.coords = to == r.chart ? -1 : to;
    return r;
  }
  template <Side A, Side B>
  Bi<A, B> convert(const Bi<A, B>& x, int to) const {
    int from = x.coordinate_chart();
    Bi<A, B> r = x;
    if (from != to && from >= 0) {
      auto im = images(from, to);
      r = map_coeffs(x, [&](const CoeffFunction& c) { return c.is_constant() ? c : c.substitute(im); });
    }
    r.coords = to == r.target ? -1 : to;
    return r;
  }

  // Sections of target and source chart, both in target coordinates.
  Link link(int target, int source) const {
    Link l;
    l.n = charts[target].n;
    l.target_kind = charts[target].kind;
    l.s_target = section(charts[target]);
    for (auto& c : section(charts[source])) l.s_source.push_back(convert(c, source, target));
    l.target = target;
    l.source = source;
    return l;
  }

  // Jacobian d z_to^i / d z_from^j as polynomials in from-coordinates.
  std::vector<std::vector<Polynomial>> jacobian(int from, int to) const {
    const auto& comps = chart_in(to, from);
    int n = dimension();
    std::vector<std::vector<Polynomial>> j(n, std::vector<Polynomial>(n));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) j[i][k] = comps[i].partial(z_var(k));
    return j;
  }

  // Coordinate tables and sorted nerve; call after editing the fields.
  void build() {
    coords_.clear();
    for (int i = 0; i < static_cast<int>(charts.size()); ++i) coords_[{i, i}] = identity_map(charts[i].n);
    for (auto& t : transitions) {
      int a = index(t.from), b = index(t.to);
      coords_[{b, a}] = t.map;
      coords_[{a, b}] = t.inverse;
    }
    std::sort(nerve.begin(), nerve.end(), order);
    nerve.erase(std::unique(nerve.begin(), nerve.end()), nerve.end());
  }

  static bool order(const Simplex& a, const Simplex& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }

 private:
  std::array<Polynomial, kNumVars> images(int from, int to) const { return coordinate_images(chart_in(from, to)); }

  std::map<std::pair<int, int>, std::vector<Polynomial>> coords_;
};

namespace detail {

inline int det_sign_of_perm(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace detail

// Determinant of the square submatrix rows x cols by permutation expansion.
inline Polynomial minor_det(const std::vector<std::vector<Polynomial>>& m, const MultiIndex& rows, const MultiIndex& cols) {
  std::vector<int> perm(cols.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  Polynomial d;
  if (rows.empty()) return Polynomial(1);
  do {
    Polynomial t(detail::det_sign_of_perm(perm));
    for (std::size_t i = 0; i < rows.size(); ++i) t *= m[rows[i] - 1][cols[perm[i]] - 1];
    d += t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return d;
}

// q-th exterior power of the Jacobian of from -> to: entry (I, J) = det(Jac[I rows, J cols]).
inline WedgeMatrix jacobian_wedge(const Atlas& atlas, int from, int to, int q) {
  int n = atlas.dimension();
  if (q < 0 || q > n) throw std::invalid_argument("exterior degree out of range");
  auto jac = atlas.jacobian(from, to);
  WedgeMatrix w;
  for (Mask r = 0; r <= full_mask(n); ++r) {
    if (grade(r) != q) continue;
    for (Mask c = 0; c <= full_mask(n); ++c) {
      if (grade(c) != q) continue;
      Polynomial d = minor_det(jac, indices(r), indices(c));
      if (!d.is_zero()) w[{r, c}] = CoeffFunction(n, d);
    }
  }
  return w;
}

inline ValidationReport validate(const Atlas& a) {
  ValidationReport rep;
  if (a.charts.empty()) {
    rep.fail("atlas has no charts");
    return rep;
  }
  int n = a.dimension();
  std::set<std::string> ids;
  bool seen_diagonal = false;
  for (auto& c : a.charts) {
    if (!ids.insert(c.id).second) rep.fail("duplicate chart id '" + c.id + "'");
    if (c.n != n) rep.fail("chart '" + c.id + "' has dimension " + std::to_string(c.n) + ", expected " + std::to_string(n));
    if (c.n < 1 || c.n > kMaxDim) rep.fail("chart '" + c.id + "' dimension out of range");
    if (c.is_diagonal()) seen_diagonal = true;
    else if (seen_diagonal) rep.fail("off-diagonal chart '" + c.id + "' must precede the diagonal charts");
  }
  if (!rep.valid) return rep;
  auto is_poly_in_z = [&](const Polynomial& p) {
    if (p.uses_zeta()) return false;
    for (auto& [m, c] : p.terms())
      for (int i = n; i < kMaxDim; ++i)
        if (m[z_var(i)]) return false;
    return true;
  };
  std::set<std::pair<int, int>> have;
  for (auto& t : a.transitions) {
    std::string name = simplex_text({t.from, t.to});
    int from, to;
    try {
      from = a.index(t.from);
      to = a.index(t.to);
    } catch (const InvalidAtlas& e) {
      rep.fail(std::string("transition ") + name + ": " + e.what());
      continue;
    }
    if (static_cast<int>(t.map.size()) != n || static_cast<int>(t.inverse.size()) != n) {
      rep.fail("transition " + name + ": expected " + std::to_string(n) + " components");
      continue;
    }
    bool ok = true;
    for (auto& p : t.map) ok = ok && is_poly_in_z(p);
    for (auto& p : t.inverse) ok = ok && is_poly_in_z(p);
    if (!ok) {
      rep.fail("transition " + name + ": components must be polynomials in z1..z" + std::to_string(n));
      continue;
    }
    if (compose_maps(t.map, t.inverse) != identity_map(n)) rep.fail("transition " + name + ": map o inverse is not the identity");
    if (compose_maps(t.inverse, t.map) != identity_map(n)) rep.fail("transition " + name + ": inverse o map is not the identity");
    if ((!a.charts[from].is_diagonal() || !a.charts[to].is_diagonal()) && t.map != identity_map(n))
      rep.fail("transition " + name + ": off-diagonal charts need identity transitions");
    have.insert({std::min(from, to), std::max(from, to)});
  }
  std::set<Simplex> nerve(a.nerve.begin(), a.nerve.end());
  for (std::size_t i = 0; i < a.charts.size(); ++i)
    if (!nerve.count(Simplex{static_cast<int>(i)})) rep.fail("nerve lacks the singleton (" + a.charts[i].id + ")");
  for (auto& s : a.nerve) {
    std::string name = a.simplex_name(s);
    bool ok = !s.empty();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || s[i] >= static_cast<int>(a.charts.size())) ok = false;
      if (i && s[i] <= s[i - 1]) ok = false;
    }
    if (!ok) {
      rep.fail("simplex " + name + " is not strictly increasing in the chart order");
      continue;
    }
    for (std::size_t i = 0; s.size() > 1 && i < s.size(); ++i) {
      Simplex face = s;
      face.erase(face.begin() + static_cast<long>(i));
      if (!nerve.count(face)) rep.fail("nerve not downward closed: " + name + " lacks face " + a.simplex_name(face));
    }
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (!have.count({s[i], s[j]}))
          rep.fail("simplex " + name + ": missing transition between " + a.charts[s[i]].id + " and " + a.charts[s[j]].id);
  }
  if (!rep.valid) return rep;
  Atlas b = a;
  b.build();
  for (auto& s : a.nerve) {
    if (s.size() != 3) continue;
    // z_gamma(z_alpha) must equal z_gamma(z_beta(z_alpha))
    auto direct = b.chart_in(s[2], s[0]);
    auto via = compose_maps(b.chart_in(s[2], s[1]), b.chart_in(s[1], s[0]));
    if (direct != via) rep.fail("cocycle condition fails on simplex " + a.simplex_name(s));
  }
  return rep;
}

inline Polynomial parse_z_polynomial(const std::string& text, int n) {
  CoeffFunction c = parse_coeff(text, n);
  if (!c.is_polynomial() || c.uses_zeta()) throw InvalidAtlas("transition component '" + text + "' must be a polynomial in z");
  return c.numerator();
}

inline Atlas atlas_from_json(const nlohmann::json& j) {
  Atlas a;
  try {
    a.id = j.value("id", std::string("atlas"));
    for (auto& c : j.at("charts")) {
      std::string cid = c.at("id").get<std::string>();
      std::string kind = c.value("kind", std::string("diagonal"));
      int n = c.at("n").get<int>();
      if (n < 1 || n > kMaxDim) throw InvalidAtlas("chart '" + cid + "': dimension must be in 1.." + std::to_string(kMaxDim));
      std::vector<Polynomial> forms;
      for (auto& d : c.value("denominators", nlohmann::json::array())) {
        CoeffFunction f = parse_coeff(d.get<std::string>(), n);
        if (!f.is_polynomial() || f.numerator().degree() != 1)
          throw InvalidAtlas("chart '" + cid + "': denominator '" + d.get<std::string>() + "' is not a linear form");
        forms.push_back(f.numerator());
      }
      if (kind == "diagonal") {
        a.charts.push_back(Chart{cid, ChartKind::diagonal, n, CoeffRing(n, forms)});
      } else if (kind == "offdiagonal") {
        a.charts.push_back(Chart::offdiagonal(cid, n, forms));
      } else {
        throw InvalidAtlas("chart '" + cid + "': unknown kind '" + kind + "'");
      }
    }
    int n = a.charts.empty() ? 1 : a.charts.front().n;
    for (auto& t : j.value("transitions", nlohmann::json::array())) {
      Transition tr;
      tr.from = t.at("from").get<std::string>();
      tr.to = t.at("to").get<std::string>();
      for (auto& p : t.at("map")) tr.map.push_back(parse_z_polynomial(p.get<std::string>(), n));
      for (auto& p : t.at("inverse")) tr.inverse.push_back(parse_z_polynomial(p.get<std::string>(), n));
      a.transitions.push_back(std::move(tr));
    }
    for (auto& s : j.at("nerve")) {
      Simplex simplex;
      for (auto& c : s) simplex.push_back(a.index(c.get<std::string>()));
      a.nerve.push_back(simplex);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidAtlas(std::string("malformed atlas: ") + e.what());
  } catch (const ParseError& e) {
    throw InvalidAtlas(e.what());
  } catch (const UnknownCoordinate& e) {
    throw InvalidAtlas(e.what());
  }
  return a;
}

inline nlohmann::json atlas_to_json(const Atlas& a) {
  nlohmann::json j;
  j["id"] = a.id;
  j["charts"] = nlohmann::json::array();
  for (auto& c : a.charts) {
    nlohmann::json cj{{"id", c.id}, {"kind", to_string(c.kind)}, {"n", c.n}};
    cj["denominators"] = nlohmann::json::array();
    for (auto& f : c.ring.forms()) cj["denominators"].push_back(poly_to_string(f));
    j["charts"].push_back(cj);
  }
  j["transitions"] = nlohmann::json::array();
  for (auto& t : a.transitions) {
    nlohmann::json tj{{"from", t.from}, {"to", t.to}};
    for (auto& p : t.map) tj["map"].push_back(poly_to_string(p));
    for (auto& p : t.inverse) tj["inverse"].push_back(poly_to_string(p));
    j["transitions"].push_back(tj);
  }
  j["nerve"] = nlohmann::json::array();
  for (auto& s : a.nerve) {
    nlohmann::json sj = nlohmann::json::array();
    for (int i : s) sj.push_back(a.charts[i].id);
    j["nerve"].push_back(sj);
  }
  return j;
}

// Parses, validates and builds; throws InvalidAtlas listing the violations.
inline Atlas load_atlas(const nlohmann::json& j) {
  Atlas a = atlas_from_json(j);
  ValidationReport rep = validate(a);
  if (!rep.valid) {
    std::string why = "invalid atlas '" + a.id + "'";
    for (auto& v : rep.violations) why += "; " + v;
    throw InvalidAtlas(why);
  }
  a.build();
  return a;
}

}  // namespace tkoszul
