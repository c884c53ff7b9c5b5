#include <catch_amalgamated.hpp>

#include <tkoszul/sampling.hpp>
#include <tkoszul/twist.hpp>

using namespace tkoszul;

namespace {

CoeffFunction cf(const std::string& s, int n) { return parse_coeff(s, n); }

Simplex sx(const Atlas& at, std::initializer_list<const char*> ids) {
  Simplex s;
  for (auto id : ids) s.push_back(at.index(id));
  return s;
}

PolyvectorCochain random_polyvectors(Rng& rng, const Atlas& at) {
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

}  // namespace

TEST_CASE("chain_extend examples", "[twist]") {
  Atlas sh = fixture("shear2");
  int al = sh.index("alpha"), be = sh.index("beta");
  CHECK(chain_extend(sh, al, al) == hom_identity(2, al, al));

  Atlas tr = fixture("trans3");
  HomElement t = chain_extend(tr, tr.index("alpha"), tr.index("beta"));
  CHECK(t.coeff(bit(1), bit(1)) == cf("1", 1));
  CHECK(t == hom_identity(1));

  HomElement a = chain_extend(sh, al, be);
  CHECK(a.coeff(bit(2), bit(2)) == cf("1", 2));
  CHECK(a.coeff(bit(1), bit(2)) == cf("z1 + zeta1", 2));
  CHECK(a.coeff(bit(1), bit(1)) == cf("1", 2));
  CHECK(a.coeff(bit(2), bit(1)).is_zero());
  CHECK(a.coeff(0, 0) == cf("1", 2));
}

TEST_CASE("chain_extend gives chain maps", "[twist]") {
  for (auto& info : list_fixtures()) {
    Atlas at = fixture(info.name);
    for (auto& s : at.simplices(1)) {
      INFO(info.name << " " << at.simplex_name(s));
      CHECK(hom_diff(chain_extend(at, s[0], s[1]), at.link(s[0], s[1])).is_zero());
      CHECK(differential(chain_extend_dual(at, s[0], s[1]), at.link(s[0], s[1])).is_zero());
    }
  }
}

TEST_CASE("build_twist examples", "[twist]") {
  Atlas line = fixture("line");
  auto a = build_twist(line);
  REQUIRE(a.values.size() == 1);
  CHECK(a.values.begin()->first.size() == 1);
  CHECK(verify_twist(a, line).pass());

  Atlas tr = fixture("trans3");
  auto b = build_twist(tr);
  for (auto& s : tr.simplices(1)) CHECK(*b.at(s) == hom_identity(1));
  CHECK(b.at(sx(tr, {"alpha", "beta", "gamma"})) == nullptr);

  Atlas sh3 = fixture("shear3");
  auto c = build_twist(sh3);
  CHECK(c.at(sx(sh3, {"alpha", "beta", "gamma"})) != nullptr);
  for (auto& s : sh3.nerve)
    if (s.size() <= 2) CHECK(c.at(s) != nullptr);
  CHECK(verify_twist(c, sh3).pass());
}

TEST_CASE("verify_twist on fixtures and mutations", "[twist]") {
  for (auto& info : list_fixtures()) {
    Atlas at = fixture(info.name);
    INFO(info.name);
    CHECK(verify_twist(build_twist(at), at).pass());
    CHECK(verify_twist_dual(build_twist_dual(at), at).pass());
  }
  auto muts = shipped_mutations();
  CHECK(muts.size() >= 6);
  for (auto& m : muts) {
    Atlas at = fixture(m.fixture);
    INFO(m.name);
    auto rep = verify_twist(mutated_twist(m, at), at);
    CHECK_FALSE(rep.pass());
    REQUIRE_FALSE(rep.failures().empty());
    CHECK(rep.failures().front()->detail.contains("nonzero_components"));
  }
  Atlas sh = fixture("shear2");
  auto rep = verify_twist(mutated_twist(muts.front(), sh), sh);
  REQUIRE(rep.failures().size() == 1);
  CHECK(rep.failures().front()->name == "twisting equation on (alpha,beta)");
}

TEST_CASE("diagonal restriction", "[twist]") {
  Atlas sh = fixture("shear2");
  auto a = build_twist(sh);
  HomElement r = restrict_diagonal(*a.at(sx(sh, {"alpha", "beta"})));
  CHECK(r.coeff(bit(2), bit(2)) == cf("1", 2));
  CHECK(r.coeff(bit(1), bit(2)) == cf("2*z1", 2));
  CHECK(r.coeff(bit(1) | bit(2), bit(1) | bit(2)) == cf("1", 2));
  for (auto name : {"shear2", "shear3", "trans3", "line", "plane"}) {
    Atlas at = fixture(name);
    INFO(name);
    CHECK(restrict_twist_diagonal(build_twist(at), at).pass());
  }
  Atlas sh3 = fixture("shear3");
  auto b = build_twist(sh3);
  CHECK(restrict_diagonal(*b.at(sx(sh3, {"alpha", "beta", "gamma"}))).is_zero());
  for (auto& s : sh3.simplices(0)) CHECK(restrict_diagonal(*b.at(s)).is_zero());

  auto m = mutated_twist(shipped_mutations().front(), sh);
  CHECK_FALSE(restrict_twist_diagonal(m, sh).pass());
}

TEST_CASE("dual twist examples", "[twist]") {
  Atlas plane = fixture("plane");
  auto a = build_twist_dual(plane);
  REQUIRE(a.values.size() == 1);
  Atlas tr = fixture("trans3");
  auto b = build_twist_dual(tr);
  DualHomElement id;
  id.add(0, 0, cf("1", 1));
  id.add(bit(1), bit(1), cf("1", 1));
  for (auto& s : tr.simplices(1)) CHECK(*b.at(s) == id);
  CHECK(b.at(sx(tr, {"alpha", "beta", "gamma"})) == nullptr);
  Atlas sh = fixture("shear2");
  auto c = build_twist_dual(sh);
  CHECK((delta(sh, c) + cup(sh, c, c)).is_zero());
}

TEST_CASE("frame transport", "[twist]") {
  Atlas sh = fixture("shear2");
  int al = sh.index("alpha"), be = sh.index("beta");
  PolyvectorField d1 = PolyvectorField::basis(bit(1), cf("1", 2), al);
  PolyvectorField t = transport_frame(sh, d1, be);
  CHECK(t.chart == be);
  CHECK(t.coeff(bit(1)) == cf("1", 2));
  CHECK(t.coeff(bit(2)) == cf("2*z1", 2));
  PolyvectorField d12 = PolyvectorField::basis(bit(1) | bit(2), cf("z2", 2), al);
  CHECK(transport_frame(sh, d12, be).coeff(bit(1) | bit(2)) == cf("z2", 2));
}

TEST_CASE("R_map", "[twist]") {
  Atlas plane = fixture("plane");
  HomCochain f;
  f.add({0}, HomElement::basis(0, bit(1) | bit(2), cf("z1*zeta2 + zeta1^2", 2), 0, 0));
  f.add({0}, HomElement::basis(bit(1), bit(2), cf("5", 2), 0, 0));
  auto r = R_map(plane, f);
  CHECK(r.at({0})->terms.size() == 1);
  CHECK(r.at({0})->coeff(bit(1) | bit(2)) == cf("z1*z2 + z1^2", 2));
  HomCochain g;
  g.add({0}, HomElement::basis(bit(2), bit(1), cf("z1", 2), 0, 0));
  CHECK(R_map(plane, g).is_zero());

  Rng rng(31);
  for (auto name : {"shear2", "shear3", "trans3"}) {
    Atlas at = fixture(name);
    INFO(name);
    auto a = build_twist(at);
    for (int t = 0; t < 20; ++t) {
      auto h = random_cochain<HomElement>(rng, at);
      CHECK(R_map(at, D_aa(at, h, a)) == delta_full(at, R_map(at, h)));
    }
    for (int t = 0; t < 20; ++t) {
      auto v = random_polyvectors(rng, at), w = random_polyvectors(rng, at);
      auto F = contraction_cochain(at, v), G = contraction_cochain(at, w);
      CHECK(R_map(at, F) == v);
      CHECK(R_map(at, cup(at, F, G)) == polyvector_cup(at, R_map(at, F), R_map(at, G)));
    }
  }
}

TEST_CASE("full coboundary on polyvectors squares to zero", "[twist]") {
  Rng rng(37);
  Atlas at = fixture("shear3");
  for (int t = 0; t < 10; ++t) CHECK(delta_full(at, delta_full(at, random_polyvectors(rng, at))).is_zero());
}
