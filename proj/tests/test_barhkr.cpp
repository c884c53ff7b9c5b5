#include <catch_amalgamated.hpp>

#include <tkoszul/barhkr.hpp>

using namespace tkoszul;

namespace {

Polynomial pz(const std::string& s, int n) { return parse_coeff(s, n).numerator(); }
CoeffFunction cf(const std::string& s, int n) { return parse_coeff(s, n); }

BarTensor bt(int n, std::initializer_list<const char*> entries) {
  std::vector<Polynomial> e;
  for (auto s : entries) e.push_back(pz(s, n));
  return BarTensor::pure(n, e);
}

Section diagonal_section(int n) { return section(Chart::diagonal("u", n)); }

}  // namespace

TEST_CASE("bar tensors are multilinear", "[barhkr]") {
  CHECK(bt(1, {"1", "2*z1 + 3", "1"}) == 2 * bt(1, {"1", "z1", "1"}) + 3 * bt(1, {"1", "1", "1"}));
  CHECK(bt(2, {"z1", "0", "1"}).is_zero());
  CHECK_THROWS_AS(BarTensor::pure(1, {pz("zeta1", 1), Polynomial(1)}), std::invalid_argument);
}

TEST_CASE("bar differential", "[barhkr]") {
  CHECK(bar_diff(bt(2, {"1", "z1^2 + z2", "1"})) == bt(2, {"z1^2 + z2", "1"}) - bt(2, {"1", "z1^2 + z2"}));
  CHECK(bar_diff(bt(2, {"z1", "z2", "z1*z2"})) == bt(2, {"z1*z2", "z1*z2"}) - bt(2, {"z1", "z1*z2^2"}));
  CHECK(bar_diff(bar_diff(bt(2, {"1", "z1 + 1", "z2^2", "1"}))).is_zero());
  CHECK_THROWS_AS(bar_diff(bt(1, {"z1", "1"})), DegreeMismatch);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    auto b = random_bar_tensor(rng, 2, static_cast<int>(rng.uniform(2, 4)));
    CHECK(bar_diff(bar_diff(b)).is_zero());
  }
}

TEST_CASE("phi examples", "[barhkr]") {
  CHECK(phi(bt(1, {"z1", "z1"})) == KoszulElement::basis(0, cf("z1*zeta1", 1)));
  CHECK(phi(bt(1, {"1", "z1", "1"})) == KoszulElement::basis(bit(1), cf("1", 1)));
  CHECK(phi(bt(1, {"1", "z1", "z1^2", "1"})).is_zero());
}

TEST_CASE("phi is a chain map", "[barhkr]") {
  Rng rng(3);
  for (int n = 1; n <= 3; ++n)
    for (int q = 1; q <= n + 1; ++q)
      for (int t = 0; t < 15; ++t) {
        auto b = random_bar_tensor(rng, n, q);
        CHECK(koszul_diff(phi(b), diagonal_section(n)) == phi(bar_diff(b)));
        if (q > n) CHECK(phi(b).is_zero());
      }
}

TEST_CASE("phi_tilde examples and closed form", "[barhkr]") {
  CHECK(phi_tilde(bt(1, {"1", "z1", "1"})) == Form::basis(bit(1), cf("1", 1)));
  CHECK(phi_tilde(bt(2, {"1", "z1", "z2", "1"})) == Form::basis(bit(1) | bit(2), cf("1/2", 2)));
  CHECK(phi_tilde_closed(bt(2, {"1", "z1", "z2", "1"})) == Form::basis(bit(1) | bit(2), cf("1/2", 2)));
  CHECK(phi_tilde(bt(2, {"z1", "3", "z2"})).is_zero());
  Rng rng(4);
  for (int n = 1; n <= 3; ++n)
    for (int q = 0; q <= n + 1; ++q)
      for (int t = 0; t < 10; ++t) {
        auto b = random_bar_tensor(rng, n, q);
        CHECK(phi_tilde(b) == phi_tilde_closed(b));
      }
}

TEST_CASE("shuffle product", "[barhkr]") {
  auto x = bt(2, {"z2", "z1^2", "1"});
  auto y = bt(2, {"z1", "z2 + 1", "1"});
  CHECK(shuffle(x, y) == bt(2, {"z1*z2", "z1^2", "z2 + 1", "1"}) - bt(2, {"z1*z2", "z2 + 1", "z1^2", "1"}));
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    int p = static_cast<int>(rng.uniform(0, 2)), q = static_cast<int>(rng.uniform(0, 2));
    auto a = random_bar_tensor(rng, 2, p, 2), b = random_bar_tensor(rng, 2, q, 2);
    auto ab = shuffle(a, b), ba = shuffle(b, a);
    CHECK(ab == ((p * q) % 2 ? Rat(-1) : Rat(1)) * ba);
    CHECK(shuffle(a, BarTensor::unit(2)) == a.on_diagonal());
    auto c = random_bar_tensor(rng, 2, 1, 2);
    CHECK(shuffle(shuffle(a, b), c) == shuffle(a, shuffle(b, c)));
  }
  for (int t = 0; t < 20; ++t) {
    int p = static_cast<int>(rng.uniform(0, 2)), q = static_cast<int>(rng.uniform(0, 2 - p));
    auto a = random_bar_tensor(rng, 2, p), b = random_bar_tensor(rng, 2, q);
    CHECK(phi_tilde(shuffle(a, b)) == wedge(phi_tilde(a), phi_tilde(b)));
  }
  BarTensor other = bt(1, {"1", "1"});
  other.chart = 1;
  BarTensor mine = bt(1, {"1", "1"});
  mine.chart = 0;
  CHECK_THROWS_AS(shuffle(mine, other), ChartMismatch);
}

TEST_CASE("hkr examples", "[barhkr]") {
  PolyvectorField d1 = PolyvectorField::basis(bit(1), cf("1", 2));
  CHECK(hkr(d1, bt(2, {"z2 + 1", "z1", "z1^2"})) == cf("z1^2*z2 + z1^2", 2));
  PolyvectorField d12 = PolyvectorField::basis(bit(1) | bit(2), cf("1", 2));
  CHECK(hkr(d12, bt(2, {"z1*z2", "z1", "z2", "1"})) == cf("1/2*z1*z2", 2));
  CHECK(hkr(d12, bt(2, {"z1*z2", "z1", "5", "1"})).is_zero());
  CHECK_THROWS_AS(hkr(d12, bt(2, {"1", "z1", "1"})), DegreeMismatch);
}

TEST_CASE("psi examples", "[barhkr]") {
  HomElement id0 = HomElement::basis(0, 0, cf("1", 1));
  CHECK(psi(id0, bt(1, {"z1 + 2", "z1"})) == cf("z1^2 + 2*z1", 1));
  HomElement e1 = HomElement::basis(0, bit(1), cf("1", 1));
  CHECK(psi(e1, bt(1, {"1", "z1", "1"})) == cf("1", 1));
  CHECK(psi(e1, bt(1, {"1", "z1", "z1", "1"})).is_zero());
}

TEST_CASE("psi agrees with hkr of R", "[barhkr]") {
  Rng rng(6);
  for (int n = 1; n <= 2; ++n) {
    Chart u = Chart::diagonal("u", n);
    for (int q = 0; q <= n; ++q) {
      auto basis = monomial_test_basis(n, q, 2, true);
      for (int t = 0; t < 4; ++t) {
        HomElement f = rng.bi_of_degree<Side::chain, Side::cochain>(n, q, 2, 3);
        auto lhs = HochschildCochain::pullback(f, q);
        auto rhs = HochschildCochain::from_polyvector(R_element(f), q);
        for (auto& b : basis) CHECK(lhs(b) == rhs(b));
      }
    }
  }
}

TEST_CASE("hochschild differential", "[barhkr]") {
  auto g = HochschildCochain::from_polyvector(PolyvectorField::basis(0, cf("z1 + 3", 1)), 0);
  auto dg = hochschild_cochain_diff(g);
  auto b = bt(1, {"z1", "z1^2", "2"});
  CHECK(dg(b) == -(g(bt(1, {"z1^3", "2"})) - g(bt(1, {"z1", "2*z1^2"}))));
  CHECK(dg(b).is_zero());

  Rng rng(7);
  for (int n = 1; n <= 2; ++n) {
    Link l = Link::local(Chart::diagonal("u", n));
    for (int t = 0; t < 10; ++t) {
      int q = static_cast<int>(rng.uniform(0, n - 1));
      HomElement f = rng.bi_of_degree<Side::chain, Side::cochain>(n, q, 2, 3);
      auto lhs = hochschild_cochain_diff(HochschildCochain::pullback(f, q));
      auto rhs = HochschildCochain::pullback(hom_diff(f, l), q + 1);
      auto ddf = hochschild_cochain_diff(lhs);
      for (auto& b : monomial_test_basis(n, q + 1, 2)) CHECK(lhs(b) == rhs(b));
      for (auto& b : monomial_test_basis(n, q + 2, 1)) CHECK(ddf(b).is_zero());
    }
  }
}

TEST_CASE("hkr is multiplicative on alternations", "[barhkr]") {
  Rng rng(8);
  int n = 3;
  for (int t = 0; t < 10; ++t) {
    int p = static_cast<int>(rng.uniform(0, 2)), q = static_cast<int>(rng.uniform(0, 3 - p));
    PolyvectorField v = PolyvectorField::basis(rng.mask_of_grade(n, p), CoeffFunction(n, rng.polynomial(n, 1, 2, true, false)));
    PolyvectorField w = PolyvectorField::basis(rng.mask_of_grade(n, q), CoeffFunction(n, rng.polynomial(n, 1, 2, true, false)));
    auto h = hochschild_cup(HochschildCochain::from_polyvector(v, p), HochschildCochain::from_polyvector(w, q));
    std::vector<Polynomial> entries;
    for (int i = 0; i < p + q; ++i) entries.push_back(rng.polynomial(n, 2, 2, true, false));
    auto b = alternation(n, entries);
    CHECK(h(b) == hkr(wedge(v, w), b));
  }
}
