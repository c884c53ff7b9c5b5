#include <catch_amalgamated.hpp>

#include <tkoszul/coeff.hpp>
#include <tkoszul/random.hpp>

using namespace tkoszul;

namespace {

CoeffFunction cf(const std::string& s, int n = 1) { return parse_coeff(s, n); }

// Independent evaluation of a t-polynomial at t by Horner's rule over the coefficient list.
CoeffFunction horner(const TPolynomial& p, const Rat& t) {
  CoeffFunction r;
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) r = r * CoeffFunction::constant(0, t) + *it;
  return r;
}

}  // namespace

TEST_CASE("arith basics", "[coeffring]") {
  CHECK((cf("z1") + cf("-z1")).is_zero());
  CHECK(cf("z1 - zeta1") * cf("z1 + zeta1") == cf("z1^2 - zeta1^2"));
  CHECK(cf("1/(z1 - zeta1)") * cf("z1 - zeta1") == cf("1"));
  CHECK((cf("1/(z1 - zeta1)") * cf("z1 - zeta1")).is_polynomial());
}

TEST_CASE("arith errors", "[coeffring]") {
  CHECK_THROWS_AS(cf("z1") + cf("z1", 2), DimensionMismatch);
  CoeffRing ring(2, {Polynomial::variable(z_var(0)) - Polynomial::variable(zeta_var(0))});
  CHECK_NOTHROW(ring.parse("1/(z1 - zeta1)"));
  CHECK_THROWS_AS(ring.parse("1/(z2 - zeta2)"), OutsideMultiplicativeSet);
  CHECK_THROWS_AS(ring.parse("1/(z1^2 + 1)"), OutsideMultiplicativeSet);
  CHECK_THROWS_AS(ring.arith(cf("z1", 2), cf("1/(z2 - zeta2)", 2), ArithKind::add), OutsideMultiplicativeSet);
  CHECK(ring.arith(cf("z1", 2), cf("z2", 2), ArithKind::mul) == cf("z1*z2", 2));
  CHECK(ring.arith(cf("z1", 2), cf("z2", 2), ArithKind::neg) == cf("-z1", 2));
}

TEST_CASE("partial derivatives", "[coeffring]") {
  CHECK(cf("z1^2*zeta1").partial("z1") == cf("2*z1*zeta1"));
  CHECK(cf("z1").partial("zeta1").is_zero());
  CHECK(cf("1/(z1 - zeta1)").partial("z1") == cf("-1/(z1 - zeta1)^2"));
  CHECK(cf("1/(z1 - zeta1)").partial("zeta1") == cf("1/(z1 - zeta1)^2"));
  CHECK_THROWS_AS(cf("z1").partial("z2"), UnknownCoordinate);
  CHECK_THROWS_AS(cf("z1").partial("w1"), UnknownCoordinate);
}

TEST_CASE("segment substitution", "[coeffring]") {
  TPolynomial p = segment_substitute(cf("z1"));
  REQUIRE(p.coeffs.size() == 2);
  CHECK(p.coeffs[0] == cf("zeta1"));
  CHECK(p.coeffs[1] == cf("z1 - zeta1"));
  TPolynomial q = segment_substitute(cf("z1^2"));
  REQUIRE(q.coeffs.size() == 3);
  CHECK(q.coeffs[0] == cf("zeta1^2"));
  CHECK(q.coeffs[1] == cf("2*zeta1*(z1 - zeta1)"));
  CHECK(q.coeffs[2] == cf("(z1 - zeta1)^2"));
  CHECK_THROWS_AS(segment_substitute(cf("1/(z1 - zeta1)")), NotTPolynomial);
  CHECK_NOTHROW(segment_substitute(cf("z1/(zeta1 + 1)")));
}

TEST_CASE("weighted integration", "[coeffring]") {
  TPolynomial one{{cf("1")}};
  CHECK(integrate_weighted(one, 0) == cf("1"));
  CHECK(integrate_weighted(one, 1) == cf("1/2"));
  TPolynomial p{{cf("2*zeta1"), cf("2*z1 - 2*zeta1")}};
  CHECK(integrate_weighted(p, 0) == cf("z1 + zeta1"));
}

TEST_CASE("diagonal restriction", "[coeffring]") {
  CHECK(restrict_diagonal(cf("z1*zeta1")) == cf("z1^2"));
  CHECK(restrict_diagonal(cf("z1 - zeta1")).is_zero());
  CHECK_THROWS_AS(restrict_diagonal(cf("1/(z1 - zeta1)")), DiagonalPole);
  CHECK(restrict_diagonal(cf("z2/(zeta1 + 2)", 2)) == cf("z2/(z1 + 2)", 2));
}

TEST_CASE("text form", "[coeffring]") {
  CHECK(cf("2*z1*zeta1 - 1/2*z2^2", 2).to_string() == "2*z1*zeta1 - 1/2*z2^2");
  CHECK(cf("0").to_string() == "0");
  CHECK(cf("-1/(z1 - zeta1)^2").to_string() == "-1/(z1 - zeta1)^2");
  CHECK(cf("3/(2*z1 - 2*zeta1)").to_string() == "3/2/(z1 - zeta1)");
  CHECK_THROWS_AS(cf("z1 +"), ParseError);
  CHECK_THROWS_AS(cf("z1 ^ x"), ParseError);
  CHECK_THROWS_AS(cf("1/0"), ParseError);
}

TEST_CASE("parse round trip", "[coeffring]") {
  Rng rng(11);
  CoeffRing ring(3, {Polynomial::variable(z_var(0)) - Polynomial::variable(zeta_var(0)),
                     Polynomial::variable(zeta_var(1)) + Polynomial(2)});
  for (int k = 0; k < 100; ++k) {
    CoeffFunction f = rng.coeff(3, 4);
    if (rng.coin()) f = f * ring.parse("1/(z1 - zeta1)");
    if (rng.coin()) f = f * ring.parse("1/(zeta2 + 2)^2");
    CHECK(ring.parse(f.to_string()) == f);
  }
}

TEST_CASE("segment integral solves the division problem in n = 1", "[coeffring]") {
  Rng rng(12);
  Polynomial s = Polynomial::variable(z_var(0)) - Polynomial::variable(zeta_var(0));
  for (int k = 0; k < 100; ++k) {
    Polynomial f = rng.polynomial(1, 4, 4);
    auto im = identity_images();
    im[z_var(0)] = Polynomial::variable(zeta_var(0));
    Polynomial diff = f - f.substitute(im);
    auto quotient = divide_linear(diff, s, z_var(0));
    REQUIRE(quotient.has_value());
    CoeffFunction g = integrate_weighted(segment_substitute(CoeffFunction(1, f.partial(z_var(0)))), 0);
    CHECK(g == CoeffFunction(1, *quotient));
  }
}

TEST_CASE("restriction is a ring morphism", "[coeffring]") {
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    int n = static_cast<int>(rng.uniform(1, 3));
    CoeffFunction a = rng.coeff(n, 4), b = rng.coeff(n, 4);
    CHECK(restrict_diagonal(a + b) == restrict_diagonal(a) + restrict_diagonal(b));
    CHECK(restrict_diagonal(a * b) == restrict_diagonal(a) * restrict_diagonal(b));
  }
}

TEST_CASE("segment endpoints", "[coeffring]") {
  Rng rng(14);
  for (int k = 0; k < 100; ++k) {
    int n = static_cast<int>(rng.uniform(1, 3));
    CoeffFunction f = rng.coeff(n, 4, 4);
    TPolynomial p = segment_substitute(f);
    CHECK(horner(p, 1) == f);
    auto im = identity_images();
    for (int i = 0; i < n; ++i) im[z_var(i)] = Polynomial::variable(zeta_var(i));
    CHECK(horner(p, 0) == CoeffFunction(n, f.numerator().substitute(im)));
    CHECK(p.evaluate(1) == f);
  }
}

TEST_CASE("canonical form is unique", "[coeffring]") {
  Rng rng(15);
  Polynomial form = Polynomial::variable(z_var(0)) - Polynomial::variable(zeta_var(0));
  for (int k = 0; k < 50; ++k) {
    CoeffFunction f = rng.coeff(2, 3);
    CoeffFunction g = CoeffFunction(2, f.numerator() * form.pow(2), {{form, 3}});
    CHECK(g.denominator().size() == 1);
    CHECK(g.denominator().begin()->second == 1);
    CHECK(g * CoeffFunction(2, form) == f);
    CHECK(parse_coeff(g.to_string(), 2) == g);
  }
}
