#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "brlab/exactpoly.hpp"

using namespace brlab;

namespace {

const BiPoly X = BiPoly::x();
const BiPoly Y = BiPoly::y();

RationalParams rp(const char* b, const char* c) { return {Rational(b), Rational(c)}; }

BiPoly random_poly(std::mt19937_64& rng, int deg) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  BiPoly p;
  for (int i = 0; i <= deg; ++i)
    for (int j = 0; i + j <= deg; ++j) {
      Rational r(num(rng), den(rng));
      r.canonicalize();
      p.set(i, j, r);
    }
  return p;
}

// lambdas and s proportional to the expected ones
bool proportional(const Combination& c, const std::vector<Rational>& lam, const Rational& s) {
  if (c.lambdas.size() != lam.size()) return false;
  Rational k = 0;
  for (size_t i = 0; i < lam.size(); ++i)
    if (lam[i] != 0) k = c.lambdas[i] / lam[i];
  if (k == 0) return false;
  for (size_t i = 0; i < lam.size(); ++i)
    if (c.lambdas[i] != k * lam[i]) return false;
  return c.s == k * s;
}

}  // namespace

TEST_CASE("ring operations") {
  CHECK(partial_x(X * X * Y) == scale(X * Y, 2));
  CHECK(mul(X, BiPoly(0)).is_zero());
  CHECK(add(X + Y, X - Y) == scale(X, 2));
  CHECK(partial_y(BiPoly(5)).is_zero());
  CHECK((X - X).terms().empty());
  CHECK(pow(X + 1, 3) == X * X * X + scale(X * X, 3) + scale(X, 3) + 1);
  CHECK((X * Y + 1).degree() == 2);
  CHECK(BiPoly().degree() == -1);
  CHECK(compose(X * Y, Y, X) == X * Y);
  CHECK((X * X - Y).evaluate(Rational(1, 2), Rational(1, 3)) == Rational(-1, 12));
}

TEST_CASE("lie derivative") {
  RationalParams p = rp("1", "3");
  CHECK(lie_derivative(p, X) == (1 - Y) * X);
  CHECK(lie_derivative(p, BiPoly(1)).is_zero());
  RationalParams q = rp("-1/4", "1/2");
  BiPoly f3 = Y * Y + scale(X, 4);
  BiPoly expected = scale(Y * Y * Y, Rational(-1, 2)) + Y * Y - scale(X * Y, 2) + scale(X, 4);
  CHECK(lie_derivative(q, f3) == expected);
  CHECK(lie_derivative(Params(-0.25, 0.5), f3) == expected);
}

TEST_CASE("lie derivative needs exact parameters") {
  CHECK_THROWS_AS(lie_derivative(Params(0.1234567891234, 1), X), DomainError);
  CHECK(exact_rational(0.1) == Rational(1, 10));
  CHECK(exact_rational(-0.25) == Rational(-1, 4));
}

TEST_CASE("cofactors") {
  RationalParams q = rp("-1/4", "1/2");
  BiPoly f4 = (Y - 2) * (Y - 2) + scale(X, 4);
  auto K = cofactor_of(q, f4);
  REQUIRE(K);
  CHECK(*K == scale(Y, Rational(-1, 2)));

  BiPoly f2 = scale(Y * Y, Rational(3, 2)) - scale(Y, 3) + X;
  K = cofactor_of(rp("1", "3"), f2);
  REQUIRE(K);
  CHECK(*K == scale(Y - 1, 2));

  CHECK_FALSE(cofactor_of(rp("1", "2"), f2));
  CHECK_THROWS(cofactor_of(rp("1", "3"), BiPoly()));
}

TEST_CASE("lie derivative is a derivation") {
  std::mt19937_64 rng(3);
  RationalParams p = rp("2/3", "7/5");
  for (int i = 0; i < 25; ++i) {
    BiPoly f = random_poly(rng, 3), g = random_poly(rng, 2);
    CHECK(lie_derivative(p, f * g) == f * lie_derivative(p, g) + g * lie_derivative(p, f));
  }
}

TEST_CASE("cofactors are additive over products") {
  RationalParams q = rp("-1/4", "1/2");
  BiPoly f3 = Y * Y + scale(X, 4), f4 = (Y - 2) * (Y - 2) + scale(X, 4);
  auto K3 = cofactor_of(q, f3), K4 = cofactor_of(q, f4), K34 = cofactor_of(q, f3 * f4);
  REQUIRE(K3);
  REQUIRE(K4);
  REQUIRE(K34);
  CHECK(*K34 == *K3 + *K4);
  CHECK(K34->degree() <= 1);
  auto K1 = cofactor_of(q, X);
  REQUIRE(K1);
  CHECK(*cofactor_of(q, X * f3) == *K1 + *K3);
}

TEST_CASE("combination solver") {
  BiPoly K1 = 1 - Y, K2 = scale(Y - 1, 2), K3 = scale(2 - Y, Rational(1, 2));

  auto c = darboux_combination({K1, K2}, CombinationMode::first_integral);
  REQUIRE(c);
  CHECK(proportional(*c, {2, 1}, 0));
  CHECK(c->lambdas[0] == 1);  // first nonzero lambda normalised to 1
  CHECK(combination_residual({K1, K2}, *c).is_zero());

  c = darboux_combination({K1, K3}, CombinationMode::invariant);
  REQUIRE(c);
  CHECK(proportional(*c, {Rational(-1, 2), 1}, Rational(-1, 2)));
  CHECK(combination_residual({K1, K3}, *c).is_zero());

  c = darboux_combination({BiPoly()}, CombinationMode::first_integral);
  REQUIRE(c);
  CHECK(c->lambdas == std::vector<Rational>{1});
  CHECK(c->s == 0);

  // independent cofactors: no first integral
  CHECK_FALSE(darboux_combination({K1, X}, CombinationMode::first_integral));
  // a constant cannot be produced from y alone
  CHECK_FALSE(darboux_combination({Y}, CombinationMode::invariant));
}

TEST_CASE("rational kernel") {
  std::vector<std::vector<Rational>> m = {{1, 2, 3}, {2, 4, 6}};
  auto ker = rational_kernel(m, 3);
  CHECK(ker.size() == 2);
  for (auto& v : ker) CHECK(v[0] + 2 * v[1] + 3 * v[2] == 0);
}
