#include <random>

#include "doctest.h"
#include "pidibll/kernel.h"

using namespace pidibll;

namespace {

// Random polynomial over n and m with small coefficients.
Polynomial randomPoly(std::mt19937_64& rng, bool univariate)
{
  std::uniform_int_distribution<int> coef(0, 4);
  std::uniform_int_distribution<int> deg(0, 3);
  Polynomial n = Polynomial::variable("n");
  Polynomial m = Polynomial::variable("m");
  Polynomial p;
  for (int t = 0; t < 3; ++t)
  {
    Polynomial mono = Polynomial::constant(coef(rng));
    for (int k = deg(rng); k > 0; --k)
    {
      mono = mono * n;
    }
    if (!univariate)
    {
      for (int k = deg(rng) % 2; k > 0; --k)
      {
        mono = mono * m;
      }
    }
    p = p + mono;
  }
  return p;
}

ParamSubstitution at(unsigned long n, unsigned long m)
{
  ParamSubstitution r;
  r.set("n", n);
  r.set("m", m);
  return r;
}

}  // namespace

TEST_CASE("polynomial operations agree with evaluation")
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial)
  {
    Polynomial p = randomPoly(rng, false);
    Polynomial q = randomPoly(rng, false);
    Nat k = trial % 5;
    for (unsigned long n = 0; n < 5; ++n)
    {
      for (unsigned long m = 0; m < 3; ++m)
      {
        ParamSubstitution r = at(n, m);
        CHECK(poly_eval(poly_add(p, q), r) == poly_eval(p, r) + poly_eval(q, r));
        CHECK(poly_eval(poly_mul(p, q), r) == poly_eval(p, r) * poly_eval(q, r));
        CHECK(poly_eval(poly_scale(k, p), r) == k * poly_eval(p, r));
      }
    }
  }
}

TEST_CASE("canonical form makes algebraically equal polynomials equal")
{
  Polynomial n = Polynomial::variable("n");
  Polynomial one = Polynomial::constant(1);
  Polynomial lhs = (n + one) * (n + one);
  Polynomial rhs = n * n + Polynomial::constant(2) * n + one;
  CHECK(lhs == rhs);
  CHECK(poly_scale(0, lhs).isZero());
  CHECK(parsePolynomial("n^2 + 2*n + 1") == rhs);
  CHECK(parsePolynomial(rhs.str()) == rhs);
}

TEST_CASE("parsePolynomial rejects garbage")
{
  CHECK_THROWS_AS(parsePolynomial("n +"), Error);
  CHECK_THROWS_AS(parsePolynomial("2 ** n"), Error);
}

TEST_CASE("evaluation needs every variable bound")
{
  ParamSubstitution r;
  r.set("n", 2);
  try
  {
    poly_eval(parsePolynomial("n*m"), r);
    FAIL("expected UnboundParamVar");
  }
  catch (const Error& e)
  {
    CHECK(e.kind() == ErrorKind::UnboundParamVar);
  }
}

TEST_CASE("poly_leq is sound against a brute-force grid")
{
  std::mt19937_64 rng(11);
  int decided = 0;
  for (int trial = 0; trial < 400; ++trial)
  {
    bool uni = trial % 2 == 0;
    Polynomial p = randomPoly(rng, uni);
    Polynomial q = randomPoly(rng, uni);
    LeqResult r = poly_leq_decide(p, q);
    if (r.verdict == LeqVerdict::Holds)
    {
      ++decided;
      for (unsigned long n = 0; n < 30; ++n)
      {
        for (unsigned long m = 0; m < (uni ? 1UL : 6UL); ++m)
        {
          CHECK(poly_eval(p, at(n, m)) <= poly_eval(q, at(n, m)));
        }
      }
    }
    else if (r.verdict == LeqVerdict::Refuted)
    {
      ++decided;
      ParamSubstitution w = r.witness;
      for (const auto& v : {"n", "m"})
      {
        if (!w.has(v))
        {
          w.set(v, 0);
        }
      }
      CHECK(poly_eval(p, w) > poly_eval(q, w));
    }
  }
  CHECK(decided > 300);
}

TEST_CASE("univariate comparison is exact where coefficients disagree")
{
  // n^2 + 10 <= 2n^2 + 7 fails only at n = 0, 1.
  LeqResult r = poly_leq_decide(parsePolynomial("n^2 + 10"), parsePolynomial("2*n^2 + 7"));
  REQUIRE(r.verdict == LeqVerdict::Refuted);
  CHECK(poly_eval(parsePolynomial("n^2 + 10"), r.witness) >
        poly_eval(parsePolynomial("2*n^2 + 7"), r.witness));
  CHECK(poly_leq(parsePolynomial("n + 1"), parsePolynomial("n^2 + 1")));
  CHECK(poly_leq(parsePolynomial("3*n"), parsePolynomial("n^2 + 3")));
  CHECK_FALSE(poly_leq(parsePolynomial("n^3"), parsePolynomial("100*n^2")));
}

TEST_CASE("distribution monad laws")
{
  using D = Distribution<int>;
  D d = D::fromWeights({{0, Rational(1, 3)}, {1, Rational(1, 6)}, {2, Rational(1, 2)}});
  auto k = [](int x) {
    return D::fromWeights({{x, Rational(1, 2)}, {x + 1, Rational(1, 2)}});
  };
  auto h = [](int x) { return x % 2 == 0 ? D::pure(x) : D::fromWeights({{0, Rational(1, 4)}, {x, Rational(3, 4)}}); };

  CHECK(D::pure(3).bind<int>(k) == k(3));
  CHECK(d.bind<int>([](int x) { return D::pure(x); }) == d);
  D lhs = d.bind<int>(k).bind<int>(h);
  D rhs = d.bind<int>([&](int x) { return k(x).bind<int>(h); });
  CHECK(lhs == rhs);
  CHECK(lhs.total() == 1);
}

TEST_CASE("distribution weights are validated")
{
  using D = Distribution<int>;
  CHECK_THROWS_AS(D::fromWeights({{0, Rational(1, 2)}}), Error);
  CHECK_THROWS_AS(D::fromWeights({{0, Rational(3, 2)}, {1, Rational(-1, 2)}}), Error);
  D merged = D::fromWeights({{0, Rational(1, 4)}, {0, Rational(1, 4)}, {1, Rational(1, 2)}});
  CHECK(merged.size() == 2);
  CHECK(merged.weight(0) == Rational(1, 2));
}

TEST_CASE("carriers enumerate exactly 2^n strings")
{
  for (unsigned long n = 0; n <= 6; ++n)
  {
    Carrier c = ground_type_carrier(GroundType::str(Polynomial::variable("n")), rhoN(n));
    auto all = c.enumerate();
    CHECK(Nat(all.size()) == c.size());
    CHECK(all.size() == (1UL << n));
    for (const auto& v : all)
    {
      CHECK(v.bits.size() == n);
      CHECK(c.contains(v));
    }
  }
  Carrier b = ground_type_carrier(GroundType::boolean(), rhoN(4));
  CHECK(b.size() == 2);
}
