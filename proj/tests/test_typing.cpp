#include <random>

#include "doctest.h"
#include "support.h"

using namespace pidibll;
using namespace pidibll::testing;

namespace {

ErrorKind kindOf(const std::string& src)
{
  SourceUnit u = parse_unit(src);
  Registry reg = builtin_registry();
  try
  {
    for (const auto& d : u.decls)
    {
      check_decl(u, d, reg);
    }
  }
  catch (const Error& e)
  {
    return e.kind();
  }
  FAIL("well-typed: " << src);
  return ErrorKind::ParseError;
}

const SourceUnit& unitOf(const TypedDecl& t)
{
  for (size_t k = 0; k < corpus_files().size(); ++k)
  {
    if (corpus_files()[k] == t.file)
    {
      return corpus().units[k];
    }
  }
  throw std::logic_error("unit");
}

UnrestrictedEnv randomEnv(std::mt19937_64& rng)
{
  UnrestrictedEnv g;
  const char* names[] = {"a", "b", "c"};
  for (const char* x : names)
  {
    if (rng() % 3 != 0)
    {
      Polynomial p = Polynomial::constant(rng() % 3);
      if (rng() % 2)
      {
        p = p + Polynomial::constant(rng() % 2) * Polynomial::variable("n");
      }
      g[x] = {p, st::gbool()};
    }
  }
  return g;
}

// Absent names count as multiplicity zero, so compare without them.
UnrestrictedEnv nonzero(UnrestrictedEnv g)
{
  std::erase_if(g, [](const auto& e) { return e.second.mult.isZero(); });
  return g;
}

}  // namespace

TEST_CASE("every corpus derivation validates, also after instantiation")
{
  Registry reg = builtin_registry();
  REQUIRE(corpus().decls.size() > 15);
  for (const auto& t : corpus().decls)
  {
    CAPTURE(t.decl->name);
    CHECK_NOTHROW(validate_derivation(t.deriv, reg));
    CHECK(derivation_weight(t.deriv) == t.deriv.weight);
    for (unsigned long i = 0; i <= 3; ++i)
    {
      TypingDerivation d = substitute_params(t.deriv, rhoN(i));
      CHECK(d.weight.isConstant());
      CHECK(d.weight.constantValue() == poly_eval(t.deriv.weight, rhoN(i)));
      CHECK(derivation_size(d) == derivation_size(t.deriv));
    }
  }
}

TEST_CASE("checking is insensitive to alpha renaming")
{
  Registry reg = builtin_registry();
  for (const auto& t : corpus().decls)
  {
    CAPTURE(t.decl->name);
    TypingDerivation d =
        check_against_decl(unitOf(t), *t.decl, canonicalize(t.decl->body), reg, rhoN(2));
    CHECK(d.weight == substitute_params(t.deriv, rhoN(2)).weight);
  }
}

TEST_CASE("weight pays for every reduction step")
{
  // Along any step P -> Q with cost c, W(Q) + c <= W(P) at the same index.
  Registry reg = builtin_registry();
  size_t steps = 0;
  for (const TypedDecl* t : closed_decls())
  {
    CAPTURE(t->decl->name);
    for (unsigned long i = 0; i <= 2; ++i)
    {
      ParamSubstitution rho = rhoN(i);
      auto weightOf = [&](const Process& p) {
        return check_against_decl(unitOf(*t), *t->decl, p, reg, rho).weight.constantValue();
      };
      for (const auto& p : reachable(instantiate_params(t->decl->body, rho), reg, i, 400))
      {
        Nat wp = weightOf(p);
        for (const auto& s : enabled_reductions(p, reg, i))
        {
          for (const auto& q : s.result.support())
          {
            CHECK(weightOf(q) + s.cost <= wp);
            ++steps;
          }
        }
      }
    }
  }
  CHECK(steps > 100);
}

TEST_CASE("the multiplicity order is a partial order")
{
  std::mt19937_64 rng(17);
  std::vector<UnrestrictedEnv> es;
  for (int k = 0; k < 40; ++k)
  {
    es.push_back(randomEnv(rng));
  }
  for (const auto& a : es)
  {
    CHECK(env_leq(a, a));
    CHECK(env_leq(a, env_sum(a, a)));
    for (const auto& b : es)
    {
      if (env_leq(a, b) && env_leq(b, a))
      {
        CHECK(env_str(nonzero(a)) == env_str(nonzero(b)));
      }
      CHECK(env_leq(a, env_sum(a, b)));
      CHECK(env_str(env_sum(a, b)) == env_str(env_sum(b, a)));
      for (const auto& c : es)
      {
        if (env_leq(a, b) && env_leq(b, c))
        {
          CHECK(env_leq(a, c));
        }
      }
    }
  }
  UnrestrictedEnv one{{"a", {Polynomial::constant(1), st::gbool()}}};
  CHECK(env_str(env_scale(Polynomial::variable("n"), one)) ==
        env_str(UnrestrictedEnv{{"a", {Polynomial::variable("n"), st::gbool()}}}));
}

TEST_CASE("ill-typed processes are rejected with the right kind")
{
  CHECK(kindOf(read_text(fixture_path("bad/reuse.pdb"))) == ErrorKind::NoRuleApplies);
  CHECK(kindOf(read_text(fixture_path("bad/loop.pdb"))) == ErrorKind::NoRuleApplies);
  CHECK(kindOf("params n.\n"
               "proc COIN() :: (s : ![2] Bool) = !in s (c). let b = flipcoin() in out c b\n"
               "proc T(exp{s[1] : Bool}) :: (z : Bool) = send s (new c1). in c1 (b1).\n"
               "  send s (new c2). in c2 (b2). let r = eq(b1, b2) in out z r") ==
        ErrorKind::MultiplicityExceeded);
  CHECK(kindOf("params n.\nproc A() :: (z : Bool) = out z #0101") ==
        ErrorKind::GroundTypeMismatch);
  CHECK(kindOf("params n.\nproc A() :: (z : Str[m]) = let k = gen() in out z k") ==
        ErrorKind::VarsOutsideV);
  CHECK(kindOf("params n.\nproc A(lin{y : Bool}) :: (z : Bool) = out z true") ==
        ErrorKind::LinearityViolation);
  CHECK(kindOf("params n.\nproc A() :: (z : Bool) = let k = nosuch() in out z k") ==
        ErrorKind::UnknownSymbol);
  CHECK(kindOf("params n.\nproc A() :: (z : Bool) = let k = xor(true) in out z k") ==
        ErrorKind::SignatureMismatch);
  CHECK(kindOf("params n.\nproc A() :: (z : Bool) = out z w") == ErrorKind::UnknownVariable);
}

TEST_CASE("tampered derivations fail validation")
{
  Registry reg = builtin_registry();
  const TypedDecl& t = corpus().decls.front();
  TypingDerivation d = t.deriv;
  d.weight = d.weight + Polynomial::constant(1);
  CHECK_THROWS_AS(validate_derivation(d, reg), Error);
  TypingDerivation e = t.deriv;
  e.concl.chan = e.concl.chan + "_";
  CHECK_THROWS_AS(validate_derivation(e, reg), Error);
}

TEST_CASE("context declarations check their hole")
{
  SourceUnit u = load_fixture("collision.pdb");
  Registry reg = builtin_registry();
  size_t contexts = 0;
  for (const auto& d : u.decls)
  {
    if (d.hole)
    {
      ++contexts;
      TypingDerivation t = check_decl(u, d, reg);
      CHECK_NOTHROW(validate_derivation(t, reg));
    }
  }
  CHECK(contexts == 2);
  // A hole whose environment is never connected is rejected.
  CHECK(kindOf("params n.\nctx C() :: (o : Bool) hole (lin{x : Bool}) :: (y : Bool) =\n"
               "  new y. ([] | in y (w). out o w)") == ErrorKind::InvalidContext);
}
