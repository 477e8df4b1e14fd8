#include <random>

#include "doctest.h"
#include "support.h"

using namespace pidibll;
using namespace pidibll::testing;

TEST_CASE("the corpus round-trips through the printer")
{
  for (const auto& f : corpus_files())
  {
    SourceUnit u = load_fixture(f);
    std::string printed = pretty_print(u);
    SourceUnit v = parse_unit(printed);
    CHECK_MESSAGE(unit_equal(u, v), f);
    CHECK(pretty_print(v) == printed);
  }
}

TEST_CASE("processes round-trip through proc_str")
{
  for (const auto& pr : kleene_pairs(60, 5))
  {
    for (const auto& p : {pr.left, pr.right})
    {
      CHECK(alpha_eq(parse_process(proc_str(p)), p));
    }
  }
  for (const auto& C : relay_contexts())
  {
    CHECK(alpha_eq(parse_process(proc_str(C.body())), C.body()));
  }
}

TEST_CASE("types parse and print")
{
  for (const char* t : {"Bool", "Str[n]", "Str[2*n + 1]", "1", "Bool -o Bool", "![n^2] Bool",
                        "Str[n] * Str[n] * (Str[n] -o Bool)", "Bool & Bool", "Bool + 1"})
  {
    SessionType a = parse_type(t);
    CHECK_MESSAGE(typeEq(parse_type(typeStr(a)), a), t);
  }
  CHECK(typeEq(parse_type("Bool -o Bool -o 1"), parse_type("Bool -o (Bool -o 1)")));
}

TEST_CASE("declarations expose their sections")
{
  SourceUnit u = load_fixture("servers.pdb");
  CHECK(u.params == std::vector<std::string>{"n"});
  const ProcDecl& two = u.get("TWO_FLIPS");
  REQUIRE(two.env.exp.size() == 1);
  CHECK(two.env.exp[0].name == "s");
  CHECK(two.env.exp[0].mult == Polynomial::constant(2));
  CHECK(two.chan == "z");
  CHECK_THROWS_AS(u.get("NOPE"), Error);
}

TEST_CASE("declaration names inline as processes")
{
  SourceUnit u = load_fixture("servers.pdb");
  Process p = parse_process("new s. (COIN | TWO_FLIPS)", &u);
  CHECK(alpha_eq(p, u.get("SAME_COIN").body));
}

TEST_CASE("soft keywords are ordinary names")
{
  Process p = parse_process("in out (exp). let lin = eq(exp, true) in out tm lin");
  CHECK(free_names(p).count("out"));
  CHECK(free_names(p).count("tm"));
}

TEST_CASE("errors carry a position")
{
  struct Bad
  {
    const char* src;
    int line;
  };
  for (const Bad& b : {Bad{"proc A() :: (x : 1) =\n  out x", 2}, Bad{"params n.\nproc", 2},
                       Bad{"proc A() :: (x : Bool) = let = flipcoin() in 0", 1},
                       Bad{"params n.\n\n\nproc A() :: (x : Str[n) = 0", 4}})
  {
    try
    {
      parse_unit(b.src);
      FAIL("accepted: " << b.src);
    }
    catch (const ParseError& e)
    {
      CHECK_MESSAGE(e.line() == b.line, b.src);
      CHECK(e.column() >= 1);
      CHECK(e.kind() == ErrorKind::ParseError);
    }
  }
  CHECK_THROWS_AS(parse_unit(read_text(fixture_path("bad/malformed.pdb"))), ParseError);
}

TEST_CASE("fuzzed input never escapes as anything but ParseError")
{
  std::mt19937_64 rng(99);
  size_t accepted = 0;
  for (int k = 0; k < 5000; ++k)
  {
    std::string s = token_soup(rng, 1 + k % 40);
    try
    {
      SourceUnit u = parse_unit(s);
      ++accepted;
      CHECK(unit_equal(parse_unit(pretty_print(u)), u));
    }
    catch (const ParseError&)
    {
    }
  }
  CHECK(accepted < 5000);
}
