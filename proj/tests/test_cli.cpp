#include <sstream>

#include "cli.h"
#include "doctest.h"
#include "support.h"

using namespace pidibll;
using namespace pidibll::testing;

namespace {

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result pdb(std::vector<std::string> args)
{
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s)
{
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
  {
    v.push_back(l);
  }
  return v;
}

}  // namespace

TEST_CASE("run output matches the golden files")
{
  for (const char* stem : {"privk", "otp", "prg_reduction", "fairflip", "servers"})
  {
    std::string pdbFile = fixture_path(std::string(stem) + ".pdb");
    std::vector<std::string> want = lines(read_text(fixture_path(std::string(stem) + ".expected")));
    std::vector<std::string> got;
    for (const auto& l : want)
    {
      if (l.rfind("# ", 0) != 0)
      {
        continue;
      }
      got.push_back(l);
      Result r = pdb({"--format", "lines", "run", pdbFile, "-p", l.substr(2), "-g", "n=1..3"});
      REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
      for (const auto& o : lines(r.out))
      {
        if (o.rfind("dist\t", 0) == 0)
        {
          got.push_back(o);
        }
      }
    }
    CHECK_MESSAGE(got == want, stem);
  }
}

TEST_CASE("exit codes")
{
  std::string privk = fixture_path("privk.pdb");
  std::string collision = fixture_path("collision.pdb");
  CHECK(pdb({"check", privk}).code == cli::kOk);
  CHECK(pdb({"check", collision}).code == cli::kOk);
  CHECK(pdb({"check", fixture_path("bad/reuse.pdb")}).code == cli::kType);
  CHECK(pdb({"check", fixture_path("bad/malformed.pdb")}).code == cli::kParse);
  CHECK(pdb({"check", fixture_path("does_not_exist.pdb")}).code == cli::kParse);
  CHECK(pdb({"frobnicate"}).code == cli::kParse);
  CHECK(pdb({"run", privk}).code == cli::kParse);
  CHECK(pdb({"run", fixture_path("bad/loop.pdb"), "-p", "LOOP", "--ceiling", "2000"}).code ==
        cli::kResource);
  CHECK(pdb({"run", privk, "-p", "GAME", "-g", "n=1..2"}).code == cli::kOk);
  CHECK(pdb({"run", "-p", "let b = flipcoin() in out o b"}).code == cli::kOk);
  CHECK(pdb({"weight", privk, "-p", "PRIVK", "-g", "n=1..3"}).code == cli::kOk);
  CHECK(pdb({"diamond", fixture_path("servers.pdb"), "-g", "n=1"}).code == cli::kOk);
  CHECK(pdb({"demo-crypto", "-g", "n=1..2"}).code == cli::kOk);
  CHECK(pdb({"demo-crypto", "-g", "n=1..2", "--prg", "zero", "--adversary", "compare"}).code ==
        cli::kRefuted);
}

TEST_CASE("equiv reports each context and grid point")
{
  std::string f = fixture_path("collision.pdb");
  Result r = pdb({"--format", "lines", "equiv", f, "--left", "FORWARD", "--right", "COLLIDE",
                  "--channel", "o", "-g", "n=2,3", "--eps", "1/4", "--contexts", f});
  CHECK(r.code == cli::kRefuted);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "equiv\tPROBE_ONES\tn=2\t1/4\twithin");
  CHECK(ls[1] == "equiv\tPROBE_ONES\tn=3\t1/8\twithin");
  CHECK(ls[2] == "equiv\tPROBE_ZEROS\tn=2\t3/4\texceeds");
  CHECK(ls[3] == "equiv\tPROBE_ZEROS\tn=3\t7/8\texceeds");

  Result same = pdb({"equiv", fixture_path("fairflip.pdb"), "--left", "FAIRFLIP", "--right",
                     "FLIPPED", "--channel", "exp", "-g", "n=1..3"});
  CHECK(same.code == cli::kOk);
}

TEST_CASE("check can print weights")
{
  Result r = pdb({"check", fixture_path("privk.pdb"), "--emit-weight"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("2*n^2 + 5*n + 20") != std::string::npos);
}

TEST_CASE("errors name the problem")
{
  Result r = pdb({"check", fixture_path("bad/malformed.pdb")});
  CHECK(r.err.find("malformed.pdb") != std::string::npos);
  Result t = pdb({"check", fixture_path("bad/reuse.pdb")});
  CHECK(t.out.find("NoRuleApplies") != std::string::npos);
}

TEST_CASE("grid and rational parsing")
{
  CHECK(cli::parse_grid("").size() == 1);
  CHECK(cli::parse_grid("n=1..4").size() == 4);
  auto g = cli::parse_grid("n=1,3");
  REQUIRE(g.size() == 2);
  CHECK(g[1] == rhoN(3));
  CHECK(cli::parse_rational("3/6") == Rational(1, 2));
  CHECK(cli::parse_rational("2") == 2);
  CHECK_THROWS(cli::parse_rational("x"));
  CHECK_THROWS(cli::parse_grid("n=4..1"));
}
