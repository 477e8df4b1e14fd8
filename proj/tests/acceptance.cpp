// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli.h"
#include "support.h"

using namespace pidibll;
using namespace pidibll::testing;

namespace {

struct Failure : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what)
{
  if (!ok)
  {
    throw Failure(what);
  }
}

struct Criterion
{
  int id;
  std::string title;
  double limitSeconds;
  std::function<std::string()> run;
};

std::string at(const TypedDecl& t, unsigned long i)
{
  return t.file + ":" + t.decl->name + " at n=" + std::to_string(i);
}

const SourceUnit& unitOf(const TypedDecl& t)
{
  const auto& files = corpus_files();
  for (size_t k = 0; k < files.size(); ++k)
  {
    if (files[k] == t.file)
    {
      return corpus().units[k];
    }
  }
  throw Failure("no unit for " + t.file);
}

// 1 -------------------------------------------------------------------------
std::string privkJudgments()
{
  SourceUnit u = load_fixture("privk.pdb");
  Registry reg = builtin_registry();
  SessionType advt = parse_type("Str[n] * Str[n] * (Str[n] -o Bool)");

  const ProcDecl& privk = u.get("PRIVK");
  require(privk.env.lin.size() == 1 && privk.env.exp.empty() && privk.env.tm.empty(),
          "PRIVK must depend on adv alone");
  require(privk.env.lin[0].first == "adv" && typeEq(privk.env.lin[0].second, advt),
          "PRIVK's adv has the wrong type");
  require(privk.chan == "exp" && typeEq(privk.type, st::gbool()), "PRIVK must offer exp : Bool");
  TypingDerivation d1 = check_decl(u, privk, reg);
  validate_derivation(d1, reg);

  const ProcDecl& adv = u.get("ADV");
  require(adv.env.lin.empty() && adv.env.exp.empty() && adv.env.tm.empty(),
          "ADV must be closed");
  require(adv.chan == "adv" && typeEq(adv.type, advt), "ADV must offer adv : ADVT");
  TypingDerivation d2 = check_decl(u, adv, reg);
  validate_derivation(d2, reg);
  return "W(PRIVK) = " + d1.weight.str() + ", W(ADV) = " + d2.weight.str();
}

// 2 -------------------------------------------------------------------------
std::string subjectReduction()
{
  Registry reg = builtin_registry();
  std::mt19937_64 rng(20240611);
  size_t checked = 0;
  size_t choices = 0;
  for (const auto& t : corpus().decls)
  {
    const SourceUnit& u = unitOf(t);
    for (unsigned long i = 0; i <= 3; ++i)
    {
      ParamSubstitution rho = rhoN(i);
      Process root = spine_normal_form(instantiate_params(t.decl->body, rho));
      std::set<Process, ProcLess> ok;
      Process cur = root;
      for (int k = 0; k < 500; ++k)
      {
        auto steps = enabled_reductions(cur, reg, i);
        if (steps.empty())
        {
          cur = root;
          steps = enabled_reductions(cur, reg, i);
          if (steps.empty())
          {
            break;
          }
        }
        const auto& s = steps[std::uniform_int_distribution<size_t>(0, steps.size() - 1)(rng)];
        auto support = s.result.support();
        cur = support[std::uniform_int_distribution<size_t>(0, support.size() - 1)(rng)];
        ++choices;
        if (ok.count(cur))
        {
          continue;
        }
        try
        {
          check_against_decl(u, *t.decl, cur, reg, rho);
        }
        catch (const Error& e)
        {
          throw Failure("successor of " + at(t, i) + " does not type: `" + proc_str(cur) +
                        "`: " + e.what());
        }
        ok.insert(cur);
        ++checked;
      }
    }
  }
  return std::to_string(choices) + " choices, " + std::to_string(checked) +
         " distinct successors re-typed";
}

// 3 -------------------------------------------------------------------------
std::string progress()
{
  Registry reg = builtin_registry();
  std::map<ProgressShape, size_t> seen;
  size_t fixtures = 0;
  for (const TypedDecl* t : closed_decls())
  {
    if (!typeEq(t->decl->type, st::one()))
    {
      continue;
    }
    ++fixtures;
    for (unsigned long i = 0; i <= 3; ++i)
    {
      for (const auto& p : reachable(instantiate_params(t->decl->body, rhoN(i)), reg, i))
      {
        ProgressShape s = progress_shape(p, reg, i);
        require(s != ProgressShape::Stuck, "stuck state `" + proc_str(p) + "` of " + at(*t, i));
        ++seen[s];
      }
    }
  }
  require(fixtures > 0, "no closed fixture offers a 1-typed channel");
  return std::to_string(fixtures) + " fixtures; terminated " +
         std::to_string(seen[ProgressShape::Terminated]) + ", replicated " +
         std::to_string(seen[ProgressShape::Replicated]) + ", reducible " +
         std::to_string(seen[ProgressShape::Reducible]);
}

// 4 -------------------------------------------------------------------------
std::string costBound()
{
  Registry reg = builtin_registry();
  Rational best = -1;
  std::string where;
  for (const auto& t : corpus().decls)
  {
    for (unsigned long i = 0; i <= 4; ++i)
    {
      NormalizeOptions opts;
      opts.bound = poly_eval(t.deriv.weight, rhoN(i));
      EvalReport r = normalize(instantiate_params(t.decl->body, rhoN(i)),
                               Scheduler::leftmost(), reg, i, opts);
      require(r.total_cost <= *opts.bound, "cost above bound for " + at(t, i));
      Rational ratio(r.total_cost, *opts.bound);
      ratio.canonicalize();
      if (ratio > best)
      {
        best = ratio;
        where = at(t, i) + " (" + r.total_cost.get_str() + " of " + opts.bound->get_str() + ")";
      }
    }
  }
  return "every path within W; tightest " + where;
}

// 5 -------------------------------------------------------------------------
std::string diamond()
{
  Registry reg = builtin_registry();
  size_t states = 0;
  std::map<DiamondCase, size_t> cases;
  for (const auto& t : corpus().decls)
  {
    for (unsigned long i = 0; i <= 3; ++i)
    {
      for (const auto& p : reachable(instantiate_params(t.decl->body, rhoN(i)), reg, i))
      {
        ++states;
        try
        {
          for (const auto& r : diamond_check(p, reg, i))
          {
            require(r.which != DiamondCase::Joined || r.unifier.has_value(),
                    "joined case without a unifier");
            ++cases[r.which];
          }
        }
        catch (const Error& e)
        {
          throw Failure(at(t, i) + ": " + e.what());
        }
      }
    }
  }
  return std::to_string(states) + " states; pairs by case " +
         std::to_string(cases[DiamondCase::SameStep]) + "/" +
         std::to_string(cases[DiamondCase::SameSubject]) + "/" +
         std::to_string(cases[DiamondCase::Joined]);
}

// 6 -------------------------------------------------------------------------
std::string strategies()
{
  Registry reg = builtin_registry();
  std::vector<Scheduler> scheds = {Scheduler::leftmost(), Scheduler::rightmost()};
  for (std::uint64_t s = 1; s <= 5; ++s)
  {
    scheds.push_back(Scheduler::seeded(s * 7919));
  }
  size_t runs = 0;
  for (const auto& t : corpus().decls)
  {
    for (unsigned long i = 0; i <= 3; ++i)
    {
      Process p = instantiate_params(t.decl->body, rhoN(i));
      ProcDist ref = normalize(p, scheds[0], reg, i).final;
      for (size_t k = 1; k < scheds.size(); ++k)
      {
        ProcDist d = normalize(p, scheds[k], reg, i).final;
        require(d == ref, scheds[k].name() + " disagrees on " + at(t, i));
        ++runs;
      }
    }
  }
  return std::to_string(scheds.size()) + " schedulers, " + std::to_string(runs) +
         " comparisons";
}

// 7 -------------------------------------------------------------------------
std::string kleeneImpliesObs()
{
  Registry reg = builtin_registry();
  auto pairs = kleene_pairs(50, 77);
  auto contexts = relay_contexts();
  require(pairs.size() == 50 && contexts.size() == 20, "corpus sizes");
  HoleSpec h = bool_relay_spec();
  std::vector<ParamSubstitution> grid = {rhoN(1), rhoN(2)};
  size_t verdicts = 0;
  for (const auto& pr : pairs)
  {
    for (const auto* side : {&pr.left, &pr.right})
    {
      check_process({"n"}, {}, delta_of(h.env), {}, *side, h.chan, h.type, reg);
    }
    require(kleene_equiv(pr.left, pr.right, reg, 1), pr.kind + " pair is not Kleene equivalent");
    for (const auto& v : obs_equiv_sampled(pr.left, pr.right, {"n"}, contexts, "r", grid,
                                           constant_eps(0), reg))
    {
      require(v.gap == 0, pr.kind + " pair separated by context " + std::to_string(v.context) +
                              " with gap " + ratStr(v.gap));
      ++verdicts;
    }
  }
  return std::to_string(verdicts) + " (pair, context, n) gaps, all 0";
}

// 8 -------------------------------------------------------------------------
std::string inputLetCommutation()
{
  Registry reg = builtin_registry();
  static const char* terms[] = {"flipcoin()", "eq(true, false)"};
  static const char* bodies[] = {
      "in y (u). in x (v). let r = eq(u, z) in out o r",
      "in y (u). in x (v). if z then out o u else out o v",
      "in x (v). in y (u). let r = eq(v, z) in let s = eq(r, u) in out o s",
  };
  static const char* feeds[] = {
      "send x (new y). (out y true | out x true)",
      "send x (new y). (out y true | out x false)",
      "send x (new y). (out y false | out x true)",
      "send x (new y). (out y false | out x false)",
      "let c = flipcoin() in send x (new y). (out y c | out x true)",
  };
  static const char* observers[] = {"in o (w). out r w",
                                    "in o (w). if w then out r false else out r true"};
  std::vector<LinearContext> contexts;
  for (const char* f : feeds)
  {
    for (const char* o : observers)
    {
      contexts.emplace_back(
          parse_process(std::string("new x. (") + f + " | new o. ([] | " + o + "))"));
    }
  }
  size_t n = 0;
  for (const char* t : terms)
  {
    for (const char* b : bodies)
    {
      Process inLet = parse_process(std::string("recv x (y). let z = ") + t + " in " + b);
      Process letIn = parse_process(std::string("let z = ") + t + " in recv x (y). " + b);
      SessionType bb = parse_type("Bool * Bool");
      for (const auto& p : {inLet, letIn})
      {
        check_process({"n"}, {}, {{"x", bb}}, {}, p, "o", st::gbool(), reg);
      }
      for (const auto& v : obs_equiv_sampled(inLet, letIn, {"n"}, contexts, "r",
                                             {rhoN(1), rhoN(2), rhoN(3)}, constant_eps(0), reg))
      {
        require(v.gap == 0, "gap " + ratStr(v.gap) + " under context " +
                                std::to_string(v.context) + " for `" + proc_str(inLet) + "`");
        ++n;
      }
    }
  }
  return std::to_string(n) + " gaps over 6 instances and 10 contexts, all 0";
}

// 9 -------------------------------------------------------------------------
std::string collisionGap()
{
  Registry reg = builtin_registry();
  Process fwd = parse_process("in x (w). out y w");
  Process coll = parse_process(
      "in x (w). let z = rand() in let b = eq(w, z) in if b then out y w else out y z");
  SessionType sn = parse_type("Str[n]");
  for (const auto& p : {fwd, coll})
  {
    check_process({"n"}, {}, {{"x", sn}}, {}, p, "y", sn, reg);
  }
  auto probe = [](const char* against) {
    return LinearContext(parse_process(
        std::string("new x. ((let s = zeros() in out x s) | new y. ([] | in y (w). let t = ") +
        against + "() in let r = eq(w, t) in out o r))"));
  };
  // Fixed input all-zeros, probe for the all-ones string.
  std::vector<LinearContext> ctx = {probe("ones"), probe("zeros")};
  std::string detail;
  for (unsigned long n : {2UL, 3UL})
  {
    auto v = obs_equiv_sampled(fwd, coll, {"n"}, ctx, "o", {rhoN(n)}, constant_eps(0), reg);
    // Oracle: z uniform over all strings of length n; the forwarder emits zeros.
    Nat hits = 0;
    Nat total = 0;
    for (const auto& z : ground_type_carrier(GroundType::str(Polynomial::variable("n")), rhoN(n))
                             .enumerate())
    {
      ++total;
      hits += z.bits == std::string(n, '1') ? 1 : 0;
    }
    Rational oracle(hits, total);
    oracle.canonicalize();
    Rational want(1, Nat(1) << static_cast<mp_bitcnt_t>(n));
    require(oracle == want, "oracle disagrees with 2^-n");
    require(v[0].gap == oracle,
            "gap at n=" + std::to_string(n) + " is " + ratStr(v[0].gap) + ", expected " +
                ratStr(oracle));
    detail += "n=" + std::to_string(n) + ": " + ratStr(v[0].gap) + " (input probe " +
              ratStr(v[1].gap) + ")  ";
  }
  return detail;
}

// 10 ------------------------------------------------------------------------
// Brute force over key, coin and adversary coin of the one-time-pad game.
Rational otpOracle(unsigned long n, bool comparing)
{
  std::string m0(n, '0');
  std::string m1(n, '1');
  Nat wins = 0;
  Nat total = 0;
  for (unsigned long key = 0; key < (1UL << n); ++key)
  {
    std::string k;
    for (unsigned long j = n; j-- > 0;)
    {
      k += ((key >> j) & 1) ? '1' : '0';
    }
    for (int b = 0; b < 2; ++b)
    {
      const std::string& m = b ? m1 : m0;
      std::string c;
      for (unsigned long j = 0; j < n; ++j)
      {
        c += k[j] == m[j] ? '0' : '1';
      }
      for (int g = 0; g < 2; ++g)
      {
        bool guess = comparing ? c == m1 : g == 1;
        ++total;
        wins += guess == (b == 1) ? 1 : 0;
      }
    }
  }
  Rational r(wins, total);
  r.canonicalize();
  return r;
}

std::string otpSecrecy()
{
  Registry reg = builtin_registry();
  SourceUnit u = load_fixture("otp.pdb");
  std::string detail;
  for (const char* name : {"ADV", "ADV_CMP"})
  {
    Process game = compose("out", build_outr(), build_distinguisher(u.get(name).body, reg));
    for (unsigned long n = 1; n <= 3; ++n)
    {
      ObsOutcome o = observe(game, rhoN(n), "exp", reg);
      Rational oracle = otpOracle(n, std::string(name) == "ADV_CMP");
      require(oracle == Rational(1, 2), "oracle is not 1/2");
      require(o.pTrue == oracle && o.pFalse == 1 - oracle && o.residual == 0,
              std::string(name) + " at n=" + std::to_string(n) + " gives " + o.str());
    }
    detail += std::string(name) + " ";
  }
  return detail + "exactly {true: 1/2, false: 1/2} at n=1..3";
}

// 11 ------------------------------------------------------------------------
std::string proofSkeleton()
{
  Registry reg = builtin_registry();
  SourceUnit u = load_fixture("prg_reduction.pdb");
  Process adv = u.get("ADV").body;
  Process outpr = u.get("OUTPR").body;
  Process keyk = u.get("PRIVKEYK").body;
  Process start = u.get("PRG_GAME").body;
  Process unfolded = compose("out", outpr, compose("adv", keyk, adv));
  Process rearranged = u.get("REARRANGED").body;
  require(struct_congruent(start, unfolded), "unfolding D_ADV is not a congruence");
  require(struct_congruent(unfolded, rearranged), "scope rearrangement is not a congruence");
  require(alpha_eq(build_distinguisher(adv, reg), u.get("D_ADV").body),
          "builder and fixture disagree on D_ADV");

  std::ostringstream out;
  std::ostringstream err;
  int rc = cli::run({"demo-crypto", "--grid", "n=1..3"}, out, err);
  require(rc == 0, "demo-crypto exited " + std::to_string(rc) + ": " + out.str() + err.str());
  size_t lines = 0;
  std::istringstream in(out.str());
  for (std::string l; std::getline(in, l);)
  {
    ++lines;
    require(l.rfind("ok\t", 0) == 0, "demo line not ok: " + l);
    if (l.find("gap") != std::string::npos || l.find("FAIRFLIP") != std::string::npos)
    {
      require(l.substr(l.rfind('\t') + 1) == "0", "nonzero gap: " + l);
    }
  }
  return "both rearrangements confirmed; demo-crypto exit 0, " + std::to_string(lines) +
         " confirmations";
}

// 12 ------------------------------------------------------------------------
std::string parserRoundTripAndFuzz()
{
  std::vector<std::string> files = corpus_files();
  files.push_back("bad/reuse.pdb");
  files.push_back("bad/loop.pdb");
  for (const auto& f : files)
  {
    SourceUnit u = load_fixture(f);
    std::string printed = pretty_print(u);
    SourceUnit v = parse_unit(printed);
    require(unit_equal(u, v), "round trip changes " + f);
    require(pretty_print(v) == printed, "printing is not stable on " + f);
  }
  std::mt19937_64 rng(4242);
  size_t rejected = 0;
  for (int k = 0; k < 100000; ++k)
  {
    std::string input;
    if (k % 2 == 0)
    {
      input = token_soup(rng, 1 + rng() % 40);
    }
    else
    {
      size_t len = rng() % 64;
      for (size_t j = 0; j < len; ++j)
      {
        input += static_cast<char>(rng() & 0xff);
      }
    }
    try
    {
      if (k % 3 == 0)
      {
        parse_process(input);
      }
      else
      {
        parse_unit(input);
      }
    }
    catch (const Error& e)
    {
      require(e.kind() == ErrorKind::ParseError,
              std::string("non-parse error on fuzz input: ") + e.what());
      ++rejected;
    }
  }
  return std::to_string(files.size()) + " files round-trip; 100000 fuzz inputs, " +
         std::to_string(rejected) + " rejected cleanly";
}

}  // namespace

int main()
{
  std::vector<Criterion> all = {
      {1, "privk judgments", 1, privkJudgments},
      {2, "subject reduction", 60, subjectReduction},
      {3, "progress trichotomy", 10, progress},
      {4, "polynomial cost bound", 60, costBound},
      {5, "confluence diamond", 120, diamond},
      {6, "strategy irrelevance", 60, strategies},
      {7, "kleene implies observational", 120, kleeneImpliesObs},
      {8, "input/let commutation", 30, inputLetCommutation},
      {9, "collision gap", 10, collisionGap},
      {10, "one-time pad secrecy", 30, otpSecrecy},
      {11, "reduction proof skeleton", 10, proofSkeleton},
      {12, "parser round trip and fuzz", 60, parserRoundTripAndFuzz},
  };
  int failed = 0;
  for (const auto& c : all)
  {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try
    {
      detail = c.run();
    }
    catch (const std::exception& e)
    {
      ok = false;
      detail = e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && secs > c.limitSeconds)
    {
      ok = false;
      detail = "took " + std::to_string(secs) + " s; " + detail;
    }
    failed += ok ? 0 : 1;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs/%gs", secs, c.limitSeconds);
    std::cout << (ok ? "PASS" : "FAIL") << "  " << c.id << "  " << c.title << "  [" << timing
              << "]  " << detail << std::endl;
  }
  return failed;
}
