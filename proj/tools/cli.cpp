#include "cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "pidibll/cryptolib.h"

namespace pidibll::cli {

std::vector<ParamSubstitution> parse_grid(const std::string& spec)
{
  std::vector<ParamSubstitution> grid;
  if (spec.empty())
  {
    grid.push_back(rhoN(1));
    return grid;
  }
  auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
  {
    throw std::invalid_argument("grid must look like n=1..4");
  }
  std::string var = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  auto num = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit))
    {
      throw std::invalid_argument("bad grid value '" + s + "'");
    }
    return std::stoul(s);
  };
  auto add = [&](unsigned long v) {
    ParamSubstitution r;
    r.set(var, v);
    grid.push_back(r);
  };
  auto dots = rest.find("..");
  if (dots != std::string::npos)
  {
    unsigned long lo = num(rest.substr(0, dots));
    unsigned long hi = num(rest.substr(dots + 2));
    for (unsigned long v = lo; v <= hi; ++v)
    {
      add(v);
    }
  }
  else
  {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ','))
    {
      add(num(item));
    }
  }
  if (grid.empty())
  {
    throw std::invalid_argument("empty grid");
  }
  return grid;
}

Rational parse_rational(const std::string& s)
{
  auto ok = !s.empty() && std::all_of(s.begin(), s.end(),
                                       [](char c) { return ::isdigit(c) || c == '/'; });
  Rational r;
  if (!ok || r.set_str(s, 10) != 0 || (s.find('/') != std::string::npos && r.get_den() == 0))
  {
    throw std::invalid_argument("bad rational '" + s + "'");
  }
  r.canonicalize();
  return r;
}

namespace {

struct Io
{
  std::ostream& out;
  std::ostream& err;
  bool lines = false;
};

std::string readFile(const std::string& path)
{
  std::ifstream f(path);
  if (!f)
  {
    throw Error(ErrorKind::ParseError, "cannot read " + path);
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Declaration name, or else a process expression over the unit's declarations.
Process resolve(const SourceUnit& u, const std::string& what)
{
  if (const ProcDecl* d = u.find(what))
  {
    return d->body;
  }
  return parse_process(what, &u);
}

std::string rhoStr(const ParamSubstitution& rho)
{
  std::string s;
  for (const auto& [v, n] : rho.bindings())
  {
    s += (s.empty() ? "" : ",") + v + "=" + n.get_str();
  }
  return s;
}

std::string headerOf(const ProcDecl& d)
{
  std::string s = print_sections(d.env) + " |- " + d.name + " :: " + d.chan + " : " +
                  typeStr(d.type);
  if (d.hole)
  {
    s += "  with hole " + print_sections(d.hole->env) + " :: " + d.hole->chan + " : " +
         typeStr(d.hole->type);
  }
  return s;
}

int cmdCheck(const Io& io, const std::string& file, bool weight, bool tree)
{
  SourceUnit u = parse_unit(readFile(file));
  Registry reg = builtin_registry();
  int rc = kOk;
  for (const auto& d : u.decls)
  {
    try
    {
      TypingDerivation t = check_decl(u, d, reg);
      validate_derivation(t, reg);
      if (io.lines)
      {
        io.out << "check\t" << d.name << "\tok\t" << t.weight.str() << "\n";
      }
      else
      {
        io.out << "ok     " << headerOf(d) << "\n";
        if (weight)
        {
          io.out << "       W = " << t.weight.str() << "\n";
        }
        if (tree)
        {
          io.out << "       " << derivation_sexpr(t) << "\n";
        }
      }
    }
    catch (const Error& e)
    {
      rc = kType;
      if (io.lines)
      {
        io.out << "check\t" << d.name << "\terror\t" << errorKindName(e.kind()) << "\n";
      }
      else
      {
        io.out << "error  " << d.name << ": " << e.what()
               << "\n";
      }
    }
  }
  return rc;
}

int cmdRun(const Io& io, const std::string& file, const std::string& what,
           const std::string& gridSpec, const std::string& sched, std::uint64_t seed,
           unsigned long ceiling)
{
  SourceUnit u = file.empty() ? SourceUnit{} : parse_unit(readFile(file));
  Registry reg = builtin_registry();
  Process P = resolve(u, what);
  std::optional<Polynomial> weight;
  if (const ProcDecl* d = u.find(what))
  {
    try
    {
      weight = check_decl(u, *d, reg).weight;
    }
    catch (const Error&)
    {
    }
  }
  Scheduler s = Scheduler::byName(sched, seed);
  for (const auto& rho : parse_grid(gridSpec))
  {
    NormalizeOptions opts;
    opts.ceiling = ceiling;
    if (weight)
    {
      opts.bound = poly_eval(*weight, rho);
    }
    EvalReport rep = normalize(instantiate_params(P, rho), s, reg, index_of(rho), opts);
    if (!io.lines)
    {
      io.out << "# " << what << " at " << rhoStr(rho) << ", scheduler " << s.name() << "\n";
    }
    for (const auto& [q, r] : rep.final.entries())
    {
      if (io.lines)
      {
        io.out << "dist\t" << rhoStr(rho) << "\t" << ratStr(r) << "\t" << proc_str(q) << "\n";
      }
      else
      {
        io.out << ratStr(r) << " " << proc_str(q) << "\n";
      }
    }
    std::string bound = rep.bound ? rep.bound->get_str() : "-";
    if (io.lines)
    {
      io.out << "cost\t" << rhoStr(rho) << "\t" << rep.total_cost.get_str() << "\t" << bound
             << "\t" << rep.total_steps.get_str() << "\n";
    }
    else
    {
      io.out << "# cost " << rep.total_cost.get_str() << " (bound " << bound << "), steps "
             << rep.total_steps.get_str() << "\n";
    }
  }
  return kOk;
}

int cmdWeight(const Io& io, const std::string& file, const std::string& name,
              const std::string& gridSpec)
{
  SourceUnit u = parse_unit(readFile(file));
  Registry reg = builtin_registry();
  TypingDerivation t = check_decl(u, u.get(name), reg);
  if (io.lines)
  {
    io.out << "weight\t" << name << "\t" << t.weight.str() << "\n";
  }
  else
  {
    io.out << "W(" << name << ") = " << t.weight.str() << "   (" << derivation_size(t)
           << " rule applications)\n";
  }
  if (!gridSpec.empty())
  {
    for (const auto& rho : parse_grid(gridSpec))
    {
      std::string v = poly_eval(t.weight, rho).get_str();
      if (io.lines)
      {
        io.out << "weight\t" << name << "\t" << rhoStr(rho) << "\t" << v << "\n";
      }
      else
      {
        io.out << "  at " << rhoStr(rho) << ": " << v << "\n";
      }
    }
  }
  return kOk;
}

int cmdEquiv(const Io& io, const std::string& file, const std::string& left,
             const std::string& right, const std::string& chan, const std::string& gridSpec,
             const std::string& epsSpec, const std::string& ctxFile)
{
  SourceUnit u = parse_unit(readFile(file));
  Registry reg = builtin_registry();
  std::vector<LinearContext> contexts;
  std::vector<std::string> names;
  if (!ctxFile.empty())
  {
    SourceUnit c = parse_unit(readFile(ctxFile));
    for (const auto& d : c.decls)
    {
      if (d.hole)
      {
        contexts.push_back(LinearContext::fromDecl(d));
        names.push_back(d.name);
      }
    }
  }
  if (contexts.empty())
  {
    contexts.push_back(LinearContext::identity());
    names.push_back("[]");
  }
  VarSet V(u.params.begin(), u.params.end());
  Rational eps = parse_rational(epsSpec);
  auto verdicts = obs_equiv_sampled(resolve(u, left), resolve(u, right), V, contexts, chan,
                                    parse_grid(gridSpec), constant_eps(eps), reg);
  int rc = kOk;
  if (!io.lines)
  {
    io.out << "context\trho\t|delta|\tverdict\n";
  }
  for (const auto& v : verdicts)
  {
    rc = v.within ? rc : kRefuted;
    io.out << (io.lines ? "equiv\t" : "") << names[v.context] << "\t" << rhoStr(v.rho) << "\t"
           << ratStr(v.gap) << "\t" << (v.within ? "within" : "exceeds") << "\n";
  }
  return rc;
}

int cmdDiamond(const Io& io, const std::string& file, const std::string& only,
               const std::string& gridSpec)
{
  SourceUnit u = parse_unit(readFile(file));
  Registry reg = builtin_registry();
  for (const auto& d : u.decls)
  {
    if (d.hole || (!only.empty() && d.name != only))
    {
      continue;
    }
    for (const auto& rho : parse_grid(gridSpec))
    {
      // Every state reached by the leftmost scheduler, not just the root.
      std::map<int, size_t> cases;
      size_t states = 0;
      std::vector<Process> todo{spine_normal_form(instantiate_params(d.body, rho))};
      std::set<Process, ProcLess> seen;
      while (!todo.empty())
      {
        Process p = todo.back();
        todo.pop_back();
        if (!seen.insert(p).second)
        {
          continue;
        }
        ++states;
        for (const auto& r : diamond_check(p, reg, index_of(rho)))
        {
          ++cases[static_cast<int>(r.which)];
        }
        for (const auto& s : enabled_reductions(p, reg, index_of(rho)))
        {
          for (const auto& q : s.result.support())
          {
            todo.push_back(q);
          }
        }
      }
      io.out << (io.lines ? "diamond\t" : "ok  ") << d.name << "\t" << rhoStr(rho) << "\t"
             << states << " states\tcases " << cases[1] << "/" << cases[2] << "/" << cases[3]
             << "\n";
    }
  }
  return kOk;
}

int cmdDemo(const Io& io, const std::string& gridSpec, const std::string& prg,
            const std::string& adversary)
{
  PrgMap map = prg == "identity" ? identityPrg() : prg == "zero" ? zeroPrg() : nullptr;
  if (!map)
  {
    throw std::invalid_argument("unknown generator '" + prg + "'");
  }
  Registry reg = builtin_registry(map);
  Process adv = adversary == "honest"    ? honest_adversary()
                : adversary == "compare" ? comparing_adversary()
                                         : nullptr;
  if (!adv)
  {
    throw std::invalid_argument("unknown adversary '" + adversary + "'");
  }
  bool ok = true;
  auto report = [&](const std::string& what, bool good, const std::string& detail) {
    ok = ok && good;
    io.out << (io.lines ? "demo\t" : "") << (good ? "ok" : "FAILED") << "\t" << what << "\t"
           << detail << "\n";
  };

  Process outpr = build_outpr("g_prg", reg);
  Process outr = build_outr();
  Process keyk = build_privkeyk_otp();
  Process dadv = build_distinguisher(adv, reg);
  Process privk = build_privk(prg_scheme(), reg).experiment;
  Process privkOtp = build_privk(otp_scheme(), reg).experiment;

  Process step0 = compose("out", outpr, dadv);
  Process step1 = compose("out", outpr, compose("adv", keyk, adv));
  Process step2 = compose("adv", compose("out", outpr, keyk), adv);
  report("unfold D_ADV", struct_congruent(step0, step1), "definition");
  report("scope rearrangement", struct_congruent(step1, step2), "scope axiom");

  Process game = compose("adv", privk, adv);
  Process gameOtp = compose("adv", privkOtp, adv);
  Process ideal = compose("out", outr, dadv);
  Process flip = build_fairflip("exp");
  for (const auto& rho : parse_grid(gridSpec))
  {
    auto gap = [&](const Process& a, const Process& b) -> Rational {
      return abs(observe(a, rho, "exp", reg).pTrue - observe(b, rho, "exp", reg).pTrue);
    };
    unsigned long i = index_of(rho);
    bool prgIdeal = kleene_equiv(instantiate_params(outpr, rho), instantiate_params(outr, rho),
                                 reg, i);
    report("OUTPR kleene OUTR", prgIdeal, rhoStr(rho));
    Rational g62 = gap(step2, game);
    Rational g63 = gap(ideal, flip);
    Rational gOtp = gap(gameOtp, flip);
    Rational gGame = gap(game, flip);
    report("PRG step gap", g62 == 0, rhoStr(rho) + "\t" + ratStr(g62));
    report("OTP step gap", g63 == 0, rhoStr(rho) + "\t" + ratStr(g63));
    report("OTP experiment vs FAIRFLIP", gOtp == 0, rhoStr(rho) + "\t" + ratStr(gOtp));
    report("PRG experiment vs FAIRFLIP", gGame == 0, rhoStr(rho) + "\t" + ratStr(gGame));
  }
  return ok ? kOk : kRefuted;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"pdb: session-typed probabilistic processes"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "text or lines")->check(CLI::IsMember({"text", "lines"}));

  std::string file, proc, grid, sched = "leftmost", left, right, chan, eps = "0", ctxFile;
  std::string prg = "identity", adversary = "honest";
  std::uint64_t seed = 0;
  unsigned long ceiling = 1000000;
  bool emitWeight = false, emitTree = false;

  auto* check = app.add_subcommand("check", "type-check every declaration");
  check->add_option("file", file)->required();
  check->add_flag("--emit-weight", emitWeight);
  check->add_flag("--emit-derivation", emitTree);

  auto* runc = app.add_subcommand("run", "exact output distribution");
  runc->add_option("file", file);
  runc->add_option("--proc,-p", proc, "declaration name or process")->required();
  runc->add_option("--grid,-g", grid);
  runc->add_option("--scheduler", sched)->check(CLI::IsMember({"leftmost", "rightmost", "seeded"}));
  runc->add_option("--seed", seed);
  runc->add_option("--ceiling", ceiling);

  auto* weight = app.add_subcommand("weight", "derivation weight polynomial");
  weight->add_option("file", file)->required();
  weight->add_option("--proc,-p", proc)->required();
  weight->add_option("--grid,-g", grid);

  auto* equiv = app.add_subcommand("equiv", "sampled observational comparison");
  equiv->add_option("file", file)->required();
  equiv->add_option("--left", left)->required();
  equiv->add_option("--right", right)->required();
  equiv->add_option("--channel", chan)->required();
  equiv->add_option("--grid,-g", grid);
  equiv->add_option("--eps", eps);
  equiv->add_option("--contexts", ctxFile);

  auto* diamond = app.add_subcommand("diamond", "local confluence on every reachable state");
  diamond->add_option("file", file)->required();
  diamond->add_option("--proc,-p", proc);
  diamond->add_option("--grid,-g", grid);

  auto* demo = app.add_subcommand("demo-crypto", "replay the PRG-to-OTP reduction");
  demo->add_option("--grid,-g", grid);
  demo->add_option("--prg", prg)->check(CLI::IsMember({"identity", "zero"}));
  demo->add_option("--adversary", adversary)->check(CLI::IsMember({"honest", "compare"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try
  {
    app.parse(rev);
  }
  catch (const CLI::ParseError& e)
  {
    std::stringstream o, x;
    int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? kOk : kParse;
  }

  Io io{out, err, format == "lines"};
  try
  {
    if (*check)
    {
      return cmdCheck(io, file, emitWeight, emitTree);
    }
    if (*runc)
    {
      return cmdRun(io, file, proc, grid, sched, seed, ceiling);
    }
    if (*weight)
    {
      return cmdWeight(io, file, proc, grid);
    }
    if (*equiv)
    {
      return cmdEquiv(io, file, left, right, chan, grid, eps, ctxFile);
    }
    if (*diamond)
    {
      return cmdDiamond(io, file, proc, grid);
    }
    return cmdDemo(io, grid, prg, adversary);
  }
  catch (const ParseError& e)
  {
    err << file << ": " << e.what() << "\n";
    return kParse;
  }
  catch (const Error& e)
  {
    err << e.what() << "\n";
    switch (e.kind())
    {
      case ErrorKind::ParseError: return kParse;
      case ErrorKind::StepCeilingExceeded:
      case ErrorKind::BoundViolated: return kResource;
      case ErrorKind::ConfluenceViolation: return kRefuted;
      default: return kType;
    }
  }
  catch (const std::invalid_argument& e)
  {
    err << e.what() << "\n";
    return kParse;
  }
}

}  // namespace pidibll::cli
