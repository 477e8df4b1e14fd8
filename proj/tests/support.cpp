#include "support.h"

#include <deque>
#include <fstream>
#include <sstream>

namespace pidibll::testing {

std::string fixture_path(const std::string& name)
{
  return std::string(PIDIBLL_FIXTURE_DIR) + "/" + name;
}

std::string read_text(const std::string& path)
{
  std::ifstream f(path);
  if (!f)
  {
    throw std::runtime_error("missing file " + path);
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

SourceUnit load_fixture(const std::string& name)
{
  return parse_unit(read_text(fixture_path(name)));
}

const std::vector<std::string>& corpus_files()
{
  static const std::vector<std::string> files = {"privk.pdb", "otp.pdb", "prg_reduction.pdb",
                                                 "fairflip.pdb", "servers.pdb", "collision.pdb"};
  return files;
}

const Corpus& corpus()
{
  static const Corpus c = [] {
    Corpus c;
    c.units.reserve(corpus_files().size());
    for (const auto& f : corpus_files())
    {
      c.units.push_back(load_fixture(f));
    }
    Registry reg = builtin_registry();
    for (size_t k = 0; k < c.units.size(); ++k)
    {
      for (const auto& d : c.units[k].decls)
      {
        if (!d.hole)
        {
          c.decls.push_back({corpus_files()[k], &d, check_decl(c.units[k], d, reg)});
        }
      }
    }
    return c;
  }();
  return c;
}

std::vector<const TypedDecl*> closed_decls()
{
  std::vector<const TypedDecl*> out;
  for (const auto& t : corpus().decls)
  {
    const Sections& s = t.decl->env;
    if (s.lin.empty() && s.exp.empty() && s.tm.empty())
    {
      out.push_back(&t);
    }
  }
  return out;
}

std::vector<Process> reachable(const Process& P, const Registry& reg, unsigned long i,
                               size_t cap)
{
  std::set<Process, ProcLess> seen;
  std::vector<Process> order;
  std::deque<Process> todo{spine_normal_form(P)};
  while (!todo.empty())
  {
    Process p = todo.front();
    todo.pop_front();
    if (!seen.insert(p).second)
    {
      continue;
    }
    order.push_back(p);
    if (order.size() > cap)
    {
      throw std::runtime_error("state space larger than " + std::to_string(cap));
    }
    for (const auto& s : enabled_reductions(p, reg, i))
    {
      for (const auto& q : s.result.support())
      {
        todo.push_back(q);
      }
    }
  }
  return order;
}

Rational true_gap(const ObsOutcome& a, const ObsOutcome& b)
{
  Rational d = a.pTrue - b.pTrue;
  return d < 0 ? Rational(-d) : d;
}

HoleSpec bool_relay_spec()
{
  HoleSpec h;
  h.env.lin.emplace_back("x", st::gbool());
  h.chan = "o";
  h.type = st::gbool();
  return h;
}

namespace {

struct Gen
{
  std::mt19937_64 rng;
  int fresh = 0;

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

  std::string var() { return "w" + std::to_string(fresh++); }

  std::string val(const std::vector<std::string>& vars)
  {
    size_t k = pick(vars.size() + 2);
    if (k == vars.size())
    {
      return "true";
    }
    if (k == vars.size() + 1)
    {
      return "false";
    }
    return vars[k];
  }

  // Offers o : Bool and never reduces silently before its input on x.
  std::string tail(std::vector<std::string> vars, int depth)
  {
    switch (depth <= 0 ? 0 : pick(4))
    {
      case 0: return "out o " + val(vars);
      case 1:
      {
        std::string w = var();
        vars.push_back(w);
        return "let " + w + " = flipcoin() in " + tail(vars, depth - 1);
      }
      case 2:
      {
        std::string w = var();
        std::string a = val(vars);
        std::string b = val(vars);
        vars.push_back(w);
        return "let " + w + " = eq(" + a + ", " + b + ") in " + tail(vars, depth - 1);
      }
      default:
      {
        std::string v = val(vars);
        return "if " + v + " then " + tail(vars, depth - 1) + " else " + tail(vars, depth - 1);
      }
    }
  }

  std::string body(std::vector<std::string> vars)
  {
    std::string u = var();
    vars.push_back(u);
    return "in x (" + u + "). " + tail(vars, 1 + static_cast<int>(pick(3)));
  }

  std::string closedTerm()
  {
    static const char* terms[] = {"flipcoin()", "eq(true, false)", "true", "eq(false, false)"};
    return terms[pick(4)];
  }
};

}  // namespace

std::vector<ProcPair> kleene_pairs(size_t count, std::uint64_t seed)
{
  Gen g{std::mt19937_64(seed)};
  std::vector<ProcPair> out;
  while (out.size() < count)
  {
    std::string kind;
    std::string l;
    std::string r;
    switch (out.size() % 6)
    {
      case 0:
      {
        kind = "if_true";
        l = g.body({});
        r = "if true then " + l + " else " + g.body({});
        break;
      }
      case 1:
      {
        kind = "value_let";
        l = g.body({});
        r = "let " + g.var() + " = false in " + l;
        break;
      }
      case 2:
      {
        kind = "swap_lets";
        std::string a = g.var();
        std::string b = g.var();
        std::string ta = g.closedTerm();
        std::string tb = g.closedTerm();
        std::string n = g.body({a, b});
        l = "let " + a + " = " + ta + " in let " + b + " = " + tb + " in " + n;
        r = "let " + b + " = " + tb + " in let " + a + " = " + ta + " in " + n;
        break;
      }
      case 3:
      {
        kind = "branch_swap";
        std::string b = g.var();
        std::string A = g.body({});
        std::string B = g.body({});
        l = "let " + b + " = flipcoin() in if " + b + " then " + A + " else " + B;
        r = "let " + b + " = flipcoin() in if " + b + " then " + B + " else " + A;
        break;
      }
      case 4:
      {
        kind = "coin_copy";
        std::string b = g.var();
        std::string c = g.var();
        std::string n = g.body({b});
        l = "let " + b + " = flipcoin() in " + n;
        r = "let " + c + " = flipcoin() in let " + b + " = eq(" + c + ", true) in " + n;
        break;
      }
      default:
      {
        kind = "negated_coin";
        std::string b = g.var();
        std::string c = g.var();
        std::string n = g.body({b});
        l = "let " + b + " = flipcoin() in " + n;
        r = "let " + c + " = flipcoin() in let " + b + " = eq(" + c + ", false) in " + n;
        break;
      }
    }
    out.push_back({kind, parse_process(l), parse_process(r)});
  }
  return out;
}

std::vector<LinearContext> relay_contexts()
{
  static const char* feeds[] = {
      "out x true",
      "out x false",
      "let c = flipcoin() in out x c",
      "let c = eq(true, false) in out x c",
  };
  static const char* observers[] = {
      "in o (v). out r v",
      "in o (v). if v then out r false else out r true",
      "in o (v). let w = flipcoin() in let s = eq(v, w) in out r s",
      "in o (v). let s = eq(v, true) in out r s",
      "in o (v). let w = flipcoin() in if w then out r v else out r true",
  };
  std::vector<LinearContext> out;
  for (const char* f : feeds)
  {
    for (const char* o : observers)
    {
      std::string src = std::string("new x. (") + f + " | new o. ([] | " + o + "))";
      HoleSpec h = bool_relay_spec();
      out.emplace_back(parse_process(src), h);
    }
  }
  return out;
}

std::string token_soup(std::mt19937_64& rng, size_t tokens)
{
  static const char* vocab[] = {
      "new",  "send", "recv", "out", "in",   "let",  "if",  "then", "else", "case", "of",
      "inl",  "inr",  "=>",   "/",   "!",    "(",    ")",   "[",    "]",    "{",    "}",
      ".",    "|",    ":",    "::",  "=",    ",",    "0",   "1",    "x",    "y",    "true",
      "false", "#01", "flipcoin", "Bool", "Str", "-o", "*", "&", "+", "proc", "params",
      "n",    "lin",  "exp",  "tm",  "ctx",  "hole", "type", "^", "2", "\n", "//"};
  constexpr size_t kVocab = sizeof(vocab) / sizeof(vocab[0]);
  std::string s;
  std::uniform_int_distribution<int> coin(0, 9);
  for (size_t k = 0; k < tokens; ++k)
  {
    if (coin(rng) == 0)
    {
      s += static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng));
    }
    else
    {
      s += vocab[std::uniform_int_distribution<size_t>(0, kVocab - 1)(rng)];
      s += ' ';
    }
  }
  return s;
}

}  // namespace pidibll::testing
