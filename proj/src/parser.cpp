#include "pidibll/parser.h"

#include <map>
#include <set>

#include "lexer.h"

namespace pidibll {

ParseError::ParseError(int line, int col, const std::string& msg, const std::string& expected)
    : Error(ErrorKind::ParseError,
            std::to_string(line) + ":" + std::to_string(col) + ": " + msg +
                (expected.empty() ? "" : " (expected " + expected + ")")),
      d_line(line),
      d_col(col),
      d_expected(expected)
{
}

const ProcDecl* SourceUnit::find(const std::string& name) const
{
  for (const auto& d : decls)
  {
    if (d.name == name)
    {
      return &d;
    }
  }
  return nullptr;
}

const ProcDecl& SourceUnit::get(const std::string& name) const
{
  const ProcDecl* d = find(name);
  if (!d)
  {
    throw Error(ErrorKind::UnknownSymbol, "no declaration named " + name);
  }
  return *d;
}

namespace {

const std::set<std::string> kKeywords = {
    "new",  "send", "recv", "out",   "in",   "let",    "if",  "then", "else", "case",
    "of",   "inl",  "inr",  "true",  "false", "params", "type", "proc", "ctx",  "lin",
    "exp",  "tm",   "Bool", "Str",   "hole"};

// Keywords that may still name channels, since they never start a prefix
// where a channel is expected.
const std::set<std::string> kSoft = {"out", "exp", "lin", "tm", "hole",
                                     "params", "type", "proc", "ctx"};

constexpr int kMaxDepth = 400;

class Parser
{
 public:
  Parser(const std::string& src, const SourceUnit* scope) : d_toks(lex(src)), d_scope(scope) {}

  SourceUnit unit()
  {
    SourceUnit u;
    d_unit = &u;
    while (!at(Tok::End))
    {
      if (atWord("params"))
      {
        next();
        do
        {
          std::string v = ident("parameter name");
          for (const auto& p : u.params)
          {
            if (p == v)
            {
              fail("duplicate parameter " + v);
            }
          }
          u.params.push_back(v);
        } while (accept(","));
        expect(".");
      }
      else if (atWord("type"))
      {
        next();
        std::string name = ident("type name");
        if (d_aliases.count(name))
        {
          fail("duplicate type alias " + name);
        }
        expect("=");
        SessionType t = type();
        expect(".");
        d_aliases[name] = t;
        u.aliases.emplace_back(name, t);
      }
      else if (atWord("proc") || atWord("ctx"))
      {
        bool isCtx = atWord("ctx");
        next();
        ProcDecl d;
        d.name = ident("declaration name");
        if (u.find(d.name))
        {
          fail("duplicate declaration " + d.name);
        }
        d.env = sections();
        expect("::");
        expect("(");
        d.chan = ident("offered channel");
        expect(":");
        d.type = type();
        expect(")");
        if (isCtx)
        {
          expectWord("hole");
          HoleSpec h;
          h.env = sections();
          expect("::");
          expect("(");
          h.chan = ident("hole channel");
          expect(":");
          h.type = type();
          expect(")");
          d.hole = h;
        }
        expect("=");
        d.body = process();
        u.decls.push_back(d);
      }
      else
      {
        fail("unexpected '" + peek().text + "'", "params, type, proc or ctx");
      }
    }
    d_unit = nullptr;
    return u;
  }

  Process processOnly()
  {
    Process p = process();
    if (!at(Tok::End))
    {
      fail("trailing input '" + peek().text + "'", "end of input");
    }
    return p;
  }

  SessionType typeOnly()
  {
    SessionType t = type();
    if (!at(Tok::End))
    {
      fail("trailing input '" + peek().text + "'", "end of input");
    }
    return t;
  }

  Polynomial polyOnly()
  {
    Polynomial p = poly();
    if (!at(Tok::End))
    {
      fail("trailing input '" + peek().text + "'", "end of input");
    }
    return p;
  }

 private:
  std::vector<Token> d_toks;
  size_t d_pos = 0;
  int d_depth = 0;
  const SourceUnit* d_scope;
  SourceUnit* d_unit = nullptr;
  std::map<std::string, SessionType> d_aliases;

  struct Guard
  {
    Parser& p;
    explicit Guard(Parser& q) : p(q)
    {
      if (++p.d_depth > kMaxDepth)
      {
        p.fail("nesting too deep");
      }
    }
    ~Guard() { --p.d_depth; }
  };

  const Token& peek(size_t k = 0) const
  {
    size_t i = std::min(d_pos + k, d_toks.size() - 1);
    return d_toks[i];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool atSym(const std::string& s, size_t k = 0) const
  {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool atWord(const std::string& w, size_t k = 0) const
  {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }
  const Token& next()
  {
    const Token& t = d_toks[d_pos];
    if (d_pos + 1 < d_toks.size())
    {
      ++d_pos;
    }
    return t;
  }
  [[noreturn]] void fail(const std::string& msg, const std::string& expected = "") const
  {
    throw ParseError(peek().line, peek().col, msg, expected);
  }
  bool accept(const std::string& s)
  {
    if (atSym(s))
    {
      next();
      return true;
    }
    return false;
  }
  void expect(const std::string& s)
  {
    if (!accept(s))
    {
      fail("unexpected '" + (at(Tok::End) ? std::string("end of input") : peek().text) + "'",
           "'" + s + "'");
    }
  }
  void expectWord(const std::string& w)
  {
    if (!atWord(w))
    {
      fail("unexpected '" + peek().text + "'", "'" + w + "'");
    }
    next();
  }
  std::string ident(const std::string& what)
  {
    if (!at(Tok::Ident) || (kKeywords.count(peek().text) && !kSoft.count(peek().text)))
    {
      fail("unexpected '" + (at(Tok::End) ? std::string("end of input") : peek().text) + "'",
           what);
    }
    return next().text;
  }

  // -- polynomials ---------------------------------------------------------

  Nat number()
  {
    if (!at(Tok::Number))
    {
      fail("unexpected '" + peek().text + "'", "number");
    }
    return Nat(next().text);
  }

  Polynomial poly()
  {
    Polynomial p = monomial();
    while (accept("+"))
    {
      p = p + monomial();
    }
    return p;
  }

  Polynomial monomial()
  {
    Polynomial m = factor();
    while (accept("*"))
    {
      m = m * factor();
    }
    return m;
  }

  Polynomial factor()
  {
    if (at(Tok::Number))
    {
      return Polynomial::constant(number());
    }
    if (accept("("))
    {
      Guard g(*this);
      Polynomial p = poly();
      expect(")");
      return p;
    }
    std::string v = ident("polynomial variable or constant");
    Polynomial base = Polynomial::variable(v);
    if (accept("^"))
    {
      Nat e = number();
      if (e > 64)
      {
        fail("exponent too large");
      }
      Polynomial r = Polynomial::constant(1);
      for (unsigned long k = 0; k < e.get_ui(); ++k)
      {
        r = r * base;
      }
      return r;
    }
    return base;
  }

  Polynomial bracketPoly()
  {
    expect("[");
    Polynomial p = poly();
    expect("]");
    return p;
  }

  // -- types ---------------------------------------------------------------

  SessionType type()
  {
    Guard g(*this);
    SessionType a = sumType();
    if (accept("-o"))
    {
      return st::lolli(a, type());
    }
    return a;
  }

  SessionType sumType()
  {
    Guard g(*this);
    SessionType a = tensorType();
    if (accept("+"))
    {
      return st::plus(a, sumType());
    }
    if (accept("&"))
    {
      return st::with(a, sumType());
    }
    return a;
  }

  SessionType tensorType()
  {
    Guard g(*this);
    SessionType a = prefixType();
    if (accept("*"))
    {
      return st::tensor(a, tensorType());
    }
    return a;
  }

  SessionType prefixType()
  {
    Guard g(*this);
    if (accept("!"))
    {
      Polynomial p = bracketPoly();
      return st::bang(p, prefixType());
    }
    if (at(Tok::Number) && peek().text == "1")
    {
      next();
      return st::one();
    }
    if (atWord("Bool"))
    {
      next();
      return st::gbool();
    }
    if (atWord("Str"))
    {
      next();
      return st::gstr(bracketPoly());
    }
    if (accept("("))
    {
      SessionType t = type();
      expect(")");
      return t;
    }
    if (at(Tok::Ident) && !kKeywords.count(peek().text))
    {
      auto it = d_aliases.find(peek().text);
      if (it == d_aliases.end())
      {
        fail("unknown type '" + peek().text + "'");
      }
      next();
      return it->second;
    }
    fail("unexpected '" + (at(Tok::End) ? std::string("end of input") : peek().text) + "'",
         "type");
  }

  GroundType groundType()
  {
    SessionType t = prefixType();
    if (!isGround(t))
    {
      fail("term variables need a ground type", "Bool or Str[p]");
    }
    return toGround(t);
  }

  // -- sections ------------------------------------------------------------

  Sections sections()
  {
    Sections s;
    expect("(");
    std::set<std::string> seen;
    auto fresh = [&](const std::string& n) {
      if (!seen.insert(n).second)
      {
        fail("name " + n + " declared twice");
      }
    };
    bool first = true;
    while (!atSym(")"))
    {
      if (!first)
      {
        expect(";");
      }
      first = false;
      std::string kind = peek().text;
      if (kind != "lin" && kind != "exp" && kind != "tm")
      {
        fail("unexpected '" + kind + "'", "lin, exp or tm");
      }
      next();
      expect("{");
      bool firstEntry = true;
      while (!atSym("}"))
      {
        if (!firstEntry)
        {
          expect(",");
        }
        firstEntry = false;
        std::string n = ident("name");
        fresh(n);
        if (kind == "lin")
        {
          expect(":");
          s.lin.emplace_back(n, type());
        }
        else if (kind == "exp")
        {
          Polynomial p = bracketPoly();
          expect(":");
          s.exp.push_back({n, p, type()});
        }
        else
        {
          expect(":");
          s.tm.emplace_back(n, groundType());
        }
      }
      expect("}");
    }
    expect(")");
    return s;
  }

  // -- values and terms ----------------------------------------------------

  bool atValueStart() const
  {
    return at(Tok::Bits) || atWord("true") || atWord("false") ||
           (at(Tok::Ident) && (!kKeywords.count(peek().text) || kSoft.count(peek().text)));
  }

  Value value()
  {
    if (at(Tok::Bits))
    {
      return Value::str(next().text);
    }
    if (atWord("true"))
    {
      next();
      return Value::boolean(true);
    }
    if (atWord("false"))
    {
      next();
      return Value::boolean(false);
    }
    return Value::var(ident("value"));
  }

  Term term()
  {
    if (at(Tok::Ident) && !kKeywords.count(peek().text) && (atSym("[", 1) || atSym("(", 1)))
    {
      std::string f = next().text;
      Polynomial idx = Polynomial::variable("n");
      if (atSym("["))
      {
        idx = bracketPoly();
      }
      expect("(");
      std::vector<Value> args;
      if (!atSym(")"))
      {
        do
        {
          if (!atValueStart())
          {
            fail("function arguments must be values", "value");
          }
          args.push_back(value());
        } while (accept(","));
      }
      expect(")");
      return Term::app(f, idx, args);
    }
    return Term::value(value());
  }

  // -- processes -----------------------------------------------------------

  Process process()
  {
    Guard g(*this);
    Process p = prefix();
    while (accept("|"))
    {
      p = proc::par(p, prefix());
    }
    return p;
  }

  Process prefix()
  {
    Guard g(*this);
    if (at(Tok::Number) && peek().text == "0")
    {
      next();
      return proc::nil();
    }
    if (accept("["))
    {
      expect("]");
      return proc::hole();
    }
    if (accept("("))
    {
      Process p = process();
      expect(")");
      return p;
    }
    if (atWord("new"))
    {
      next();
      std::string y = ident("restricted name");
      SessionType ann;
      if (accept(":"))
      {
        ann = type();
      }
      expect(".");
      return proc::res(y, prefix(), ann);
    }
    if (atWord("send"))
    {
      next();
      std::string x = ident("channel");
      if (accept("("))
      {
        expectWord("new");
        std::string y = ident("sent name");
        expect(")");
        expect(".");
        return proc::boundOut(x, y, prefix());
      }
      std::string y = ident("sent name");
      expect(".");
      return proc::outCh(x, y, prefix());
    }
    if (atWord("recv"))
    {
      next();
      std::string x = ident("channel");
      expect("(");
      std::string y = ident("received name");
      expect(")");
      expect(".");
      return proc::inCh(x, y, prefix());
    }
    if (atWord("out"))
    {
      next();
      std::string x = ident("channel");
      if (!atValueStart())
      {
        fail("unexpected '" + peek().text + "'", "value");
      }
      return proc::outVal(x, value());
    }
    if (atWord("in"))
    {
      next();
      std::string x = ident("channel");
      expect("(");
      std::string z = ident("variable");
      expect(")");
      expect(".");
      return proc::inVal(x, z, prefix());
    }
    if (atWord("let"))
    {
      next();
      std::string z = ident("variable");
      expect("=");
      Term a = term();
      expectWord("in");
      return proc::let(z, a, prefix());
    }
    if (atSym("!"))
    {
      next();
      expectWord("in");
      std::string x = ident("channel");
      expect("(");
      std::string y = ident("received name");
      expect(")");
      expect(".");
      return proc::repIn(x, y, prefix());
    }
    if (atWord("case"))
    {
      next();
      std::string x = ident("channel");
      expectWord("of");
      expectWord("inl");
      expect("=>");
      Process l = prefix();
      expect("/");
      expectWord("inr");
      expect("=>");
      Process r = prefix();
      return proc::caseOf(x, l, r);
    }
    if (atWord("if"))
    {
      next();
      if (!atValueStart())
      {
        fail("unexpected '" + peek().text + "'", "value");
      }
      Value v = value();
      expectWord("then");
      Process l = prefix();
      expectWord("else");
      Process r = prefix();
      return proc::ifThen(v, l, r);
    }
    if (at(Tok::Ident) && !kKeywords.count(peek().text))
    {
      if (atSym(".", 1))
      {
        std::string x = next().text;
        next();
        bool left = atWord("inl");
        if (!left && !atWord("inr"))
        {
          fail("unexpected '" + peek().text + "'", "inl or inr");
        }
        next();
        expect(".");
        return left ? proc::selL(x, prefix()) : proc::selR(x, prefix());
      }
      const ProcDecl* d = nullptr;
      if (d_unit)
      {
        d = d_unit->find(peek().text);
      }
      if (!d && d_scope)
      {
        d = d_scope->find(peek().text);
      }
      if (!d)
      {
        fail("unknown process '" + peek().text + "'");
      }
      next();
      return d->body;
    }
    fail("unexpected '" + (at(Tok::End) ? std::string("end of input") : peek().text) + "'",
         "process");
  }
};

// -- printing ----------------------------------------------------------------

std::string printProc(const Process& p);

std::string printPrefixArg(const Process& p)
{
  return printProc(p);
}

std::string printProc(const Process& p)
{
  switch (p->kind)
  {
    case PK::Nil: return "0";
    case PK::Hole: return "[]";
    case PK::Par: return "(" + printProc(p->p) + " | " + printProc(p->q) + ")";
    case PK::Res:
      if (!p->ann && p->p->kind == PK::OutCh && p->p->y == p->y && p->p->x != p->y)
      {
        return "send " + p->p->x + " (new " + p->y + "). " + printPrefixArg(p->p->p);
      }
      return "new " + p->y + (p->ann ? " : " + typeStr(p->ann) : "") + ". " +
             printPrefixArg(p->p);
    case PK::OutCh: return "send " + p->x + " " + p->y + ". " + printPrefixArg(p->p);
    case PK::InCh: return "recv " + p->x + " (" + p->y + "). " + printPrefixArg(p->p);
    case PK::OutVal: return "out " + p->x + " " + p->v.str();
    case PK::InVal: return "in " + p->x + " (" + p->y + "). " + printPrefixArg(p->p);
    case PK::Let: return "let " + p->y + " = " + p->a.str() + " in " + printPrefixArg(p->p);
    case PK::RepIn: return "!in " + p->x + " (" + p->y + "). " + printPrefixArg(p->p);
    case PK::SelL: return p->x + ".inl. " + printPrefixArg(p->p);
    case PK::SelR: return p->x + ".inr. " + printPrefixArg(p->p);
    case PK::Case:
      return "case " + p->x + " of inl => " + printPrefixArg(p->p) +
             " / inr => " + printPrefixArg(p->q);
    case PK::If:
      return "if " + p->v.str() + " then " + printPrefixArg(p->p) + " else " +
             printPrefixArg(p->q);
  }
  return "";
}

}  // namespace

std::string proc_str(const Process& p)
{
  return printProc(p);
}

SourceUnit parse_unit(const std::string& src)
{
  Parser ps(src, nullptr);
  return ps.unit();
}

Process parse_process(const std::string& src, const SourceUnit* scope)
{
  Parser ps(src, scope);
  return ps.processOnly();
}

SessionType parse_type(const std::string& src)
{
  Parser ps(src, nullptr);
  return ps.typeOnly();
}

Polynomial parsePolynomial(const std::string& text)
{
  Parser ps(text, nullptr);
  return ps.polyOnly();
}

std::string print_sections(const Sections& s)
{
  std::string out = "(";
  std::vector<std::string> parts;
  if (!s.lin.empty())
  {
    std::string t = "lin{";
    for (size_t k = 0; k < s.lin.size(); ++k)
    {
      t += (k ? ", " : "") + s.lin[k].first + " : " + typeStr(s.lin[k].second);
    }
    parts.push_back(t + "}");
  }
  if (!s.exp.empty())
  {
    std::string t = "exp{";
    for (size_t k = 0; k < s.exp.size(); ++k)
    {
      t += (k ? ", " : "") + s.exp[k].name + "[" + s.exp[k].mult.str() + "] : " +
           typeStr(s.exp[k].type);
    }
    parts.push_back(t + "}");
  }
  if (!s.tm.empty())
  {
    std::string t = "tm{";
    for (size_t k = 0; k < s.tm.size(); ++k)
    {
      t += (k ? ", " : "") + s.tm[k].first + " : " + s.tm[k].second.str();
    }
    parts.push_back(t + "}");
  }
  for (size_t k = 0; k < parts.size(); ++k)
  {
    out += (k ? " ; " : "") + parts[k];
  }
  return out + ")";
}

std::string pretty_print(const SourceUnit& u)
{
  std::string out;
  if (!u.params.empty())
  {
    out += "params ";
    for (size_t k = 0; k < u.params.size(); ++k)
    {
      out += (k ? ", " : "") + u.params[k];
    }
    out += ".\n";
  }
  for (const auto& [n, t] : u.aliases)
  {
    out += "type " + n + " = " + typeStr(t) + ".\n";
  }
  for (const auto& d : u.decls)
  {
    out += "\n";
    out += (d.hole ? "ctx " : "proc ") + d.name + print_sections(d.env) + " :: (" + d.chan +
           " : " + typeStr(d.type) + ")";
    if (d.hole)
    {
      out += " hole " + print_sections(d.hole->env) + " :: (" + d.hole->chan + " : " +
             typeStr(d.hole->type) + ")";
    }
    out += " =\n  " + printProc(d.body) + "\n";
  }
  return out;
}

namespace {

bool sectionsEqual(const Sections& a, const Sections& b)
{
  if (a.lin.size() != b.lin.size() || a.exp.size() != b.exp.size() || a.tm.size() != b.tm.size())
  {
    return false;
  }
  for (size_t k = 0; k < a.lin.size(); ++k)
  {
    if (a.lin[k].first != b.lin[k].first || !typeEq(a.lin[k].second, b.lin[k].second))
    {
      return false;
    }
  }
  for (size_t k = 0; k < a.exp.size(); ++k)
  {
    if (a.exp[k].name != b.exp[k].name || a.exp[k].mult != b.exp[k].mult ||
        !typeEq(a.exp[k].type, b.exp[k].type))
    {
      return false;
    }
  }
  for (size_t k = 0; k < a.tm.size(); ++k)
  {
    if (a.tm[k] != b.tm[k])
    {
      return false;
    }
  }
  return true;
}

}  // namespace

bool unit_equal(const SourceUnit& a, const SourceUnit& b)
{
  if (a.params != b.params || a.aliases.size() != b.aliases.size() ||
      a.decls.size() != b.decls.size())
  {
    return false;
  }
  for (size_t k = 0; k < a.aliases.size(); ++k)
  {
    if (a.aliases[k].first != b.aliases[k].first ||
        !typeEq(a.aliases[k].second, b.aliases[k].second))
    {
      return false;
    }
  }
  for (size_t k = 0; k < a.decls.size(); ++k)
  {
    const ProcDecl& x = a.decls[k];
    const ProcDecl& y = b.decls[k];
    if (x.name != y.name || x.chan != y.chan || !typeEq(x.type, y.type) ||
        !sectionsEqual(x.env, y.env) || compareProc(x.body, y.body) != 0 ||
        x.hole.has_value() != y.hole.has_value())
    {
      return false;
    }
    if (x.hole && (x.hole->chan != y.hole->chan || !typeEq(x.hole->type, y.hole->type) ||
                   !sectionsEqual(x.hole->env, y.hole->env)))
    {
      return false;
    }
  }
  return true;
}

}  // namespace pidibll
