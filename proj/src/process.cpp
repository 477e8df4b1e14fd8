#include "pidibll/ast.h"

namespace pidibll {

// ---------------------------------------------------------------------------
// Values and terms

Value Value::ground(const GroundValue& g)
{
  return g.isBool ? boolean(g.b) : str(g.bits);
}

GroundValue Value::toGround() const
{
  switch (kind)
  {
    case Kind::Bool: return GroundValue::boolean(b);
    case Kind::Str: return GroundValue::bitstring(bits);
    default: throw Error(ErrorKind::OpenTerm, "variable " + name + " is not a closed value");
  }
}

int Value::compare(const Value& o) const
{
  if (kind != o.kind)
  {
    return kind < o.kind ? -1 : 1;
  }
  switch (kind)
  {
    case Kind::Var: return name.compare(o.name) < 0 ? -1 : (name == o.name ? 0 : 1);
    case Kind::Bool: return b == o.b ? 0 : (b ? 1 : -1);
    case Kind::Str: return bits.compare(o.bits) < 0 ? -1 : (bits == o.bits ? 0 : 1);
  }
  return 0;
}

std::string Value::str() const
{
  switch (kind)
  {
    case Kind::Var: return name;
    case Kind::Bool: return b ? "true" : "false";
    case Kind::Str: return "#" + bits;
  }
  return "";
}

Term Term::value(const Value& v)
{
  Term t;
  t.val = v;
  return t;
}

Term Term::app(const std::string& f, const Polynomial& p, const std::vector<Value>& args)
{
  Term t;
  t.isApp = true;
  t.fn = f;
  t.index = p;
  t.args = args;
  return t;
}

std::set<std::string> Term::freeVars() const
{
  std::set<std::string> s;
  if (!isApp)
  {
    return valueVars(val);
  }
  for (const auto& v : args)
  {
    if (v.isVar())
    {
      s.insert(v.name);
    }
  }
  return s;
}

int Term::compare(const Term& o) const
{
  if (isApp != o.isApp)
  {
    return isApp ? 1 : -1;
  }
  if (!isApp)
  {
    return val.compare(o.val);
  }
  if (fn != o.fn)
  {
    return fn < o.fn ? -1 : 1;
  }
  if (index != o.index)
  {
    return index < o.index ? -1 : 1;
  }
  if (args.size() != o.args.size())
  {
    return args.size() < o.args.size() ? -1 : 1;
  }
  for (size_t k = 0; k < args.size(); ++k)
  {
    int c = args[k].compare(o.args[k]);
    if (c != 0)
    {
      return c;
    }
  }
  return 0;
}

std::string Term::str() const
{
  if (!isApp)
  {
    return val.str();
  }
  std::string s = fn + "[" + index.str() + "](";
  for (size_t k = 0; k < args.size(); ++k)
  {
    s += (k ? ", " : "") + args[k].str();
  }
  return s + ")";
}

std::set<std::string> valueVars(const Value& v)
{
  if (v.isVar())
  {
    return {v.name};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Constructors

namespace proc {

namespace {
Process mk(ProcNode n)
{
  return std::make_shared<const ProcNode>(std::move(n));
}
}  // namespace

Process nil()
{
  static const Process z = mk(ProcNode{});
  return z;
}

Process hole()
{
  ProcNode n;
  n.kind = PK::Hole;
  return mk(n);
}

Process par(Process p, Process q)
{
  ProcNode n;
  n.kind = PK::Par;
  n.p = std::move(p);
  n.q = std::move(q);
  return mk(n);
}

Process res(const std::string& y, Process p, SessionType ann)
{
  ProcNode n;
  n.kind = PK::Res;
  n.y = y;
  n.p = std::move(p);
  n.ann = std::move(ann);
  return mk(n);
}

Process outCh(const std::string& x, const std::string& y, Process p)
{
  ProcNode n;
  n.kind = PK::OutCh;
  n.x = x;
  n.y = y;
  n.p = std::move(p);
  return mk(n);
}

Process boundOut(const std::string& x, const std::string& y, Process p)
{
  return res(y, outCh(x, y, std::move(p)));
}

Process inCh(const std::string& x, const std::string& y, Process p)
{
  ProcNode n;
  n.kind = PK::InCh;
  n.x = x;
  n.y = y;
  n.p = std::move(p);
  return mk(n);
}

Process outVal(const std::string& x, const Value& v)
{
  ProcNode n;
  n.kind = PK::OutVal;
  n.x = x;
  n.v = v;
  return mk(n);
}

Process inVal(const std::string& x, const std::string& z, Process p)
{
  ProcNode n;
  n.kind = PK::InVal;
  n.x = x;
  n.y = z;
  n.p = std::move(p);
  return mk(n);
}

Process let(const std::string& z, const Term& a, Process p)
{
  ProcNode n;
  n.kind = PK::Let;
  n.y = z;
  n.a = a;
  n.p = std::move(p);
  return mk(n);
}

Process repIn(const std::string& x, const std::string& y, Process p)
{
  ProcNode n;
  n.kind = PK::RepIn;
  n.x = x;
  n.y = y;
  n.p = std::move(p);
  return mk(n);
}

Process selL(const std::string& x, Process p)
{
  ProcNode n;
  n.kind = PK::SelL;
  n.x = x;
  n.p = std::move(p);
  return mk(n);
}

Process selR(const std::string& x, Process p)
{
  ProcNode n;
  n.kind = PK::SelR;
  n.x = x;
  n.p = std::move(p);
  return mk(n);
}

Process caseOf(const std::string& x, Process p, Process q)
{
  ProcNode n;
  n.kind = PK::Case;
  n.x = x;
  n.p = std::move(p);
  n.q = std::move(q);
  return mk(n);
}

Process ifThen(const Value& v, Process p, Process q)
{
  ProcNode n;
  n.kind = PK::If;
  n.v = v;
  n.p = std::move(p);
  n.q = std::move(q);
  return mk(n);
}

}  // namespace proc

// ---------------------------------------------------------------------------
// Comparison

namespace {
int cmpStr(const std::string& a, const std::string& b)
{
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int cmpAnn(const SessionType& a, const SessionType& b)
{
  if (!a || !b)
  {
    return (a ? 1 : 0) - (b ? 1 : 0);
  }
  return typeCompare(a, b);
}
}  // namespace

int compareProc(const Process& a, const Process& b)
{
  if (a.get() == b.get())
  {
    return 0;
  }
  if (a->kind != b->kind)
  {
    return a->kind < b->kind ? -1 : 1;
  }
  int c = 0;
  switch (a->kind)
  {
    case PK::Nil:
    case PK::Hole: return 0;
    case PK::Par:
      c = compareProc(a->p, b->p);
      return c ? c : compareProc(a->q, b->q);
    case PK::Res:
      if ((c = cmpStr(a->y, b->y)))
      {
        return c;
      }
      if ((c = cmpAnn(a->ann, b->ann)))
      {
        return c;
      }
      return compareProc(a->p, b->p);
    case PK::OutCh:
    case PK::InCh:
    case PK::InVal:
    case PK::RepIn:
      if ((c = cmpStr(a->x, b->x)) || (c = cmpStr(a->y, b->y)))
      {
        return c;
      }
      return compareProc(a->p, b->p);
    case PK::OutVal:
      if ((c = cmpStr(a->x, b->x)))
      {
        return c;
      }
      return a->v.compare(b->v);
    case PK::Let:
      if ((c = cmpStr(a->y, b->y)) || (c = a->a.compare(b->a)))
      {
        return c;
      }
      return compareProc(a->p, b->p);
    case PK::SelL:
    case PK::SelR:
      if ((c = cmpStr(a->x, b->x)))
      {
        return c;
      }
      return compareProc(a->p, b->p);
    case PK::Case:
      if ((c = cmpStr(a->x, b->x)) || (c = compareProc(a->p, b->p)))
      {
        return c;
      }
      return compareProc(a->q, b->q);
    case PK::If:
      if ((c = a->v.compare(b->v)) || (c = compareProc(a->p, b->p)))
      {
        return c;
      }
      return compareProc(a->q, b->q);
  }
  return 0;
}

bool isBinder(PK k)
{
  return k == PK::Res || k == PK::InCh || k == PK::InVal || k == PK::Let || k == PK::RepIn;
}

// ---------------------------------------------------------------------------
// Names

namespace {

void addAll(NameSet& into, const NameSet& from)
{
  into.insert(from.begin(), from.end());
}

bool hasSubject(PK k)
{
  switch (k)
  {
    case PK::OutCh:
    case PK::InCh:
    case PK::OutVal:
    case PK::InVal:
    case PK::RepIn:
    case PK::SelL:
    case PK::SelR:
    case PK::Case: return true;
    default: return false;
  }
}

}  // namespace

NameSet free_names(const Process& p)
{
  NameSet s;
  switch (p->kind)
  {
    case PK::Nil:
    case PK::Hole: return s;
    case PK::Par:
      s = free_names(p->p);
      addAll(s, free_names(p->q));
      return s;
    case PK::Res:
      s = free_names(p->p);
      s.erase(p->y);
      return s;
    case PK::OutCh:
      s = free_names(p->p);
      s.insert(p->x);
      s.insert(p->y);
      return s;
    case PK::InCh:
    case PK::InVal:
    case PK::RepIn:
      s = free_names(p->p);
      s.erase(p->y);
      s.insert(p->x);
      return s;
    case PK::OutVal:
      s = valueVars(p->v);
      s.insert(p->x);
      return s;
    case PK::Let:
      s = free_names(p->p);
      s.erase(p->y);
      addAll(s, p->a.freeVars());
      return s;
    case PK::SelL:
    case PK::SelR:
      s = free_names(p->p);
      s.insert(p->x);
      return s;
    case PK::Case:
      s = free_names(p->p);
      addAll(s, free_names(p->q));
      s.insert(p->x);
      return s;
    case PK::If:
      s = free_names(p->p);
      addAll(s, free_names(p->q));
      addAll(s, valueVars(p->v));
      return s;
  }
  return s;
}

NameSet all_names(const Process& p)
{
  NameSet s;
  if (!p)
  {
    return s;
  }
  if (hasSubject(p->kind))
  {
    s.insert(p->x);
  }
  if (isBinder(p->kind) || p->kind == PK::OutCh)
  {
    s.insert(p->y);
  }
  addAll(s, valueVars(p->v));
  if (p->kind == PK::Let)
  {
    addAll(s, p->a.freeVars());
  }
  addAll(s, all_names(p->p));
  addAll(s, all_names(p->q));
  return s;
}

std::string fresh_name(const std::string& base, const NameSet& avoid)
{
  std::string stem = base;
  auto us = stem.find_last_of('_');
  if (us != std::string::npos && us + 1 < stem.size() &&
      stem.find_first_not_of("0123456789", us + 1) == std::string::npos)
  {
    stem = stem.substr(0, us);
  }
  if (stem.empty())
  {
    stem = "v";
  }
  for (unsigned k = 1;; ++k)
  {
    std::string c = stem + "_" + std::to_string(k);
    if (!avoid.count(c))
    {
      return c;
    }
  }
}

namespace {

using Subst = std::map<std::string, Value>;

std::string substChannel(const std::string& x, const Subst& s)
{
  auto it = s.find(x);
  if (it == s.end())
  {
    return x;
  }
  if (!it->second.isVar())
  {
    throw Error(ErrorKind::GroundTypeMismatch,
                "value " + it->second.str() + " substituted for channel " + x);
  }
  return it->second.name;
}

Value substVal(const Value& v, const Subst& s)
{
  if (!v.isVar())
  {
    return v;
  }
  auto it = s.find(v.name);
  return it == s.end() ? v : it->second;
}

Term substTerm(const Term& a, const Subst& s)
{
  Term t = a;
  t.val = substVal(a.val, s);
  for (auto& v : t.args)
  {
    v = substVal(v, s);
  }
  return t;
}

NameSet rangeNames(const Subst& s)
{
  NameSet r;
  for (const auto& [k, v] : s)
  {
    if (v.isVar())
    {
      r.insert(v.name);
    }
  }
  return r;
}

Process substRec(const Process& p, const Subst& s);

// Enter a binder: drop the shadowed key, rename the binder if it would capture.
std::pair<std::string, Subst> underBinder(const std::string& y, const Process& body, const Subst& s)
{
  Subst inner = s;
  inner.erase(y);
  if (inner.empty())
  {
    return {y, inner};
  }
  NameSet range = rangeNames(inner);
  if (!range.count(y))
  {
    return {y, inner};
  }
  NameSet avoid = all_names(body);
  addAll(avoid, range);
  for (const auto& [k, v] : inner)
  {
    avoid.insert(k);
  }
  avoid.insert(y);
  std::string z = fresh_name(y, avoid);
  inner[y] = Value::var(z);
  return {z, inner};
}

Process substRec(const Process& p, const Subst& s)
{
  if (s.empty())
  {
    return p;
  }
  auto n = std::make_shared<ProcNode>(*p);
  switch (p->kind)
  {
    case PK::Nil:
    case PK::Hole: return p;
    case PK::Par:
    case PK::Case:
      if (p->kind == PK::Case)
      {
        n->x = substChannel(p->x, s);
      }
      n->p = substRec(p->p, s);
      n->q = substRec(p->q, s);
      return n;
    case PK::If:
      n->v = substVal(p->v, s);
      n->p = substRec(p->p, s);
      n->q = substRec(p->q, s);
      return n;
    case PK::OutCh:
      n->x = substChannel(p->x, s);
      n->y = substChannel(p->y, s);
      n->p = substRec(p->p, s);
      return n;
    case PK::OutVal:
      n->x = substChannel(p->x, s);
      n->v = substVal(p->v, s);
      return n;
    case PK::SelL:
    case PK::SelR:
      n->x = substChannel(p->x, s);
      n->p = substRec(p->p, s);
      return n;
    case PK::Let:
      n->a = substTerm(p->a, s);
      [[fallthrough]];
    case PK::Res:
    case PK::InCh:
    case PK::InVal:
    case PK::RepIn:
    {
      if (p->kind != PK::Let && p->kind != PK::Res)
      {
        n->x = substChannel(p->x, s);
      }
      auto [y, inner] = underBinder(p->y, p->p, s);
      n->y = y;
      n->p = substRec(p->p, inner);
      return n;
    }
  }
  return n;
}

}  // namespace

Process substitute(const Process& p, const std::map<std::string, Value>& s)
{
  NameSet fn = free_names(p);
  Subst live;
  for (const auto& [k, v] : s)
  {
    if (fn.count(k))
    {
      live.emplace(k, v);
    }
  }
  return substRec(p, live);
}

Process substitute_name(const Process& p, const std::string& from, const std::string& to)
{
  if (from == to)
  {
    return p;
  }
  return substitute(p, {{from, Value::var(to)}});
}

Process substitute_value(const Process& p, const std::string& var, const Value& v)
{
  return substitute(p, {{var, v}});
}

// ---------------------------------------------------------------------------
// Canonical names

namespace {

struct Canon
{
  NameSet freeSet;
  unsigned next = 0;

  std::string fresh()
  {
    for (;;)
    {
      std::string c = "_" + std::to_string(next++);
      if (!freeSet.count(c))
      {
        return c;
      }
    }
  }

  static std::string look(const std::string& x, const std::map<std::string, std::string>& env)
  {
    auto it = env.find(x);
    return it == env.end() ? x : it->second;
  }

  static Value lookV(const Value& v, const std::map<std::string, std::string>& env)
  {
    if (!v.isVar())
    {
      return v;
    }
    return Value::var(look(v.name, env));
  }

  Process run(const Process& p, const std::map<std::string, std::string>& env)
  {
    auto n = std::make_shared<ProcNode>(*p);
    switch (p->kind)
    {
      case PK::Nil:
      case PK::Hole: return p;
      case PK::Par:
        n->p = run(p->p, env);
        n->q = run(p->q, env);
        return n;
      case PK::Case:
        n->x = look(p->x, env);
        n->p = run(p->p, env);
        n->q = run(p->q, env);
        return n;
      case PK::If:
        n->v = lookV(p->v, env);
        n->p = run(p->p, env);
        n->q = run(p->q, env);
        return n;
      case PK::OutCh:
        n->x = look(p->x, env);
        n->y = look(p->y, env);
        n->p = run(p->p, env);
        return n;
      case PK::OutVal:
        n->x = look(p->x, env);
        n->v = lookV(p->v, env);
        return n;
      case PK::SelL:
      case PK::SelR:
        n->x = look(p->x, env);
        n->p = run(p->p, env);
        return n;
      case PK::Let:
        n->a.val = lookV(p->a.val, env);
        for (auto& v : n->a.args)
        {
          v = lookV(v, env);
        }
        [[fallthrough]];
      case PK::Res:
      case PK::InCh:
      case PK::InVal:
      case PK::RepIn:
      {
        if (p->kind != PK::Let && p->kind != PK::Res)
        {
          n->x = look(p->x, env);
        }
        std::string y = fresh();
        auto inner = env;
        inner[p->y] = y;
        n->y = y;
        n->p = run(p->p, inner);
        return n;
      }
    }
    return n;
  }
};

}  // namespace

Process canonicalize(const Process& p)
{
  Canon c;
  c.freeSet = free_names(p);
  return c.run(p, {});
}

bool alpha_eq(const Process& a, const Process& b)
{
  return compareProc(canonicalize(a), canonicalize(b)) == 0;
}

// ---------------------------------------------------------------------------
// Parameters, holes, sizes

Process instantiate_params(const Process& p, const ParamSubstitution& rho)
{
  if (!p)
  {
    return p;
  }
  auto n = std::make_shared<ProcNode>(*p);
  if (p->kind == PK::Let && p->a.isApp)
  {
    n->a.index = p->a.index.substitute(rho);
  }
  if (p->ann)
  {
    n->ann = substituteType(p->ann, rho);
  }
  n->p = instantiate_params(p->p, rho);
  n->q = instantiate_params(p->q, rho);
  return n;
}

NameSet param_vars(const Process& p)
{
  NameSet s;
  if (!p)
  {
    return s;
  }
  if (p->kind == PK::Let && p->a.isApp)
  {
    addAll(s, p->a.index.vars());
  }
  if (p->ann)
  {
    addAll(s, typeVars(p->ann));
  }
  addAll(s, param_vars(p->p));
  addAll(s, param_vars(p->q));
  return s;
}

size_t proc_size(const Process& p)
{
  if (!p)
  {
    return 0;
  }
  return 1 + proc_size(p->p) + proc_size(p->q);
}

size_t count_holes(const Process& p)
{
  if (!p)
  {
    return 0;
  }
  return (p->kind == PK::Hole ? 1 : 0) + count_holes(p->p) + count_holes(p->q);
}

Process fill_hole(const Process& c, const Process& p)
{
  if (!c)
  {
    return c;
  }
  if (c->kind == PK::Hole)
  {
    return p;
  }
  if (!c->p && !c->q)
  {
    return c;
  }
  auto n = std::make_shared<ProcNode>(*c);
  n->p = fill_hole(c->p, p);
  n->q = fill_hole(c->q, p);
  return n;
}

// ---------------------------------------------------------------------------
// Labels

const std::string& ActionLabel::subject() const
{
  if (kind == Kind::Tau)
  {
    throw Error(ErrorKind::NoRuleApplies, "tau has no subject");
  }
  return x;
}

NameSet ActionLabel::bound() const
{
  if (kind == Kind::BoundOut || kind == Kind::In)
  {
    return {y};
  }
  return {};
}

NameSet ActionLabel::names() const
{
  NameSet s;
  if (kind == Kind::Tau)
  {
    return s;
  }
  s.insert(x);
  if (kind == Kind::Out || kind == Kind::In || kind == Kind::BoundOut)
  {
    s.insert(y);
  }
  return s;
}

int ActionLabel::compare(const ActionLabel& o) const
{
  if (kind != o.kind)
  {
    return kind < o.kind ? -1 : 1;
  }
  int c = cmpStr(x, o.x);
  if (c)
  {
    return c;
  }
  if ((c = cmpStr(y, o.y)))
  {
    return c;
  }
  if (val == o.val)
  {
    return 0;
  }
  return val < o.val ? -1 : 1;
}

std::string ActionLabel::str() const
{
  switch (kind)
  {
    case Kind::Tau: return "tau";
    case Kind::Out: return x + "!<" + y + ">";
    case Kind::In: return x + "?(" + y + ")";
    case Kind::BoundOut: return "(new " + y + ")" + x + "!<" + y + ">";
    case Kind::InL: return x + ".inl";
    case Kind::InR: return x + ".inr";
    case Kind::OutL: return x + "!.inl";
    case Kind::OutR: return x + "!.inr";
    case Kind::InV: return x + "?(" + val.str() + ")";
    case Kind::OutV: return x + "!<" + val.str() + ">";
  }
  return "";
}

bool labels_complementary(const ActionLabel& a, const ActionLabel& b)
{
  using K = ActionLabel::Kind;
  if (a.kind == K::Tau || b.kind == K::Tau || a.x != b.x)
  {
    return false;
  }
  auto oneWay = [](const ActionLabel& o, const ActionLabel& i) {
    switch (o.kind)
    {
      case K::Out:
      case K::BoundOut: return i.kind == K::In;
      case K::OutL: return i.kind == K::InL;
      case K::OutR: return i.kind == K::InR;
      case K::OutV: return i.kind == K::InV && i.val == o.val;
      default: return false;
    }
  };
  return oneWay(a, b) || oneWay(b, a);
}

}  // namespace pidibll
