#include "pidibll/session_type.h"

namespace pidibll {

namespace st {

namespace {
SessionType mk(ST k, SessionType a = nullptr, SessionType b = nullptr, Polynomial p = {})
{
  return std::make_shared<const SessionTypeNode>(SessionTypeNode{k, std::move(a), std::move(b), std::move(p)});
}
}  // namespace

SessionType one() { return mk(ST::One); }
SessionType lolli(SessionType a, SessionType b) { return mk(ST::Lolli, a, b); }
SessionType bang(const Polynomial& p, SessionType a) { return mk(ST::Bang, a, nullptr, p); }
SessionType tensor(SessionType a, SessionType b) { return mk(ST::Tensor, a, b); }
SessionType plus(SessionType a, SessionType b) { return mk(ST::Plus, a, b); }
SessionType with(SessionType a, SessionType b) { return mk(ST::With, a, b); }
SessionType gbool() { return mk(ST::GBool); }
SessionType gstr(const Polynomial& p) { return mk(ST::GStr, nullptr, nullptr, p); }
SessionType unknown() { return mk(ST::Unknown); }
SessionType ground(const GroundType& g)
{
  return g.isBool() ? gbool() : gstr(g.len);
}

}  // namespace st

int typeCompare(const SessionType& a, const SessionType& b)
{
  if (a.get() == b.get())
  {
    return 0;
  }
  if (a->kind != b->kind)
  {
    return a->kind < b->kind ? -1 : 1;
  }
  switch (a->kind)
  {
    case ST::One:
    case ST::GBool:
    case ST::Unknown: return 0;
    case ST::GStr:
      if (a->p == b->p)
      {
        return 0;
      }
      return a->p < b->p ? -1 : 1;
    case ST::Bang:
      if (a->p != b->p)
      {
        return a->p < b->p ? -1 : 1;
      }
      return typeCompare(a->a, b->a);
    default:
    {
      int c = typeCompare(a->a, b->a);
      return c != 0 ? c : typeCompare(a->b, b->b);
    }
  }
}

bool typeEq(const SessionType& a, const SessionType& b)
{
  return typeCompare(a, b) == 0;
}

bool isGround(const SessionType& a)
{
  return a->kind == ST::GBool || a->kind == ST::GStr;
}

GroundType toGround(const SessionType& a)
{
  return a->kind == ST::GBool ? GroundType::boolean() : GroundType::str(a->p);
}

bool hasUnknown(const SessionType& a)
{
  if (!a)
  {
    return false;
  }
  if (a->kind == ST::Unknown)
  {
    return true;
  }
  return hasUnknown(a->a) || hasUnknown(a->b);
}

std::optional<SessionType> unifyTypes(const SessionType& a, const SessionType& b)
{
  if (a->kind == ST::Unknown)
  {
    return b;
  }
  if (b->kind == ST::Unknown)
  {
    return a;
  }
  if (a->kind != b->kind)
  {
    return std::nullopt;
  }
  switch (a->kind)
  {
    case ST::One:
    case ST::GBool: return a;
    case ST::GStr:
      if (a->p != b->p)
      {
        return std::nullopt;
      }
      return a;
    case ST::Bang:
    {
      if (a->p != b->p)
      {
        return std::nullopt;
      }
      auto x = unifyTypes(a->a, b->a);
      if (!x)
      {
        return std::nullopt;
      }
      return st::bang(a->p, *x);
    }
    default:
    {
      auto x = unifyTypes(a->a, b->a);
      auto y = unifyTypes(a->b, b->b);
      if (!x || !y)
      {
        return std::nullopt;
      }
      auto n = std::make_shared<SessionTypeNode>(*a);
      n->a = *x;
      n->b = *y;
      return SessionType(n);
    }
  }
}

std::set<std::string> typeVars(const SessionType& a)
{
  std::set<std::string> v;
  if (!a)
  {
    return v;
  }
  if (a->kind == ST::GStr || a->kind == ST::Bang)
  {
    v = a->p.vars();
  }
  for (const auto& x : typeVars(a->a))
  {
    v.insert(x);
  }
  for (const auto& x : typeVars(a->b))
  {
    v.insert(x);
  }
  return v;
}

SessionType substituteType(const SessionType& a, const std::map<std::string, Polynomial>& s)
{
  if (!a)
  {
    return a;
  }
  auto n = std::make_shared<SessionTypeNode>(*a);
  n->p = a->p.substitute(s);
  n->a = substituteType(a->a, s);
  n->b = substituteType(a->b, s);
  return n;
}

SessionType substituteType(const SessionType& a, const ParamSubstitution& rho)
{
  std::map<std::string, Polynomial> s;
  for (const auto& [v, n] : rho.bindings())
  {
    s.emplace(v, Polynomial::constant(n));
  }
  return substituteType(a, s);
}

namespace {

// Levels: 0 lolli, 1 plus/with, 2 tensor, 3 prefix/atom.
int level(const SessionType& a)
{
  switch (a->kind)
  {
    case ST::Lolli: return 0;
    case ST::Plus:
    case ST::With: return 1;
    case ST::Tensor: return 2;
    default: return 3;
  }
}

std::string polyBracket(const Polynomial& p)
{
  return "[" + p.str() + "]";
}

std::string show(const SessionType& a, int ctx)
{
  std::string s;
  switch (a->kind)
  {
    case ST::One: s = "1"; break;
    case ST::GBool: s = "Bool"; break;
    case ST::GStr: s = "Str" + polyBracket(a->p); break;
    case ST::Unknown: s = "?"; break;
    case ST::Bang: s = "!" + polyBracket(a->p) + " " + show(a->a, 3); break;
    case ST::Lolli: s = show(a->a, 1) + " -o " + show(a->b, 0); break;
    case ST::Tensor: s = show(a->a, 3) + " * " + show(a->b, 2); break;
    case ST::Plus: s = show(a->a, 2) + " + " + show(a->b, 1); break;
    case ST::With: s = show(a->a, 2) + " & " + show(a->b, 1); break;
  }
  if (level(a) < ctx)
  {
    return "(" + s + ")";
  }
  return s;
}

}  // namespace

std::string typeStr(const SessionType& a)
{
  return show(a, 0);
}

}  // namespace pidibll
