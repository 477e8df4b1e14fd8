#include <algorithm>
#include <functional>

#include "typing_internal.h"

namespace pidibll {

using detail::Cluster;
using detail::SynthCtx;

// ---------------------------------------------------------------------------
// Environments

UnrestrictedEnv env_sum(const UnrestrictedEnv& a, const UnrestrictedEnv& b)
{
  UnrestrictedEnv r = a;
  for (const auto& [x, e] : b)
  {
    auto it = r.find(x);
    if (it == r.end())
    {
      r.emplace(x, e);
      continue;
    }
    if (!typeEq(it->second.type, e.type))
    {
      throw Error(ErrorKind::TypeMismatchAtName, x + " has type " + typeStr(it->second.type) +
                                                     " and " + typeStr(e.type));
    }
    it->second.mult = it->second.mult + e.mult;
  }
  return r;
}

UnrestrictedEnv env_scale(const Polynomial& p, const UnrestrictedEnv& g)
{
  UnrestrictedEnv r = g;
  for (auto& [x, e] : r)
  {
    e.mult = p * e.mult;
  }
  return r;
}

bool env_leq(const UnrestrictedEnv& a, const UnrestrictedEnv& b)
{
  for (const auto& [x, e] : a)
  {
    auto it = b.find(x);
    if (it == b.end())
    {
      if (!e.mult.isZero())
      {
        return false;
      }
      continue;
    }
    if (!typeEq(e.type, it->second.type) || !poly_leq(e.mult, it->second.mult))
    {
      return false;
    }
  }
  return true;
}

std::string env_str(const UnrestrictedEnv& g)
{
  std::string s;
  for (const auto& [x, e] : g)
  {
    s += (s.empty() ? "" : ", ") + x + "[" + e.mult.str() + "] : " + typeStr(e.type);
  }
  return s;
}

std::string env_str(const LinearEnv& d)
{
  std::string s;
  for (const auto& [x, t] : d)
  {
    s += (s.empty() ? "" : ", ") + x + " : " + typeStr(t);
  }
  return s;
}

std::string env_str(const TermEnv& t)
{
  std::string s;
  for (const auto& [x, g] : t)
  {
    s += (s.empty() ? "" : ", ") + x + " : " + g.str();
  }
  return s;
}

std::string Judgment::str() const
{
  return env_str(gamma) + " ; " + env_str(delta) + " ; " + env_str(theta) + " |- " +
         proc_str(proc) + " :: " + chan + " : " + typeStr(type);
}

// ---------------------------------------------------------------------------
// Terms

namespace {

void checkVars(const std::set<std::string>& vs, const VarSet& V, const std::string& where)
{
  for (const auto& v : vs)
  {
    if (!V.count(v))
    {
      throw Error(ErrorKind::VarsOutsideV, "variable " + v + " in " + where + " is not declared");
    }
  }
}

void checkThetaVars(const TermEnv& theta, const VarSet& V)
{
  for (const auto& [x, b] : theta)
  {
    checkVars(b.vars(), V, "the type of " + x);
  }
}

const FunctionSymbol& resolveApp(const TermEnv& theta, const Term& a, const Registry& reg)
{
  std::vector<bool> kinds;
  for (const auto& v : a.args)
  {
    if (v.isVar())
    {
      auto it = theta.find(v.name);
      if (it == theta.end())
      {
        throw Error(ErrorKind::UnknownVariable, "unbound term variable " + v.name);
      }
      kinds.push_back(it->second.isBool());
    }
    else
    {
      kinds.push_back(v.kind == Value::Kind::Bool);
    }
  }
  if (!reg.has(a.fn))
  {
    throw Error(ErrorKind::UnknownSymbol, "unknown function symbol '" + a.fn + "'");
  }
  if (reg.isOverload(a.fn))
  {
    return reg.resolve(a.fn, kinds);
  }
  return reg.lookup(a.fn);
}

}  // namespace

void check_value(const TermEnv& theta, const VarSet& V, const Value& v, const GroundType& b)
{
  checkThetaVars(theta, V);
  checkVars(b.vars(), V, b.str());
  switch (v.kind)
  {
    case Value::Kind::Var:
    {
      auto it = theta.find(v.name);
      if (it == theta.end())
      {
        throw Error(ErrorKind::UnknownVariable, "unbound term variable " + v.name);
      }
      if (it->second != b)
      {
        throw Error(ErrorKind::GroundTypeMismatch,
                    v.name + " has type " + it->second.str() + ", expected " + b.str());
      }
      return;
    }
    case Value::Kind::Bool:
      if (!b.isBool())
      {
        throw Error(ErrorKind::GroundTypeMismatch, v.str() + " is not a " + b.str());
      }
      return;
    case Value::Kind::Str:
      if (b.isBool())
      {
        throw Error(ErrorKind::GroundTypeMismatch, v.str() + " is not a Bool");
      }
      if (!poly_leq(Polynomial::constant(v.bits.size()), b.len))
      {
        throw Error(ErrorKind::StringTooLong, v.str() + " does not fit " + b.str());
      }
      return;
  }
}

GroundType check_term(const TermEnv& theta, const VarSet& V, const Term& a, const Registry& reg)
{
  checkThetaVars(theta, V);
  if (!a.isApp)
  {
    switch (a.val.kind)
    {
      case Value::Kind::Var:
      {
        auto it = theta.find(a.val.name);
        if (it == theta.end())
        {
          throw Error(ErrorKind::UnknownVariable, "unbound term variable " + a.val.name);
        }
        return it->second;
      }
      case Value::Kind::Bool: return GroundType::boolean();
      case Value::Kind::Str:
        return GroundType::str(Polynomial::constant(a.val.bits.size()));
    }
  }
  checkVars(a.index.vars(), V, "the annotation of " + a.fn);
  const FunctionSymbol& f = resolveApp(theta, a, reg);
  if (f.args.size() != a.args.size())
  {
    throw Error(ErrorKind::SignatureMismatch, f.name + " expects " +
                                                  std::to_string(f.args.size()) +
                                                  " arguments");
  }
  std::map<std::string, Polynomial> inst{{"n", a.index}};
  for (size_t k = 0; k < a.args.size(); ++k)
  {
    try
    {
      check_value(theta, V, a.args[k], f.args[k].substitute(inst));
    }
    catch (const Error& e)
    {
      if (e.kind() == ErrorKind::GroundTypeMismatch)
      {
        throw Error(ErrorKind::SignatureMismatch,
                    "argument " + std::to_string(k + 1) + " of " + f.name + ": " + e.what());
      }
      throw;
    }
  }
  return f.result.substitute(inst);
}

// ---------------------------------------------------------------------------
// Process rules

namespace {

using GTypes = std::map<std::string, SessionType>;

struct Ctx
{
  VarSet V;
  const Registry* reg;
  const HoleSpec* hole;
};

[[noreturn]] void noRule(const Process& P, const std::string& why)
{
  throw Error(ErrorKind::NoRuleApplies, why + " at `" + proc_str(P) + "`");
}

Polynomial weightOf(const TypingDerivation& d)
{
  const std::string& r = d.rule;
  auto w = [&](size_t k) { return d.premises.at(k).weight; };
  Polynomial one = Polynomial::constant(1);
  if (r == "T1R" || r == "TSR" || r == "TBR" || r == "Hole")
  {
    return one;
  }
  if (r == "Tcut!")
  {
    return one + d.mult * (one + w(0)) + w(1);
  }
  if (r == "T!pR")
  {
    return one + d.mult * (one + w(0));
  }
  if (r == "Tterm_eval")
  {
    return d.cost + w(0) + one;
  }
  if (r == "Struct")
  {
    return w(0);
  }
  Polynomial s = one;
  for (const auto& p : d.premises)
  {
    s = s + p.weight;
  }
  return s;
}

UnrestrictedEnv zeroUsage(const GTypes& G)
{
  UnrestrictedEnv u;
  for (const auto& [x, t] : G)
  {
    u[x] = UEntry{Polynomial(), t};
  }
  return u;
}

UnrestrictedEnv joinUsage(const UnrestrictedEnv& a, const UnrestrictedEnv& b)
{
  UnrestrictedEnv r = a;
  for (const auto& [x, e] : b)
  {
    auto it = r.find(x);
    if (it == r.end())
    {
      r.emplace(x, e);
      continue;
    }
    const Polynomial& p = it->second.mult;
    const Polynomial& q = e.mult;
    if (poly_leq(p, q))
    {
      it->second.mult = q;
    }
    else if (!poly_leq(q, p))
    {
      it->second.mult = p + q;
    }
  }
  return r;
}

TypingDerivation mk(const std::string& rule, const Ctx& ctx, UnrestrictedEnv gamma,
                    LinearEnv delta, TermEnv theta, Process P, std::string z, SessionType C,
                    std::vector<TypingDerivation> premises)
{
  TypingDerivation d;
  d.rule = rule;
  d.concl = Judgment{ctx.V, std::move(gamma), std::move(delta), std::move(theta),
                     std::move(P),  std::move(z),     std::move(C)};
  d.premises = std::move(premises);
  d.weight = weightOf(d);
  return d;
}

void refresh(TypingDerivation& d)
{
  d.weight = weightOf(d);
}

// Wrap a derivation whose Delta lacks the 1-typed names in `ones` with T1L nodes.
TypingDerivation dischargeOnes(const Ctx& ctx, TypingDerivation d, const LinearEnv& ones)
{
  for (const auto& [x, t] : ones)
  {
    LinearEnv delta = d.concl.delta;
    delta[x] = t;
    Judgment j = d.concl;
    d = mk("T1L", ctx, j.gamma, delta, j.theta, j.proc, j.chan, j.type, {d});
    d.name = x;
  }
  return d;
}

LinearEnv onesOnly(const LinearEnv& D, const Process& P)
{
  LinearEnv ones;
  for (const auto& [x, t] : D)
  {
    if (t->kind != ST::One)
    {
      throw Error(ErrorKind::LinearityViolation,
                  "linear channel " + x + " : " + typeStr(t) + " is never used in `" +
                      proc_str(P) + "`");
    }
    ones[x] = t;
  }
  return ones;
}

std::pair<LinearEnv, LinearEnv> splitDelta(const LinearEnv& D, const Process& P1,
                                           const Process& P2)
{
  NameSet f1 = free_names(P1);
  NameSet f2 = free_names(P2);
  LinearEnv d1, d2;
  for (const auto& [x, t] : D)
  {
    bool a = f1.count(x);
    bool b = f2.count(x);
    if (a && b)
    {
      throw Error(ErrorKind::LinearityViolation, "linear channel " + x + " used by both `" +
                                                     proc_str(P1) + "` and `" + proc_str(P2) +
                                                     "`");
    }
    (a ? d1 : d2)[x] = t;
  }
  return {d1, d2};
}

GTypes typesOf(const UnrestrictedEnv& g)
{
  GTypes G;
  for (const auto& [x, e] : g)
  {
    G[x] = e.type;
  }
  return G;
}

TypingDerivation chk(const Ctx& ctx, const GTypes& G, const LinearEnv& D, const TermEnv& T,
                     const Process& P, const std::string& z, const SessionType& C);

TypingDerivation chkCluster(const Ctx& ctx, const GTypes& G, const LinearEnv& D,
                            const TermEnv& T, const Process& P, const std::string& z,
                            const SessionType& C);

TypingDerivation leaf(const std::string& rule, const Ctx& ctx, const GTypes& G,
                      const LinearEnv& D, const TermEnv& T, const Process& P,
                      const std::string& z, const SessionType& C)
{
  LinearEnv ones = onesOnly(D, P);
  TypingDerivation d = mk(rule, ctx, zeroUsage(G), {}, T, P, z, C, {});
  return dischargeOnes(ctx, d, ones);
}

TypingDerivation holeAxiom(const Ctx& ctx, const GTypes& G, const LinearEnv& D,
                           const TermEnv& T, const Process& P, const std::string& z,
                           const SessionType& C)
{
  if (!ctx.hole)
  {
    noRule(P, "hole outside a context declaration");
  }
  const HoleSpec& h = *ctx.hole;
  if (h.chan != z || !typeEq(h.type, C))
  {
    throw Error(ErrorKind::InvalidContext, "hole offers " + h.chan + " : " + typeStr(h.type) +
                                               " but the context needs " + z + " : " +
                                               typeStr(C));
  }
  LinearEnv rest = D;
  for (const auto& [x, t] : h.env.lin)
  {
    auto it = rest.find(x);
    if (it == rest.end() || !typeEq(it->second, t))
    {
      throw Error(ErrorKind::InvalidContext, "hole expects " + x + " : " + typeStr(t));
    }
    rest.erase(it);
  }
  for (const auto& [x, b] : h.env.tm)
  {
    auto it = T.find(x);
    if (it == T.end() || it->second != b)
    {
      throw Error(ErrorKind::InvalidContext, "hole expects term variable " + x + " : " + b.str());
    }
  }
  UnrestrictedEnv use = zeroUsage(G);
  for (const auto& e : h.env.exp)
  {
    auto it = G.find(e.name);
    if (it == G.end() || !typeEq(it->second, e.type))
    {
      throw Error(ErrorKind::InvalidContext, "hole expects shared " + e.name);
    }
    use[e.name].mult = e.mult;
  }
  LinearEnv ones = onesOnly(rest, P);
  LinearEnv hd;
  for (const auto& [x, t] : h.env.lin)
  {
    hd[x] = t;
  }
  TypingDerivation d = mk("Hole", ctx, use, hd, T, P, z, C, {});
  return dischargeOnes(ctx, d, ones);
}

TypingDerivation chkBoundOut(const Ctx& ctx, const GTypes& G, const LinearEnv& D,
                             const TermEnv& T, const Process& P, const std::string& z,
                             const SessionType& C)
{
  const std::string& y = P->y;
  const Process& out = P->p;
  const std::string& x = out->x;
  const Process& body = out->p;
  if (x == z)
  {
    if (C->kind != ST::Tensor)
    {
      noRule(P, "output on " + z + " which offers " + typeStr(C));
    }
    if (body->kind != PK::Par)
    {
      noRule(P, "a sent channel needs a `(P | Q)` continuation");
    }
    auto [d1, d2] = splitDelta(D, body->p, body->q);
    TypingDerivation a = chk(ctx, G, d1, T, body->p, y, C->a);
    TypingDerivation b = chk(ctx, G, d2, T, body->q, z, C->b);
    UnrestrictedEnv use = env_sum(a.concl.gamma, b.concl.gamma);
    return mk("TtensorR", ctx, use, D, T, P, z, C, {a, b});
  }
  auto lin = D.find(x);
  if (lin != D.end())
  {
    SessionType t = lin->second;
    if (t->kind != ST::Lolli)
    {
      noRule(P, "output on " + x + " : " + typeStr(t));
    }
    if (body->kind != PK::Par)
    {
      noRule(P, "a sent channel needs a `(P | Q)` continuation");
    }
    LinearEnv rest = D;
    rest.erase(x);
    if (free_names(body->p).count(x))
    {
      throw Error(ErrorKind::LinearityViolation,
                  x + " used inside the provider of " + y + " in `" + proc_str(P) + "`");
    }
    auto [d1, d2] = splitDelta(rest, body->p, body->q);
    d2[x] = t->b;
    TypingDerivation a = chk(ctx, G, d1, T, body->p, y, t->a);
    TypingDerivation b = chk(ctx, G, d2, T, body->q, z, C);
    UnrestrictedEnv use = env_sum(a.concl.gamma, b.concl.gamma);
    return mk("TlolliL", ctx, use, D, T, P, z, C, {a, b});
  }
  auto sh = G.find(x);
  if (sh != G.end())
  {
    LinearEnv inner = D;
    inner[y] = sh->second;
    TypingDerivation a = chk(ctx, G, inner, T, body, z, C);
    UnrestrictedEnv use = a.concl.gamma;
    use[x].type = sh->second;
    use[x].mult = use[x].mult + Polynomial::constant(1);
    TypingDerivation d = mk("Tcopy", ctx, use, D, T, P, z, C, {a});
    d.name = x;
    return d;
  }
  noRule(P, "channel " + x + " is not in scope");
}

TypingDerivation chk(const Ctx& ctx, const GTypes& G, const LinearEnv& D, const TermEnv& T,
                     const Process& P, const std::string& z, const SessionType& C)
{
  // T!pL, applied eagerly.
  for (const auto& [x, t] : D)
  {
    if (t->kind != ST::Bang)
    {
      continue;
    }
    LinearEnv rest = D;
    rest.erase(x);
    GTypes g2 = G;
    g2[x] = t->a;
    TypingDerivation inner = chk(ctx, g2, rest, T, P, z, C);
    Polynomial used = inner.concl.gamma.count(x) ? inner.concl.gamma[x].mult : Polynomial();
    if (!poly_leq(used, t->p))
    {
      throw Error(ErrorKind::MultiplicityExceeded, x + " is used " + used.str() +
                                                       " times but offers " + t->p.str());
    }
    UnrestrictedEnv use = inner.concl.gamma;
    use.erase(x);
    TypingDerivation d = mk("T!pL", ctx, use, D, T, P, z, C, {inner});
    d.name = x;
    d.mult = t->p;
    return d;
  }

  switch (P->kind)
  {
    case PK::Nil:
      if (C->kind != ST::One)
      {
        noRule(P, "0 offers 1, not " + typeStr(C));
      }
      return leaf("T1R", ctx, G, D, T, P, z, C);
    case PK::Hole: return holeAxiom(ctx, G, D, T, P, z, C);
    case PK::OutVal:
    {
      if (P->x != z)
      {
        noRule(P, "value output on " + P->x + ", which is not the offered channel");
      }
      if (!isGround(C))
      {
        noRule(P, "value output where " + typeStr(C) + " is expected");
      }
      GroundType b = toGround(C);
      check_value(T, ctx.V, P->v, b);
      return leaf(b.isBool() ? "TBR" : "TSR", ctx, G, D, T, P, z, C);
    }
    case PK::InVal:
    {
      auto it = D.find(P->x);
      if (it == D.end() || !isGround(it->second))
      {
        noRule(P, "value input on " + P->x + ", which is not a ground linear channel");
      }
      GroundType b = toGround(it->second);
      LinearEnv rest = D;
      rest.erase(P->x);
      TermEnv t2 = T;
      t2[P->y] = b;
      TypingDerivation a = chk(ctx, G, rest, t2, P->p, z, C);
      return mk(b.isBool() ? "TBL" : "TSL", ctx, a.concl.gamma, D, T, P, z, C, {a});
    }
    case PK::Let:
    {
      GroundType b = check_term(T, ctx.V, P->a, *ctx.reg);
      TermEnv t2 = T;
      t2[P->y] = b;
      TypingDerivation a = chk(ctx, G, D, t2, P->p, z, C);
      TypingDerivation d = mk("Tterm_eval", ctx, a.concl.gamma, D, T, P, z, C, {a});
      if (P->a.isApp)
      {
        const FunctionSymbol& f = resolveApp(T, P->a, *ctx.reg);
        d.cost = f.cost.substitute({{"n", P->a.index}});
        refresh(d);
      }
      return d;
    }
    case PK::If:
    {
      check_value(T, ctx.V, P->v, GroundType::boolean());
      TypingDerivation a = chk(ctx, G, D, T, P->p, z, C);
      TypingDerivation b = chk(ctx, G, D, T, P->q, z, C);
      return mk("Tif_then_else", ctx, joinUsage(a.concl.gamma, b.concl.gamma), D, T, P, z, C,
                {a, b});
    }
    case PK::InCh:
    {
      if (P->x == z)
      {
        if (C->kind != ST::Lolli)
        {
          noRule(P, "input on " + z + " which offers " + typeStr(C));
        }
        LinearEnv d2 = D;
        d2[P->y] = C->a;
        TypingDerivation a = chk(ctx, G, d2, T, P->p, z, C->b);
        return mk("TlolliR", ctx, a.concl.gamma, D, T, P, z, C, {a});
      }
      auto it = D.find(P->x);
      if (it == D.end() || it->second->kind != ST::Tensor)
      {
        noRule(P, "channel input on " + P->x);
      }
      LinearEnv d2 = D;
      d2[P->y] = it->second->a;
      d2[P->x] = it->second->b;
      TypingDerivation a = chk(ctx, G, d2, T, P->p, z, C);
      return mk("TtensorL", ctx, a.concl.gamma, D, T, P, z, C, {a});
    }
    case PK::RepIn:
    {
      if (P->x != z || C->kind != ST::Bang)
      {
        noRule(P, "replicated input must provide the offered !-channel");
      }
      LinearEnv ones = onesOnly(D, P);
      TypingDerivation a = chk(ctx, G, {}, T, P->p, P->y, C->a);
      TypingDerivation d =
          mk("T!pR", ctx, env_scale(C->p, a.concl.gamma), {}, T, P, z, C, {a});
      d.mult = C->p;
      refresh(d);
      return dischargeOnes(ctx, d, ones);
    }
    case PK::SelL:
    case PK::SelR:
    {
      bool left = P->kind == PK::SelL;
      if (P->x == z)
      {
        if (C->kind != ST::Plus)
        {
          noRule(P, "selection on " + z + " which offers " + typeStr(C));
        }
        TypingDerivation a = chk(ctx, G, D, T, P->p, z, left ? C->a : C->b);
        return mk(left ? "TplusR1" : "TplusR2", ctx, a.concl.gamma, D, T, P, z, C, {a});
      }
      auto it = D.find(P->x);
      if (it == D.end() || it->second->kind != ST::With)
      {
        noRule(P, "selection on " + P->x);
      }
      LinearEnv d2 = D;
      d2[P->x] = left ? it->second->a : it->second->b;
      TypingDerivation a = chk(ctx, G, d2, T, P->p, z, C);
      return mk(left ? "TwithL1" : "TwithL2", ctx, a.concl.gamma, D, T, P, z, C, {a});
    }
    case PK::Case:
    {
      if (P->x == z)
      {
        if (C->kind != ST::With)
        {
          noRule(P, "branching on " + z + " which offers " + typeStr(C));
        }
        TypingDerivation a = chk(ctx, G, D, T, P->p, z, C->a);
        TypingDerivation b = chk(ctx, G, D, T, P->q, z, C->b);
        return mk("TwithR", ctx, joinUsage(a.concl.gamma, b.concl.gamma), D, T, P, z, C,
                  {a, b});
      }
      auto it = D.find(P->x);
      if (it == D.end() || it->second->kind != ST::Plus)
      {
        noRule(P, "branching on " + P->x);
      }
      LinearEnv da = D;
      LinearEnv db = D;
      da[P->x] = it->second->a;
      db[P->x] = it->second->b;
      TypingDerivation a = chk(ctx, G, da, T, P->p, z, C);
      TypingDerivation b = chk(ctx, G, db, T, P->q, z, C);
      return mk("TplusL", ctx, joinUsage(a.concl.gamma, b.concl.gamma), D, T, P, z, C, {a, b});
    }
    case PK::Res:
      if (detail::is_bound_output(P))
      {
        return chkBoundOut(ctx, G, D, T, P, z, C);
      }
      return chkCluster(ctx, G, D, T, P, z, C);
    case PK::Par: return chkCluster(ctx, G, D, T, P, z, C);
    case PK::OutCh: noRule(P, "free channel output is not typable; use `send x (new y)`");
  }
  noRule(P, "unexpected process");
}

// -- clusters -----------------------------------------------------------------

bool annEq(const SessionType& a, const SessionType& b)
{
  if (!a || !b)
  {
    return !a && !b;
  }
  return typeEq(a, b);
}

bool eqModSwap(const Process& a, const Process& b)
{
  if (a->kind != b->kind)
  {
    return false;
  }
  if (a->kind == PK::Res && !detail::is_bound_output(a))
  {
    return a->y == b->y && annEq(a->ann, b->ann) && eqModSwap(a->p, b->p);
  }
  if (a->kind == PK::Par)
  {
    return (eqModSwap(a->p, b->p) && eqModSwap(a->q, b->q)) ||
           (eqModSwap(a->p, b->q) && eqModSwap(a->q, b->p));
  }
  return compareProc(a, b) == 0;
}


void reorient(TypingDerivation& d, const Process& Q)
{
  if (d.rule != "Tcut" && d.rule != "Tcut!")
  {
    return;
  }
  d.concl.proc = Q;
  const Process& L = Q->p->p;
  const Process& R = Q->p->q;
  if (d.rule == "Tcut")
  {
    TypingDerivation& prov = d.premises[0];
    TypingDerivation& cons = d.premises[1];
    if (eqModSwap(prov.concl.proc, L) && eqModSwap(cons.concl.proc, R))
    {
      reorient(prov, L);
      reorient(cons, R);
    }
    else
    {
      reorient(prov, R);
      reorient(cons, L);
    }
    return;
  }
  bool leftIsServer = L->kind == PK::RepIn && L->x == d.name;
  reorient(d.premises[1], leftIsServer ? R : L);
}

void copyUses(const Process& P, const std::string& u,
              std::vector<std::pair<Process, std::string>>& out)
{
  if (!P)
  {
    return;
  }
  if (detail::is_bound_output(P) && P->p->x == u)
  {
    out.emplace_back(P->p->p, P->y);
  }
  copyUses(P->p, u, out);
  copyUses(P->q, u, out);
}

SessionType unifyAt(const std::string& y, const SessionType& a, const SessionType& b)
{
  auto u = unifyTypes(a, b);
  if (!u)
  {
    throw Error(ErrorKind::TypeMismatchAtName,
                y + " is provided as " + typeStr(a) + " but used as " + typeStr(b));
  }
  return *u;
}

SessionType settle(const std::string& y, SessionType t, const SessionType& ann)
{
  if (ann)
  {
    t = unifyAt(y, t, ann);
  }
  if (hasUnknown(t))
  {
    throw Error(ErrorKind::NoRuleApplies, "cannot infer the type of " + y +
                                              " (got " + typeStr(t) + "); write `new " + y +
                                              " : A.`");
  }
  return t;
}

struct Edge
{
  std::string y;
  size_t a;
  size_t b;
};

struct ClusterPlan
{
  std::vector<Process> comps;
  std::vector<NameSet> fns;
  std::map<std::string, SessionType> ann;
  std::vector<std::string> unused;
  std::map<std::string, size_t> servers;
  std::vector<Edge> edges;
  std::map<std::string, size_t> owner;
  std::vector<size_t> linear;
};

struct Built
{
  TypingDerivation d;
  Process term;
};

TypingDerivation buildWithRoot(const Ctx& ctx, const GTypes& G, const LinearEnv& D,
                               const TermEnv& T, const Process& P, const std::string& z,
                               const SessionType& C, const ClusterPlan& pl, size_t root)
{
  const auto& comps = pl.comps;
  std::map<size_t, std::vector<size_t>> adj;
  for (size_t e = 0; e < pl.edges.size(); ++e)
  {
    adj[pl.edges[e].a].push_back(e);
    adj[pl.edges[e].b].push_back(e);
  }

  std::map<std::string, SessionType> edgeType;
  std::map<size_t, std::string> parentName;
  std::map<size_t, std::vector<std::pair<size_t, std::string>>> children;
  std::vector<std::pair<size_t, size_t>> order;  // (child, parent), parents first
  std::set<size_t> seen;
  std::vector<std::string> spare = pl.unused;

  auto explore = [&](size_t start) {
    std::vector<size_t> queue{start};
    seen.insert(start);
    std::set<size_t> usedEdges;
    for (size_t qi = 0; qi < queue.size(); ++qi)
    {
      size_t c = queue[qi];
      for (size_t e : adj[c])
      {
        if (usedEdges.count(e))
        {
          continue;
        }
        usedEdges.insert(e);
        size_t other = pl.edges[e].a == c ? pl.edges[e].b : pl.edges[e].a;
        if (seen.count(other))
        {
          throw Error(ErrorKind::LinearityViolation,
                      "restricted channels form a cycle through " + pl.edges[e].y);
        }
        seen.insert(other);
        parentName[other] = pl.edges[e].y;
        children[c].emplace_back(other, pl.edges[e].y);
        order.emplace_back(other, c);
        queue.push_back(other);
      }
    }
  };
  explore(root);
  for (size_t k : pl.linear)
  {
    if (seen.count(k))
    {
      continue;
    }
    if (spare.empty())
    {
      throw Error(ErrorKind::LinearityViolation,
                  "`" + proc_str(comps[k]) + "` is not connected to " + z);
    }
    std::string y = spare.front();
    spare.erase(spare.begin());
    edgeType[y] = st::one();
    parentName[k] = y;
    children[root].emplace_back(k, y);
    explore(k);
  }

  SynthCtx sc;
  sc.reg = ctx.reg;
  sc.hole = ctx.hole;
  for (const auto& [x, b] : T)
  {
    sc.theta[x] = b;
  }
  for (const auto& [x, t] : G)
  {
    sc.chans[x] = t;
    sc.shared.insert(x);
  }
  for (const auto& [x, t] : D)
  {
    sc.chans[x] = t;
  }
  for (const auto& [u, k] : pl.servers)
  {
    sc.shared.insert(u);
  }
  if (!sc.chans.count(z))
  {
    sc.chans[z] = C;
  }

  std::map<std::string, SessionType> serverType;
  for (const auto& [u, s] : pl.servers)
  {
    const Process& srv = comps[s];
    SessionType A = detail::synth_prov(srv->p, srv->y, sc);
    for (size_t k = 0; k < comps.size(); ++k)
    {
      if (k == s || !pl.fns[k].count(u))
      {
        continue;
      }
      std::vector<std::pair<Process, std::string>> uses;
      copyUses(comps[k], u, uses);
      for (const auto& [Q, y] : uses)
      {
        A = unifyAt(u, A, detail::synth_cons(Q, y, sc));
      }
    }
    SessionType a = pl.ann.at(u);
    if (a && a->kind != ST::Bang)
    {
      throw Error(ErrorKind::TypeMismatchAtName,
                  u + " is replicated but annotated " + typeStr(a));
    }
    A = settle(u, A, a ? a->a : nullptr);
    serverType[u] = A;
    sc.chans[u] = A;
  }

  for (const auto& [child, parent] : order)
  {
    const std::string& y = parentName[child];
    auto guess = [&](const SynthCtx& c) {
      SessionType t = unifyAt(y, detail::synth_prov(comps[child], y, c),
                              detail::synth_cons(comps[parent], y, c));
      return pl.ann.at(y) ? unifyAt(y, t, pl.ann.at(y)) : t;
    };
    SessionType t = guess(sc);
    if (hasUnknown(t))
    {
      // Last resort: read string literals as exactly their own length.
      SynthCtx lit = sc;
      lit.literalLengths = true;
      t = guess(lit);
    }
    edgeType[y] = settle(y, t, nullptr);
    sc.chans[y] = edgeType[y];
  }

  // Servers ordered outermost first.
  std::vector<std::string> srvOrder;
  {
    std::set<std::string> placed;
    while (srvOrder.size() < pl.servers.size())
    {
      bool progress = false;
      for (const auto& [u, s] : pl.servers)
      {
        if (placed.count(u))
        {
          continue;
        }
        bool ready = true;
        for (const auto& [v, t] : pl.servers)
        {
          if (v != u && !placed.count(v) && pl.fns[s].count(v))
          {
            ready = false;
          }
        }
        if (ready)
        {
          placed.insert(u);
          srvOrder.push_back(u);
          progress = true;
        }
      }
      if (!progress)
      {
        throw Error(ErrorKind::NoRuleApplies, "replicated servers depend on each other cyclically");
      }
    }
  }

  GTypes linG = G;
  for (const auto& [u, t] : serverType)
  {
    linG[u] = t;
  }

  std::function<Built(size_t)> build = [&](size_t c) -> Built {
    std::string chan = c == root ? z : parentName[c];
    SessionType type = c == root ? C : edgeType[chan];
    LinearEnv dc;
    for (const auto& [x, k] : pl.owner)
    {
      if (k == c)
      {
        dc[x] = D.at(x);
      }
    }
    if (c == root)
    {
      for (const auto& [x, t] : D)
      {
        if (!pl.owner.count(x))
        {
          dc[x] = t;
        }
      }
    }
    for (const auto& [d, y] : children[c])
    {
      dc[y] = edgeType[y];
    }
    Built cur{chk(ctx, linG, dc, T, comps[c], chan, type), comps[c]};
    for (const auto& [d, y] : children[c])
    {
      Built sub = build(d);
      Process term = proc::res(y, proc::par(sub.term, cur.term), pl.ann.at(y));
      LinearEnv delta = sub.d.concl.delta;
      for (const auto& [x, t] : cur.d.concl.delta)
      {
        delta[x] = t;
      }
      delta.erase(y);
      TypingDerivation n = mk("Tcut", ctx, env_sum(sub.d.concl.gamma, cur.d.concl.gamma), delta,
                              T, term, chan, type, {sub.d, cur.d});
      n.name = y;
      cur = Built{n, term};
    }
    return cur;
  };

  Built top = build(root);
  for (auto it = srvOrder.rbegin(); it != srvOrder.rend(); ++it)
  {
    const std::string& u = *it;
    const Process& srv = comps[pl.servers.at(u)];
    GTypes sg = G;
    for (const auto& v : srvOrder)
    {
      if (v == u)
      {
        break;
      }
      sg[v] = serverType[v];
    }
    TypingDerivation body = chk(ctx, sg, {}, T, srv->p, srv->y, serverType[u]);
    UnrestrictedEnv rest = top.d.concl.gamma;
    Polynomial c = rest.count(u) ? rest[u].mult : Polynomial();
    rest.erase(u);
    SessionType a = pl.ann.at(u);
    if (a && !poly_leq(c, a->p))
    {
      throw Error(ErrorKind::MultiplicityExceeded,
                  u + " is copied " + c.str() + " times but offers " + a->p.str());
    }
    Process term = proc::res(u, proc::par(srv, top.term), a);
    TypingDerivation n = mk("Tcut!", ctx, env_sum(env_scale(c, body.concl.gamma), rest),
                            top.d.concl.delta, T, term, z, C, {body, top.d});
    n.name = u;
    n.mult = c;
    refresh(n);
    top = Built{n, term};
  }

  if (compareProc(top.term, P) == 0)
  {
    return top.d;
  }
  if (eqModSwap(top.term, P))
  {
    reorient(top.d, P);
    return top.d;
  }
  Judgment j = top.d.concl;
  return mk("Struct", ctx, j.gamma, j.delta, T, P, z, C, {top.d});
}

TypingDerivation chkCluster(const Ctx& ctx, const GTypes& G, const LinearEnv& D,
                            const TermEnv& T, const Process& P, const std::string& z,
                            const SessionType& C)
{
  Cluster cl = detail::flatten(P);
  ClusterPlan pl;
  pl.comps = cl.comps;
  for (const auto& c : pl.comps)
  {
    NameSet fn = free_names(c);
    // A hole stands for a process using its declared environment.
    if (ctx.hole && count_holes(c) > 0)
    {
      fn.insert(ctx.hole->chan);
      for (const auto& [x, t] : ctx.hole->env.lin)
      {
        fn.insert(x);
      }
      for (const auto& e : ctx.hole->env.exp)
      {
        fn.insert(e.name);
      }
    }
    pl.fns.push_back(fn);
  }
  auto freeIn = [&](const std::string& x) {
    std::vector<size_t> r;
    for (size_t k = 0; k < pl.comps.size(); ++k)
    {
      if (pl.fns[k].count(x))
      {
        r.push_back(k);
      }
    }
    return r;
  };

  for (const auto& [y, a] : cl.restricted)
  {
    pl.ann[y] = a;
    auto where = freeIn(y);
    if (where.empty())
    {
      pl.unused.push_back(y);
      continue;
    }
    std::optional<size_t> srv;
    for (size_t k : where)
    {
      if (pl.comps[k]->kind == PK::RepIn && pl.comps[k]->x == y)
      {
        if (srv)
        {
          throw Error(ErrorKind::LinearityViolation, "two servers on " + y);
        }
        srv = k;
      }
    }
    if (srv)
    {
      if (free_names(pl.comps[*srv]->p).count(y))
      {
        throw Error(ErrorKind::NoRuleApplies, "server on " + y + " uses itself");
      }
      pl.servers[y] = *srv;
      continue;
    }
    if (where.size() == 1)
    {
      throw Error(ErrorKind::LinearityViolation,
                  "restricted channel " + y + " has no partner in `" + proc_str(P) + "`");
    }
    if (where.size() > 2)
    {
      throw Error(ErrorKind::LinearityViolation,
                  "restricted channel " + y + " is shared by more than two processes");
    }
    pl.edges.push_back({y, where[0], where[1]});
  }

  std::set<size_t> serverComps;
  for (const auto& [u, k] : pl.servers)
  {
    serverComps.insert(k);
  }
  for (size_t k = 0; k < pl.comps.size(); ++k)
  {
    if (!serverComps.count(k))
    {
      if (pl.comps[k]->kind == PK::RepIn && pl.comps[k]->x != z && !D.count(pl.comps[k]->x))
      {
        throw Error(ErrorKind::NoRuleApplies,
                    "replicated input on " + pl.comps[k]->x + " has no scope");
      }
      pl.linear.push_back(k);
    }
  }
  if (pl.linear.empty())
  {
    pl.comps.push_back(proc::nil());
    pl.fns.push_back({});
    pl.linear.push_back(pl.comps.size() - 1);
  }

  for (const auto& [x, t] : D)
  {
    auto where = freeIn(x);
    if (where.size() > 1)
    {
      throw Error(ErrorKind::LinearityViolation,
                  "linear channel " + x + " is used by more than one process");
    }
    if (where.size() == 1)
    {
      if (serverComps.count(where[0]))
      {
        throw Error(ErrorKind::LinearityViolation,
                    "linear channel " + x + " is used inside a replicated server");
      }
      pl.owner[x] = where[0];
    }
  }

  std::vector<size_t> roots;
  for (size_t k : pl.linear)
  {
    if (pl.fns[k].count(z))
    {
      roots.push_back(k);
    }
  }
  if (roots.size() > 1)
  {
    throw Error(ErrorKind::LinearityViolation, z + " is used by more than one process");
  }
  if (roots.empty())
  {
    roots = pl.linear;
  }
  std::optional<Error> first;
  for (size_t r : roots)
  {
    try
    {
      return buildWithRoot(ctx, G, D, T, P, z, C, pl, r);
    }
    catch (const Error& e)
    {
      if (!first)
      {
        first = e;
      }
    }
  }
  throw *first;
}

bool binders_distinct(const Process& P)
{
  NameSet fn = free_names(P);
  NameSet seen;
  bool ok = true;
  std::function<void(const Process&)> walk = [&](const Process& q) {
    if (!q || !ok)
    {
      return;
    }
    if (isBinder(q->kind))
    {
      if (fn.count(q->y) || !seen.insert(q->y).second)
      {
        ok = false;
        return;
      }
    }
    walk(q->p);
    walk(q->q);
  };
  walk(P);
  return ok;
}

}  // namespace

TypingDerivation check_process(const VarSet& V, const UnrestrictedEnv& gamma,
                               const LinearEnv& delta, const TermEnv& theta, const Process& P,
                               const std::string& z, const SessionType& C, const Registry& reg,
                               const CheckOptions& opts)
{
  std::set<std::string> names{z};
  auto claim = [&](const std::string& x) {
    if (!names.insert(x).second)
    {
      throw Error(ErrorKind::LinearityViolation, "name " + x + " is declared twice");
    }
  };
  for (const auto& [x, e] : gamma)
  {
    claim(x);
    checkVars(typeVars(e.type), V, "the type of " + x);
    checkVars(e.mult.vars(), V, "the multiplicity of " + x);
  }
  for (const auto& [x, t] : delta)
  {
    claim(x);
    checkVars(typeVars(t), V, "the type of " + x);
  }
  for (const auto& [x, b] : theta)
  {
    claim(x);
  }
  checkThetaVars(theta, V);
  checkVars(typeVars(C), V, "the type of " + z);
  for (const auto& v : param_vars(P))
  {
    if (!V.count(v))
    {
      throw Error(ErrorKind::VarsOutsideV, "variable " + v + " in the process is not declared");
    }
  }

  Ctx ctx{V, &reg, opts.hole};
  Process body = binders_distinct(P) ? P : canonicalize(P);
  TypingDerivation d = chk(ctx, typesOf(gamma), delta, theta, body, z, C);
  if (!env_leq(d.concl.gamma, gamma))
  {
    throw Error(ErrorKind::MultiplicityExceeded,
                "shared channels are used " + env_str(d.concl.gamma) + ", declared " +
                    env_str(gamma));
  }
  return d;
}

UnrestrictedEnv gamma_of(const Sections& s)
{
  UnrestrictedEnv g;
  for (const auto& e : s.exp)
  {
    g[e.name] = UEntry{e.mult, e.type};
  }
  return g;
}

LinearEnv delta_of(const Sections& s)
{
  LinearEnv d;
  for (const auto& [x, t] : s.lin)
  {
    d[x] = t;
  }
  return d;
}

TermEnv theta_of(const Sections& s)
{
  TermEnv t;
  for (const auto& [x, b] : s.tm)
  {
    t.emplace(x, b);
  }
  return t;
}

TypingDerivation check_decl(const SourceUnit& u, const ProcDecl& d, const Registry& reg)
{
  VarSet V(u.params.begin(), u.params.end());
  CheckOptions opts;
  if (d.hole)
  {
    opts.hole = &*d.hole;
  }
  return check_process(V, gamma_of(d.env), delta_of(d.env), theta_of(d.env), d.body, d.chan,
                       d.type, reg, opts);
}

namespace {

std::map<std::string, Polynomial> polyMap(const ParamSubstitution& rho)
{
  std::map<std::string, Polynomial> m;
  for (const auto& [v, k] : rho.bindings())
  {
    m[v] = Polynomial::constant(k);
  }
  return m;
}

Sections instSections(const Sections& s, const ParamSubstitution& rho)
{
  Sections r;
  for (const auto& [x, t] : s.lin)
  {
    r.lin.emplace_back(x, substituteType(t, rho));
  }
  for (const auto& e : s.exp)
  {
    r.exp.push_back(ExpEntry{e.name, e.mult.substitute(rho), substituteType(e.type, rho)});
  }
  for (const auto& [x, b] : s.tm)
  {
    r.tm.emplace_back(x, b.substitute(polyMap(rho)));
  }
  return r;
}

}  // namespace

TypingDerivation check_decl_at(const SourceUnit& u, const ProcDecl& d, const Registry& reg,
                               const ParamSubstitution& rho)
{
  return check_against_decl(u, d, d.body, reg, rho);
}

TypingDerivation check_against_decl(const SourceUnit& u, const ProcDecl& d, const Process& P,
                                    const Registry& reg, const ParamSubstitution& rho)
{
  VarSet V;
  for (const auto& p : u.params)
  {
    if (!rho.has(p))
    {
      V.insert(p);
    }
  }
  Sections env = instSections(d.env, rho);
  std::optional<HoleSpec> hole;
  CheckOptions opts;
  if (d.hole)
  {
    hole = HoleSpec{instSections(d.hole->env, rho), d.hole->chan,
                    substituteType(d.hole->type, rho)};
    opts.hole = &*hole;
  }
  return check_process(V, gamma_of(env), delta_of(env), theta_of(env),
                       instantiate_params(P, rho), d.chan, substituteType(d.type, rho), reg, opts);
}

}  // namespace pidibll
