#include "typing_internal.h"

namespace pidibll::detail {

bool is_bound_output(const Process& p)
{
  return p->kind == PK::Res && p->p->kind == PK::OutCh && p->p->y == p->y && p->p->x != p->y;
}

bool is_cluster(const Process& p)
{
  return p->kind == PK::Par || (p->kind == PK::Res && !is_bound_output(p));
}

namespace {

void flattenInto(const Process& p, Cluster& c)
{
  if (p->kind == PK::Par)
  {
    flattenInto(p->p, c);
    flattenInto(p->q, c);
  }
  else if (p->kind == PK::Res && !is_bound_output(p))
  {
    c.restricted.emplace_back(p->y, p->ann);
    flattenInto(p->p, c);
  }
  else if (p->kind != PK::Nil)
  {
    c.comps.push_back(p);
  }
}

SessionType unifyOr(const SessionType& a, const SessionType& b)
{
  auto u = unifyTypes(a, b);
  return u ? *u : a;
}

// The component of a cluster in which x is free, if exactly one.
Process componentWith(const Process& p, const std::string& x)
{
  Cluster c = flatten(p);
  Process found;
  for (const auto& k : c.comps)
  {
    if (free_names(k).count(x))
    {
      if (found)
      {
        return nullptr;
      }
      found = k;
    }
  }
  return found;
}

std::optional<GroundType> groundOf(const SessionType& t)
{
  if (t && isGround(t))
  {
    return toGround(t);
  }
  return std::nullopt;
}

std::optional<GroundType> varUsage(const Process& P, const std::string& z, SynthCtx ctx);

std::optional<GroundType> argUsage(const Term& a, const std::string& z, const SynthCtx& ctx)
{
  if (!a.isApp || !ctx.reg->has(a.fn))
  {
    return std::nullopt;
  }
  std::vector<std::string> members;
  if (ctx.reg->isOverload(a.fn))
  {
    members = ctx.reg->overloadMembers(a.fn);
  }
  else
  {
    members = {a.fn};
  }
  std::optional<GroundType> found;
  std::map<std::string, Polynomial> inst{{"n", a.index}};
  for (const auto& m : members)
  {
    const FunctionSymbol& f = ctx.reg->lookup(m);
    if (f.args.size() != a.args.size())
    {
      continue;
    }
    bool ok = true;
    std::optional<GroundType> here;
    for (size_t k = 0; k < a.args.size(); ++k)
    {
      const Value& v = a.args[k];
      if (v.isVar() && v.name == z)
      {
        here = f.args[k].substitute(inst);
        continue;
      }
      auto t = value_type(v, ctx);
      if (v.kind == Value::Kind::Str)
      {
        ok = ok && !f.args[k].isBool();
      }
      else if (t)
      {
        ok = ok && t->isBool() == f.args[k].isBool();
      }
    }
    if (ok && here)
    {
      if (found && *found != *here)
      {
        return std::nullopt;
      }
      found = here;
    }
  }
  return found;
}

std::optional<GroundType> varUsage(const Process& P, const std::string& z, SynthCtx ctx)
{
  auto isZ = [&](const Value& v) { return v.isVar() && v.name == z; };
  auto firstOf = [](std::optional<GroundType> a, std::optional<GroundType> b) {
    return a ? a : b;
  };
  switch (P->kind)
  {
    case PK::Nil:
    case PK::Hole: return std::nullopt;
    case PK::OutVal:
      if (isZ(P->v))
      {
        auto it = ctx.chans.find(P->x);
        if (it != ctx.chans.end())
        {
          return groundOf(it->second);
        }
      }
      return std::nullopt;
    case PK::If:
      if (isZ(P->v))
      {
        return GroundType::boolean();
      }
      return firstOf(varUsage(P->p, z, ctx), varUsage(P->q, z, ctx));
    case PK::Let:
    {
      auto here = argUsage(P->a, z, ctx);
      if (here)
      {
        return here;
      }
      if (P->y == z)
      {
        return std::nullopt;
      }
      ctx.theta[P->y] = term_type(P->a, ctx);
      return varUsage(P->p, z, ctx);
    }
    case PK::Par:
    case PK::Case: return firstOf(varUsage(P->p, z, ctx), varUsage(P->q, z, ctx));
    default:
      if (isBinder(P->kind) && P->y == z)
      {
        return std::nullopt;
      }
      return P->p ? varUsage(P->p, z, ctx) : std::nullopt;
  }
}

}  // namespace

Cluster flatten(const Process& p)
{
  Cluster c;
  flattenInto(p, c);
  return c;
}

std::optional<GroundType> value_type(const Value& v, const SynthCtx& ctx)
{
  switch (v.kind)
  {
    case Value::Kind::Bool: return GroundType::boolean();
    case Value::Kind::Str:
      if (ctx.literalLengths)
      {
        return GroundType::str(Polynomial::constant(v.bits.size()));
      }
      return std::nullopt;
    case Value::Kind::Var:
    {
      auto it = ctx.theta.find(v.name);
      return it == ctx.theta.end() ? std::nullopt : it->second;
    }
  }
  return std::nullopt;
}

std::optional<GroundType> term_type(const Term& a, const SynthCtx& ctx)
{
  if (!a.isApp)
  {
    if (a.val.kind == Value::Kind::Str)
    {
      return GroundType::str(Polynomial::constant(a.val.bits.size()));
    }
    return value_type(a.val, ctx);
  }
  if (!ctx.reg->has(a.fn))
  {
    return std::nullopt;
  }
  std::vector<bool> kinds;
  for (const auto& v : a.args)
  {
    auto t = value_type(v, ctx);
    if (v.kind == Value::Kind::Str)
    {
      kinds.push_back(false);
    }
    else if (t)
    {
      kinds.push_back(t->isBool());
    }
    else
    {
      kinds.push_back(false);
    }
  }
  try
  {
    const FunctionSymbol& f = ctx.reg->resolve(a.fn, kinds);
    return f.result.substitute({{"n", a.index}});
  }
  catch (const Error&)
  {
    return std::nullopt;
  }
}

SessionType synth_prov(const Process& P, const std::string& x, SynthCtx ctx)
{
  switch (P->kind)
  {
    case PK::Nil: return st::one();
    case PK::Hole:
      if (ctx.hole && ctx.hole->chan == x)
      {
        return ctx.hole->type;
      }
      return st::unknown();
    case PK::OutVal:
    {
      if (P->x != x)
      {
        return st::unknown();
      }
      auto t = value_type(P->v, ctx);
      return t ? st::ground(*t) : st::unknown();
    }
    case PK::InVal:
    {
      if (P->x == x)
      {
        return st::unknown();
      }
      auto it = ctx.chans.find(P->x);
      ctx.theta[P->y] = it != ctx.chans.end() ? groundOf(it->second) : std::nullopt;
      if (!ctx.theta[P->y])
      {
        ctx.theta[P->y] = varUsage(P->p, P->y, ctx);
      }
      ctx.chans.erase(P->x);
      return synth_prov(P->p, x, ctx);
    }
    case PK::Let:
      ctx.theta[P->y] = term_type(P->a, ctx);
      return synth_prov(P->p, x, ctx);
    case PK::If: return unifyOr(synth_prov(P->p, x, ctx), synth_prov(P->q, x, ctx));
    case PK::InCh:
    {
      if (P->x == x)
      {
        SessionType a = synth_cons(P->p, P->y, ctx);
        return st::lolli(a, synth_prov(P->p, x, ctx));
      }
      auto it = ctx.chans.find(P->x);
      if (it != ctx.chans.end() && it->second->kind == ST::Tensor)
      {
        SessionType t = it->second;
        ctx.chans[P->y] = t->a;
        ctx.chans[P->x] = t->b;
      }
      return synth_prov(P->p, x, ctx);
    }
    case PK::Res:
    {
      if (!is_bound_output(P))
      {
        Process c = componentWith(P, x);
        if (!c)
        {
          // x is not mentioned: a provider of 1 somewhere in the cluster.
          return st::unknown();
        }
        return synth_prov(c, x, ctx);
      }
      const Process& out = P->p;
      const std::string& y = P->y;
      if (out->x == x)
      {
        if (out->p->kind != PK::Par)
        {
          return st::unknown();
        }
        return st::tensor(synth_prov(out->p->p, y, ctx), synth_prov(out->p->q, x, ctx));
      }
      if (ctx.shared.count(out->x))
      {
        auto it = ctx.chans.find(out->x);
        if (it != ctx.chans.end())
        {
          ctx.chans[y] = it->second;
        }
        return synth_prov(out->p, x, ctx);
      }
      if (out->p->kind != PK::Par)
      {
        return st::unknown();
      }
      auto it = ctx.chans.find(out->x);
      if (it != ctx.chans.end() && it->second->kind == ST::Lolli)
      {
        ctx.chans[out->x] = it->second->b;
      }
      return synth_prov(out->p->q, x, ctx);
    }
    case PK::SelL:
    case PK::SelR:
    {
      SessionType k = synth_prov(P->p, x, ctx);
      if (P->x == x)
      {
        return P->kind == PK::SelL ? st::plus(k, st::unknown()) : st::plus(st::unknown(), k);
      }
      return k;
    }
    case PK::Case:
    {
      if (P->x == x)
      {
        return st::with(synth_prov(P->p, x, ctx), synth_prov(P->q, x, ctx));
      }
      return unifyOr(synth_prov(P->p, x, ctx), synth_prov(P->q, x, ctx));
    }
    case PK::Par:
    {
      Process c = componentWith(P, x);
      return c ? synth_prov(c, x, ctx) : st::unknown();
    }
    case PK::RepIn:
    case PK::OutCh: return st::unknown();
  }
  return st::unknown();
}

SessionType synth_cons(const Process& P, const std::string& x, SynthCtx ctx)
{
  if (!free_names(P).count(x))
  {
    if (P->kind == PK::Hole && ctx.hole)
    {
      for (const auto& [n, t] : ctx.hole->env.lin)
      {
        if (n == x)
        {
          return t;
        }
      }
    }
    return st::one();
  }
  switch (P->kind)
  {
    case PK::InCh:
      if (P->x == x)
      {
        return st::tensor(synth_cons(P->p, P->y, ctx), synth_cons(P->p, x, ctx));
      }
      return synth_cons(P->p, x, ctx);
    case PK::InVal:
      if (P->x == x)
      {
        auto g = varUsage(P->p, P->y, ctx);
        return g ? st::ground(*g) : st::unknown();
      }
      {
        auto it = ctx.chans.find(P->x);
        ctx.theta[P->y] = it != ctx.chans.end() ? groundOf(it->second) : std::nullopt;
        if (!ctx.theta[P->y])
        {
          ctx.theta[P->y] = varUsage(P->p, P->y, ctx);
        }
      }
      return synth_cons(P->p, x, ctx);
    case PK::Let:
      ctx.theta[P->y] = term_type(P->a, ctx);
      return synth_cons(P->p, x, ctx);
    case PK::If: return unifyOr(synth_cons(P->p, x, ctx), synth_cons(P->q, x, ctx));
    case PK::Case:
      if (P->x == x)
      {
        return st::plus(synth_cons(P->p, x, ctx), synth_cons(P->q, x, ctx));
      }
      return unifyOr(synth_cons(P->p, x, ctx), synth_cons(P->q, x, ctx));
    case PK::SelL:
    case PK::SelR:
      if (P->x == x)
      {
        SessionType k = synth_cons(P->p, x, ctx);
        return P->kind == PK::SelL ? st::with(k, st::unknown()) : st::with(st::unknown(), k);
      }
      return synth_cons(P->p, x, ctx);
    case PK::Res:
    {
      if (!is_bound_output(P))
      {
        Process c = componentWith(P, x);
        return c ? synth_cons(c, x, ctx) : st::unknown();
      }
      const Process& out = P->p;
      const std::string& y = P->y;
      if (out->x == x)
      {
        if (out->p->kind != PK::Par)
        {
          return st::unknown();
        }
        return st::lolli(synth_prov(out->p->p, y, ctx), synth_cons(out->p->q, x, ctx));
      }
      if (ctx.shared.count(out->x))
      {
        return synth_cons(out->p, x, ctx);
      }
      if (out->p->kind != PK::Par)
      {
        return st::unknown();
      }
      if (free_names(out->p->p).count(x))
      {
        return synth_cons(out->p->p, x, ctx);
      }
      return synth_cons(out->p->q, x, ctx);
    }
    case PK::Par:
    {
      Process c = componentWith(P, x);
      return c ? synth_cons(c, x, ctx) : st::unknown();
    }
    default: return st::unknown();
  }
}

}  // namespace pidibll::detail
