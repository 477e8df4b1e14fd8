#include <algorithm>

#include "pidibll/semantics.h"
#include "typing_internal.h"

namespace pidibll {

using detail::Cluster;

ValueDist eval_term(const Term& a, const Registry& reg, unsigned long i)
{
  if (!a.isApp)
  {
    return ValueDist::pure(a.val.toGround());
  }
  std::vector<GroundValue> args;
  for (const auto& v : a.args)
  {
    args.push_back(v.toGround());
  }
  Nat j = poly_eval(a.index, rhoN(i));
  return reg.apply(a.fn, j.get_ui(), args);
}

namespace {

void occurrences(const Process& p, std::vector<std::string>& out)
{
  if (!p)
  {
    return;
  }
  if (!p->x.empty())
  {
    out.push_back(p->x);
  }
  if (p->kind == PK::OutCh)
  {
    out.push_back(p->y);
  }
  if (p->v.isVar())
  {
    out.push_back(p->v.name);
  }
  if (p->kind == PK::Let)
  {
    for (const auto& v : p->a.args)
    {
      if (v.isVar())
      {
        out.push_back(v.name);
      }
    }
    if (!p->a.isApp && p->a.val.isVar())
    {
      out.push_back(p->a.val.name);
    }
  }
  occurrences(p->p, out);
  occurrences(p->q, out);
}

Process assemble(const std::vector<std::pair<std::string, SessionType>>& restricted,
                 const std::vector<Process>& comps)
{
  std::map<std::string, SessionType> ann(restricted.begin(), restricted.end());
  std::vector<Process> live;
  for (const auto& c : comps)
  {
    if (c->kind != PK::Nil)
    {
      live.push_back(c);
    }
  }
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& c : live)
  {
    std::vector<std::string> occ;
    occurrences(c, occ);
    for (const auto& n : occ)
    {
      if (ann.count(n) && seen.insert(n).second)
      {
        order.push_back(n);
      }
    }
  }
  Process body;
  if (live.empty())
  {
    body = proc::nil();
  }
  else
  {
    body = live.back();
    for (size_t k = live.size() - 1; k-- > 0;)
    {
      body = proc::par(live[k], body);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it)
  {
    body = proc::res(*it, body, ann[*it]);
  }
  return canonicalize(body);
}

Nat letCost(const Term& a, const Registry& reg, unsigned long i)
{
  if (!a.isApp)
  {
    return 1;
  }
  std::vector<bool> kinds;
  for (const auto& v : a.args)
  {
    kinds.push_back(v.kind == Value::Kind::Bool);
  }
  const FunctionSymbol& f = reg.resolve(a.fn, kinds);
  return poly_eval(f.cost.substitute({{"n", a.index}}), rhoN(i));
}

struct Sender
{
  std::string x;
  std::string obj;
  Process cont;
  bool bound = false;
};

std::optional<Sender> asSender(const Process& c)
{
  if (c->kind == PK::OutCh)
  {
    return Sender{c->x, c->y, c->p, false};
  }
  if (detail::is_bound_output(c))
  {
    return Sender{c->p->x, c->y, c->p->p, true};
  }
  return std::nullopt;
}

}  // namespace

Process spine_normal_form(const Process& p)
{
  Cluster c = detail::flatten(canonicalize(p));
  return assemble(c.restricted, c.comps);
}

std::vector<ReductionStep> enabled_reductions(const Process& P, const Registry& reg,
                                              unsigned long i)
{
  Process src = canonicalize(P);
  Cluster cl = detail::flatten(src);
  const auto& comps = cl.comps;
  std::vector<ReductionStep> steps;

  auto replaced = [&](std::map<size_t, Process> with, const std::string& extra = "") {
    auto restricted = cl.restricted;
    if (!extra.empty())
    {
      restricted.emplace_back(extra, nullptr);
    }
    std::vector<Process> cs;
    for (size_t k = 0; k < comps.size(); ++k)
    {
      auto it = with.find(k);
      if (it == with.end())
      {
        cs.push_back(comps[k]);
        continue;
      }
      Cluster sub = detail::flatten(it->second);
      cs.insert(cs.end(), sub.comps.begin(), sub.comps.end());
      restricted.insert(restricted.end(), sub.restricted.begin(), sub.restricted.end());
    }
    return assemble(restricted, cs);
  };
  auto point = [&](const std::string& rule, std::vector<size_t> at, Process q) {
    steps.push_back(ReductionStep{P, ProcDist::pure(q), 1, rule, std::move(at)});
  };

  for (size_t k = 0; k < comps.size(); ++k)
  {
    const Process& c = comps[k];
    if (c->kind == PK::Let)
    {
      ValueDist vals = eval_term(c->a, reg, i);
      std::vector<std::pair<Process, Rational>> ws;
      for (const auto& [v, r] : vals.entries())
      {
        ws.emplace_back(replaced({{k, substitute_value(c->p, c->y, Value::ground(v))}}), r);
      }
      steps.push_back(ReductionStep{P, ProcDist::fromWeights(ws), letCost(c->a, reg, i),
                                    "EVAL_term", {k}});
    }
    else if (c->kind == PK::If && c->v.kind == Value::Kind::Bool)
    {
      point(c->v.b ? "IF_true" : "IF_false", {k}, replaced({{k, c->v.b ? c->p : c->q}}));
    }
    for (size_t l = 0; l < comps.size(); ++l)
    {
      if (l == k)
      {
        continue;
      }
      const Process& d = comps[l];
      std::vector<size_t> at{std::min(k, l), std::max(k, l)};
      if (auto s = asSender(c))
      {
        if (d->kind == PK::InCh && d->x == s->x)
        {
          point(s->bound ? "CLOSE" : "COM", at,
                replaced({{k, s->cont}, {l, substitute_name(d->p, d->y, s->obj)}},
                         s->bound ? s->obj : ""));
        }
        else if (d->kind == PK::RepIn && d->x == s->x)
        {
          Process copy = substitute_name(d->p, d->y, s->obj);
          point("REP", at,
                replaced({{k, s->cont}, {l, proc::par(copy, d)}}, s->bound ? s->obj : ""));
        }
      }
      else if ((c->kind == PK::SelL || c->kind == PK::SelR) && d->kind == PK::Case &&
               d->x == c->x)
      {
        bool left = c->kind == PK::SelL;
        point(left ? "SEL_inl" : "SEL_inr", at,
              replaced({{k, c->p}, {l, left ? d->p : d->q}}));
      }
      else if (c->kind == PK::OutVal && d->kind == PK::InVal && d->x == c->x && !c->v.isVar())
      {
        point("COM_value", at, replaced({{k, proc::nil()}, {l, substitute_value(d->p, d->y, c->v)}}));
      }
    }
  }
  std::stable_sort(steps.begin(), steps.end(),
                   [](const ReductionStep& a, const ReductionStep& b) { return a.redex < b.redex; });
  return steps;
}

}  // namespace pidibll
