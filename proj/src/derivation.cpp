#include <functional>
#include <set>

#include "typing_internal.h"

namespace pidibll {

namespace {

Polynomial one()
{
  return Polynomial::constant(1);
}

// Same components and restrictions on the flattened spine, in any order.
bool spineEquivalent(const Process& a, const Process& b)
{
  if (struct_congruent(a, b))
  {
    return true;
  }
  auto key = [](const Process& p) {
    detail::Cluster c = detail::flatten(p);
    std::multiset<std::string> comps;
    for (const auto& k : c.comps)
    {
      if (k->kind != PK::Nil)
      {
        comps.insert(proc_str(k));
      }
    }
    std::set<std::string> names;
    for (const auto& [n, t] : c.restricted)
    {
      names.insert(n);
    }
    return std::make_pair(comps, names);
  };
  return key(a) == key(b);
}

Polynomial localWeight(const TypingDerivation& d, const std::vector<Polynomial>& w)
{
  const std::string& r = d.rule;
  if (r == "T1R" || r == "TSR" || r == "TBR" || r == "Hole")
  {
    return one();
  }
  if (r == "Tcut!")
  {
    return one() + d.mult * (one() + w.at(0)) + w.at(1);
  }
  if (r == "T!pR")
  {
    return one() + d.mult * (one() + w.at(0));
  }
  if (r == "Tterm_eval")
  {
    return d.cost + w.at(0) + one();
  }
  if (r == "Struct")
  {
    return w.at(0);
  }
  Polynomial s = one();
  for (const auto& p : w)
  {
    s = s + p;
  }
  return s;
}

std::map<std::string, Polynomial> polyMap(const ParamSubstitution& rho)
{
  std::map<std::string, Polynomial> m;
  for (const auto& [v, k] : rho.bindings())
  {
    m[v] = Polynomial::constant(k);
  }
  return m;
}

}  // namespace

Polynomial derivation_weight(const TypingDerivation& d)
{
  std::vector<Polynomial> w;
  for (const auto& p : d.premises)
  {
    w.push_back(derivation_weight(p));
  }
  return localWeight(d, w);
}

size_t derivation_size(const TypingDerivation& d)
{
  size_t n = 1;
  for (const auto& p : d.premises)
  {
    n += derivation_size(p);
  }
  return n;
}

std::string derivation_sexpr(const TypingDerivation& d)
{
  std::string s = "(" + d.rule;
  if (!d.name.empty())
  {
    s += " " + d.name;
  }
  for (const auto& p : d.premises)
  {
    s += " " + derivation_sexpr(p);
  }
  return s + ")";
}

TypingDerivation substitute_params(const TypingDerivation& d, const ParamSubstitution& rho)
{
  TypingDerivation r = d;
  Judgment& j = r.concl;
  for (const auto& v : d.concl.V)
  {
    if (rho.has(v))
    {
      j.V.erase(v);
    }
  }
  for (auto& [x, e] : j.gamma)
  {
    e.mult = e.mult.substitute(rho);
    e.type = substituteType(e.type, rho);
  }
  for (auto& [x, t] : j.delta)
  {
    t = substituteType(t, rho);
  }
  auto pm = polyMap(rho);
  for (auto& [x, b] : j.theta)
  {
    b = b.substitute(pm);
  }
  j.proc = instantiate_params(j.proc, rho);
  j.type = substituteType(j.type, rho);
  r.mult = d.mult.substitute(rho);
  r.cost = d.cost.substitute(rho);
  r.weight = d.weight.substitute(rho);
  for (auto& p : r.premises)
  {
    p = substitute_params(p, rho);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

[[noreturn]] void bad(const TypingDerivation& d, const std::string& why)
{
  throw Error(ErrorKind::NoRuleApplies, d.rule + " node `" + proc_str(d.concl.proc) + "`: " + why);
}

void need(bool ok, const TypingDerivation& d, const std::string& why)
{
  if (!ok)
  {
    bad(d, why);
  }
}

bool deltaEq(const LinearEnv& a, const LinearEnv& b)
{
  if (a.size() != b.size())
  {
    return false;
  }
  for (const auto& [x, t] : a)
  {
    auto it = b.find(x);
    if (it == b.end() || !typeEq(t, it->second))
    {
      return false;
    }
  }
  return true;
}

Polynomial usage(const UnrestrictedEnv& g, const std::string& x)
{
  auto it = g.find(x);
  return it == g.end() ? Polynomial() : it->second.mult;
}

bool gammaEq(const UnrestrictedEnv& a, const UnrestrictedEnv& b)
{
  std::set<std::string> names;
  for (const auto& [x, e] : a)
  {
    names.insert(x);
  }
  for (const auto& [x, e] : b)
  {
    names.insert(x);
  }
  for (const auto& x : names)
  {
    if (!(usage(a, x) == usage(b, x)))
    {
      return false;
    }
  }
  return true;
}

bool sameTarget(const TypingDerivation& a, const TypingDerivation& b)
{
  return a.concl.chan == b.concl.chan && typeEq(a.concl.type, b.concl.type);
}

void premises(const TypingDerivation& d, size_t n)
{
  need(d.premises.size() == n, d, "expected " + std::to_string(n) + " premises");
}

LinearEnv without(LinearEnv d, const std::string& x)
{
  d.erase(x);
  return d;
}

LinearEnv unite(const LinearEnv& a, const LinearEnv& b)
{
  LinearEnv r = a;
  for (const auto& [x, t] : b)
  {
    r[x] = t;
  }
  return r;
}

void validateNode(const TypingDerivation& d, const Registry& reg)
{
  const Judgment& j = d.concl;
  const Process& P = j.proc;
  const std::string& z = j.chan;
  const SessionType& C = j.type;
  for (const auto& p : d.premises)
  {
    need(p.concl.V == j.V, d, "premise has a different variable set");
  }
  auto unaryGamma = [&] {
    need(env_leq(d.premises[0].concl.gamma, j.gamma) &&
             env_leq(j.gamma, d.premises[0].concl.gamma),
         d, "shared usage changed");
  };
  const std::string& r = d.rule;

  if (r == "T1R")
  {
    premises(d, 0);
    need(P->kind == PK::Nil && C->kind == ST::One && j.delta.empty(), d, "bad 0 axiom");
  }
  else if (r == "TSR" || r == "TBR")
  {
    premises(d, 0);
    need(P->kind == PK::OutVal && P->x == z && isGround(C) && j.delta.empty(), d,
         "bad value output");
    check_value(j.theta, j.V, P->v, toGround(C));
  }
  else if (r == "Hole")
  {
    premises(d, 0);
    need(P->kind == PK::Hole, d, "not a hole");
  }
  else if (r == "T1L")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    auto it = j.delta.find(d.name);
    need(it != j.delta.end() && it->second->kind == ST::One, d, d.name + " is not 1");
    need(deltaEq(q.concl.delta, without(j.delta, d.name)), d, "linear context mismatch");
    need(compareProc(q.concl.proc, P) == 0 && sameTarget(q, d), d, "premise changed");
    unaryGamma();
  }
  else if (r == "T!pL")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    auto it = j.delta.find(d.name);
    need(it != j.delta.end() && it->second->kind == ST::Bang, d, d.name + " is not a !-type");
    need(deltaEq(q.concl.delta, without(j.delta, d.name)), d, "linear context mismatch");
    need(poly_leq(usage(q.concl.gamma, d.name), it->second->p), d, "multiplicity exceeded");
    need(compareProc(q.concl.proc, P) == 0 && sameTarget(q, d), d, "premise changed");
  }
  else if (r == "T!pR")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    need(P->kind == PK::RepIn && P->x == z && C->kind == ST::Bang, d, "bad replicated input");
    need(j.delta.empty() && q.concl.delta.empty(), d, "linear context must be empty");
    need(q.concl.chan == P->y && typeEq(q.concl.type, C->a), d, "premise offers wrong channel");
    need(d.mult == C->p, d, "wrong multiplicity");
    need(gammaEq(j.gamma, env_scale(C->p, q.concl.gamma)), d, "usage is not scaled");
  }
  else if (r == "TtensorR" || r == "TlolliL")
  {
    premises(d, 2);
    need(detail::is_bound_output(P) && P->p->p->kind == PK::Par, d, "not a bound output");
    const std::string& y = P->y;
    const auto& a = d.premises[0];
    const auto& b = d.premises[1];
    need(compareProc(a.concl.proc, P->p->p->p) == 0 &&
             compareProc(b.concl.proc, P->p->p->q) == 0,
         d, "premises do not match the continuation");
    need(a.concl.chan == y, d, "left premise must offer " + y);
    need(gammaEq(j.gamma, env_sum(a.concl.gamma, b.concl.gamma)), d, "usage is not summed");
    if (r == "TtensorR")
    {
      need(P->p->x == z && C->kind == ST::Tensor && typeEq(a.concl.type, C->a) &&
               b.concl.chan == z && typeEq(b.concl.type, C->b),
           d, "tensor mismatch");
      need(deltaEq(j.delta, unite(a.concl.delta, b.concl.delta)), d, "linear split mismatch");
    }
    else
    {
      const std::string& x = P->p->x;
      auto it = j.delta.find(x);
      need(it != j.delta.end() && it->second->kind == ST::Lolli, d, x + " is not a -o");
      need(typeEq(a.concl.type, it->second->a) && sameTarget(b, d), d, "lolli mismatch");
      auto bx = b.concl.delta.find(x);
      need(bx != b.concl.delta.end() && typeEq(bx->second, it->second->b), d,
           "continuation must hold the result type");
      need(deltaEq(without(j.delta, x), unite(a.concl.delta, without(b.concl.delta, x))), d,
           "linear split mismatch");
    }
  }
  else if (r == "Tcopy")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    need(detail::is_bound_output(P) && P->p->x == d.name, d, "not a copy of " + d.name);
    auto g = j.gamma.find(d.name);
    need(g != j.gamma.end(), d, d.name + " is not shared");
    auto y = q.concl.delta.find(P->y);
    need(y != q.concl.delta.end() && typeEq(y->second, g->second.type), d, "copy type mismatch");
    need(deltaEq(without(q.concl.delta, P->y), j.delta), d, "linear context mismatch");
    need(compareProc(q.concl.proc, P->p->p) == 0 && sameTarget(q, d), d, "premise changed");
    need(usage(j.gamma, d.name) == usage(q.concl.gamma, d.name) + one(), d,
         "copy not counted");
  }
  else if (r == "TtensorL" || r == "TlolliR")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    need(P->kind == PK::InCh && compareProc(q.concl.proc, P->p) == 0, d, "bad channel input");
    unaryGamma();
    if (r == "TlolliR")
    {
      need(P->x == z && C->kind == ST::Lolli && q.concl.chan == z &&
               typeEq(q.concl.type, C->b),
           d, "lolli mismatch");
      auto y = q.concl.delta.find(P->y);
      need(y != q.concl.delta.end() && typeEq(y->second, C->a), d, "received type mismatch");
      need(deltaEq(without(q.concl.delta, P->y), j.delta), d, "linear context mismatch");
    }
    else
    {
      auto x = j.delta.find(P->x);
      need(x != j.delta.end() && x->second->kind == ST::Tensor && sameTarget(q, d), d,
           "tensor mismatch");
      auto y = q.concl.delta.find(P->y);
      auto x2 = q.concl.delta.find(P->x);
      need(y != q.concl.delta.end() && x2 != q.concl.delta.end() &&
               typeEq(y->second, x->second->a) && typeEq(x2->second, x->second->b),
           d, "tensor components mismatch");
    }
  }
  else if (r == "TplusR1" || r == "TplusR2" || r == "TwithL1" || r == "TwithL2")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    bool left = r.back() == '1';
    need(P->kind == (left ? PK::SelL : PK::SelR) && compareProc(q.concl.proc, P->p) == 0, d,
         "bad selection");
    unaryGamma();
    if (r[1] == 'p')
    {
      need(P->x == z && C->kind == ST::Plus && q.concl.chan == z &&
               typeEq(q.concl.type, left ? C->a : C->b) && deltaEq(q.concl.delta, j.delta),
           d, "plus mismatch");
    }
    else
    {
      auto x = j.delta.find(P->x);
      need(x != j.delta.end() && x->second->kind == ST::With && sameTarget(q, d), d,
           "with mismatch");
      auto x2 = q.concl.delta.find(P->x);
      need(x2 != q.concl.delta.end() &&
               typeEq(x2->second, left ? x->second->a : x->second->b),
           d, "with branch mismatch");
    }
  }
  else if (r == "TwithR" || r == "TplusL" || r == "Tif_then_else")
  {
    premises(d, 2);
    const auto& a = d.premises[0];
    const auto& b = d.premises[1];
    need(env_leq(a.concl.gamma, j.gamma) && env_leq(b.concl.gamma, j.gamma), d,
         "branch usage exceeds the conclusion");
    need(compareProc(a.concl.proc, P->p) == 0 && compareProc(b.concl.proc, P->q) == 0, d,
         "branches do not match");
    if (r == "Tif_then_else")
    {
      need(P->kind == PK::If && sameTarget(a, d) && sameTarget(b, d), d, "bad conditional");
      check_value(j.theta, j.V, P->v, GroundType::boolean());
      need(deltaEq(a.concl.delta, j.delta) && deltaEq(b.concl.delta, j.delta), d,
           "branches must share the linear context");
    }
    else if (r == "TwithR")
    {
      need(P->kind == PK::Case && P->x == z && C->kind == ST::With &&
               typeEq(a.concl.type, C->a) && typeEq(b.concl.type, C->b),
           d, "with mismatch");
    }
    else
    {
      auto x = j.delta.find(P->x);
      need(P->kind == PK::Case && x != j.delta.end() && x->second->kind == ST::Plus &&
               sameTarget(a, d) && sameTarget(b, d),
           d, "plus mismatch");
    }
  }
  else if (r == "TSL" || r == "TBL")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    auto x = j.delta.find(P->x);
    need(P->kind == PK::InVal && x != j.delta.end() && isGround(x->second), d,
         "bad value input");
    auto w = q.concl.theta.find(P->y);
    need(w != q.concl.theta.end() && w->second == toGround(x->second), d,
         "received value type mismatch");
    need(deltaEq(q.concl.delta, without(j.delta, P->x)) && sameTarget(q, d), d,
         "linear context mismatch");
    unaryGamma();
  }
  else if (r == "Tterm_eval")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    need(P->kind == PK::Let, d, "not a let");
    GroundType b = check_term(j.theta, j.V, P->a, reg);
    auto w = q.concl.theta.find(P->y);
    need(w != q.concl.theta.end() && w->second == b, d, "bound type mismatch");
    need(deltaEq(q.concl.delta, j.delta) && sameTarget(q, d), d, "linear context mismatch");
    unaryGamma();
  }
  else if (r == "Tcut")
  {
    premises(d, 2);
    const auto& a = d.premises[0];
    const auto& b = d.premises[1];
    need(P->kind == PK::Res && P->y == d.name && P->p->kind == PK::Par, d, "not a cut");
    bool straight = compareProc(a.concl.proc, P->p->p) == 0 &&
                    compareProc(b.concl.proc, P->p->q) == 0;
    bool swapped = compareProc(a.concl.proc, P->p->q) == 0 &&
                   compareProc(b.concl.proc, P->p->p) == 0;
    need(straight || swapped, d, "premises do not match the composition");
    need(a.concl.chan == d.name && sameTarget(b, d), d, "cut channels mismatch");
    auto y = b.concl.delta.find(d.name);
    need(y != b.concl.delta.end() && typeEq(y->second, a.concl.type), d, "cut type mismatch");
    need(deltaEq(j.delta, unite(a.concl.delta, without(b.concl.delta, d.name))), d,
         "linear split mismatch");
    need(gammaEq(j.gamma, env_sum(a.concl.gamma, b.concl.gamma)), d, "usage is not summed");
  }
  else if (r == "Tcut!")
  {
    premises(d, 2);
    const auto& a = d.premises[0];
    const auto& b = d.premises[1];
    need(P->kind == PK::Res && P->y == d.name && P->p->kind == PK::Par, d, "not a cut");
    const Process& L = P->p->p;
    const Process& R = P->p->q;
    Process srv = L->kind == PK::RepIn && L->x == d.name ? L : R;
    Process rest = srv == L ? R : L;
    need(srv->kind == PK::RepIn && srv->x == d.name, d, "no server on " + d.name);
    need(compareProc(a.concl.proc, srv->p) == 0 && a.concl.chan == srv->y &&
             a.concl.delta.empty(),
         d, "server premise mismatch");
    need(compareProc(b.concl.proc, rest) == 0 && sameTarget(b, d), d, "client mismatch");
    auto g = b.concl.gamma.find(d.name);
    need(g != b.concl.gamma.end() && typeEq(g->second.type, a.concl.type), d,
         "server type mismatch");
    need(d.mult == usage(b.concl.gamma, d.name), d, "copy count mismatch");
    UnrestrictedEnv restG = b.concl.gamma;
    restG.erase(d.name);
    need(gammaEq(j.gamma, env_sum(env_scale(d.mult, a.concl.gamma), restG)), d,
         "usage is not c * server + rest");
    need(deltaEq(j.delta, b.concl.delta), d, "linear context mismatch");
  }
  else if (r == "Struct")
  {
    premises(d, 1);
    const auto& q = d.premises[0];
    need(sameTarget(q, d) && deltaEq(q.concl.delta, j.delta), d, "premise changed");
    need(spineEquivalent(q.concl.proc, P), d, "processes are not structurally congruent");
    unaryGamma();
  }
  else
  {
    bad(d, "unknown rule");
  }
  need(d.weight == derivation_weight(d), d, "stored weight is stale");
}

}  // namespace

void validate_derivation(const TypingDerivation& d, const Registry& reg)
{
  validateNode(d, reg);
  for (const auto& p : d.premises)
  {
    validate_derivation(p, reg);
  }
}

}  // namespace pidibll
