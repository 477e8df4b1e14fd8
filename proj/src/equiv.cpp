#include "pidibll/equiv.h"

#include "typing_internal.h"

namespace pidibll {

ProcDist kleene_sem(const Process& P, const Registry& reg, unsigned long i, const Nat& ceiling)
{
  std::map<Process, Rational, ProcLess> frontier;
  frontier[canonicalize(P)] = 1;
  std::vector<std::pair<Process, Rational>> done;
  Nat expanded = 0;
  while (!frontier.empty())
  {
    auto it = frontier.begin();
    Process p = it->first;
    Rational w = it->second;
    frontier.erase(it);

    std::optional<LabeledStep> tau;
    for (auto& s : labeled_steps(p, reg, i))
    {
      if (s.label.isTau())
      {
        tau = std::move(s);
        break;
      }
    }
    if (!tau)
    {
      done.emplace_back(spine_normal_form(p), w);
      continue;
    }
    if (++expanded > ceiling)
    {
      throw Error(ErrorKind::StepCeilingExceeded,
                  "silent reduction did not stop after " + ceiling.get_str() + " steps");
    }
    for (const auto& [q, r] : tau->result.entries())
    {
      frontier[canonicalize(q)] += w * r;
    }
  }
  return ProcDist::fromWeights(done);
}

bool kleene_equiv(const Process& P, const Process& Q, const Registry& reg, unsigned long i)
{
  return kleene_sem(P, reg, i) == kleene_sem(Q, reg, i);
}

std::string ObsOutcome::str() const
{
  std::string s = "{true: " + ratStr(pTrue) + ", false: " + ratStr(pFalse);
  if (residual != 0)
  {
    s += ", residual: " + ratStr(residual);
  }
  return s + "}";
}

unsigned long index_of(const ParamSubstitution& rho)
{
  return rho.has("n") ? rho.at("n").get_ui() : 0;
}

namespace {

// The boolean emitted on x, if q is an observable final state.
std::optional<bool> emitted(const Process& q, const std::string& x)
{
  detail::Cluster c = detail::flatten(q);
  std::optional<bool> b;
  for (const auto& k : c.comps)
  {
    if (k->kind == PK::OutVal && k->x == x && k->v.kind == Value::Kind::Bool && !b)
    {
      b = k->v.b;
    }
    else if (k->kind != PK::RepIn)
    {
      return std::nullopt;
    }
  }
  for (const auto& [n, t] : c.restricted)
  {
    if (n == x)
    {
      return std::nullopt;
    }
  }
  return b;
}

bool holeUnderRep(const Process& p, bool underRep)
{
  if (!p)
  {
    return false;
  }
  if (p->kind == PK::Hole)
  {
    return underRep;
  }
  bool rep = underRep || p->kind == PK::RepIn;
  return holeUnderRep(p->p, rep) || holeUnderRep(p->q, rep);
}

}  // namespace

ObsOutcome observe(const Process& P, const ParamSubstitution& rho, const std::string& x,
                   const Registry& reg, const ObserveOptions& opts)
{
  NormalizeOptions n;
  n.ceiling = opts.ceiling;
  EvalReport rep = normalize(instantiate_params(P, rho), opts.sched, reg, index_of(rho), n);
  ObsOutcome o;
  for (const auto& [q, r] : rep.final.entries())
  {
    auto b = emitted(q, x);
    if (!b)
    {
      if (opts.strict)
      {
        throw Error(ErrorKind::NonBooleanResidual,
                    "final state `" + proc_str(q) + "` is not a boolean output on " + x);
      }
      o.residual += r;
    }
    else
    {
      (*b ? o.pTrue : o.pFalse) += r;
    }
  }
  return o;
}

LinearContext::LinearContext(Process c, std::optional<HoleSpec> spec)
    : d_body(std::move(c)), d_spec(std::move(spec))
{
  if (count_holes(d_body) != 1)
  {
    throw Error(ErrorKind::InvalidContext, "a context needs exactly one hole, `" +
                                               proc_str(d_body) + "` has " +
                                               std::to_string(count_holes(d_body)));
  }
  if (holeUnderRep(d_body, false))
  {
    throw Error(ErrorKind::InvalidContext,
                "the hole of `" + proc_str(d_body) + "` sits under a replicated input");
  }
}

LinearContext LinearContext::identity()
{
  return LinearContext(proc::hole());
}

LinearContext LinearContext::fromDecl(const ProcDecl& d)
{
  if (!d.hole)
  {
    throw Error(ErrorKind::InvalidContext, d.name + " is not a ctx declaration");
  }
  return LinearContext(d.body, d.hole);
}

Process plug(const LinearContext& C, const Process& P)
{
  return canonicalize(fill_hole(C.body(), P));
}

Epsilon constant_eps(const Rational& e)
{
  return [e](const ParamSubstitution&) { return e; };
}

std::vector<ObsVerdict> obs_equiv_sampled(const Process& P, const Process& Q, const VarSet& V,
                                          const std::vector<LinearContext>& contexts,
                                          const std::string& x,
                                          const std::vector<ParamSubstitution>& grid,
                                          const Epsilon& eps, const Registry& reg)
{
  if (V.size() > 1)
  {
    throw Error(ErrorKind::UnboundParamVar,
                "sampled equivalence supports at most one parameter variable");
  }
  std::vector<ObsVerdict> out;
  for (size_t c = 0; c < contexts.size(); ++c)
  {
    Process left = plug(contexts[c], P);
    Process right = plug(contexts[c], Q);
    for (const auto& rho : grid)
    {
      for (const auto& v : V)
      {
        rho.at(v);
      }
      ObsVerdict r{c, rho, observe(left, rho, x, reg), observe(right, rho, x, reg), 0, 0, false};
      r.gap = abs(r.left.pTrue - r.right.pTrue);
      r.eps = eps(rho);
      r.within = r.gap <= r.eps;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace pidibll
