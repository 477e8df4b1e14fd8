#include <functional>
#include <tuple>

#include "pidibll/semantics.h"
#include "typing_internal.h"

namespace pidibll {

Scheduler Scheduler::byName(const std::string& name, std::uint64_t seed)
{
  if (name == "leftmost")
  {
    return leftmost();
  }
  if (name == "rightmost")
  {
    return rightmost();
  }
  if (name == "seeded" || name == "random")
  {
    return seeded(seed);
  }
  throw Error(ErrorKind::UnknownSymbol, "unknown scheduler '" + name + "'");
}

std::string Scheduler::name() const
{
  switch (d_kind)
  {
    case Kind::Leftmost: return "leftmost";
    case Kind::Rightmost: return "rightmost";
    case Kind::Seeded: return "seeded(" + std::to_string(d_seed) + ")";
  }
  return "";
}

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

size_t Scheduler::choose(const Process& P, const std::vector<ReductionStep>& steps) const
{
  if (steps.empty())
  {
    throw Error(ErrorKind::NoRuleApplies, "scheduler called on an irreducible process");
  }
  switch (d_kind)
  {
    case Kind::Leftmost: return 0;
    case Kind::Rightmost: return steps.size() - 1;
    case Kind::Seeded:
    {
      std::uint64_t h = std::hash<std::string>{}(proc_str(P));
      return splitmix(h ^ splitmix(d_seed)) % steps.size();
    }
  }
  return 0;
}

namespace {

struct Node
{
  Process p;
  Nat cost;
  Nat steps;
};

struct NodeLess
{
  bool operator()(const Node& a, const Node& b) const
  {
    int c = compareProc(a.p, b.p);
    if (c != 0)
    {
      return c < 0;
    }
    if (a.cost != b.cost)
    {
      return a.cost < b.cost;
    }
    return a.steps < b.steps;
  }
};

}  // namespace

EvalReport normalize(const Process& P, const Scheduler& sched, const Registry& reg,
                     unsigned long i, const NormalizeOptions& opts)
{
  EvalReport rep;
  rep.bound = opts.bound;
  rep.total_cost = 0;
  rep.total_steps = 0;
  std::map<Node, Rational, NodeLess> frontier;
  frontier[Node{spine_normal_form(P), 0, 0}] = 1;
  std::map<Process, std::vector<ReductionStep>, ProcLess> cache;
  std::vector<std::pair<Process, Rational>> done;

  while (!frontier.empty())
  {
    auto it = frontier.begin();
    Node n = it->first;
    Rational w = it->second;
    frontier.erase(it);

    auto c = cache.find(n.p);
    if (c == cache.end())
    {
      c = cache.emplace(n.p, enabled_reductions(n.p, reg, i)).first;
    }
    const auto& steps = c->second;
    if (steps.empty())
    {
      done.emplace_back(n.p, w);
      rep.total_cost = std::max(rep.total_cost, n.cost);
      rep.total_steps = std::max(rep.total_steps, n.steps);
      continue;
    }
    const ReductionStep& s = steps[sched.choose(n.p, steps)];
    Nat cost = n.cost + s.cost;
    if (opts.bound && cost > *opts.bound)
    {
      throw Error(ErrorKind::BoundViolated, "path cost " + cost.get_str() + " exceeds the bound " +
                                                opts.bound->get_str() + " at `" +
                                                proc_str(n.p) + "`");
    }
    if (cost > opts.ceiling || n.steps + 1 > opts.ceiling)
    {
      throw Error(ErrorKind::StepCeilingExceeded,
                  "cost ceiling " + opts.ceiling.get_str() + " reached");
    }
    if (opts.trace)
    {
      opts.trace(s, cost);
    }
    for (const auto& [q, r] : s.result.entries())
    {
      frontier[Node{q, cost, n.steps + 1}] += w * r;
    }
  }
  rep.final = ProcDist::fromWeights(done);
  return rep;
}

ProgressShape progress_shape(const Process& P, const Registry& reg, unsigned long i)
{
  Process nf = spine_normal_form(P);
  if (nf->kind == PK::Nil)
  {
    return ProgressShape::Terminated;
  }
  if (!enabled_reductions(nf, reg, i).empty())
  {
    return ProgressShape::Reducible;
  }
  detail::Cluster c = detail::flatten(nf);
  for (const auto& k : c.comps)
  {
    if (k->kind != PK::RepIn)
    {
      return ProgressShape::Stuck;
    }
  }
  return ProgressShape::Replicated;
}

std::string progressShapeName(ProgressShape s)
{
  switch (s)
  {
    case ProgressShape::Terminated: return "terminated";
    case ProgressShape::Replicated: return "replicated";
    case ProgressShape::Reducible: return "reducible";
    case ProgressShape::Stuck: return "stuck";
  }
  return "";
}

ReductionTree reduction_tree(const Process& P, const Scheduler& sched, const Registry& reg,
                             unsigned long i, size_t maxDepth)
{
  ReductionTree t;
  t.root = spine_normal_form(P);
  if (maxDepth == 0)
  {
    return t;
  }
  auto steps = enabled_reductions(t.root, reg, i);
  if (steps.empty())
  {
    return t;
  }
  const ReductionStep& s = steps[sched.choose(t.root, steps)];
  t.rule = s.rule;
  for (const auto& [q, r] : s.result.entries())
  {
    t.children.emplace_back(r, reduction_tree(q, sched, reg, i, maxDepth - 1));
  }
  return t;
}

namespace {

void treeLines(const ReductionTree& t, const std::string& indent, const std::string& weight,
               std::string& out)
{
  out += indent + weight + proc_str(t.root);
  if (!t.rule.empty())
  {
    out += "   [" + t.rule + "]";
  }
  out += "\n";
  for (const auto& [r, c] : t.children)
  {
    treeLines(c, indent + "  ", ratStr(r) + "  ", out);
  }
}

}  // namespace

std::string tree_str(const ReductionTree& t)
{
  std::string s;
  treeLines(t, "", "", s);
  return s;
}

}  // namespace pidibll
