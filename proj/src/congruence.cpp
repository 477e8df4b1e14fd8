#include <deque>

#include "pidibll/ast.h"

namespace pidibll {

Process remove_garbage(const Process& p)
{
  if (!p->p && !p->q)
  {
    return p;
  }
  Process l = p->p ? remove_garbage(p->p) : nullptr;
  Process r = p->q ? remove_garbage(p->q) : nullptr;
  Process out = p;
  if (l != p->p || r != p->q)
  {
    auto n = std::make_shared<ProcNode>(*p);
    n->p = l;
    n->q = r;
    out = n;
  }
  if (out->kind == PK::Res && out->p->kind == PK::Par && out->p->q->kind == PK::Nil &&
      !free_names(out->p->p).count(out->y))
  {
    return out->p->p;
  }
  return out;
}

namespace {

bool isResPar(const Process& p)
{
  return p->kind == PK::Res && p->p->kind == PK::Par;
}

// Both scope axioms at the root of p, in every applicable direction.
void rootMoves(const Process& n, std::vector<Process>& out)
{
  if (!isResPar(n))
  {
    return;
  }
  const std::string& outer = n->y;
  const Process& left = n->p->p;
  const Process& right = n->p->q;

  // (nx)(P | (ny)(Q | R)) on the left-hand side of both axioms.
  if (isResPar(right))
  {
    const std::string& inner = right->y;
    const Process& P = left;
    const Process& Q = right->p->p;
    const Process& R = right->p->q;
    NameSet fP = free_names(P);
    if (!fP.count(inner))
    {
      if (!free_names(R).count(outer))
      {
        out.push_back(proc::res(inner, proc::par(proc::res(outer, proc::par(P, Q), n->ann), R),
                                right->ann));
      }
      if (!free_names(Q).count(outer))
      {
        out.push_back(proc::res(inner, proc::par(Q, proc::res(outer, proc::par(P, R), n->ann)),
                                right->ann));
      }
    }
  }
  // (ny)((nx)(P | Q) | R) back to (nx)(P | (ny)(Q | R)).
  if (isResPar(left))
  {
    const std::string& inner = left->y;
    const Process& P = left->p->p;
    const Process& Q = left->p->q;
    const Process& R = right;
    if (!free_names(R).count(inner) && !free_names(P).count(outer))
    {
      out.push_back(proc::res(inner, proc::par(P, proc::res(outer, proc::par(Q, R), n->ann)),
                              left->ann));
    }
  }
}

void allMoves(const Process& p, std::vector<Process>& out)
{
  rootMoves(p, out);
  if (p->p)
  {
    std::vector<Process> sub;
    allMoves(p->p, sub);
    for (const auto& s : sub)
    {
      auto n = std::make_shared<ProcNode>(*p);
      n->p = s;
      out.push_back(n);
    }
  }
  if (p->q)
  {
    std::vector<Process> sub;
    allMoves(p->q, sub);
    for (const auto& s : sub)
    {
      auto n = std::make_shared<ProcNode>(*p);
      n->q = s;
      out.push_back(n);
    }
  }
}

Process tidy(const Process& p)
{
  return canonicalize(remove_garbage(p));
}

}  // namespace

std::set<Process, ProcLess> congruence_orbit(const Process& p, size_t cap)
{
  std::set<Process, ProcLess> seen;
  std::deque<Process> work;
  Process start = tidy(canonicalize(p));
  seen.insert(start);
  work.push_back(start);
  while (!work.empty() && seen.size() < cap)
  {
    Process cur = work.front();
    work.pop_front();
    std::vector<Process> next;
    allMoves(cur, next);
    for (const auto& m : next)
    {
      Process t = tidy(m);
      if (seen.insert(t).second)
      {
        work.push_back(t);
      }
    }
  }
  return seen;
}

bool struct_congruent(const Process& a, const Process& b)
{
  auto oa = congruence_orbit(a);
  Process tb = tidy(canonicalize(b));
  if (oa.count(tb))
  {
    return true;
  }
  auto ob = congruence_orbit(b);
  for (const auto& x : ob)
  {
    if (oa.count(x))
    {
      return true;
    }
  }
  return false;
}

Process struct_normal_form(const Process& p)
{
  return *congruence_orbit(p).begin();
}

}  // namespace pidibll
