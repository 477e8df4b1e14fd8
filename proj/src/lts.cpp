#include "pidibll/semantics.h"
#include "typing_internal.h"

namespace pidibll {

namespace {

using K = ActionLabel::Kind;

ActionLabel label(K k, const std::string& x, const std::string& y = "",
                  GroundValue val = GroundValue::boolean(false))
{
  ActionLabel a;
  a.kind = k;
  a.x = x;
  a.y = y;
  a.val = val;
  return a;
}

std::string placeholder(const std::string& stem, const NameSet& used)
{
  return used.count(stem) ? fresh_name(stem, used) : stem;
}

ProcDist mapDist(const ProcDist& d, const std::function<Process(const Process&)>& f)
{
  return d.map<Process, ProcLess>(f);
}

bool isInput(K k)
{
  return k == K::In || k == K::InV;
}

void collect(const Process& P, const Registry& reg, unsigned long i, const NameSet& avoid,
             std::vector<LabeledStep>& out);

std::vector<LabeledStep> stepsOf(const Process& P, const Registry& reg, unsigned long i,
                                 const NameSet& avoid)
{
  std::vector<LabeledStep> r;
  collect(P, reg, i, avoid, r);
  return r;
}

void collect(const Process& P, const Registry& reg, unsigned long i, const NameSet& avoid,
             std::vector<LabeledStep>& out)
{
  auto emit = [&](ActionLabel a, ProcDist d) { out.push_back(LabeledStep{P, a, d}); };
  switch (P->kind)
  {
    case PK::Nil:
    case PK::Hole: return;
    case PK::OutCh: emit(label(K::Out, P->x, P->y), ProcDist::pure(P->p)); return;
    case PK::InCh:
    {
      std::string w = placeholder("_w" + P->x, avoid);
      emit(label(K::In, P->x, w), ProcDist::pure(substitute_name(P->p, P->y, w)));
      return;
    }
    case PK::RepIn:
    {
      std::string w = placeholder("_w" + P->x, avoid);
      emit(label(K::In, P->x, w),
           ProcDist::pure(proc::par(substitute_name(P->p, P->y, w), P)));
      return;
    }
    case PK::OutVal:
      if (!P->v.isVar())
      {
        emit(label(K::OutV, P->x, "", P->v.toGround()), ProcDist::pure(proc::nil()));
      }
      return;
    case PK::InVal:
    {
      std::string v = placeholder("_v" + P->x, avoid);
      emit(label(K::InV, P->x, v), ProcDist::pure(substitute_value(P->p, P->y, Value::var(v))));
      return;
    }
    case PK::SelL: emit(label(K::OutL, P->x), ProcDist::pure(P->p)); return;
    case PK::SelR: emit(label(K::OutR, P->x), ProcDist::pure(P->p)); return;
    case PK::Case:
      emit(label(K::InL, P->x), ProcDist::pure(P->p));
      emit(label(K::InR, P->x), ProcDist::pure(P->q));
      return;
    case PK::Let:
    {
      ValueDist vals = eval_term(P->a, reg, i);
      std::vector<std::pair<Process, Rational>> ws;
      for (const auto& [v, r] : vals.entries())
      {
        ws.emplace_back(substitute_value(P->p, P->y, Value::ground(v)), r);
      }
      emit(ActionLabel::tau(), ProcDist::fromWeights(ws));
      return;
    }
    case PK::If:
      if (P->v.kind == Value::Kind::Bool)
      {
        emit(ActionLabel::tau(), ProcDist::pure(P->v.b ? P->p : P->q));
      }
      return;
    case PK::Res:
    {
      const std::string& y = P->y;
      for (const auto& s : stepsOf(P->p, reg, i, avoid))
      {
        const ActionLabel& a = s.label;
        if (a.kind == K::Out && a.y == y && a.x != y)
        {
          emit(label(K::BoundOut, a.x, y), s.result);
        }
        else if (!a.names().count(y))
        {
          emit(a, mapDist(s.result, [&](const Process& q) { return proc::res(y, q, P->ann); }));
        }
      }
      return;
    }
    case PK::Par:
    {
      const Process& A = P->p;
      const Process& B = P->q;
      auto sa = stepsOf(A, reg, i, avoid);
      auto sb = stepsOf(B, reg, i, avoid);
      NameSet fa = free_names(A);
      NameSet fb = free_names(B);
      auto disjoint = [](const NameSet& bn, const NameSet& fn) {
        for (const auto& n : bn)
        {
          if (fn.count(n))
          {
            return false;
          }
        }
        return true;
      };
      for (const auto& s : sa)
      {
        if (disjoint(s.label.bound(), fb))
        {
          emit(s.label, mapDist(s.result, [&](const Process& q) { return proc::par(q, B); }));
        }
      }
      for (const auto& s : sb)
      {
        if (disjoint(s.label.bound(), fa))
        {
          emit(s.label, mapDist(s.result, [&](const Process& q) { return proc::par(A, q); }));
        }
      }
      // COM and CLOSE, either side sending.
      auto sync = [&](const LabeledStep& snd, const LabeledStep& rcv, bool sndLeft) {
        if (snd.result.size() != 1 || rcv.result.size() != 1)
        {
          return;
        }
        const ActionLabel& a = snd.label;
        const ActionLabel& b = rcv.label;
        if (a.subject() != b.subject())
        {
          return;
        }
        Process p1 = snd.result.support().front();
        Process q1 = rcv.result.support().front();
        bool close = false;
        if ((a.kind == K::Out || a.kind == K::BoundOut) && b.kind == K::In)
        {
          q1 = substitute_name(q1, b.y, a.y);
          close = a.kind == K::BoundOut;
        }
        else if (a.kind == K::OutV && b.kind == K::InV)
        {
          q1 = substitute_value(q1, b.y, Value::ground(a.val));
        }
        else if (!((a.kind == K::OutL && b.kind == K::InL) ||
                   (a.kind == K::OutR && b.kind == K::InR)))
        {
          return;
        }
        Process r = sndLeft ? proc::par(p1, q1) : proc::par(q1, p1);
        if (close)
        {
          r = proc::res(a.y, r);
        }
        emit(ActionLabel::tau(), ProcDist::pure(r));
      };
      for (const auto& s : sa)
      {
        for (const auto& t : sb)
        {
          if (s.label.isTau() || t.label.isTau())
          {
            continue;
          }
          sync(s, t, true);
          sync(t, s, false);
        }
      }
      return;
    }
  }
}

bool labelMatches(const ActionLabel& want, const ActionLabel& have)
{
  if (isInput(want.kind))
  {
    return have.kind == want.kind && have.x == want.x;
  }
  return want == have;
}

}  // namespace

std::vector<LabeledStep> labeled_steps(const Process& P, const Registry& reg, unsigned long i)
{
  return stepsOf(P, reg, i, all_names(P));
}

ProcDist lift_step(const ProcDist& D, const ActionLabel& label, const Registry& reg,
                   unsigned long i)
{
  std::vector<std::pair<Rational, ProcDist>> parts;
  for (const auto& [p, r] : D.entries())
  {
    std::optional<ProcDist> found;
    for (const auto& s : labeled_steps(p, reg, i))
    {
      if (!labelMatches(label, s.label))
      {
        continue;
      }
      ProcDist e = s.result;
      if (isInput(label.kind) && s.label.y != label.y && !all_names(p).count(label.y))
      {
        const std::string from = s.label.y;
        const std::string to = label.y;
        bool value = label.kind == ActionLabel::Kind::InV;
        e = mapDist(e, [&](const Process& q) {
          return value ? substitute_value(q, from, Value::var(to)) : substitute_name(q, from, to);
        });
      }
      found = e;
      break;
    }
    if (!found)
    {
      throw Error(ErrorKind::LabelNotUniformlyEnabled,
                  "`" + proc_str(p) + "` cannot perform " + label.str());
    }
    parts.emplace_back(r, *found);
  }
  return ProcDist::sum(parts);
}

}  // namespace pidibll
