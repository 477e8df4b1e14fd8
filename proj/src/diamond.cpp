#include "pidibll/semantics.h"

namespace pidibll {

namespace {

ProcDist nfDist(const ProcDist& d)
{
  return d.map<Process, ProcLess>([](const Process& p) { return spine_normal_form(p); });
}

bool sameInputShape(const ActionLabel& want, const ActionLabel& have)
{
  using K = ActionLabel::Kind;
  if (want.kind == K::In || want.kind == K::InV)
  {
    return have.kind == want.kind && have.x == want.x;
  }
  return want == have;
}

// Every way of lifting `label` over D, one choice of step per support element.
std::vector<ProcDist> liftings(const ProcDist& D, const ActionLabel& label, const Registry& reg,
                               unsigned long i)
{
  constexpr size_t kCap = 4096;
  std::vector<std::pair<Rational, std::vector<ProcDist>>> options;
  for (const auto& [p, r] : D.entries())
  {
    std::vector<ProcDist> mine;
    for (const auto& s : labeled_steps(p, reg, i))
    {
      if (!sameInputShape(label, s.label))
      {
        continue;
      }
      ProcDist e = s.result;
      if (s.label.y != label.y && (label.kind == ActionLabel::Kind::In ||
                                   label.kind == ActionLabel::Kind::InV))
      {
        bool value = label.kind == ActionLabel::Kind::InV;
        std::string from = s.label.y;
        std::string to = label.y;
        e = e.map<Process, ProcLess>([&](const Process& q) {
          return value ? substitute_value(q, from, Value::var(to)) : substitute_name(q, from, to);
        });
      }
      mine.push_back(nfDist(e));
    }
    if (mine.empty())
    {
      return {};
    }
    options.emplace_back(r, std::move(mine));
  }
  std::vector<ProcDist> out;
  std::vector<size_t> pick(options.size(), 0);
  for (size_t n = 0; n < kCap; ++n)
  {
    std::vector<std::pair<Rational, ProcDist>> parts;
    for (size_t k = 0; k < options.size(); ++k)
    {
      parts.emplace_back(options[k].first, options[k].second[pick[k]]);
    }
    out.push_back(ProcDist::sum(parts));
    size_t k = 0;
    for (; k < options.size(); ++k)
    {
      if (++pick[k] < options[k].second.size())
      {
        break;
      }
      pick[k] = 0;
    }
    if (k == options.size())
    {
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<DiamondResult> diamond_check(const Process& P, const Registry& reg, unsigned long i)
{
  Process src = canonicalize(P);
  std::vector<LabeledStep> steps;
  for (auto& s : labeled_steps(src, reg, i))
  {
    ProcDist d = nfDist(s.result);
    bool dup = false;
    for (const auto& t : steps)
    {
      dup = dup || (t.label == s.label && t.result == d);
    }
    if (!dup)
    {
      steps.push_back(LabeledStep{src, s.label, d});
    }
  }

  std::vector<DiamondResult> out;
  for (size_t a = 0; a < steps.size(); ++a)
  {
    for (size_t b = a + 1; b < steps.size(); ++b)
    {
      const LabeledStep& s = steps[a];
      const LabeledStep& t = steps[b];
      if (s.label.isTau() && t.label.isTau() && s.result == t.result)
      {
        out.push_back({s, t, DiamondCase::SameStep, std::nullopt});
        continue;
      }
      if (!s.label.isTau() && !t.label.isTau() && s.label.subject() == t.label.subject())
      {
        out.push_back({s, t, DiamondCase::SameSubject, std::nullopt});
        continue;
      }
      auto left = liftings(s.result, t.label, reg, i);
      auto right = liftings(t.result, s.label, reg, i);
      std::optional<ProcDist> common;
      for (const auto& x : left)
      {
        for (const auto& y : right)
        {
          if (x == y)
          {
            common = x;
            break;
          }
        }
        if (common)
        {
          break;
        }
      }
      if (!common)
      {
        throw Error(ErrorKind::ConfluenceViolation,
                    "steps " + s.label.str() + " and " + t.label.str() + " of `" + proc_str(src) +
                        "` do not join");
      }
      out.push_back({s, t, DiamondCase::Joined, common});
    }
  }
  return out;
}

}  // namespace pidibll
