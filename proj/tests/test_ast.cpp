#include "doctest.h"
#include "support.h"

using namespace pidibll;
using namespace pidibll::testing;

namespace {

// Closed processes: generated relay bodies in every relay context, plus the corpus bodies.
std::vector<Process> sampleProcesses()
{
  std::vector<Process> out;
  auto ctxs = relay_contexts();
  auto pairs = kleene_pairs(24, 3);
  for (size_t k = 0; k < pairs.size(); ++k)
  {
    out.push_back(pairs[k].left);
    out.push_back(plug(ctxs[k % ctxs.size()], pairs[k].right));
  }
  for (const auto& t : corpus().decls)
  {
    out.push_back(t.decl->body);
  }
  return out;
}

// Rename the outermost binder found in pre-order to a fresh name.
Process renameFirstBinder(const Process& p, const NameSet& avoid)
{
  if (!p)
  {
    return p;
  }
  auto n = std::make_shared<ProcNode>(*p);
  if (isBinder(p->kind) && !p->y.empty())
  {
    std::string fresh = fresh_name("r", avoid);
    n->p = substitute_name(p->p, p->y, fresh);
    n->y = fresh;
    return n;
  }
  n->p = renameFirstBinder(p->p, avoid);
  return n;
}

}  // namespace

TEST_CASE("free names after renaming a free name")
{
  for (const auto& P : sampleProcesses())
  {
    NameSet fn = free_names(P);
    for (const auto& a : fn)
    {
      std::string b = fresh_name("b", all_names(P));
      NameSet expect = fn;
      expect.erase(a);
      expect.insert(b);
      CHECK(free_names(substitute_name(P, a, b)) == expect);
    }
    std::string ghost = fresh_name("g", all_names(P));
    CHECK(alpha_eq(substitute_name(P, ghost, "zz"), P));
  }
}

TEST_CASE("canonicalize is idempotent and preserves alpha class")
{
  for (const auto& P : sampleProcesses())
  {
    Process c = canonicalize(P);
    CHECK(compareProc(canonicalize(c), c) == 0);
    CHECK(alpha_eq(P, c));
    CHECK(free_names(P) == free_names(c));
    CHECK(proc_size(P) == proc_size(c));
  }
}

TEST_CASE("renaming a bound name gives an alpha-equivalent process")
{
  int renamed = 0;
  for (const auto& P : sampleProcesses())
  {
    Process R = renameFirstBinder(P, all_names(P));
    CHECK(alpha_eq(P, R));
    if (compareProc(P, R) != 0)
    {
      ++renamed;
    }
  }
  CHECK(renamed > 0);
}

TEST_CASE("alpha_eq distinguishes free names")
{
  Process a = parse_process("in x (u). out o u");
  Process b = parse_process("in x (v). out o v");
  Process c = parse_process("in y (v). out o v");
  CHECK(alpha_eq(a, b));
  CHECK_FALSE(alpha_eq(a, c));
}

TEST_CASE("substitution does not capture")
{
  // Replacing the free w by u must not be captured by the binder u.
  Process p = parse_process("in x (u). if w then out o u else out o w");
  Process q = substitute_name(p, "w", "u");
  CHECK(free_names(q).count("u"));
  CHECK(alpha_eq(q, parse_process("in x (v). if u then out o v else out o u")));
}

TEST_CASE("struct normal form is idempotent and respects the orbit")
{
  for (const auto& P : sampleProcesses())
  {
    Process nf = struct_normal_form(P);
    CHECK(compareProc(struct_normal_form(nf), nf) == 0);
    CHECK(struct_congruent(P, nf));
    size_t seen = 0;
    for (const auto& Q : congruence_orbit(P, 200))
    {
      CHECK(compareProc(struct_normal_form(Q), nf) == 0);
      if (++seen == 8)
      {
        break;
      }
    }
  }
}

TEST_CASE("struct congruence is invariant under alpha renaming")
{
  for (const auto& P : sampleProcesses())
  {
    Process R = renameFirstBinder(P, all_names(P));
    CHECK(struct_congruent(P, R));
  }
}

TEST_CASE("scope extrusion both ways")
{
  Process l = parse_process("new x. (out x true | new y. (in x (a). out y a | in y (b). out o b))");
  Process r = parse_process("new y. (new x. (out x true | in x (a). out y a) | in y (b). out o b)");
  CHECK(struct_congruent(l, r));
  CHECK(struct_congruent(r, l));
  // The side condition fails when y is free in the left component.
  Process blocked = parse_process("new x. (out y true | new y. (in x (a). out y a | out o true))");
  for (const auto& q : congruence_orbit(blocked))
  {
    CHECK(free_names(q) == free_names(blocked));
  }
}

TEST_CASE("garbage restrictions vanish")
{
  Process p = parse_process("new x. (out o true | 0)");
  CHECK(alpha_eq(remove_garbage(p), parse_process("out o true")));
  Process live = parse_process("new x. (out x true | 0)");
  CHECK(alpha_eq(remove_garbage(live), live));
}

TEST_CASE("holes are counted and filled")
{
  for (const auto& C : relay_contexts())
  {
    CHECK(count_holes(C.body()) == 1);
    Process filled = fill_hole(C.body(), parse_process("in x (u). out o u"));
    CHECK(count_holes(filled) == 0);
  }
  CHECK_THROWS_AS(LinearContext(parse_process("out o true")), Error);
  CHECK_THROWS_AS(LinearContext(parse_process("!in s (c). []")), Error);
  CHECK_THROWS_AS(LinearContext(parse_process("([] | [])")), Error);
}

TEST_CASE("parameter instantiation touches only annotations")
{
  Process p = parse_process("let k = gen[n]() in let w = xor[n](k, k) in out o w");
  CHECK(param_vars(p) == NameSet{"n"});
  ParamSubstitution r = rhoN(3);
  Process q = instantiate_params(p, r);
  CHECK(param_vars(q).empty());
  CHECK(free_names(q) == free_names(p));
}

TEST_CASE("labels")
{
  ActionLabel out{ActionLabel::Kind::BoundOut, "x", "y", {}};
  ActionLabel in{ActionLabel::Kind::In, "x", "y", {}};
  CHECK(labels_complementary(out, in));
  CHECK(out.bound() == NameSet{"y"});
  CHECK(out.subject() == "x");
  CHECK_THROWS(ActionLabel::tau().subject());
}
