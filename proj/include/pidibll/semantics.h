#ifndef PIDIBLL_SEMANTICS_H
#define PIDIBLL_SEMANTICS_H

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pidibll/ast.h"
#include "pidibll/funsym.h"

namespace pidibll {

/**
 * Evaluate a closed term at index i. Annotations are evaluated under
 * {n -> i}; other parameter variables are an error.
 */
ValueDist eval_term(const Term& a, const Registry& reg, unsigned long i);

struct ReductionStep
{
  Process source;
  ProcDist result;
  Nat cost;
  std::string rule;
  /** Positions of the involved components on the flattened spine. */
  std::vector<size_t> redex;
};

/**
 * Spine normal form: restrictions hoisted over a right-nested parallel
 * composition of the non-0 components, unused restrictions dropped,
 * binders canonicalized. Every successor produced below is in this form.
 */
Process spine_normal_form(const Process& p);

/** All one-step reductions of a closed process, ordered by redex position. */
std::vector<ReductionStep> enabled_reductions(const Process& P, const Registry& reg,
                                              unsigned long i);

struct LabeledStep
{
  Process source;
  ActionLabel label;
  ProcDist result;
};

/**
 * Input labels carry the placeholder names `_w` (channel input) and `_v`
 * (value input); COM and CLOSE substitute the partner's object for them.
 */
std::vector<LabeledStep> labeled_steps(const Process& P, const Registry& reg, unsigned long i);

/** Monadic lifting of one labeled step; throws LabelNotUniformlyEnabled. */
ProcDist lift_step(const ProcDist& D, const ActionLabel& label, const Registry& reg,
                   unsigned long i);

class Scheduler
{
 public:
  enum class Kind
  {
    Leftmost,
    Rightmost,
    Seeded
  };

  static Scheduler leftmost() { return Scheduler(Kind::Leftmost, 0); }
  static Scheduler rightmost() { return Scheduler(Kind::Rightmost, 0); }
  static Scheduler seeded(std::uint64_t seed) { return Scheduler(Kind::Seeded, seed); }
  /** "leftmost", "rightmost" or "seeded"; throws Error(UnknownSymbol) otherwise. */
  static Scheduler byName(const std::string& name, std::uint64_t seed = 0);

  size_t choose(const Process& P, const std::vector<ReductionStep>& steps) const;
  std::string name() const;

 private:
  Scheduler(Kind k, std::uint64_t seed) : d_kind(k), d_seed(seed) {}
  Kind d_kind;
  std::uint64_t d_seed;
};

struct EvalReport
{
  ProcDist final;
  /** Maxima over all paths. */
  Nat total_steps;
  Nat total_cost;
  std::optional<Nat> bound;
};

struct NormalizeOptions
{
  /** W(pi)(rho) when a derivation is known; exceeding it throws BoundViolated. */
  std::optional<Nat> bound;
  /** Path cost ceiling; exceeding it throws StepCeilingExceeded. */
  Nat ceiling = 1000000;
  std::function<void(const ReductionStep&, const Nat& pathCost)> trace;
};

EvalReport normalize(const Process& P, const Scheduler& sched, const Registry& reg,
                     unsigned long i, const NormalizeOptions& opts = {});

enum class DiamondCase
{
  SameStep = 1,
  SameSubject = 2,
  Joined = 3
};

struct DiamondResult
{
  LabeledStep first;
  LabeledStep second;
  DiamondCase which;
  /** The common distribution reached in the joined case. */
  std::optional<ProcDist> unifier;
};

/** Throws Error(ConfluenceViolation) naming the first failing pair. */
std::vector<DiamondResult> diamond_check(const Process& P, const Registry& reg, unsigned long i);

enum class ProgressShape
{
  Terminated,
  Replicated,
  Reducible,
  Stuck
};

/** Classify a closed process offering x : 1. */
ProgressShape progress_shape(const Process& P, const Registry& reg, unsigned long i);
std::string progressShapeName(ProgressShape s);

struct ReductionTree
{
  Process root;
  /** Empty for a leaf. */
  std::vector<std::pair<Rational, ReductionTree>> children;
  std::string rule;
};

/** Tree of the reduction chosen by the scheduler; depth-limited for diagnostics. */
ReductionTree reduction_tree(const Process& P, const Scheduler& sched, const Registry& reg,
                             unsigned long i, size_t maxDepth = 64);
std::string tree_str(const ReductionTree& t);

}  // namespace pidibll

#endif
