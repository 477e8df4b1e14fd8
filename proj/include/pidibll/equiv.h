#ifndef PIDIBLL_EQUIV_H
#define PIDIBLL_EQUIV_H

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pidibll/semantics.h"
#include "pidibll/typing.h"

namespace pidibll {

/**
 * Distribution over tau-normal forms reached by exhaustive silent
 * reduction. Walks the labeled transition system rather than the
 * reduction relation, so it doubles as a second implementation of
 * normalize. Leaves are returned in spine normal form.
 */
ProcDist kleene_sem(const Process& P, const Registry& reg, unsigned long i,
                    const Nat& ceiling = 1000000);
bool kleene_equiv(const Process& P, const Process& Q, const Registry& reg, unsigned long i);

struct ObsOutcome
{
  Rational pTrue = 0;
  Rational pFalse = 0;
  /** Mass on final states that are not a boolean output on the channel. */
  Rational residual = 0;

  bool operator==(const ObsOutcome& o) const
  {
    return pTrue == o.pTrue && pFalse == o.pFalse && residual == o.residual;
  }
  std::string str() const;
};

struct ObserveOptions
{
  Scheduler sched = Scheduler::leftmost();
  Nat ceiling = 1000000;
  /** Throw NonBooleanResidual instead of reporting residual mass. */
  bool strict = true;
};

/**
 * A final state counts as `out x b` when its spine has exactly one
 * component `out x b` with b a literal and every other component is a
 * replicated input.
 */
ObsOutcome observe(const Process& P, const ParamSubstitution& rho, const std::string& x,
                   const Registry& reg, const ObserveOptions& opts = {});

class LinearContext
{
 public:
  /** Throws InvalidContext unless c has one hole, not under a replicated input. */
  explicit LinearContext(Process c, std::optional<HoleSpec> spec = std::nullopt);
  static LinearContext identity();
  /** From a `ctx` declaration. */
  static LinearContext fromDecl(const ProcDecl& d);

  const Process& body() const { return d_body; }
  const std::optional<HoleSpec>& spec() const { return d_spec; }
  std::string str() const { return proc_str(d_body); }

 private:
  Process d_body;
  std::optional<HoleSpec> d_spec;
};

/** Plug without renaming, then canonicalize. */
Process plug(const LinearContext& C, const Process& P);

/** Tolerance per grid point. */
using Epsilon = std::function<Rational(const ParamSubstitution&)>;
Epsilon constant_eps(const Rational& e);

struct ObsVerdict
{
  size_t context;
  ParamSubstitution rho;
  ObsOutcome left;
  ObsOutcome right;
  /** |Pr[true on the left] - Pr[true on the right]|. */
  Rational gap;
  Rational eps;
  bool within;
};

/**
 * Compare Obs(C[P]) and Obs(C[Q]) for every context and grid point.
 * Evidence only: a finite grid says nothing about asymptotics. V is the
 * parameter set both sides were typed over; grid points must bind it and
 * at most one variable.
 */
std::vector<ObsVerdict> obs_equiv_sampled(const Process& P, const Process& Q, const VarSet& V,
                                          const std::vector<LinearContext>& contexts,
                                          const std::string& x,
                                          const std::vector<ParamSubstitution>& grid,
                                          const Epsilon& eps, const Registry& reg);

/** Index used by function annotations: rho(n) when bound, else 0. */
unsigned long index_of(const ParamSubstitution& rho);

}  // namespace pidibll

#endif
