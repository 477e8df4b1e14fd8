#ifndef PIDIBLL_TYPING_H
#define PIDIBLL_TYPING_H

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pidibll/ast.h"
#include "pidibll/funsym.h"
#include "pidibll/parser.h"

namespace pidibll {

struct UEntry
{
  Polynomial mult;
  SessionType type;
};

using UnrestrictedEnv = std::map<std::string, UEntry>;
using LinearEnv = std::map<std::string, SessionType>;
using TermEnv = std::map<std::string, GroundType>;
using VarSet = std::set<std::string>;

/** Names missing on one side count as multiplicity zero. */
UnrestrictedEnv env_sum(const UnrestrictedEnv& a, const UnrestrictedEnv& b);
UnrestrictedEnv env_scale(const Polynomial& p, const UnrestrictedEnv& g);
bool env_leq(const UnrestrictedEnv& a, const UnrestrictedEnv& b);
std::string env_str(const UnrestrictedEnv& g);
std::string env_str(const LinearEnv& d);
std::string env_str(const TermEnv& t);

GroundType check_term(const TermEnv& theta, const VarSet& V, const Term& a,
                      const Registry& reg);
/** Check a value against an expected ground type; strings need |s| <= p. */
void check_value(const TermEnv& theta, const VarSet& V, const Value& v, const GroundType& b);

struct Judgment
{
  VarSet V;
  /** Multiplicities record how often each name is actually used below. */
  UnrestrictedEnv gamma;
  LinearEnv delta;
  TermEnv theta;
  Process proc;
  std::string chan;
  SessionType type;

  std::string str() const;
};

struct TypingDerivation
{
  std::string rule;
  Judgment concl;
  std::vector<TypingDerivation> premises;
  Polynomial weight;
  /** Cut name for Tcut / Tcut!, the copied name for Tcopy, x for T!pL. */
  std::string name;
  /** Tcut!: copies used; T!pR and T!pL: the polynomial of the exponential. */
  Polynomial mult;
  /** Cost of the evaluated symbol for a let on an application. */
  Polynomial cost;
};

struct CheckOptions
{
  /** Judgment expected of the hole when checking a context. */
  const HoleSpec* hole = nullptr;
};

/**
 * Syntax-directed checker. Binders of P are canonicalized first, so the
 * derivation's process is alpha-equivalent to the input.
 */
TypingDerivation check_process(const VarSet& V, const UnrestrictedEnv& gamma,
                               const LinearEnv& delta, const TermEnv& theta, const Process& P,
                               const std::string& z, const SessionType& C, const Registry& reg,
                               const CheckOptions& opts = {});

/** Declaration helpers: judgment components straight from a parsed header. */
UnrestrictedEnv gamma_of(const Sections& s);
LinearEnv delta_of(const Sections& s);
TermEnv theta_of(const Sections& s);
TypingDerivation check_decl(const SourceUnit& u, const ProcDecl& d, const Registry& reg);
/** Check d with every polynomial instantiated by rho. */
TypingDerivation check_decl_at(const SourceUnit& u, const ProcDecl& d, const Registry& reg,
                               const ParamSubstitution& rho);
/** Check P at the judgment of d, instantiated by rho. */
TypingDerivation check_against_decl(const SourceUnit& u, const ProcDecl& d, const Process& P,
                                    const Registry& reg, const ParamSubstitution& rho);

Polynomial derivation_weight(const TypingDerivation& d);
TypingDerivation substitute_params(const TypingDerivation& d, const ParamSubstitution& rho);
/** Re-check every node against its rule; throws Error(NoRuleApplies) naming the node. */
void validate_derivation(const TypingDerivation& d, const Registry& reg);
size_t derivation_size(const TypingDerivation& d);
std::string derivation_sexpr(const TypingDerivation& d);

}  // namespace pidibll

#endif
