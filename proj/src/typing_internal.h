#ifndef PIDIBLL_SRC_TYPING_INTERNAL_H
#define PIDIBLL_SRC_TYPING_INTERNAL_H

#include <optional>

#include "pidibll/typing.h"

namespace pidibll::detail {

/** What is known while guessing the type of a restricted channel. */
struct SynthCtx
{
  const Registry* reg = nullptr;
  std::map<std::string, std::optional<GroundType>> theta;
  std::map<std::string, SessionType> chans;
  std::set<std::string> shared;
  const HoleSpec* hole = nullptr;
  /** Type a string literal as Str of its own length instead of leaving it open. */
  bool literalLengths = false;
};

/** Partial type of x as offered by P; Unknown where P gives no evidence. */
SessionType synth_prov(const Process& P, const std::string& x, SynthCtx ctx);
/** Partial type of x as used by P, which holds x linearly. */
SessionType synth_cons(const Process& P, const std::string& x, SynthCtx ctx);

std::optional<GroundType> value_type(const Value& v, const SynthCtx& ctx);
std::optional<GroundType> term_type(const Term& a, const SynthCtx& ctx);

/** Flattened restriction/parallel spine. */
struct Cluster
{
  std::vector<Process> comps;
  std::vector<std::pair<std::string, SessionType>> restricted;
};

bool is_bound_output(const Process& p);
bool is_cluster(const Process& p);
Cluster flatten(const Process& p);

}  // namespace pidibll::detail

#endif
