#ifndef PIDIBLL_TESTS_SUPPORT_H
#define PIDIBLL_TESTS_SUPPORT_H

#include <random>
#include <string>
#include <vector>

#include "pidibll/cryptolib.h"

namespace pidibll::testing {

std::string fixture_path(const std::string& name);
std::string read_text(const std::string& path);
SourceUnit load_fixture(const std::string& name);

/** The fixtures every property below runs over. */
const std::vector<std::string>& corpus_files();

struct TypedDecl
{
  std::string file;
  const ProcDecl* decl;
  TypingDerivation deriv;
};

/** Every non-context declaration of the corpus, with its derivation. */
struct Corpus
{
  std::vector<SourceUnit> units;
  std::vector<TypedDecl> decls;
};
const Corpus& corpus();

/** Declarations with no channel environment. */
std::vector<const TypedDecl*> closed_decls();

/**
 * Every state reachable from P by any enabled reduction, P included.
 * Throws if more than `cap` states turn up.
 */
std::vector<Process> reachable(const Process& P, const Registry& reg, unsigned long i,
                               size_t cap = 20000);

/** Pr[true] - Pr[true] made positive; the plain oracle for sampled gaps. */
Rational true_gap(const ObsOutcome& a, const ObsOutcome& b);

// -- generated corpora --------------------------------------------------

/** Judgment shared by the generated pairs: lin{x : Bool} |- _ :: (o : Bool). */
HoleSpec bool_relay_spec();

struct ProcPair
{
  std::string kind;
  Process left;
  Process right;
};

/** Kleene-equivalent pairs at the relay judgment, built by known-safe rewrites. */
std::vector<ProcPair> kleene_pairs(size_t count, std::uint64_t seed);

/** Closing contexts for the relay judgment; each offers r : Bool. */
std::vector<LinearContext> relay_contexts();

/** Random process text for the fuzzer: syntactically plausible token soup. */
std::string token_soup(std::mt19937_64& rng, size_t tokens);

}  // namespace pidibll::testing

#endif
