#ifndef PIDIBLL_FUNSYM_H
#define PIDIBLL_FUNSYM_H

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pidibll/kernel.h"

namespace pidibll {

using ValueDist = Distribution<GroundValue>;

/**
 * Semantics of a symbol at index i. Arguments arrive padded to the carrier
 * length of their declared type.
 */
using SymbolSemantics =
    std::function<ValueDist(unsigned long i, const std::vector<GroundValue>& args)>;

struct FunctionSymbol
{
  std::string name;
  /** Argument and result types are ground types over the single variable n. */
  std::vector<GroundType> args;
  GroundType result;
  SymbolSemantics semantics;
  Polynomial cost;
};

class Registry
{
 public:
  void register_symbol(const FunctionSymbol& sym);
  /** A surface name that resolves to one of several registered symbols by argument kinds. */
  void register_overload(const std::string& surface, const std::vector<std::string>& members);

  bool has(const std::string& name) const;
  const FunctionSymbol& lookup(const std::string& name) const;
  bool isOverload(const std::string& name) const;
  const std::vector<std::string>& overloadMembers(const std::string& name) const;
  /** Resolve a surface name against argument kinds (true = Bool); identity for plain symbols. */
  const FunctionSymbol& resolve(const std::string& name, const std::vector<bool>& argIsBool) const;

  ValueDist apply(const std::string& name, unsigned long i,
                  const std::vector<GroundValue>& args) const;

  std::vector<std::string> names() const;

 private:
  std::map<std::string, FunctionSymbol> d_syms;
  std::map<std::string, std::vector<std::string>> d_overloads;
};

/** Deterministic map used for g_prg at index i. */
using PrgMap = std::function<std::string(unsigned long i, const std::string& seed)>;

PrgMap identityPrg();
/** A deliberately broken generator: constant all-zero output. */
PrgMap zeroPrg();

/**
 * flipcoin, gen, rand, eqb, eqs (surface eq), xor, g_prg, otp_enc, and the
 * helpers zeros, ones and prg_enc (xor with g_prg of the key).
 */
Registry builtin_registry(PrgMap prg = identityPrg());

}  // namespace pidibll

#endif
