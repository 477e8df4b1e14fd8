#ifndef PIDIBLL_AST_H
#define PIDIBLL_AST_H

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pidibll/kernel.h"
#include "pidibll/session_type.h"

namespace pidibll {

// ---------------------------------------------------------------------------
// Values and terms

struct Value
{
  enum class Kind
  {
    Var,
    Bool,
    Str
  };
  Kind kind = Kind::Bool;
  std::string name;  // Var
  bool b = false;    // Bool
  std::string bits;  // Str, MSB first

  static Value var(const std::string& n) { return Value{Kind::Var, n, false, ""}; }
  static Value boolean(bool v) { return Value{Kind::Bool, "", v, ""}; }
  static Value str(const std::string& s) { return Value{Kind::Str, "", false, s}; }
  static Value ground(const GroundValue& g);

  bool isVar() const { return kind == Kind::Var; }
  GroundValue toGround() const;
  int compare(const Value& o) const;
  bool operator==(const Value& o) const { return compare(o) == 0; }
  bool operator<(const Value& o) const { return compare(o) < 0; }
  std::string str() const;
};

struct Term
{
  bool isApp = false;
  Value val;
  std::string fn;
  Polynomial index;
  std::vector<Value> args;

  static Term value(const Value& v);
  static Term app(const std::string& f, const Polynomial& p, const std::vector<Value>& args);

  std::set<std::string> freeVars() const;
  int compare(const Term& o) const;
  bool operator==(const Term& o) const { return compare(o) == 0; }
  std::string str() const;
};

// ---------------------------------------------------------------------------
// Processes

enum class PK
{
  Nil,
  Par,
  Res,
  OutCh,
  InCh,
  OutVal,
  InVal,
  Let,
  RepIn,
  SelL,
  SelR,
  Case,
  If,
  Hole
};

struct ProcNode;
using Process = std::shared_ptr<const ProcNode>;

/**
 * One node of a process tree. Subject channels live in x; every binder
 * (Res, InCh, InVal, Let, RepIn) keeps its bound name in y.
 */
struct ProcNode
{
  PK kind = PK::Nil;
  std::string x;
  std::string y;
  Value v;
  Term a;
  Process p;
  Process q;
  /** Optional type hint on a restriction, written `new y : A. P`. */
  SessionType ann;
};

namespace proc {
Process nil();
Process hole();
Process par(Process p, Process q);
Process res(const std::string& y, Process p, SessionType ann = nullptr);
Process outCh(const std::string& x, const std::string& y, Process p);
/** (new y) x<y>.P, the bound output shape. */
Process boundOut(const std::string& x, const std::string& y, Process p);
Process inCh(const std::string& x, const std::string& y, Process p);
Process outVal(const std::string& x, const Value& v);
Process inVal(const std::string& x, const std::string& z, Process p);
Process let(const std::string& z, const Term& a, Process p);
Process repIn(const std::string& x, const std::string& y, Process p);
Process selL(const std::string& x, Process p);
Process selR(const std::string& x, Process p);
Process caseOf(const std::string& x, Process p, Process q);
Process ifThen(const Value& v, Process p, Process q);
}  // namespace proc

/** Total order on syntax trees; 0 means syntactically identical. */
int compareProc(const Process& a, const Process& b);

struct ProcLess
{
  bool operator()(const Process& a, const Process& b) const { return compareProc(a, b) < 0; }
};

using ProcDist = Distribution<Process, ProcLess>;
using NameSet = std::set<std::string>;

bool isBinder(PK k);
std::set<std::string> valueVars(const Value& v);

/**
 * Free names. Channel subjects are free and term-variable occurrences count
 * as names, so fn covers everything a substitution or scope change may touch.
 */
NameSet free_names(const Process& p);
/** Every name occurring anywhere, bound or free. */
NameSet all_names(const Process& p);

/** Capture-avoiding simultaneous substitution of names by values. */
Process substitute(const Process& p, const std::map<std::string, Value>& s);
Process substitute_name(const Process& p, const std::string& from, const std::string& to);
Process substitute_value(const Process& p, const std::string& var, const Value& v);

/**
 * Rename every binder to `_k` in pre-order, skipping free names. The result
 * has pairwise distinct binders, so alpha-equivalent inputs give identical
 * trees.
 */
Process canonicalize(const Process& p);
bool alpha_eq(const Process& a, const Process& b);

/** Replace parameter variables in function annotations and type hints. */
Process instantiate_params(const Process& p, const ParamSubstitution& rho);
NameSet param_vars(const Process& p);

size_t proc_size(const Process& p);
size_t count_holes(const Process& p);
/** Replace the hole(s) of c by p, without renaming. */
Process fill_hole(const Process& c, const Process& p);

std::string fresh_name(const std::string& base, const NameSet& avoid);

/** Surface syntax of a process on one line. */
std::string proc_str(const Process& p);

// ---------------------------------------------------------------------------
// Structural congruence

/** Remove (nu x)(P | 0) with x not free in P, bottom-up. */
Process remove_garbage(const Process& p);
/**
 * All processes reachable by the two scope axioms (either direction, any
 * position), each followed by garbage removal and canonicalization.
 * Exploration stops after `cap` elements.
 */
std::set<Process, ProcLess> congruence_orbit(const Process& p, size_t cap = 20000);
bool struct_congruent(const Process& a, const Process& b);
/** Least element of the orbit; idempotent. */
Process struct_normal_form(const Process& p);

// ---------------------------------------------------------------------------
// Transition labels

struct ActionLabel
{
  enum class Kind
  {
    Tau,
    Out,
    In,
    BoundOut,
    InL,
    InR,
    OutL,
    OutR,
    InV,
    OutV
  };
  Kind kind = Kind::Tau;
  std::string x;
  std::string y;
  GroundValue val;

  static ActionLabel tau() { return {}; }
  bool isTau() const { return kind == Kind::Tau; }
  /** Throws for tau. */
  const std::string& subject() const;
  /** Names bound by the label: y for a bound output and for inputs. */
  NameSet bound() const;
  NameSet names() const;
  int compare(const ActionLabel& o) const;
  bool operator==(const ActionLabel& o) const { return compare(o) == 0; }
  bool operator<(const ActionLabel& o) const { return compare(o) < 0; }
  std::string str() const;
};

/** The label a partner must perform to synchronize, if any. */
bool labels_complementary(const ActionLabel& a, const ActionLabel& b);

}  // namespace pidibll

#endif
