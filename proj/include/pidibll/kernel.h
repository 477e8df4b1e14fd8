#ifndef PIDIBLL_KERNEL_H
#define PIDIBLL_KERNEL_H

#include <gmpxx.h>

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pidibll/error.h"

namespace pidibll {

using Nat = mpz_class;
using Rational = mpq_class;

std::string ratStr(const Rational& r);

/** Sorted multiset of variable names. The empty monomial is the constant 1. */
using Monomial = std::vector<std::string>;

class ParamSubstitution;

/**
 * Polynomial with natural coefficients. Terms with zero coefficient are never
 * stored, so structural equality of the term map is polynomial equality.
 */
class Polynomial
{
 public:
  Polynomial() = default;
  static Polynomial constant(const Nat& c);
  static Polynomial variable(const std::string& name);

  const std::map<Monomial, Nat>& terms() const { return d_terms; }
  std::set<std::string> vars() const;
  bool isZero() const { return d_terms.empty(); }
  bool isConstant() const;
  /** Constant part if isConstant(), otherwise throws. */
  Nat constantValue() const;
  size_t degree() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  bool operator==(const Polynomial& o) const { return d_terms == o.d_terms; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }
  bool operator<(const Polynomial& o) const { return d_terms < o.d_terms; }

  /** Replace variables by polynomials; unmapped variables are kept. */
  Polynomial substitute(const std::map<std::string, Polynomial>& s) const;
  Polynomial substitute(const ParamSubstitution& rho) const;

  std::string str() const;

 private:
  void addTerm(const Monomial& m, const Nat& c);
  std::map<Monomial, Nat> d_terms;
};

class ParamSubstitution
{
 public:
  ParamSubstitution() = default;
  ParamSubstitution(std::initializer_list<std::pair<const std::string, Nat>> l)
      : d_bind(l)
  {
  }
  void set(const std::string& v, const Nat& n) { d_bind[v] = n; }
  bool has(const std::string& v) const { return d_bind.count(v) > 0; }
  /** Throws UnboundParamVar when v is not bound. */
  const Nat& at(const std::string& v) const;
  const std::map<std::string, Nat>& bindings() const { return d_bind; }
  std::string str() const;
  bool operator==(const ParamSubstitution& o) const { return d_bind == o.d_bind; }
  bool operator<(const ParamSubstitution& o) const { return d_bind < o.d_bind; }

 private:
  std::map<std::string, Nat> d_bind;
};

/** rho_i = {n -> i}. */
ParamSubstitution rhoN(unsigned long i);

Nat poly_eval(const Polynomial& p, const ParamSubstitution& rho);
Polynomial poly_add(const Polynomial& p, const Polynomial& q);
Polynomial poly_mul(const Polynomial& p, const Polynomial& q);
Polynomial poly_scale(const Nat& k, const Polynomial& p);

enum class LeqVerdict
{
  Holds,
  Refuted,
  Indeterminate
};

struct LeqResult
{
  LeqVerdict verdict;
  /** Witness substitution when refuted. */
  ParamSubstitution witness;
};

/**
 * Decide p(rho) <= q(rho) for every rho. Non-negative coefficients of q - p
 * settle it directly. The single-variable case is then decided exactly using
 * a root bound. Otherwise a witness is searched in the box 0..d+2 and, failing
 * that, the answer is Indeterminate.
 */
LeqResult poly_leq_decide(const Polynomial& p, const Polynomial& q);
/** Indeterminate counts as false. */
bool poly_leq(const Polynomial& p, const Polynomial& q);

/** Parse `3*n^2 + n*m + 7`. Throws ParseError. */
Polynomial parsePolynomial(const std::string& text);

/**
 * Finite distribution with exact rational weights. Keys are kept in a map,
 * so duplicates merge and there are never zero-weight entries.
 */
template <class T, class Less = std::less<T>>
class Distribution
{
 public:
  using Map = std::map<T, Rational, Less>;

  Distribution() = default;

  static Distribution pure(const T& x)
  {
    Distribution d;
    d.d_w.emplace(x, Rational(1));
    return d;
  }

  /** Build from raw weighted entries; entries merge; must sum to 1. */
  static Distribution fromWeights(const std::vector<std::pair<T, Rational>>& ws)
  {
    Distribution d;
    for (const auto& [x, r] : ws)
    {
      if (r < 0)
      {
        throw Error(ErrorKind::InvalidWeights, "negative weight");
      }
      d.accumulate(x, r);
    }
    d.checkTotal();
    return d;
  }

  /** Weighted sum of distributions; weights must be positive and sum to 1. */
  static Distribution sum(const std::vector<std::pair<Rational, Distribution>>& ws)
  {
    Distribution d;
    Rational total(0);
    for (const auto& [r, e] : ws)
    {
      if (r <= 0)
      {
        throw Error(ErrorKind::InvalidWeights, "non-positive mixture weight");
      }
      total += r;
      for (const auto& [x, w] : e.d_w)
      {
        d.accumulate(x, r * w);
      }
    }
    if (total != 1)
    {
      throw Error(ErrorKind::InvalidWeights,
                  "mixture weights sum to " + ratStr(total));
    }
    d.checkTotal();
    return d;
  }

  template <class U, class L2 = std::less<U>, class F>
  Distribution<U, L2> map(F f) const
  {
    std::vector<std::pair<U, Rational>> ws;
    for (const auto& [x, r] : d_w)
    {
      ws.emplace_back(f(x), r);
    }
    return Distribution<U, L2>::fromWeights(ws);
  }

  template <class U, class L2 = std::less<U>, class F>
  Distribution<U, L2> bind(F k) const
  {
    std::vector<std::pair<Rational, Distribution<U, L2>>> ws;
    for (const auto& [x, r] : d_w)
    {
      ws.emplace_back(r, k(x));
    }
    return Distribution<U, L2>::sum(ws);
  }

  const Map& entries() const { return d_w; }
  size_t size() const { return d_w.size(); }
  bool empty() const { return d_w.empty(); }
  std::vector<T> support() const
  {
    std::vector<T> s;
    for (const auto& e : d_w)
    {
      s.push_back(e.first);
    }
    return s;
  }
  Rational weight(const T& x) const
  {
    auto it = d_w.find(x);
    return it == d_w.end() ? Rational(0) : it->second;
  }
  Rational total() const
  {
    Rational t(0);
    for (const auto& e : d_w)
    {
      t += e.second;
    }
    return t;
  }
  bool operator==(const Distribution& o) const
  {
    if (d_w.size() != o.d_w.size())
    {
      return false;
    }
    Less lt;
    auto a = d_w.begin();
    auto b = o.d_w.begin();
    for (; a != d_w.end(); ++a, ++b)
    {
      if (lt(a->first, b->first) || lt(b->first, a->first) || a->second != b->second)
      {
        return false;
      }
    }
    return true;
  }
  bool operator!=(const Distribution& o) const { return !(*this == o); }

  /** Sub-distribution accumulation; used by builders that check the total later. */
  void accumulate(const T& x, const Rational& r)
  {
    if (r == 0)
    {
      return;
    }
    auto it = d_w.find(x);
    if (it == d_w.end())
    {
      d_w.emplace(x, r);
    }
    else
    {
      it->second += r;
    }
  }
  void checkTotal() const
  {
    if (total() != 1)
    {
      throw Error(ErrorKind::InvalidWeights, "weights sum to " + ratStr(total()));
    }
  }

 private:
  Map d_w;
};

template <class T, class L>
Distribution<T, L> dist_pure(const T& x)
{
  return Distribution<T, L>::pure(x);
}

// ---------------------------------------------------------------------------
// Ground types and values

struct GroundType
{
  enum class Kind
  {
    Bool,
    Str
  };
  Kind kind = Kind::Bool;
  Polynomial len;

  static GroundType boolean() { return GroundType{}; }
  static GroundType str(const Polynomial& p) { return GroundType{Kind::Str, p}; }
  bool isBool() const { return kind == Kind::Bool; }
  std::set<std::string> vars() const;
  GroundType substitute(const std::map<std::string, Polynomial>& s) const;
  bool operator==(const GroundType& o) const
  {
    return kind == o.kind && len == o.len;
  }
  bool operator!=(const GroundType& o) const { return !(*this == o); }
  bool operator<(const GroundType& o) const
  {
    if (kind != o.kind)
    {
      return kind < o.kind;
    }
    return len < o.len;
  }
  std::string str() const;
};

/** A closed ground value: a boolean or a bitstring written MSB first. */
struct GroundValue
{
  bool isBool = true;
  bool b = false;
  std::string bits;

  static GroundValue boolean(bool v) { return GroundValue{true, v, ""}; }
  static GroundValue bitstring(const std::string& s) { return GroundValue{false, false, s}; }
  auto operator<=>(const GroundValue&) const = default;
  bool operator==(const GroundValue&) const = default;
  std::string str() const;
};

/** Enumerable description of [[B]]rho. */
struct Carrier
{
  bool isBool = true;
  unsigned long length = 0;
  std::vector<GroundValue> enumerate() const;
  bool contains(const GroundValue& v) const;
  /** Number of elements, as an exact count. */
  Nat size() const;
};

Carrier ground_type_carrier(const GroundType& b, const ParamSubstitution& rho);

/** Left-pad with zeros to length n; longer strings are returned unchanged. */
std::string padLeft(const std::string& bits, size_t n);

}  // namespace pidibll

#endif
