#include <algorithm>
#include <sstream>

#include "pidibll/kernel.h"

namespace pidibll {

namespace {

const char* const kErrorNames[] = {
    "UnboundParamVar",     "InvalidWeights",       "DuplicateSymbol",
    "UnknownSymbol",       "ArityMismatch",        "CarrierViolation",
    "ParseError",          "UnknownVariable",      "StringTooLong",
    "SignatureMismatch",   "VarsOutsideV",         "TypeMismatchAtName",
    "NoRuleApplies",       "LinearityViolation",   "MultiplicityExceeded",
    "GroundTypeMismatch",  "OpenTerm",             "LabelNotUniformlyEnabled",
    "StepCeilingExceeded", "BoundViolated",        "ConfluenceViolation",
    "NonBooleanResidual",  "IllTypedAdversary",    "InvalidContext",
};

Monomial mergeMonomials(const Monomial& a, const Monomial& b)
{
  Monomial m;
  m.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
  return m;
}

// Integer-coefficient difference used only inside the comparison.
using SignedTerms = std::map<Monomial, mpz_class>;

mpz_class evalSigned(const SignedTerms& t, const std::map<std::string, mpz_class>& rho)
{
  mpz_class s = 0;
  for (const auto& [m, c] : t)
  {
    mpz_class v = c;
    for (const auto& x : m)
    {
      v *= rho.at(x);
    }
    s += v;
  }
  return s;
}

}  // namespace

const char* errorKindName(ErrorKind k)
{
  return kErrorNames[static_cast<int>(k)];
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(errorKindName(kind)) + ": " + msg), d_kind(kind)
{
}

std::string ratStr(const Rational& r)
{
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

Polynomial Polynomial::constant(const Nat& c)
{
  Polynomial p;
  p.addTerm({}, c);
  return p;
}

Polynomial Polynomial::variable(const std::string& name)
{
  Polynomial p;
  p.addTerm({name}, 1);
  return p;
}

void Polynomial::addTerm(const Monomial& m, const Nat& c)
{
  if (c == 0)
  {
    return;
  }
  auto it = d_terms.find(m);
  if (it == d_terms.end())
  {
    d_terms.emplace(m, c);
  }
  else
  {
    it->second += c;
  }
}

std::set<std::string> Polynomial::vars() const
{
  std::set<std::string> v;
  for (const auto& [m, c] : d_terms)
  {
    v.insert(m.begin(), m.end());
  }
  return v;
}

bool Polynomial::isConstant() const
{
  return d_terms.empty() || (d_terms.size() == 1 && d_terms.begin()->first.empty());
}

Nat Polynomial::constantValue() const
{
  if (!isConstant())
  {
    throw Error(ErrorKind::UnboundParamVar, "polynomial " + str() + " is not closed");
  }
  return d_terms.empty() ? Nat(0) : d_terms.begin()->second;
}

size_t Polynomial::degree() const
{
  size_t d = 0;
  for (const auto& [m, c] : d_terms)
  {
    d = std::max(d, m.size());
  }
  return d;
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
  Polynomial r = *this;
  for (const auto& [m, c] : o.d_terms)
  {
    r.addTerm(m, c);
  }
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const
{
  Polynomial r;
  for (const auto& [m1, c1] : d_terms)
  {
    for (const auto& [m2, c2] : o.d_terms)
    {
      r.addTerm(mergeMonomials(m1, m2), c1 * c2);
    }
  }
  return r;
}

Polynomial Polynomial::substitute(const std::map<std::string, Polynomial>& s) const
{
  Polynomial r;
  for (const auto& [m, c] : d_terms)
  {
    Polynomial t = constant(c);
    for (const auto& x : m)
    {
      auto it = s.find(x);
      t = t * (it == s.end() ? variable(x) : it->second);
    }
    r = r + t;
  }
  return r;
}

Polynomial Polynomial::substitute(const ParamSubstitution& rho) const
{
  std::map<std::string, Polynomial> s;
  for (const auto& [v, n] : rho.bindings())
  {
    s.emplace(v, constant(n));
  }
  return substitute(s);
}

std::string Polynomial::str() const
{
  if (d_terms.empty())
  {
    return "0";
  }
  // Higher degree first, then lexicographic; constants last.
  std::vector<std::pair<Monomial, Nat>> ts(d_terms.begin(), d_terms.end());
  std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size())
    {
      return a.first.size() > b.first.size();
    }
    return a.first < b.first;
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : ts)
  {
    if (!first)
    {
      os << " + ";
    }
    first = false;
    std::vector<std::string> factors;
    if (c != 1 || m.empty())
    {
      factors.push_back(c.get_str());
    }
    for (size_t i = 0; i < m.size();)
    {
      size_t j = i;
      while (j < m.size() && m[j] == m[i])
      {
        ++j;
      }
      if (j - i == 1)
      {
        factors.push_back(m[i]);
      }
      else
      {
        factors.push_back(m[i] + "^" + std::to_string(j - i));
      }
      i = j;
    }
    for (size_t k = 0; k < factors.size(); ++k)
    {
      os << (k ? "*" : "") << factors[k];
    }
  }
  return os.str();
}

const Nat& ParamSubstitution::at(const std::string& v) const
{
  auto it = d_bind.find(v);
  if (it == d_bind.end())
  {
    throw Error(ErrorKind::UnboundParamVar, "no binding for parameter variable '" + v + "'");
  }
  return it->second;
}

std::string ParamSubstitution::str() const
{
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [v, n] : d_bind)
  {
    os << (first ? "" : ",") << v << "=" << n.get_str();
    first = false;
  }
  os << "}";
  return os.str();
}

ParamSubstitution rhoN(unsigned long i)
{
  ParamSubstitution r;
  r.set("n", Nat(i));
  return r;
}

Nat poly_eval(const Polynomial& p, const ParamSubstitution& rho)
{
  Nat s = 0;
  for (const auto& [m, c] : p.terms())
  {
    Nat v = c;
    for (const auto& x : m)
    {
      v *= rho.at(x);
    }
    s += v;
  }
  return s;
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q)
{
  return p + q;
}

Polynomial poly_mul(const Polynomial& p, const Polynomial& q)
{
  return p * q;
}

Polynomial poly_scale(const Nat& k, const Polynomial& p)
{
  return Polynomial::constant(k) * p;
}

LeqResult poly_leq_decide(const Polynomial& p, const Polynomial& q)
{
  SignedTerms diff;
  for (const auto& [m, c] : q.terms())
  {
    diff[m] += c;
  }
  for (const auto& [m, c] : p.terms())
  {
    diff[m] -= c;
  }
  bool allNonNeg = true;
  for (auto it = diff.begin(); it != diff.end();)
  {
    if (it->second == 0)
    {
      it = diff.erase(it);
      continue;
    }
    if (it->second < 0)
    {
      allNonNeg = false;
    }
    ++it;
  }
  if (allNonNeg)
  {
    return {LeqVerdict::Holds, {}};
  }
  std::set<std::string> vs = p.vars();
  for (const auto& v : q.vars())
  {
    vs.insert(v);
  }
  std::vector<std::string> vars(vs.begin(), vs.end());
  auto witness = [&](const std::map<std::string, mpz_class>& at) {
    ParamSubstitution w;
    for (const auto& [v, n] : at)
    {
      w.set(v, n);
    }
    return LeqResult{LeqVerdict::Refuted, w};
  };

  if (vars.size() <= 1)
  {
    // diff is r(n) = sum a_k n^k with integer coefficients. Beyond the Cauchy
    // bound B = 1 + max|a_k|/|a_d| the sign of r is the sign of a_d.
    std::string v = vars.empty() ? "n" : vars[0];
    std::map<size_t, mpz_class> coef;
    for (const auto& [m, c] : diff)
    {
      coef[m.size()] += c;
    }
    size_t d = coef.rbegin()->first;
    mpz_class lead = coef.rbegin()->second;
    mpz_class maxAbs = 0;
    for (const auto& [k, c] : coef)
    {
      if (k != d)
      {
        maxAbs = std::max(maxAbs, mpz_class(abs(c)));
      }
    }
    mpz_class bound = 1 + maxAbs / abs(lead) + 1;
    if (lead < 0)
    {
      std::map<std::string, mpz_class> at{{v, bound}};
      if (evalSigned(diff, at) < 0)
      {
        return witness(at);
      }
    }
    if (bound <= 1000000)
    {
      for (mpz_class n = 0; n <= bound; ++n)
      {
        std::map<std::string, mpz_class> at{{v, n}};
        if (evalSigned(diff, at) < 0)
        {
          return witness(at);
        }
      }
      return {LeqVerdict::Holds, {}};
    }
  }

  // Bounded witness search in the box 0..d+2.
  size_t d = std::max(p.degree(), q.degree());
  unsigned long top = d + 2;
  std::vector<unsigned long> idx(vars.size(), 0);
  while (true)
  {
    std::map<std::string, mpz_class> at;
    for (size_t k = 0; k < vars.size(); ++k)
    {
      at[vars[k]] = idx[k];
    }
    if (evalSigned(diff, at) < 0)
    {
      return witness(at);
    }
    size_t k = 0;
    while (k < idx.size() && idx[k] == top)
    {
      idx[k] = 0;
      ++k;
    }
    if (k == idx.size())
    {
      break;
    }
    ++idx[k];
  }
  return {LeqVerdict::Indeterminate, {}};
}

bool poly_leq(const Polynomial& p, const Polynomial& q)
{
  return poly_leq_decide(p, q).verdict == LeqVerdict::Holds;
}

}  // namespace pidibll
