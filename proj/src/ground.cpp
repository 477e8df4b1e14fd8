#include "pidibll/kernel.h"

namespace pidibll {

std::set<std::string> GroundType::vars() const
{
  if (kind == Kind::Bool)
  {
    return {};
  }
  return len.vars();
}

GroundType GroundType::substitute(const std::map<std::string, Polynomial>& s) const
{
  if (kind == Kind::Bool)
  {
    return *this;
  }
  return str(len.substitute(s));
}

std::string GroundType::str() const
{
  if (kind == Kind::Bool)
  {
    return "Bool";
  }
  return "Str[" + len.str() + "]";
}

std::string GroundValue::str() const
{
  if (isBool)
  {
    return b ? "true" : "false";
  }
  return "#" + bits;
}

std::vector<GroundValue> Carrier::enumerate() const
{
  std::vector<GroundValue> out;
  if (isBool)
  {
    out.push_back(GroundValue::boolean(false));
    out.push_back(GroundValue::boolean(true));
    return out;
  }
  if (length > 24)
  {
    throw Error(ErrorKind::CarrierViolation,
                "carrier of length " + std::to_string(length) + " is too large to enumerate");
  }
  unsigned long count = 1ul << length;
  for (unsigned long k = 0; k < count; ++k)
  {
    std::string s(length, '0');
    for (unsigned long j = 0; j < length; ++j)
    {
      if (k & (1ul << (length - 1 - j)))
      {
        s[j] = '1';
      }
    }
    out.push_back(GroundValue::bitstring(s));
  }
  return out;
}

bool Carrier::contains(const GroundValue& v) const
{
  if (isBool)
  {
    return v.isBool;
  }
  return !v.isBool && v.bits.size() <= length;
}

Nat Carrier::size() const
{
  if (isBool)
  {
    return 2;
  }
  Nat s = 1;
  mpz_mul_2exp(s.get_mpz_t(), s.get_mpz_t(), length);
  return s;
}

Carrier ground_type_carrier(const GroundType& b, const ParamSubstitution& rho)
{
  Carrier c;
  if (b.isBool())
  {
    return c;
  }
  c.isBool = false;
  Nat l = poly_eval(b.len, rho);
  c.length = l.get_ui();
  return c;
}

std::string padLeft(const std::string& bits, size_t n)
{
  if (bits.size() >= n)
  {
    return bits;
  }
  return std::string(n - bits.size(), '0') + bits;
}

}  // namespace pidibll
