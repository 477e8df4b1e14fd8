#include "pidibll/funsym.h"

namespace pidibll {

namespace {

GroundType strN()
{
  return GroundType::str(Polynomial::variable("n"));
}

Polynomial nPoly()
{
  return Polynomial::variable("n");
}

ValueDist uniformStrings(unsigned long len)
{
  Carrier c;
  c.isBool = false;
  c.length = len;
  std::vector<GroundValue> all = c.enumerate();
  Rational w(1, all.size());
  w.canonicalize();
  std::vector<std::pair<GroundValue, Rational>> ws;
  for (const auto& v : all)
  {
    ws.emplace_back(v, w);
  }
  return ValueDist::fromWeights(ws);
}

std::string xorBits(const std::string& a, const std::string& b)
{
  std::string r(a.size(), '0');
  for (size_t k = 0; k < a.size(); ++k)
  {
    r[k] = (a[k] != b[k]) ? '1' : '0';
  }
  return r;
}

}  // namespace

void Registry::register_symbol(const FunctionSymbol& sym)
{
  if (d_syms.count(sym.name) || d_overloads.count(sym.name))
  {
    throw Error(ErrorKind::DuplicateSymbol, "symbol '" + sym.name + "' already registered");
  }
  d_syms.emplace(sym.name, sym);
}

void Registry::register_overload(const std::string& surface,
                                 const std::vector<std::string>& members)
{
  if (d_syms.count(surface) || d_overloads.count(surface))
  {
    throw Error(ErrorKind::DuplicateSymbol, "symbol '" + surface + "' already registered");
  }
  for (const auto& m : members)
  {
    lookup(m);
  }
  d_overloads.emplace(surface, members);
}

bool Registry::has(const std::string& name) const
{
  return d_syms.count(name) || d_overloads.count(name);
}

const FunctionSymbol& Registry::lookup(const std::string& name) const
{
  auto it = d_syms.find(name);
  if (it == d_syms.end())
  {
    throw Error(ErrorKind::UnknownSymbol, "unknown function symbol '" + name + "'");
  }
  return it->second;
}

bool Registry::isOverload(const std::string& name) const
{
  return d_overloads.count(name) > 0;
}

const std::vector<std::string>& Registry::overloadMembers(const std::string& name) const
{
  return d_overloads.at(name);
}

const FunctionSymbol& Registry::resolve(const std::string& name,
                                        const std::vector<bool>& argIsBool) const
{
  auto ov = d_overloads.find(name);
  if (ov == d_overloads.end())
  {
    return lookup(name);
  }
  for (const auto& m : ov->second)
  {
    const FunctionSymbol& f = lookup(m);
    if (f.args.size() != argIsBool.size())
    {
      continue;
    }
    bool ok = true;
    for (size_t k = 0; k < f.args.size(); ++k)
    {
      ok = ok && (f.args[k].isBool() == argIsBool[k]);
    }
    if (ok)
    {
      return f;
    }
  }
  throw Error(ErrorKind::SignatureMismatch,
              "no overload of '" + name + "' matches the argument types");
}

ValueDist Registry::apply(const std::string& name, unsigned long i,
                          const std::vector<GroundValue>& args) const
{
  std::vector<bool> kinds;
  for (const auto& a : args)
  {
    kinds.push_back(a.isBool);
  }
  if (!has(name))
  {
    throw Error(ErrorKind::UnknownSymbol, "unknown function symbol '" + name + "'");
  }
  const FunctionSymbol* f = nullptr;
  if (isOverload(name))
  {
    try
    {
      f = &resolve(name, kinds);
    }
    catch (const Error&)
    {
      const FunctionSymbol& first = lookup(overloadMembers(name).front());
      if (first.args.size() != args.size())
      {
        throw Error(ErrorKind::ArityMismatch, name + " applied to " +
                                                  std::to_string(args.size()) + " arguments");
      }
      throw Error(ErrorKind::CarrierViolation, "arguments of " + name + " outside carriers");
    }
  }
  else
  {
    f = &lookup(name);
  }
  if (f->args.size() != args.size())
  {
    throw Error(ErrorKind::ArityMismatch, f->name + " expects " + std::to_string(f->args.size()) +
                                              " arguments, got " + std::to_string(args.size()));
  }
  ParamSubstitution rho = rhoN(i);
  std::vector<GroundValue> padded;
  for (size_t k = 0; k < args.size(); ++k)
  {
    Carrier c = ground_type_carrier(f->args[k], rho);
    if (!c.contains(args[k]))
    {
      throw Error(ErrorKind::CarrierViolation, "argument " + std::to_string(k + 1) + " of " +
                                                   f->name + " is " + args[k].str() +
                                                   ", outside " + f->args[k].str() + " at n=" +
                                                   std::to_string(i));
    }
    GroundValue v = args[k];
    if (!v.isBool)
    {
      v.bits = padLeft(v.bits, c.length);
    }
    padded.push_back(v);
  }
  ValueDist d = f->semantics(i, padded);
  Carrier out = ground_type_carrier(f->result, rho);
  for (const auto& [v, r] : d.entries())
  {
    if (!out.contains(v) || (!v.isBool && v.bits.size() != out.length))
    {
      throw Error(ErrorKind::CarrierViolation,
                  f->name + " produced " + v.str() + " outside " + f->result.str());
    }
  }
  return d;
}

std::vector<std::string> Registry::names() const
{
  std::vector<std::string> n;
  for (const auto& [k, v] : d_syms)
  {
    n.push_back(k);
  }
  for (const auto& [k, v] : d_overloads)
  {
    n.push_back(k);
  }
  return n;
}

PrgMap identityPrg()
{
  return [](unsigned long, const std::string& s) { return s; };
}

PrgMap zeroPrg()
{
  return [](unsigned long, const std::string& s) { return std::string(s.size(), '0'); };
}

Registry builtin_registry(PrgMap prg)
{
  Registry r;
  Polynomial one = Polynomial::constant(1);
  Polynomial n = nPoly();

  r.register_symbol({"flipcoin", {}, GroundType::boolean(),
                     [](unsigned long, const std::vector<GroundValue>&) {
                       return ValueDist::fromWeights({{GroundValue::boolean(true), Rational(1, 2)},
                                                      {GroundValue::boolean(false), Rational(1, 2)}});
                     },
                     one});
  r.register_symbol({"gen", {}, strN(),
                     [](unsigned long i, const std::vector<GroundValue>&) { return uniformStrings(i); },
                     n});
  r.register_symbol({"rand", {}, strN(),
                     [](unsigned long i, const std::vector<GroundValue>&) { return uniformStrings(i); },
                     n});
  r.register_symbol({"eqb", {GroundType::boolean(), GroundType::boolean()}, GroundType::boolean(),
                     [](unsigned long, const std::vector<GroundValue>& a) {
                       return ValueDist::pure(GroundValue::boolean(a[0].b == a[1].b));
                     },
                     n});
  r.register_symbol({"eqs", {strN(), strN()}, GroundType::boolean(),
                     [](unsigned long, const std::vector<GroundValue>& a) {
                       return ValueDist::pure(GroundValue::boolean(a[0].bits == a[1].bits));
                     },
                     n});
  r.register_overload("eq", {"eqb", "eqs"});
  auto xorSem = [](unsigned long, const std::vector<GroundValue>& a) {
    return ValueDist::pure(GroundValue::bitstring(xorBits(a[0].bits, a[1].bits)));
  };
  r.register_symbol({"xor", {strN(), strN()}, strN(), xorSem, n});
  r.register_symbol({"otp_enc", {strN(), strN()}, strN(), xorSem, n});
  r.register_symbol({"g_prg", {strN()}, strN(),
                     [prg](unsigned long i, const std::vector<GroundValue>& a) {
                       return ValueDist::pure(GroundValue::bitstring(prg(i, a[0].bits)));
                     },
                     n * n});
  // Enc of the generator-based scheme: xor(m, g(k)).
  r.register_symbol({"prg_enc", {strN(), strN()}, strN(),
                     [prg](unsigned long i, const std::vector<GroundValue>& a) {
                       return ValueDist::pure(
                           GroundValue::bitstring(xorBits(a[1].bits, prg(i, a[0].bits))));
                     },
                     n * n + n});
  r.register_symbol({"zeros", {}, strN(),
                     [](unsigned long i, const std::vector<GroundValue>&) {
                       return ValueDist::pure(GroundValue::bitstring(std::string(i, '0')));
                     },
                     n});
  r.register_symbol({"ones", {}, strN(),
                     [](unsigned long i, const std::vector<GroundValue>&) {
                       return ValueDist::pure(GroundValue::bitstring(std::string(i, '1')));
                     },
                     n});
  return r;
}

}  // namespace pidibll
