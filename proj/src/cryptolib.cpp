#include "pidibll/cryptolib.h"

namespace pidibll {

namespace {

GroundType strN()
{
  return GroundType::str(Polynomial::variable("n"));
}

void needSignature(const Registry& reg, const std::string& f, size_t arity, const char* what)
{
  const FunctionSymbol& s = reg.lookup(f);
  bool ok = s.args.size() == arity && s.result == strN();
  for (const auto& a : s.args)
  {
    ok = ok && a == strN();
  }
  if (!ok)
  {
    throw Error(ErrorKind::SignatureMismatch,
                f + " cannot serve as " + what + ": it must map " + std::to_string(arity) +
                    " strings of length n to one");
  }
}

// The two branches differ only in the message they encrypt.
std::string branch(const std::string& enc, const std::string& key, const std::string& m)
{
  return "let c = " + enc + "(" + key + ", " + m +
         ") in send adv (new d). (out d c | in adv (g). let r = eq(g, b) in out exp r)";
}

const char* kAdversary =
    "let m0 = zeros() in let m1 = ones() in "
    "send adv (new a0). (out a0 m0 | send adv (new a1). (out a1 m1 | "
    "recv adv (e). in e (c). ";

}  // namespace

EncryptionScheme prg_scheme()
{
  return EncryptionScheme{"prg", "gen", "prg_enc", std::nullopt};
}

EncryptionScheme otp_scheme()
{
  return EncryptionScheme{"otp", "rand", "xor", std::string("xor")};
}

void check_scheme(const EncryptionScheme& s, const Registry& reg)
{
  needSignature(reg, s.gen, 0, "key generation");
  needSignature(reg, s.enc, 2, "encryption");
  if (s.dec)
  {
    needSignature(reg, *s.dec, 2, "decryption");
  }
}

SessionType adversary_interface()
{
  return parse_type("Str[n] * Str[n] * (Str[n] -o Bool)");
}

ExperimentBundle build_privk(const EncryptionScheme& scheme, const Registry& reg)
{
  check_scheme(scheme, reg);
  std::string src = "recv adv (a0). in a0 (m0). recv adv (a1). in a1 (m1). let k = " +
                    scheme.gen + "() in let b = flipcoin() in if b then " +
                    branch(scheme.enc, "k", "m1") + " else " + branch(scheme.enc, "k", "m0");
  return ExperimentBundle{parse_process(src), adversary_interface()};
}

Process build_privkeyk_otp()
{
  return parse_process(
      "recv adv (a0). in a0 (m0). recv adv (a1). in a1 (m1). let b = flipcoin() in "
      "in out (k). if b then " +
      branch("xor", "k", "m1") + " else " + branch("xor", "k", "m0"));
}

Process build_fairflip(const std::string& channel)
{
  return proc::let("b", Term::app("flipcoin", Polynomial::variable("n"), {}),
                   proc::outVal(channel, Value::var("b")));
}

Process build_outr()
{
  return parse_process("let k = rand() in out out k");
}

Process build_outpr(const std::string& g, const Registry& reg)
{
  needSignature(reg, g, 1, "a generator");
  return parse_process("let s = rand() in let k = " + g + "(s) in out out k");
}

Process honest_adversary()
{
  return parse_process(std::string(kAdversary) + "let g = flipcoin() in out adv g))");
}

Process comparing_adversary()
{
  return parse_process(std::string(kAdversary) + "let h = eq(c, m1) in out adv h))");
}

Process compose(const std::string& ch, const Process& left, const Process& right)
{
  return proc::res(ch, proc::par(left, right));
}

Process build_distinguisher(const Process& adv, const Registry& reg)
{
  try
  {
    check_process({"n"}, {}, {}, {}, adv, "adv", adversary_interface(), reg);
  }
  catch (const Error& e)
  {
    throw Error(ErrorKind::IllTypedAdversary,
                std::string("adversary does not offer the interface: ") + e.what());
  }
  return compose("adv", build_privkeyk_otp(), adv);
}

}  // namespace pidibll
