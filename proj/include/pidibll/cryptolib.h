#ifndef PIDIBLL_CRYPTOLIB_H
#define PIDIBLL_CRYPTOLIB_H

#include <optional>
#include <string>

#include "pidibll/equiv.h"

namespace pidibll {

struct EncryptionScheme
{
  std::string name;
  /** () -> Str(n) */
  std::string gen;
  /** (key, message) -> ciphertext, all Str(n) */
  std::string enc;
  std::optional<std::string> dec;
};

/** gen and prg_enc: xor with g_prg of the key. */
EncryptionScheme prg_scheme();
/** rand and xor. */
EncryptionScheme otp_scheme();

/** Throws UnknownSymbol or SignatureMismatch. */
void check_scheme(const EncryptionScheme& s, const Registry& reg);

struct ExperimentBundle
{
  Process experiment;
  /** Str[n] * Str[n] * (Str[n] -o Bool) */
  SessionType interface;
  std::string adv_channel = "adv";
  std::string result_channel = "exp";
};

SessionType adversary_interface();

/**
 * The eavesdropper experiment. The coin picks the message to encrypt,
 * true meaning the second one.
 */
ExperimentBundle build_privk(const EncryptionScheme& scheme, const Registry& reg);
/** Like the one-time-pad experiment, but the key is read from `out`. */
Process build_privkeyk_otp();
Process build_fairflip(const std::string& channel = "exp");
Process build_outr();
/** Throws UnknownSymbol unless g is registered at Str(n) -> Str(n). */
Process build_outpr(const std::string& g, const Registry& reg);
/** Sends all-zeros and all-ones and guesses with a coin. */
Process honest_adversary();
/** Guesses true exactly when the ciphertext equals the all-ones message. */
Process comparing_adversary();
/** new adv. (PRIVKEYK | adv); throws IllTypedAdversary. */
Process build_distinguisher(const Process& adv, const Registry& reg);

/** `new ch. (left | right)` */
Process compose(const std::string& ch, const Process& left, const Process& right);

}  // namespace pidibll

#endif
