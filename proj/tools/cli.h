#ifndef PIDIBLL_TOOLS_CLI_H
#define PIDIBLL_TOOLS_CLI_H

#include <ostream>
#include <string>
#include <vector>

#include "pidibll/kernel.h"

namespace pidibll::cli {

enum Exit
{
  kOk = 0,
  kType = 1,
  kParse = 2,
  kResource = 3,
  kRefuted = 4
};

/** `n=1..4`, `n=2` or `n=1,3`; an empty spec gives {n=1}. */
std::vector<ParamSubstitution> parse_grid(const std::string& spec);

/** Parses `a/b` or a decimal integer; throws std::invalid_argument. */
Rational parse_rational(const std::string& s);

/** Entry point shared by the pdb binary and the tests. */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pidibll::cli

#endif
