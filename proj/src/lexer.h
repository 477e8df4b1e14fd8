#ifndef PIDIBLL_SRC_LEXER_H
#define PIDIBLL_SRC_LEXER_H

#include <string>
#include <vector>

namespace pidibll {

enum class Tok
{
  Ident,
  Number,
  Bits,  // #0101 or 0b0101; text holds the bits only
  Sym,
  End
};

struct Token
{
  Tok kind;
  std::string text;
  int line;
  int col;
};

/** Throws ParseError on an unexpected character. */
std::vector<Token> lex(const std::string& src);

}  // namespace pidibll

#endif
