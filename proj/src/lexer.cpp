#include "lexer.h"

#include <cctype>

#include "pidibll/parser.h"

namespace pidibll {

namespace {

bool identStart(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool identChar(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> lex(const std::string& src)
{
  std::vector<Token> out;
  size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < src.size(); ++j, ++i)
    {
      if (src[i] == '\n')
      {
        ++line;
        col = 1;
      }
      else
      {
        ++col;
      }
    }
  };

  while (i < src.size())
  {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
    {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/')
    {
      while (i < src.size() && src[i] != '\n')
      {
        advance(1);
      }
      continue;
    }
    int l0 = line;
    int c0 = col;
    if (identStart(c))
    {
      size_t j = i;
      while (j < src.size() && identChar(src[j]))
      {
        ++j;
      }
      out.push_back({Tok::Ident, src.substr(i, j - i), l0, c0});
      advance(j - i);
      continue;
    }
    if (c == '#')
    {
      size_t j = i + 1;
      while (j < src.size() && (src[j] == '0' || src[j] == '1'))
      {
        ++j;
      }
      if (j < src.size() && identChar(src[j]))
      {
        throw ParseError(line, col + static_cast<int>(j - i), "malformed bitstring literal",
                         "0 or 1");
      }
      out.push_back({Tok::Bits, src.substr(i + 1, j - i - 1), l0, c0});
      advance(j - i);
      continue;
    }
    if (c == '0' && i + 2 < src.size() && src[i + 1] == 'b' &&
        (src[i + 2] == '0' || src[i + 2] == '1'))
    {
      size_t j = i + 2;
      while (j < src.size() && (src[j] == '0' || src[j] == '1'))
      {
        ++j;
      }
      if (j < src.size() && identChar(src[j]))
      {
        throw ParseError(line, col + static_cast<int>(j - i), "malformed bitstring literal",
                         "0 or 1");
      }
      out.push_back({Tok::Bits, src.substr(i + 2, j - i - 2), l0, c0});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
    {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
      {
        ++j;
      }
      if (j < src.size() && identStart(src[j]))
      {
        throw ParseError(line, col + static_cast<int>(j - i), "identifier glued to a number");
      }
      out.push_back({Tok::Number, src.substr(i, j - i), l0, c0});
      advance(j - i);
      continue;
    }
    static const char* twoChar[] = {"::", "=>", "-o"};
    bool matched = false;
    for (const char* t : twoChar)
    {
      if (src.compare(i, 2, t) == 0)
      {
        if (t[0] == '-' && i + 2 < src.size() && identChar(src[i + 2]))
        {
          break;
        }
        out.push_back({Tok::Sym, t, l0, c0});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched)
    {
      continue;
    }
    static const std::string single = "()[]{},;:.|=+&*^!/";
    if (single.find(c) != std::string::npos)
    {
      out.push_back({Tok::Sym, std::string(1, c), l0, c0});
      advance(1);
      continue;
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c))
                            ? std::string(1, c)
                            : "byte " + std::to_string(static_cast<unsigned char>(c));
    throw ParseError(line, col, "unexpected character '" + shown + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

}  // namespace pidibll
