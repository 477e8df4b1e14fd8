#ifndef PIDIBLL_PARSER_H
#define PIDIBLL_PARSER_H

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pidibll/ast.h"

namespace pidibll {

class ParseError : public Error
{
 public:
  ParseError(int line, int col, const std::string& msg, const std::string& expected = "");
  int line() const { return d_line; }
  int column() const { return d_col; }
  const std::string& expected() const { return d_expected; }

 private:
  int d_line;
  int d_col;
  std::string d_expected;
};

struct ExpEntry
{
  std::string name;
  Polynomial mult;
  SessionType type;
};

/** Channel sections of a judgment: lin{..} ; exp{..} ; tm{..}. */
struct Sections
{
  std::vector<std::pair<std::string, SessionType>> lin;
  std::vector<ExpEntry> exp;
  std::vector<std::pair<std::string, GroundType>> tm;
};

/** Judgment a context expects of the process placed in its hole. */
struct HoleSpec
{
  Sections env;
  std::string chan;
  SessionType type;
};

struct ProcDecl
{
  std::string name;
  Sections env;
  std::string chan;
  SessionType type;
  Process body;
  /** Present for `ctx` declarations. */
  std::optional<HoleSpec> hole;
};

struct SourceUnit
{
  std::vector<std::string> params;
  std::vector<std::pair<std::string, SessionType>> aliases;
  std::vector<ProcDecl> decls;

  const ProcDecl* find(const std::string& name) const;
  /** Throws Error(UnknownSymbol) if missing. */
  const ProcDecl& get(const std::string& name) const;
};

SourceUnit parse_unit(const std::string& src);
std::string pretty_print(const SourceUnit& u);

/** Parse a single process; names of declarations in `scope` may be inlined. */
Process parse_process(const std::string& src, const SourceUnit* scope = nullptr);
SessionType parse_type(const std::string& src);

std::string print_sections(const Sections& s);
bool unit_equal(const SourceUnit& a, const SourceUnit& b);

}  // namespace pidibll

#endif
