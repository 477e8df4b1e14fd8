#ifndef PIDIBLL_SESSION_TYPE_H
#define PIDIBLL_SESSION_TYPE_H

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "pidibll/kernel.h"

namespace pidibll {

struct SessionTypeNode;
using SessionType = std::shared_ptr<const SessionTypeNode>;

enum class ST
{
  One,
  Lolli,
  Bang,
  Tensor,
  Plus,
  With,
  GBool,
  GStr,
  /** Placeholder used only while synthesizing types of restricted channels. */
  Unknown,
};

struct SessionTypeNode
{
  ST kind;
  SessionType a, b;
  Polynomial p;
};

namespace st {
SessionType one();
SessionType lolli(SessionType a, SessionType b);
SessionType bang(const Polynomial& p, SessionType a);
SessionType tensor(SessionType a, SessionType b);
SessionType plus(SessionType a, SessionType b);
SessionType with(SessionType a, SessionType b);
SessionType gbool();
SessionType gstr(const Polynomial& p);
SessionType unknown();
SessionType ground(const GroundType& g);
}  // namespace st

bool typeEq(const SessionType& a, const SessionType& b);
int typeCompare(const SessionType& a, const SessionType& b);
bool isGround(const SessionType& a);
GroundType toGround(const SessionType& a);
bool hasUnknown(const SessionType& a);
/** Merge two partial types; nullopt on a clash. */
std::optional<SessionType> unifyTypes(const SessionType& a, const SessionType& b);
std::set<std::string> typeVars(const SessionType& a);
SessionType substituteType(const SessionType& a, const std::map<std::string, Polynomial>& s);
SessionType substituteType(const SessionType& a, const ParamSubstitution& rho);
std::string typeStr(const SessionType& a);

}  // namespace pidibll

#endif
