#ifndef PIDIBLL_ERROR_H
#define PIDIBLL_ERROR_H

#include <stdexcept>
#include <string>

namespace pidibll {

enum class ErrorKind
{
  UnboundParamVar,
  InvalidWeights,
  DuplicateSymbol,
  UnknownSymbol,
  ArityMismatch,
  CarrierViolation,
  ParseError,
  UnknownVariable,
  StringTooLong,
  SignatureMismatch,
  VarsOutsideV,
  TypeMismatchAtName,
  NoRuleApplies,
  LinearityViolation,
  MultiplicityExceeded,
  GroundTypeMismatch,
  OpenTerm,
  LabelNotUniformlyEnabled,
  StepCeilingExceeded,
  BoundViolated,
  ConfluenceViolation,
  NonBooleanResidual,
  IllTypedAdversary,
  InvalidContext,
};

const char* errorKindName(ErrorKind k);

class Error : public std::runtime_error
{
 public:
  Error(ErrorKind kind, const std::string& msg);
  ErrorKind kind() const { return d_kind; }

 private:
  ErrorKind d_kind;
};

}  // namespace pidibll

#endif
