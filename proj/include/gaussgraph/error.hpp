#pragma once

#include <stdexcept>
#include <string>

namespace gaussgraph {

enum class ErrorCode {
  ConfigError,
  IOError,
  OutOfChart,
  NonAdmissible,
  NonAdmissibleInit,
  NoConvergence,
  SingularLinearSystem,
  StepsizeUnderflow,
  DegenerateMetric,
  BarrierViolation,
  OutOfRange,
  TransversalityFailure,
  DomainMismatch,
  SingularShapeOperator,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

// Process exit status used by the command line tool for each error class.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gaussgraph
