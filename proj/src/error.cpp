#include "gaussgraph/error.hpp"

namespace gaussgraph {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::NonAdmissible: return "NonAdmissible";
    case ErrorCode::NonAdmissibleInit: return "NonAdmissibleInit";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularLinearSystem: return "SingularLinearSystem";
    case ErrorCode::StepsizeUnderflow: return "StepsizeUnderflow";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::BarrierViolation: return "BarrierViolation";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TransversalityFailure: return "TransversalityFailure";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::SingularShapeOperator: return "SingularShapeOperator";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return 2;
    case ErrorCode::IOError: return 3;
    case ErrorCode::OutOfChart: return 4;
    case ErrorCode::NonAdmissible:
    case ErrorCode::NonAdmissibleInit: return 5;
    case ErrorCode::NoConvergence: return 6;
    case ErrorCode::SingularLinearSystem: return 7;
    case ErrorCode::StepsizeUnderflow: return 8;
    case ErrorCode::DegenerateMetric: return 9;
    case ErrorCode::BarrierViolation: return 10;
    case ErrorCode::OutOfRange: return 11;
    case ErrorCode::TransversalityFailure: return 12;
    case ErrorCode::DomainMismatch: return 13;
    case ErrorCode::SingularShapeOperator: return 14;
    case ErrorCode::InvalidArgument: return 2;
  }
  return 15;
}

}  // namespace gaussgraph
