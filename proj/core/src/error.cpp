#include "scadsched/error.hpp"

namespace scad {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorKind::CyclicProgram: return "CyclicProgram";
    case ErrorKind::EmptyProgram: return "EmptyProgram";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidObjective: return "InvalidObjective";
    case ErrorKind::CyclicPrecedence: return "CyclicPrecedence";
    case ErrorKind::MalformedProgram: return "MalformedProgram";
    case ErrorKind::InconsistentModel: return "InconsistentModel";
    case ErrorKind::MissingAssignment: return "MissingAssignment";
    case ErrorKind::InfeasibleParams: return "InfeasibleParams";
    case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace scad
