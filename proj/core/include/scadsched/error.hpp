#pragma once

#include <stdexcept>
#include <string>

namespace scad {

/// Every recoverable failure in the library is thrown as an Error carrying one
/// of these kinds, so callers (and tests) can dispatch on the kind instead of
/// parsing message text.
enum class ErrorKind {
    SyntaxError,          ///< malformed input text (block facts, JSON, answer sets)
    DuplicateDefinition,  ///< a variable defined by more than one operand fact
    CyclicProgram,        ///< the dataflow graph of the block is cyclic
    EmptyProgram,         ///< no operand facts at all
    UnknownVariable,      ///< a name that does not occur in the block
    TooLarge,             ///< instance exceeds a brute-force guard
    InvalidObjective,     ///< objective/flag combination that makes no sense
    CyclicPrecedence,     ///< move-precedence graph has a cycle (schedule not executable)
    MalformedProgram,     ///< move program inconsistent with the block or config
    InconsistentModel,    ///< answer set encodes no total per-PU order
    MissingAssignment,    ///< answer set lacks an asgn atom for some variable
    InfeasibleParams,     ///< generator parameters admit no block
    Internal,             ///< invariant breach; indicates a bug, not bad input
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

} // namespace scad
