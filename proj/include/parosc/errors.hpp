#pragma once

#include <stdexcept>
#include <string>

namespace parosc {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Precondition violated by caller-supplied values (bad parameter domain).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A numerical procedure failed to converge or lost accuracy; carries a diagnostic.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// An internal invariant that should hold by construction was violated.
struct InvariantViolation : Error {
    explicit InvariantViolation(const std::string& msg) : Error(msg) {}
};

// A polynomial required to be strictly positive on the real line has a real root.
struct NodelessnessError : Error {
    explicit NodelessnessError(const std::string& msg) : Error(msg) {}
};

// Grid too small for the requested state (tail mass above tolerance) or
// boundary reflection detected during propagation.
struct GridError : Error {
    explicit GridError(const std::string& msg) : Error(msg) {}
};

// Mismatched object pairing, e.g. operator and field stamped at different times.
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

}  // namespace parosc
