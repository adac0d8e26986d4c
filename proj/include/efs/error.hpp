#pragma once

#include <stdexcept>
#include <string>

namespace efs {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value-oracle query outside the instance's good universe, or a
// marginal query for a good already in the set.
struct InvalidQueryError : Error {
    using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
struct ContractError : Error {
    using Error::Error;
};

// A marginal outside {0,1} was observed while running the solver.
// Carries enough context to reproduce the offending query.
struct NonDichotomousError : Error {
    int agent;
    std::string set_repr;
    int good;
    NonDichotomousError(int agent_, std::string set_repr_, int good_, const std::string& msg)
        : Error(msg), agent(agent_), set_repr(std::move(set_repr_)), good(good_) {}
};

// Malformed instance/solution/config documents.
struct ParseError : Error {
    using Error::Error;
};

// A brute-force referee was asked to run beyond its size guard.
struct SizeGuardError : Error {
    using Error::Error;
};

} // namespace efs
