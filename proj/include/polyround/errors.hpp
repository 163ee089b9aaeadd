#ifndef POLYROUND_ERRORS_HPP
#define POLYROUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polyround {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite or structurally malformed input.
struct InvalidInputError : Error {
    using Error::Error;
};

/// A point handed to a polytope operation violates a constraint beyond tolerance.
struct InfeasiblePointError : Error {
    using Error::Error;
};

/// rand_move was called at a vertex of the polytope.
struct AtVertexError : Error {
    using Error::Error;
};

/// No nullspace direction admits strictly positive travel both ways.
struct DegenerateDirectionError : Error {
    using Error::Error;
};

/// round_step was called on a graph with no fractional edge.
struct NothingToRoundError : Error {
    using Error::Error;
};

/// No schedule/allocation exists for the instance (or none within the searched range).
struct InfeasibleInstanceError : Error {
    using Error::Error;
};

/// Simplex failed to terminate within the pivot budget.
struct SolverFailureError : Error {
    using Error::Error;
};

/// Exhaustive enumeration would exceed the configured budget.
struct BudgetExceededError : Error {
    using Error::Error;
};

/// An invariant the algorithm's analysis guarantees was observed to fail.
/// Carries a diagnostic dump of the state that produced it.
struct InternalInvariantError : Error {
    using Error::Error;
};

/// Malformed instance file.
struct ParseError : Error {
    using Error::Error;
};

} // namespace polyround

#endif
