#pragma once
//
// Error taxonomy shared by all modules.  The CLI maps these onto exit codes:
//   invalid_argument / domain_error / validation_error -> 2
//   numeric_failure  -> 3
//   resource_limit   -> 4
//   format_error     -> 5
//
#include <stdexcept>
#include <string>

namespace lab {

struct invalid_argument : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (pole, branch cut,
// validity window of an asymptotic, ...).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally well-formed input violating a semantic invariant
// (Hecke relations, dataset completeness, ...).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An algorithm could not reach its accuracy contract (series did not
// converge, quadrature budget exhausted, cancellation detected, ...).
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Request exceeds a configured budget (table size, Hecke length, ceiling on t).
struct resource_limit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed external data (cache files, dataset files).
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lab
