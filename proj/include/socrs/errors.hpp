#pragma once

#include <stdexcept>
#include <string>

namespace socrs {

// Malformed input: bad ids, bad parameters, unparsable instance files.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An exhaustive routine was asked to go past its budget.
struct TooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mathematical precondition failed at run time (zero-mass conditioning, singular systems, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A witness produced a conditional above its activation probability.
struct CapViolationError : std::runtime_error {
    CapViolationError(int element, std::string context, double conditional, double x)
        : std::runtime_error("witness violates stationary caps: element " + std::to_string(element) +
                             " given " + context + ": conditional " + std::to_string(conditional) +
                             " > x " + std::to_string(x)),
          element(element), conditional(conditional), x(x) {}
    int element;
    double conditional;
    double x;
};

}  // namespace socrs
