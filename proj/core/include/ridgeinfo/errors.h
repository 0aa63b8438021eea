#ifndef RIDGEINFO_ERRORS_H
#define RIDGEINFO_ERRORS_H

#include <stdexcept>

namespace ridgeinfo {

/// Malformed or inconsistent user input (shot files, flags, key lists).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric routine could not produce a finite or feasible result.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ridgeinfo

#endif
