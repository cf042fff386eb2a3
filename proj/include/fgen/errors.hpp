/**
 * errors.hpp — Exception taxonomy shared by the library and the CLI.
 *
 * ValidationError: malformed input data (files, tensors, distributions).
 * NumericalError: a computation that cannot produce a usable value
 * (diverged training, all bound candidates infinite).
 *
 * Domain violations of pure math functions use std::domain_error /
 * std::invalid_argument directly.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace fgen {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fgen
