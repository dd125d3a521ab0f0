#pragma once

#include <stdexcept>
#include <string>

namespace backdisp {

// Bad or inconsistent run configuration. Maps to process exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failure while persisting results. Maps to process exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A finite-difference pair failed its internal consistency test; the step
// is too large (or the function too rough) for the requested derivative.
struct step_size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace backdisp
