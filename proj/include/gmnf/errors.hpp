#ifndef GMNF_ERRORS_HPP
#define GMNF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gmnf {

// Caller passed arguments that violate an operation's contract.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An enumeration or construction exceeded its configured size cap.
struct SizeCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance generation could not satisfy the requested properties.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gmnf

#endif
