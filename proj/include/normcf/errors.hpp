#pragma once

#include <stdexcept>
#include <string>

namespace normcf {

/// Comparison or membership test could not be decided at the precision cap.
struct AmbiguousError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A certified enclosure of the requested width cannot be produced under the cap.
struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionViolated : std::logic_error {
    using std::logic_error::logic_error;
};

struct RationalAlphaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrefixExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoSolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpecParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace normcf
