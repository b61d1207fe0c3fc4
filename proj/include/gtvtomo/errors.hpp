#pragma once

#include <stdexcept>
#include <string>

namespace gtvtomo {

// Invalid arguments are reported with std::invalid_argument; the two classes
// below cover the remaining failure categories the CLI maps to exit codes.

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver's iterate blows up.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gtvtomo
