#pragma once

#include <stdexcept>
#include <string>

namespace picrr {

/// Raised for malformed input, violated preconditions and I/O failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace picrr
