#pragma once

#include <stdexcept>
#include <string>

namespace fpcal {

/// Input violates a documented precondition or value range.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A state the algorithms should never reach on valid input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace fpcal
