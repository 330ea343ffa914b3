#pragma once

#include <stdexcept>
#include <string>

namespace mtsdvgan {

/// Bad input or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A training column whose maximum is zero or non-finite.
class DegenerateColumn : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Series shorter than the window length.
class EmptyWindowSet : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Non-finite intermediate or loss during computation. Exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mtsdvgan
