#pragma once

#include <stdexcept>
#include <string>

namespace persist {

/// Invalid hyperparameters, architectures or flag combinations.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Tensor shapes that do not chain, or inputs that do not fit a layer.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed dataset / metrics files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A non-finite loss, gradient or parameter appeared during training.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace persist
