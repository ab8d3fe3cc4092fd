#pragma once

#include <stdexcept>
#include <string>

namespace unitmark {

/// Invalid model parameters, malformed configuration, bad CLI usage.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// File system / serialization failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown: non-PSD covariance, rejection-cap exhaustion, ...
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator whose criterion does not identify beta (e.g. all lagged
/// regressors are zero).
class UnidentifiedError : public std::runtime_error {
public:
    explicit UnidentifiedError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace unitmark
