#pragma once

#include <stdexcept>
#include <string>

namespace renewcast {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data or configuration violates a documented invariant.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A value lies outside the domain of a distribution or function.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Invalid model or experiment configuration.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Model fitting, sampling or training failed at run time.
/// The CLI maps these to exit code 2.
class ModelError : public Error {
public:
    using Error::Error;
};

class TrainingDivergence : public ModelError {
public:
    TrainingDivergence(const std::string& what, int epoch)
        : ModelError(what), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace renewcast
