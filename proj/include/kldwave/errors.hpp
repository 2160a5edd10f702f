#pragma once

#include <stdexcept>
#include <string>

namespace kldwave {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data or configuration (maps to CLI exit status 2).
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a valid result (CLI exit status 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public InputError {
public:
    using InputError::InputError;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DidNotConverge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InfeasibleMu : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllPosedDetection : public InputError {
public:
    using InputError::InputError;
};

class SingularNoise : public InputError {
public:
    using InputError::InputError;
};

class InvalidGenerator : public InputError {
public:
    using InputError::InputError;
};

class TooManyDevices : public InputError {
public:
    using InputError::InputError;
};

class InsufficientCalibration : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace kldwave
