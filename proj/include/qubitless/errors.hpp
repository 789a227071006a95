#pragma once

#include <stdexcept>
#include <string>

namespace qubitless {

// Base class for every failure the library reports. Callers that only care
// about "something went wrong" catch this; the CLI maps subclasses onto exit
// codes (ConfigError -> 2, everything else -> 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionOverflow : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class EigenNonConvergence : public Error {
public:
    using Error::Error;
};

class LabelAmbiguous : public Error {
public:
    using Error::Error;
};

class NotResonant : public Error {
public:
    using Error::Error;
};

class UnknownTransition : public Error {
public:
    using Error::Error;
};

class DegenerateTransition : public Error {
public:
    using Error::Error;
};

class ToleranceNotMet : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class NoSolution : public Error {
public:
    using Error::Error;
};

class DecompositionMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

} // namespace qubitless
