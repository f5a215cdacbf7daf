#pragma once

#include <stdexcept>
#include <string>

namespace freeprob {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Wrong support kind for the requested operation (e.g. a real-line
// measure where a law on [0,inf) is required).
class SupportError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Evaluation point sits on the support of the measure.
class PoleError : public Error {
public:
    using Error::Error;
};

class InversionError : public Error {
public:
    InversionError(const std::string& what, double residual)
        : Error(what), last_residual(residual) {}
    double last_residual = 0.0;
};

class ConvolutionError : public Error {
public:
    using Error::Error;
};

class RecoveryError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

}  // namespace freeprob
