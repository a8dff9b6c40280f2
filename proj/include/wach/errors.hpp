#pragma once

#include <stdexcept>
#include <string>

namespace wach {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument combinations: mismatched rings, invalid dimensions, malformed input data.
struct UsageError : Error {
    using Error::Error;
};

// Input value fails a validated precondition (non-prime p, weights out of range, ...).
struct InputError : Error {
    using Error::Error;
};

// Inversion attempted on an element divisible by p (or with non-unit leading data).
struct NotAUnitError : Error {
    using Error::Error;
};

// Guard digits insufficient for the requested operation.
struct PrecisionError : Error {
    using Error::Error;
};

// Requested modulus p^N exceeds the supported word range.
struct UnsupportedPrecisionError : PrecisionError {
    using PrecisionError::PrecisionError;
};

// Accumulated denominator exponent e would reach the p-adic precision N.
struct DenominatorOverflowError : Error {
    using Error::Error;
};

// Composition argument has nonzero constant term or carries denominators.
struct CompositionDomainError : Error {
    using Error::Error;
};

// pi-truncation length M too small for the requested construction.
struct TruncationTooShortError : Error {
    using Error::Error;
};

// Exact division failed; message carries the offending remainder.
struct NotDivisibleError : Error {
    using Error::Error;
};

// A precision rule produced fewer than one certified digit.
struct PrecisionExhaustedError : Error {
    using Error::Error;
};

// An iterate or certified-integral element acquired denominators.
struct IntegralityViolationError : Error {
    using Error::Error;
};

// Fixed-point iteration failed to stabilize within the cap.
struct NoConvergenceError : Error {
    using Error::Error;
};

// Pairwise generator compatibility check failed.
struct CocycleViolationError : Error {
    using Error::Error;
};

// Check refused because its hypothesis is not satisfied by the inputs.
struct HypothesisNotMetError : Error {
    using Error::Error;
};

}  // namespace wach
