#pragma once

#include <stdexcept>
#include <string>

namespace lossyosc {

/// Base of every error raised by the library. The C interface maps each
/// concrete type onto an lo_status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: inconsistent dimensions, out-of-range indices, invalid
/// schedules or initial states.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Base for failures of a numerical method on otherwise valid input.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// H_eff is (numerically) defective; the ladder-operator construction does
/// not exist. Carries the measured eigenvector condition.
class ExceptionalPointError : public NumericalFailure {
public:
    ExceptionalPointError(const std::string& what, double condition)
        : NumericalFailure(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// The Gauss-type product e^{f+ K+} e^{f0 K0} e^{f- K-} does not exist at
/// the requested time (M22 of the fundamental matrix vanishes).
class FactorizationSingularity : public NumericalFailure {
public:
    FactorizationSingularity(const std::string& what, double time)
        : NumericalFailure(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Adaptive integrator gave up (step budget exhausted or step underflow).
class IntegrationFailure : public NumericalFailure {
public:
    IntegrationFailure(const std::string& what, double reached_time)
        : NumericalFailure(what), reached_time_(reached_time) {}
    double reached_time() const noexcept { return reached_time_; }

private:
    double reached_time_;
};

/// Lie-algebra analysis could not make a clean decision (closure failure,
/// ambiguous numerical rank, degenerate Killing form).
class AlgebraError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace lossyosc
