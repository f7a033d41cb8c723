#ifndef GAUSSDIV_ERRORS_HPP
#define GAUSSDIV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gaussdiv {

/// Precondition violated by the caller (bad shape, asymmetric input, out-of-range time).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A map or process matrix X that must be inverted is singular.
/// Carries the process time when the failure happened inside a time scan.
class SingularMapError : public std::runtime_error {
public:
    explicit SingularMapError(const std::string & what, double time = 0.0)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Quadrature or root bracketing failed to converge.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested analysis is not defined for this kind of input
/// (e.g. rate-based classification of a parity-flipping process).
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gaussdiv

#endif // GAUSSDIV_ERRORS_HPP
