#ifndef FPCONV_ERRORS_HPP
#define FPCONV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fpconv {

// Base of everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input (CLI flags, malformed measure specs). Exit code 2 in the CLI.
struct ConfigError : Error {
    using Error::Error;
};

// Mathematical precondition violated. Exit code 3 in the CLI.
struct DomainError : Error {
    using Error::Error;
};

// Evaluation point lies in the closed support of the measure.
struct InsideSupport : DomainError {
    using DomainError::DomainError;
};

// Requested value outside the invertible range of a transform.
struct OutOfRange : DomainError {
    using DomainError::DomainError;
};

// Argument outside the (extended) domain of an analytic function.
struct OutOfDomain : DomainError {
    using DomainError::DomainError;
};

// z at or beyond the left support edge of the convolution.
struct BeyondEdge : DomainError {
    using DomainError::DomainError;
};

// The mu slot of the convolution pipeline requires a non-degenerate measure.
struct DegenerateMeasure : DomainError {
    using DomainError::DomainError;
};

// Integrand diverges non-integrably on the support.
struct NonIntegrable : DomainError {
    using DomainError::DomainError;
};

// z inside (or right of) the sampled spectrum.
struct ZInsideSpectrum : DomainError {
    using DomainError::DomainError;
};

// Matrix dimension outside the configured bounds.
struct ResourceLimit : ConfigError {
    using ConfigError::ConfigError;
};

} // namespace fpconv

#endif
