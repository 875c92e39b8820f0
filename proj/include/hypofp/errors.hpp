#pragma once

#include <stdexcept>
#include <string>

namespace hypofp {

// Input outside the domain of an operation (bad shapes, non-finite data, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The system violates hypoellipticity or confinement.
class ConditionAError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A decay certificate could not be built or failed verification.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hypofp
