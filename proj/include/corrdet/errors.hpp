#pragma once

#include <stdexcept>
#include <string>

namespace corrdet {

// Argument outside the CGF domain (or too close to a pole).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateSignal : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateTilt : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed user configuration (CLI / JSON input).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace corrdet
