#pragma once

#include <stdexcept>
#include <string>

namespace xcmix {

// Bad or inconsistent user input (files, config, CLI arguments). Maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure inside the sampler. Maps to exit code 3.
class SamplerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a density or update
// (nonpositive precision, variance, or shape).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace xcmix
