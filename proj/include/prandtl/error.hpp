#pragma once

#include <stdexcept>
#include <string>

namespace prandtl {

// Inputs or assumptions rejected before any numerics run. Maps to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The computation itself broke down (NaN, quadrature failure, Newton divergence). Exit code 3.
class NumericalAbort : public std::runtime_error {
public:
    explicit NumericalAbort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace prandtl
