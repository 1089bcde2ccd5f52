#pragma once

#include <stdexcept>
#include <string>

namespace glbe {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A quantity that is infinite at the requested point (e.g. K_nu(0)).
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A pointwise query on a distributional object, e.g. the density of a delta.
class UnsupportedQuery : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Pointwise evaluation exactly at a jump of a discontinuous solution.
class BoundaryValueError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A series or iteration that did not reach its tolerance within budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature, root finding or fitting failure; the message carries diagnostics.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An object queried before it holds any data.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace glbe
