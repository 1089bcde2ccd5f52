#pragma once
// Helpers shared by the unit tests.

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "oracle_quadrature.hpp"

namespace glbe::test {

inline void expect_rel(double actual, double expected, double tol) {
    const double scale = std::max(std::abs(expected), 1e-300);
    EXPECT_LE(std::abs(actual - expected) / scale, tol) << "actual " << actual << " expected " << expected;
}

}  // namespace glbe::test
