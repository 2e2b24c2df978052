#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "rhythmwalk/statevector.hpp"

namespace rwtest {

inline double max_amplitude_diff(const rhythmwalk::StateVector& a,
                                 const rhythmwalk::StateVector& b) {
  EXPECT_EQ(a.dimension(), b.dimension());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i)
    worst = std::max(worst, std::abs(a.amplitude(i) - b.amplitude(i)));
  return worst;
}

inline void expect_state_near(const rhythmwalk::StateVector& actual,
                              const rhythmwalk::StateVector& expected,
                              double tolerance) {
  EXPECT_LE(max_amplitude_diff(actual, expected), tolerance);
}

}  // namespace rwtest
