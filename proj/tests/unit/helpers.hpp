#pragma once

#include <cmath>
#include <functional>

#include "core/errors.hpp"
#include "doctest.h"

// Runs f and returns the ks1d error code it threw (0 if none).
inline int code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ks1d::Error& e) {
    return static_cast<int>(e.code());
  }
  return 0;
}

inline int code(ks1d::ErrorCode c) { return static_cast<int>(c); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }
