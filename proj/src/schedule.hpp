#pragma once

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace msrc {

enum class Scheduler : uint8_t {
    cosine = 0,
    linear = 1,
    square = 2,
};

// Fraction of positions still masked after iteration t of T.  Strictly
// decreasing in t; exactly 0 at t == T so the final iteration always
// finishes the plane.
inline double tau(Scheduler s, uint32_t t, uint32_t T) {
    if (t < 1 || t > T)
        fail(errc::out_of_range_iteration, "iteration index outside 1..T");
    if (t == T) return 0.0;
    double x = static_cast<double>(t) / T;
    switch (s) {
    case Scheduler::cosine: return std::cos(x * 1.57079632679489661923);
    case Scheduler::linear: return 1.0 - x;
    case Scheduler::square: return 1.0 - x * x;
    }
    fail(errc::invalid_argument, "unknown scheduler");
}

// round-half-up of ratio * n
inline uint64_t masked_count(double ratio, uint64_t n) {
    return static_cast<uint64_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

} // namespace msrc
