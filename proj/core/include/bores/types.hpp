/**
 * @file types.hpp
 * @brief Small value types shared across modules
 */

#pragma once

#include <numbers>

namespace bores {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

/// Angle stored as an exact rational multiple of pi.
struct PiRational {
    long num = 0;
    long den = 1;

    double value() const { return std::numbers::pi * static_cast<double>(num) / static_cast<double>(den); }
};

/// Phase labels: Omega^+ is int{u >= 0}, Omega^- is {u < 0}.
enum class Phase : int { minus = -1, plus = 1 };

} // namespace bores
