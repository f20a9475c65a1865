#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dropsim {

using Field = std::vector<double>;

inline constexpr double kGasConstant = 8.31446261815324;  // J/(mol K)
inline constexpr double kAtm = 101325.0;                  // Pa

// Threshold separating interface cells from pure-phase cells.
inline constexpr double kAlphaEps = 1e-6;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

inline double sq(double x) { return x * x; }

}  // namespace dropsim
