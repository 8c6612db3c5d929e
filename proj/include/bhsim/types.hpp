#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bhsim {

// Node index. 0 is always the macro-cell BS; everything else is a small cell.
using NodeId = std::int32_t;

inline constexpr NodeId kMacroId = 0;

// Raised when a scenario or problem description is malformed. The message
// names the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a parsed or generated topology violates the tree invariants.
struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a schedule problem admits no assignment even with the scale
// driven to zero (mandatory slots alone overload a constraint).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when the enumeration oracle would have to visit too many vectors.
struct OracleOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on internal consistency failures during a simulation run.
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Slack used when comparing slot counts derived from real-valued demands.
// Solver and oracle both use it so breakpoint arithmetic agrees bit for bit.
inline constexpr double kSlotEps = 1e-9;

// Smallest integer >= x, robust against values that sit an ulp above an
// integer after division.
inline long ceil_slots(double x) {
    if (x <= 0.0) return 0;
    return static_cast<long>(std::ceil(x - kSlotEps));
}

} // namespace bhsim
