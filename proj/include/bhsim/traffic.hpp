#pragma once

#include <cstdint>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

// One constant-rate stretch of a demand profile. Rates are offered bits per
// subframe; a segment runs until the next segment's start.
struct DemandSegment {
    long start_subframe = 1;
    std::int64_t dl_bits = 0;
    std::int64_t ul_bits = 0;
};

// Piecewise-constant offered load of one small cell.
struct DemandProfile {
    std::vector<DemandSegment> segments;

    // Offered (dl, ul) bits per subframe at a given subframe.
    std::pair<std::int64_t, std::int64_t> rate_at(long subframe) const;
};

void validate_profile(const DemandProfile& profile);

enum class ArrivalKind { Deterministic, Stochastic };

// Carry-forward state of one cell's packet generator.
struct ArrivalState {
    double dl_carry = 0.0;
    double ul_carry = 0.0;
};

struct ArrivalCounts {
    long dl_packets = 0;  // enqueue at the macro, destined to the cell
    long ul_packets = 0;  // enqueue at the cell itself
};

// Converts offered bits into whole packets for one subframe. Deterministic
// generation accumulates the exact fractional rate and emits the integer
// part; stochastic generation dithers the fraction with a seeded coin so the
// long-run mean still matches the rate.
ArrivalCounts arrivals_for(const DemandProfile& profile, NodeId node,
                           long subframe, ArrivalKind kind, std::uint64_t seed,
                           std::int64_t packet_bits, ArrivalState& state);

} // namespace bhsim
