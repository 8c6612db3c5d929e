#include "bhsim/traffic.hpp"

#include <cmath>

namespace bhsim {

namespace {

// splitmix64 of a combined key; gives every (seed, node, subframe, direction)
// cell an independent reproducible coin.
double coin(std::uint64_t seed, NodeId node, long subframe, int direction) {
    std::uint64_t x = seed;
    x ^= 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(node + 1);
    x ^= 0xc2b2ae3d27d4eb4full * static_cast<std::uint64_t>(subframe);
    x ^= 0x165667b19e3779f9ull * static_cast<std::uint64_t>(direction + 1);
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

long deterministic_emit(double rate, double& carry) {
    carry += rate;
    long emit = static_cast<long>(std::floor(carry));
    carry -= static_cast<double>(emit);
    return emit;
}

long dithered_emit(double rate, double u) {
    double whole = std::floor(rate);
    double frac = rate - whole;
    return static_cast<long>(whole) + (u < frac ? 1 : 0);
}

} // namespace

std::pair<std::int64_t, std::int64_t> DemandProfile::rate_at(long subframe) const {
    std::int64_t dl = 0, ul = 0;
    for (const DemandSegment& seg : segments) {
        if (seg.start_subframe > subframe) break;
        dl = seg.dl_bits;
        ul = seg.ul_bits;
    }
    return {dl, ul};
}

void validate_profile(const DemandProfile& profile) {
    long prev = 0;
    for (const DemandSegment& seg : profile.segments) {
        if (seg.start_subframe < 1)
            throw ConfigError("demand: segment start must be >= 1");
        if (seg.start_subframe <= prev)
            throw ConfigError("demand: segment starts must be strictly increasing");
        if (seg.dl_bits < 0 || seg.ul_bits < 0)
            throw ConfigError("demand: rates must be >= 0");
        prev = seg.start_subframe;
    }
}

ArrivalCounts arrivals_for(const DemandProfile& profile, NodeId node,
                           long subframe, ArrivalKind kind, std::uint64_t seed,
                           std::int64_t packet_bits, ArrivalState& state) {
    if (packet_bits < 1) throw ConfigError("arrivals: packet size must be positive");
    auto [dl_bits, ul_bits] = profile.rate_at(subframe);
    double dl_rate = static_cast<double>(dl_bits) / static_cast<double>(packet_bits);
    double ul_rate = static_cast<double>(ul_bits) / static_cast<double>(packet_bits);

    ArrivalCounts out;
    if (kind == ArrivalKind::Deterministic) {
        out.dl_packets = deterministic_emit(dl_rate, state.dl_carry);
        out.ul_packets = deterministic_emit(ul_rate, state.ul_carry);
    } else {
        out.dl_packets = dithered_emit(dl_rate, coin(seed, node, subframe, 0));
        out.ul_packets = dithered_emit(ul_rate, coin(seed, node, subframe, 1));
    }
    return out;
}

} // namespace bhsim
