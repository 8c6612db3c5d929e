#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

// Everything measured in one subframe. Per-node vectors are indexed by
// NodeId. Delivery is counted end to end: downlink bits count at the subframe
// they reach their destination BS, uplink bits when they reach the macro.
struct MetricsRecord {
    long subframe = 0;
    std::vector<std::int64_t> dl_bits;           // delivered, by destination
    std::vector<std::int64_t> ul_bits;           // delivered at macro, by source
    std::vector<std::int64_t> queue_dl_packets;  // backlog held at each node
    std::vector<std::int64_t> queue_ul_packets;
    std::vector<long> reported_nhat;             // latest advertised value
    std::vector<long> placement_repairs;         // window shrink events
    std::int64_t aggregate_bits = 0;
    // Slot totals of the macro's two solver passes for this subframe: the
    // minimal grant serving the best fraction, and the widened grant that
    // reuses leftover slots. Issued grants (after any placement repair) are
    // in the schedule log.
    long macro_slots_witness = 0;
    long macro_slots_final = 0;
};

// Jain's index (sum x)^2 / (n * sum x^2); 1 means perfectly even.
double jain_index(const std::vector<double>& values);

// Trailing moving average; the first window-1 points average what exists.
std::vector<double> window_average(const std::vector<double>& series, int window);

inline constexpr long kNoConvergence = -1;

// Subframes after `step_index` until the smoothed series first stays inside
// new_level * (1 +- band) for `dwell` consecutive points. Returns
// kNoConvergence when it never settles.
long tracking_latency(const std::vector<double>& series, size_t step_index,
                      double old_level, double new_level, double band,
                      int dwell = 5, int smooth_window = 1);

// One row per (subframe, node) plus an aggregate row with node -1, columns:
// subframe,node,dl_bits,ul_bits,queue_dl_packets,queue_ul_packets,
// reported_nhat,placement_repairs
std::string metrics_to_csv(const std::vector<MetricsRecord>& records);

} // namespace bhsim
