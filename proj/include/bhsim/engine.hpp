#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bhsim/metrics.hpp"
#include "bhsim/node.hpp"
#include "bhsim/schedule_log.hpp"
#include "bhsim/topology.hpp"
#include "bhsim/traffic.hpp"

namespace bhsim {

// Fixed time structure of a subframe: two control slots up front, the rest
// carries data.
struct SubframeClock {
    int slots_per_subframe = 24;
    int control_slots = 2;
    double subframe_duration = 1e-4;

    int data_slots() const { return slots_per_subframe - control_slots; }
};

struct EngineConfig {
    SubframeClock clock;
    int n_sub = 8;  // sub-slots per control slot, one per child
    long num_subframes = 0;
    bool enhancement = true;
    ArrivalKind arrivals = ArrivalKind::Deterministic;
    std::uint64_t seed = 1;
    std::int64_t packet_bits = 1;  // one packet = one slot payload
    int filter_window = 10;
    double filter_threshold = 0.0;
    int demand_stat_window = 1;
    bool keep_schedule_log = false;
    std::vector<DemandProfile> profiles;  // by node id; macro entry stays empty
};

// Unique control sub-slot per child of one parent, in child-id order.
std::map<NodeId, int> assign_sub_slots(const TreeTopology& topo, NodeId parent,
                                       int n_sub);

// Which subframes a BS of the given height schedules when the clock reads
// `subframe`: nothing before its start, the whole span up to the tree height
// in its first scheduling subframe, one look-ahead subframe afterwards.
std::vector<long> target_subframes(int height, long subframe, int tree_height);

class Engine {
public:
    Engine(TreeTopology topo, EngineConfig cfg);

    void step();  // one full subframe: control slot 1, control slot 2, data
    void run();   // all configured subframes

    long subframes_done() const { return subframe_; }
    int tree_height() const { return topo_.depth; }
    const TreeTopology& topology() const { return topo_; }
    const EngineConfig& config() const { return cfg_; }
    const std::vector<MetricsRecord>& records() const { return records_; }
    const NodeState& node(NodeId id) const { return nodes_.at(id); }
    const ScheduleLogData& schedule_log() const { return log_; }

    // True when every non-leaf BS had this subframe's schedule in hand before
    // the subframe began; turns true for good once the pipeline has filled.
    bool subframe_fully_pipelined(long s) const;

private:
    void control_slot_one(long s);
    void control_slot_two(long s);
    void data_phase(long s);

    TreeTopology topo_;
    EngineConfig cfg_;
    int n_d_ = 0;
    std::vector<NodeState> nodes_;
    std::vector<ArrivalState> arrival_states_;
    std::vector<long> repairs_this_subframe_;
    std::map<long, std::pair<long, long>> macro_slots_by_target_;
    std::vector<MetricsRecord> records_;
    std::vector<bool> pipelined_;  // indexed by subframe, entry 0 unused
    ScheduleLogData log_;
    long subframe_ = 0;
};

} // namespace bhsim
