#pragma once

#include <deque>
#include <map>
#include <optional>

#include "bhsim/optimizer.hpp"
#include "bhsim/reporting.hpp"
#include "bhsim/schedule.hpp"
#include "bhsim/topology.hpp"

namespace bhsim {

// Packet backlog held at one BS. Downlink packets are keyed by their final
// destination, uplink packets by their original source. The macro holds no
// uplink backlog (it is the sink) and leaves hold no downlink backlog.
struct QueueState {
    std::map<NodeId, std::int64_t> dl;
    std::map<NodeId, std::int64_t> ul;

    std::int64_t dl_total() const;
    std::int64_t ul_total() const;
    // Downlink backlog destined into the subtree rooted at `root`.
    std::int64_t dl_toward(const TreeTopology& t, NodeId root) const;
};

// What a parent knows about one child from its latest control report.
struct ChildReport {
    std::int64_t ul_queue_packets = 0;
    std::int64_t dl_demand = 0;  // bits per subframe, aggregated over the subtree
    std::int64_t ul_demand = 0;
    long nhat = 0;
    bool valid = false;
};

// Per-BS state owned by the engine and mutated only through engine calls.
struct NodeState {
    NodeId id = -1;
    QueueState queues;
    ReportingFilter filter;
    // Recent own offered load (dl, ul) in bits per subframe; the advertised
    // own demand is the rounded mean over this window.
    std::deque<std::pair<std::int64_t, std::int64_t>> offered_window;
    int demand_stat_window = 1;
    std::map<NodeId, ChildReport> reports;          // keyed by child id
    std::map<long, LinkGrant> parent_grants;        // keyed by target subframe
    std::map<long, long> parent_grant_received_at;  // target -> receive subframe
    std::map<long, FinalSchedule> schedules;        // own, keyed by target
    long last_raw_nhat = 0;
    long last_reported_nhat = 0;

    void push_offered(std::int64_t dl_bits, std::int64_t ul_bits);
    // Rounded trailing mean of the offered load, (dl, ul) bits per subframe.
    std::pair<std::int64_t, std::int64_t> own_demand() const;
};

// Subtree-wide offered load this node advertises upward: its own statistic
// plus the latest aggregates reported by its children. (dl, ul) bits per
// subframe.
std::pair<std::int64_t, std::int64_t> aggregate_demand(const NodeState& node);

struct LocalScheduleResult {
    double scale = 1.0;
    long nhat_raw = 0;
};

// Desired parent-link slot count from the node's own viewpoint: serve every
// child link and the aggregate parent link at the best common satisfaction
// fraction, then read off the parent-link slot count.
LocalScheduleResult compute_local_schedule(const NodeState& node,
                                           const TreeTopology& topo, int n_d,
                                           std::int64_t packet_bits);

struct FinalScheduleStats {
    long slots_before_widening = 0;
    long slots_widened = 0;
    long placement_repairs = 0;
};

// Binding schedule for the macro's child links: serve backlogs bounded by
// demand at the best fraction, optionally widen grants at that fraction to
// use leftover slots, then place windows and split directions.
FinalSchedule compute_final_schedule_macro(NodeState& node,
                                           const TreeTopology& topo, int n_d,
                                           long target, long now,
                                           bool enhancement,
                                           std::int64_t packet_bits,
                                           FinalScheduleStats* stats = nullptr);

// Same for a non-leaf small cell: the parent's grant for the node's own link
// is immovable, reserves radio time, and squeezes interfering child links.
FinalSchedule compute_final_schedule_nonleaf(NodeState& node,
                                             const TreeTopology& topo, int n_d,
                                             long target, long now,
                                             const LinkGrant& own_grant,
                                             std::int64_t packet_bits,
                                             FinalScheduleStats* stats = nullptr);

struct FillResult {
    std::map<NodeId, std::int64_t> dl_take;  // keyed by destination
    std::map<NodeId, std::int64_t> ul_take;  // keyed by source
};

// Chooses which packets a grant moves: up to n_down downlink packets from the
// parent's queues headed into the child's subtree and up to n_up uplink
// packets from the child's queues, spread proportionally over the per-flow
// queues by the largest-remainder rule.
FillResult fill_packets(const QueueState& at_parent, const QueueState& at_child,
                        const TreeTopology& topo, NodeId child, long n_down,
                        long n_up);

} // namespace bhsim
