#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bhsim/topology.hpp"

namespace bhsim {

// One advertised desired-slot value, as delivered to the parent.
struct ReportEvent {
    long subframe = 0;
    NodeId node = -1;
    long nhat = 0;
};

// One positive grant from a final schedule.
struct SchedEvent {
    long computed_at = 0;
    long target = 0;
    NodeId node = -1;   // scheduling BS
    NodeId child = -1;  // link being granted
    long n_total = 0;
    long n_down = 0;
    long n_up = 0;
    long window_start = -1;
    int alpha = 1;
    long cap = 0;  // the child's advertised value in force when computed
};

struct ScheduleLogData {
    std::vector<ReportEvent> reports;
    std::vector<SchedEvent> schedules;
};

// Serializes a run's scheduling decisions together with the topology they
// were made against, so the log can be checked on its own.
std::string write_schedule_log(const TreeTopology& topo, int n_d,
                               const ScheduleLogData& log);

// Replays a serialized log against every schedule constraint: window bounds,
// direction split consistency, expansion factors, advertised-value caps,
// interference disjointness, the immovable parent window, per-slot radio
// limits, and parent-before-child computation order. Returns one message per
// violation; a clean log yields an empty list. Event counts are reported so
// callers can tell a clean log from an empty one.
std::vector<std::string> validate_schedule_log(const std::string& text,
                                               std::size_t* report_count = nullptr,
                                               std::size_t* schedule_count = nullptr);

} // namespace bhsim
