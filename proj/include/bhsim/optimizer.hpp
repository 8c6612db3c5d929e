#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

// One decision variable of a slot-allocation problem: a logical link that
// wants slots in the upcoming subframe. `queue` < 0 means no backlog bound
// applies (desired-schedule problems); otherwise the solver serves at most
// min(queue, demand) bits.
struct LinkEntry {
    NodeId id = -1;
    std::int64_t demand = 0;  // bits per subframe
    std::int64_t queue = -1;  // backlogged bits, or -1 for unbounded
    std::int64_t rate = 1;    // bits per data slot
    int alpha = 1;            // expanded slots occupied per granted slot
    long upper_bound = 1;     // hard cap on granted slots
};

// Slots already promised to the node's own parent link. Children whose links
// interfere with it must fit in the remainder of the subframe.
struct ParentReservation {
    int alpha = 1;
    long slots = 0;
    std::vector<std::uint8_t> interferes;  // one flag per problem entry
};

struct ScheduleProblem {
    int n_d = 1;            // data slots per subframe
    long radio_budget = 0;  // cap on the summed slot grant
    std::vector<LinkEntry> links;
    std::vector<std::pair<int, int>> interference;  // entry index pairs
    std::optional<ParentReservation> reservation;
};

struct ScheduleSolution {
    double scale = 0.0;       // satisfaction fraction S in [0, 1]
    std::vector<long> slots;  // granted slots, aligned with problem.links
    long objective_slots = 0; // sum of slots
};

inline bool link_is_active(const LinkEntry& l) {
    return l.queue < 0 ? l.demand > 0 : l.queue > 0;
}

inline std::int64_t effective_demand(const LinkEntry& l) {
    return l.queue < 0 ? l.demand : std::min(l.queue, l.demand);
}

void validate_problem(const ScheduleProblem& problem);

// Largest satisfaction fraction S for which the minimal slot grant fits every
// constraint, together with that grant. Active links always receive at least
// one slot; throws InfeasibleError when even that is impossible.
ScheduleSolution solve_max_scale(const ScheduleProblem& problem);

// Maximum total slot count subject to every constraint plus the per-link
// floors implied by a fixed satisfaction fraction. Ties resolve to the
// lexicographically smallest grant by entry index.
ScheduleSolution solve_max_slots(const ScheduleProblem& problem, double scale);

// Exhaustive reference search over every candidate grant; ground truth for
// tests. Throws OracleOverflowError when the grant space exceeds 1e7 points.
ScheduleSolution oracle_enumerate(const ScheduleProblem& problem);

// Direct evaluation of every constraint at a candidate grant, written against
// the problem definition rather than the solver internals.
bool check_allocation(const ScheduleProblem& problem,
                      const std::vector<long>& slots, double scale);

}  // namespace bhsim
