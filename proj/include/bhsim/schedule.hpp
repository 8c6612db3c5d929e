#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bhsim/topology.hpp"

namespace bhsim {

// Slots granted to one child link for one target subframe. The grant owns a
// contiguous window of alpha * n_total expanded slot indices; the physical
// link at the scheduling BS is busy in n_total of them: all of them when
// alpha is 1, every second one starting at the window head when alpha is 2
// (the child endpoint covers the other half).
struct LinkGrant {
    NodeId link = -1;  // child id of the granted link
    long n_total = 0;
    long n_down = 0;
    long n_up = 0;
    int alpha = 1;
    long window_start = -1;  // -1 while not yet placed
};

// Binding slot assignment one BS computes for the links to its children.
struct FinalSchedule {
    NodeId scheduler = -1;
    long target_subframe = -1;
    long computed_at = -1;
    std::vector<LinkGrant> grants;  // ascending by link id

    const LinkGrant* grant_for(NodeId link) const {
        for (const LinkGrant& g : grants)
            if (g.link == link) return &g;
        return nullptr;
    }
};

// Absolute slot indices where the scheduling endpoint's radio is busy.
std::vector<int> scheduler_side_slots(const LinkGrant& g);
// Same for the child endpoint.
std::vector<int> child_side_slots(const LinkGrant& g);

// Splits a grant between directions proportionally to the queue backlogs,
// rounding half up, with each direction kept alive (>= 1 slot) when both
// backlogs are positive and at least two slots are available.
std::pair<long, long> split_directions(long n_total, std::int64_t queue_down,
                                       std::int64_t queue_up);

// Divides `quota` units over the queue sizes proportionally with the
// largest-remainder rule; ties go to the lower id. Never takes more than a
// queue holds; takes everything when quota covers the total.
std::map<NodeId, std::int64_t> apportion_largest_remainder(
    std::int64_t quota, const std::map<NodeId, std::int64_t>& sizes);

struct PlacementInput {
    int n_d = 22;
    NodeId self = -1;
    int radio_chains = 1;
    const InterferenceMatrix* interference = nullptr;
    // The node's own parent-link grant for the same subframe; its window is
    // immovable and its child-side slots occupy one of this node's radios.
    std::optional<LinkGrant> parent_grant;
};

// Assigns a window to every grant: larger expanded windows first, ties by
// child id, each taking the leftmost start where interfering windows stay
// disjoint and no slot exceeds the radio-chain count. When a grant cannot be
// placed, its slot count is reduced by one and placement restarts; each
// reduction is counted. Returns the number of reductions.
long place_slots(std::vector<LinkGrant>& grants, const PlacementInput& in);

} // namespace bhsim
