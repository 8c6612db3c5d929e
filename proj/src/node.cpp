#include "bhsim/node.hpp"

#include <algorithm>
#include <cmath>

#include "bhsim/types.hpp"

namespace bhsim {

namespace {

std::int64_t round_half_up(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

} // namespace

std::int64_t QueueState::dl_total() const {
    std::int64_t sum = 0;
    for (const auto& [dest, count] : dl) sum += count;
    return sum;
}

std::int64_t QueueState::ul_total() const {
    std::int64_t sum = 0;
    for (const auto& [src, count] : ul) sum += count;
    return sum;
}

std::int64_t QueueState::dl_toward(const TreeTopology& t, NodeId root) const {
    std::int64_t sum = 0;
    for (const auto& [dest, count] : dl)
        if (t.in_subtree(root, dest)) sum += count;
    return sum;
}

void NodeState::push_offered(std::int64_t dl_bits, std::int64_t ul_bits) {
    offered_window.emplace_back(dl_bits, ul_bits);
    while (offered_window.size() > static_cast<std::size_t>(demand_stat_window))
        offered_window.pop_front();
}

std::pair<std::int64_t, std::int64_t> NodeState::own_demand() const {
    if (offered_window.empty()) return {0, 0};
    double dl = 0.0, ul = 0.0;
    for (const auto& [d, u] : offered_window) {
        dl += static_cast<double>(d);
        ul += static_cast<double>(u);
    }
    const double n = static_cast<double>(offered_window.size());
    return {round_half_up(dl / n), round_half_up(ul / n)};
}

std::pair<std::int64_t, std::int64_t> aggregate_demand(const NodeState& node) {
    auto [dl, ul] = node.own_demand();
    for (const auto& [child, rep] : node.reports) {
        if (!rep.valid) continue;
        dl += rep.dl_demand;
        ul += rep.ul_demand;
    }
    return {dl, ul};
}

LocalScheduleResult compute_local_schedule(const NodeState& node,
                                           const TreeTopology& topo, int n_d,
                                           std::int64_t packet_bits) {
    (void)packet_bits;
    if (node.id == kMacroId)
        throw EngineError("local schedule: the macro has no parent link");

    ScheduleProblem prob;
    prob.n_d = n_d;
    prob.radio_budget = static_cast<long>(n_d) * topo.radio_chains[node.id];

    std::vector<NodeId> involved;
    std::int64_t child_demand_sum = 0;
    for (NodeId child : topo.children[node.id]) {
        auto it = node.reports.find(child);
        std::int64_t demand = 0;
        if (it != node.reports.end() && it->second.valid)
            demand = it->second.dl_demand + it->second.ul_demand;
        child_demand_sum += demand;
        const LogicalLink& link = topo.links[child];
        prob.links.push_back({child, demand, -1, link.rate_per_slot, link.alpha,
                              static_cast<long>(n_d)});
        involved.push_back(child);
    }
    const auto [own_dl, own_ul] = node.own_demand();
    const LogicalLink& up = topo.links[node.id];
    prob.links.push_back({node.id, own_dl + own_ul + child_demand_sum, -1,
                          up.rate_per_slot, up.alpha, static_cast<long>(n_d)});
    involved.push_back(node.id);

    for (std::size_t a = 0; a + 1 < involved.size(); ++a)
        for (std::size_t b = a + 1; b < involved.size(); ++b)
            if (topo.interference.interferes(involved[a], involved[b]))
                prob.interference.emplace_back(static_cast<int>(a),
                                               static_cast<int>(b));

    ScheduleSolution sol = solve_max_scale(prob);
    return {sol.scale, sol.slots.back()};
}

namespace {

struct ChildEntry {
    NodeId id = -1;
    std::int64_t queue_bits = 0;
    std::int64_t demand_bits = 0;
    long nhat = 0;
};

FinalSchedule build_final_schedule(NodeState& node, const TreeTopology& topo,
                                   int n_d, long target, long now,
                                   bool enhancement, const LinkGrant* own_grant,
                                   std::int64_t packet_bits,
                                   FinalScheduleStats* stats) {
    const long reserved = own_grant ? own_grant->n_total : 0;
    const long budget = static_cast<long>(n_d) * topo.radio_chains[node.id] - reserved;
    const int own_alpha = own_grant ? own_grant->alpha : 1;
    const long free_span = static_cast<long>(n_d) - static_cast<long>(own_alpha) * reserved;

    // Children that can take part: they must have advertised a usable slot
    // count, and links squeezed to nothing by the immovable parent window or
    // by the radio budget are left out so the rest can still be served.
    std::vector<ChildEntry> kept;
    long active_kept = 0;
    for (NodeId child : topo.children[node.id]) {
        auto it = node.reports.find(child);
        if (it == node.reports.end() || !it->second.valid) continue;
        const ChildReport& rep = it->second;
        if (rep.nhat < 1) continue;

        ChildEntry e;
        e.id = child;
        e.queue_bits = (node.queues.dl_toward(topo, child) + rep.ul_queue_packets) *
                       packet_bits;
        e.demand_bits = rep.dl_demand + rep.ul_demand;
        e.nhat = rep.nhat;
        const bool active = e.queue_bits > 0;
        if (active) {
            if (own_grant && reserved > 0 &&
                topo.interference.interferes(child, node.id) &&
                free_span < topo.links[child].alpha)
                continue;
            if (active_kept >= budget) continue;
            ++active_kept;
        }
        kept.push_back(e);
    }

    ScheduleProblem prob;
    prob.n_d = n_d;
    prob.radio_budget = budget;
    for (const ChildEntry& e : kept)
        prob.links.push_back({e.id, e.demand_bits, e.queue_bits,
                              topo.links[e.id].rate_per_slot,
                              topo.links[e.id].alpha, e.nhat});
    for (std::size_t a = 0; a + 1 < kept.size(); ++a)
        for (std::size_t b = a + 1; b < kept.size(); ++b)
            if (topo.interference.interferes(kept[a].id, kept[b].id))
                prob.interference.emplace_back(static_cast<int>(a),
                                               static_cast<int>(b));
    if (own_grant) {
        ParentReservation res;
        res.alpha = own_alpha;
        res.slots = reserved;
        res.interferes.resize(kept.size(), 0);
        for (std::size_t k = 0; k < kept.size(); ++k)
            res.interferes[k] = topo.interference.interferes(kept[k].id, node.id) ? 1 : 0;
        prob.reservation = res;
    }

    ScheduleSolution witness = solve_max_scale(prob);
    ScheduleSolution final_sol =
        enhancement ? solve_max_slots(prob, witness.scale) : witness;

    FinalSchedule fs;
    fs.scheduler = node.id;
    fs.target_subframe = target;
    fs.computed_at = now;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        if (final_sol.slots[k] <= 0) continue;
        LinkGrant g;
        g.link = kept[k].id;
        g.n_total = final_sol.slots[k];
        g.alpha = topo.links[kept[k].id].alpha;
        fs.grants.push_back(g);
    }

    PlacementInput pin;
    pin.n_d = n_d;
    pin.self = node.id;
    pin.radio_chains = topo.radio_chains[node.id];
    pin.interference = &topo.interference;
    if (own_grant) pin.parent_grant = *own_grant;
    const long repairs = place_slots(fs.grants, pin);

    fs.grants.erase(std::remove_if(fs.grants.begin(), fs.grants.end(),
                                   [](const LinkGrant& g) { return g.n_total <= 0; }),
                    fs.grants.end());

    const std::int64_t lag = target - now;
    for (LinkGrant& g : fs.grants) {
        const ChildReport& rep = node.reports.at(g.link);
        // The queues are measured now but the grant executes at the target
        // subframe. Projecting them forward - the advertised demand keeps
        // flowing in, grants already issued for the subframes in between
        // drain them - keeps the split from re-serving backlog that is
        // already committed, which would swing the two directions against
        // each other instead of letting them settle.
        std::int64_t q_dl = node.queues.dl_toward(topo, g.link) * packet_bits +
                            lag * rep.dl_demand;
        std::int64_t q_ul = rep.ul_queue_packets * packet_bits +
                            lag * rep.ul_demand;
        for (auto it = node.schedules.lower_bound(now);
             it != node.schedules.end() && it->first < target; ++it) {
            if (const LinkGrant* pending = it->second.grant_for(g.link)) {
                q_dl -= pending->n_down * packet_bits;
                q_ul -= pending->n_up * packet_bits;
            }
        }
        q_dl = std::max<std::int64_t>(q_dl, 0);
        q_ul = std::max<std::int64_t>(q_ul, 0);
        if (q_dl + q_ul == 0) {
            // Everything visible is committed; split by the measured ratio.
            q_dl = node.queues.dl_toward(topo, g.link) * packet_bits;
            q_ul = rep.ul_queue_packets * packet_bits;
        }
        const auto [down, up] = split_directions(g.n_total, q_dl, q_ul);
        g.n_down = down;
        g.n_up = up;
    }

    if (stats) {
        // Both totals come from the solver passes on the same problem, so
        // they isolate what widening contributed; placement repairs shrink
        // the issued grants downstream of either pass and are counted apart.
        stats->slots_before_widening = witness.objective_slots;
        stats->slots_widened = final_sol.objective_slots;
        stats->placement_repairs = repairs;
    }
    return fs;
}

} // namespace

FinalSchedule compute_final_schedule_macro(NodeState& node,
                                           const TreeTopology& topo, int n_d,
                                           long target, long now,
                                           bool enhancement,
                                           std::int64_t packet_bits,
                                           FinalScheduleStats* stats) {
    if (node.id != kMacroId)
        throw EngineError("final schedule: macro form called on a small cell");
    return build_final_schedule(node, topo, n_d, target, now, enhancement,
                                nullptr, packet_bits, stats);
}

FinalSchedule compute_final_schedule_nonleaf(NodeState& node,
                                             const TreeTopology& topo, int n_d,
                                             long target, long now,
                                             const LinkGrant& own_grant,
                                             std::int64_t packet_bits,
                                             FinalScheduleStats* stats) {
    if (node.id == kMacroId)
        throw EngineError("final schedule: small-cell form called on the macro");
    if (topo.is_leaf(node.id))
        throw EngineError("final schedule: a leaf has no child links to schedule");
    return build_final_schedule(node, topo, n_d, target, now, false, &own_grant,
                                packet_bits, stats);
}

FillResult fill_packets(const QueueState& at_parent, const QueueState& at_child,
                        const TreeTopology& topo, NodeId child, long n_down,
                        long n_up) {
    std::map<NodeId, std::int64_t> dl_sizes;
    for (const auto& [dest, count] : at_parent.dl)
        if (count > 0 && topo.in_subtree(child, dest)) dl_sizes[dest] = count;
    std::map<NodeId, std::int64_t> ul_sizes;
    for (const auto& [src, count] : at_child.ul)
        if (count > 0) ul_sizes[src] = count;

    FillResult out;
    out.dl_take = apportion_largest_remainder(n_down, dl_sizes);
    out.ul_take = apportion_largest_remainder(n_up, ul_sizes);
    return out;
}

} // namespace bhsim
