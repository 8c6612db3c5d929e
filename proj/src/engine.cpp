#include "bhsim/engine.hpp"

#include <algorithm>
#include <string>

namespace bhsim {

std::map<NodeId, int> assign_sub_slots(const TreeTopology& topo, NodeId parent,
                                       int n_sub) {
    const auto& children = topo.children.at(parent);
    if (static_cast<int>(children.size()) > n_sub)
        throw ConfigError("control slot: node " + std::to_string(parent) +
                          " has " + std::to_string(children.size()) +
                          " children but only " + std::to_string(n_sub) +
                          " sub-slots");
    std::map<NodeId, int> slots;
    for (std::size_t k = 0; k < children.size(); ++k)
        slots[children[k]] = static_cast<int>(k);
    return slots;
}

std::vector<long> target_subframes(int height, long subframe, int tree_height) {
    if (height < 2) return {};
    const long start = static_cast<long>(tree_height) - height + 1;
    if (subframe < start) return {};
    if (subframe == start) {
        std::vector<long> targets;
        for (long t = start; t <= tree_height; ++t) targets.push_back(t);
        return targets;
    }
    return {subframe + height - 1};
}

Engine::Engine(TreeTopology topo, EngineConfig cfg)
    : topo_(std::move(topo)), cfg_(std::move(cfg)) {
    validate_topology(topo_);
    if (cfg_.clock.control_slots != 2 || cfg_.clock.data_slots() < 1)
        throw ConfigError(
            "engine: a subframe is two control slots plus at least one data slot");
    n_d_ = cfg_.clock.data_slots();
    if (cfg_.num_subframes < 0)
        throw ConfigError("engine: subframe count cannot be negative");
    if (cfg_.n_sub < 1)
        throw ConfigError("engine: control sub-slot count must be positive");
    if (cfg_.packet_bits < 1)
        throw ConfigError("engine: packet size must be positive");
    if (cfg_.demand_stat_window < 1)
        throw ConfigError("engine: demand statistic window must be positive");

    for (NodeId i = 1; i < topo_.num_nodes; ++i)
        if (topo_.links[i].rate_per_slot != cfg_.packet_bits)
            throw ConfigError(
                "engine: every link must carry exactly one packet per slot");
    for (NodeId i = 0; i < topo_.num_nodes; ++i)
        if (!topo_.is_leaf(i)) assign_sub_slots(topo_, i, cfg_.n_sub);

    cfg_.profiles.resize(topo_.num_nodes);
    for (const DemandProfile& p : cfg_.profiles) validate_profile(p);
    for (const DemandSegment& seg : cfg_.profiles[kMacroId].segments)
        if (seg.dl_bits != 0 || seg.ul_bits != 0)
            throw ConfigError("engine: the macro has no access traffic of its own");

    nodes_.resize(topo_.num_nodes);
    for (NodeId i = 0; i < topo_.num_nodes; ++i) {
        nodes_[i].id = i;
        nodes_[i].filter = ReportingFilter(cfg_.filter_window, cfg_.filter_threshold);
        nodes_[i].demand_stat_window = cfg_.demand_stat_window;
    }
    arrival_states_.resize(topo_.num_nodes);
    repairs_this_subframe_.assign(topo_.num_nodes, 0);
    pipelined_.assign(1, false);
}

void Engine::run() {
    while (subframe_ < cfg_.num_subframes) step();
}

void Engine::step() {
    const long s = subframe_ + 1;
    control_slot_one(s);
    control_slot_two(s);
    data_phase(s);
    subframe_ = s;
}

void Engine::control_slot_one(long s) {
    // Every small cell computes from what it already holds; reports land at
    // the parents only once all of them are formed, so information climbs
    // one level per subframe.
    struct UpMessage {
        NodeId parent;
        NodeId child;
        ChildReport report;
    };
    std::vector<UpMessage> outbox;
    for (NodeId i = 1; i < topo_.num_nodes; ++i) {
        NodeState& node = nodes_[i];
        const auto [dl, ul] = cfg_.profiles[i].rate_at(s);
        node.push_offered(dl, ul);
        const LocalScheduleResult local =
            compute_local_schedule(node, topo_, n_d_, cfg_.packet_bits);
        node.last_raw_nhat = local.nhat_raw;
        node.last_reported_nhat = node.filter.update(local.nhat_raw);

        ChildReport rep;
        rep.ul_queue_packets = node.queues.ul_total();
        std::tie(rep.dl_demand, rep.ul_demand) = aggregate_demand(node);
        rep.nhat = node.last_reported_nhat;
        rep.valid = true;
        outbox.push_back({topo_.parent[i], i, rep});
        if (cfg_.keep_schedule_log)
            log_.reports.push_back({s, i, rep.nhat});
    }
    for (const UpMessage& m : outbox) nodes_[m.parent].reports[m.child] = m.report;
}

void Engine::control_slot_two(long s) {
    // Non-leaf BSs schedule ahead of time, each using the grant its parent
    // sent in an earlier subframe; today's grants reach the children only
    // after everyone has computed.
    struct DownMessage {
        NodeId child;
        long target;
        LinkGrant grant;
    };
    std::vector<DownMessage> outbox;
    for (NodeId i = 0; i < topo_.num_nodes; ++i) {
        if (topo_.is_leaf(i)) continue;
        NodeState& node = nodes_[i];
        for (long t : target_subframes(topo_.height[i], s, topo_.depth)) {
            FinalScheduleStats stats;
            FinalSchedule schedule;
            if (i == kMacroId) {
                schedule = compute_final_schedule_macro(
                    node, topo_, n_d_, t, s, cfg_.enhancement, cfg_.packet_bits,
                    &stats);
                macro_slots_by_target_[t] = {stats.slots_before_widening,
                                             stats.slots_widened};
            } else {
                auto git = node.parent_grants.find(t);
                if (git == node.parent_grants.end())
                    throw EngineError(
                        "pipeline: node " + std::to_string(i) + " targets " +
                        std::to_string(t) + " at subframe " + std::to_string(s) +
                        " without a grant from its parent");
                const long received = node.parent_grant_received_at.at(t);
                if (received >= s)
                    throw EngineError(
                        "pipeline: node " + std::to_string(i) +
                        " would use a parent grant from subframe " +
                        std::to_string(received) + " while computing in " +
                        std::to_string(s));
                schedule = compute_final_schedule_nonleaf(
                    node, topo_, n_d_, t, s, git->second, cfg_.packet_bits,
                    &stats);
            }
            repairs_this_subframe_[i] += stats.placement_repairs;
            for (NodeId c : topo_.children[i]) {
                const LinkGrant* g = schedule.grant_for(c);
                LinkGrant out;
                if (g) {
                    out = *g;
                } else {
                    out.link = c;
                    out.alpha = topo_.links[c].alpha;
                }
                outbox.push_back({c, t, out});
            }
            if (cfg_.keep_schedule_log)
                for (const LinkGrant& g : schedule.grants)
                    log_.schedules.push_back({s, t, i, g.link, g.n_total,
                                              g.n_down, g.n_up, g.window_start,
                                              g.alpha,
                                              node.reports.at(g.link).nhat});
            node.schedules[t] = std::move(schedule);
        }
    }
    for (const DownMessage& m : outbox) {
        nodes_[m.child].parent_grants[m.target] = m.grant;
        nodes_[m.child].parent_grant_received_at[m.target] = s;
    }
}

void Engine::data_phase(long s) {
    bool pipelined = true;
    for (NodeId i = 0; i < topo_.num_nodes && pipelined; ++i) {
        if (topo_.is_leaf(i)) continue;
        auto it = nodes_[i].schedules.find(s);
        if (it == nodes_[i].schedules.end() || it->second.computed_at >= s)
            pipelined = false;
    }
    pipelined_.push_back(pipelined);

    // Fills are decided against the state at the start of the data phase;
    // every queue is drained by at most one grant, so applying the moves
    // afterwards cannot oversubscribe anything.
    std::vector<QueueState> snapshot;
    snapshot.reserve(nodes_.size());
    for (const NodeState& n : nodes_) snapshot.push_back(n.queues);

    std::vector<std::int64_t> dl_delivered(topo_.num_nodes, 0);
    std::vector<std::int64_t> ul_delivered(topo_.num_nodes, 0);

    auto drain = [](std::map<NodeId, std::int64_t>& queue, NodeId key,
                    std::int64_t count) {
        auto it = queue.find(key);
        if (it == queue.end() || it->second < count)
            throw EngineError("data phase: queue drained below zero");
        it->second -= count;
        if (it->second == 0) queue.erase(it);
    };

    for (NodeId i = 0; i < topo_.num_nodes; ++i) {
        if (topo_.is_leaf(i)) continue;
        auto it = nodes_[i].schedules.find(s);
        if (it == nodes_[i].schedules.end()) continue;
        for (const LinkGrant& g : it->second.grants) {
            const FillResult fill = fill_packets(snapshot[i], snapshot[g.link],
                                                 topo_, g.link, g.n_down, g.n_up);
            for (const auto& [dest, count] : fill.dl_take) {
                drain(nodes_[i].queues.dl, dest, count);
                if (dest == g.link)
                    dl_delivered[dest] += count;
                else
                    nodes_[g.link].queues.dl[dest] += count;
            }
            for (const auto& [src, count] : fill.ul_take) {
                drain(nodes_[g.link].queues.ul, src, count);
                if (i == kMacroId)
                    ul_delivered[src] += count;
                else
                    nodes_[i].queues.ul[src] += count;
            }
        }
    }

    for (NodeId i = 1; i < topo_.num_nodes; ++i) {
        if (cfg_.profiles[i].segments.empty()) continue;
        const ArrivalCounts counts =
            arrivals_for(cfg_.profiles[i], i, s, cfg_.arrivals, cfg_.seed,
                         cfg_.packet_bits, arrival_states_[i]);
        if (counts.dl_packets > 0)
            nodes_[kMacroId].queues.dl[i] += counts.dl_packets;
        if (counts.ul_packets > 0) nodes_[i].queues.ul[i] += counts.ul_packets;
    }

    MetricsRecord rec;
    rec.subframe = s;
    rec.dl_bits.resize(topo_.num_nodes, 0);
    rec.ul_bits.resize(topo_.num_nodes, 0);
    rec.queue_dl_packets.resize(topo_.num_nodes, 0);
    rec.queue_ul_packets.resize(topo_.num_nodes, 0);
    rec.reported_nhat.resize(topo_.num_nodes, 0);
    rec.placement_repairs.resize(topo_.num_nodes, 0);
    for (NodeId i = 0; i < topo_.num_nodes; ++i) {
        rec.dl_bits[i] = dl_delivered[i] * cfg_.packet_bits;
        rec.ul_bits[i] = ul_delivered[i] * cfg_.packet_bits;
        rec.queue_dl_packets[i] = nodes_[i].queues.dl_total();
        rec.queue_ul_packets[i] = nodes_[i].queues.ul_total();
        rec.reported_nhat[i] = nodes_[i].last_reported_nhat;
        rec.placement_repairs[i] = repairs_this_subframe_[i];
        rec.aggregate_bits += rec.dl_bits[i] + rec.ul_bits[i];
    }
    auto slots = macro_slots_by_target_.find(s);
    if (slots != macro_slots_by_target_.end()) {
        rec.macro_slots_witness = slots->second.first;
        rec.macro_slots_final = slots->second.second;
    }
    records_.push_back(std::move(rec));
    std::fill(repairs_this_subframe_.begin(), repairs_this_subframe_.end(), 0);
}

bool Engine::subframe_fully_pipelined(long s) const {
    if (s < 1 || s >= static_cast<long>(pipelined_.size())) return false;
    return pipelined_[s];
}

} // namespace bhsim
