#include "bhsim/schedule_log.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "bhsim/types.hpp"

namespace bhsim {

std::string write_schedule_log(const TreeTopology& topo, int n_d,
                               const ScheduleLogData& log) {
    std::ostringstream out;
    out << "ndata " << n_d << "\n";
    out << serialize_topology(topo);
    for (const ReportEvent& r : log.reports)
        out << "report " << r.subframe << ' ' << r.node << ' ' << r.nhat << "\n";
    for (const SchedEvent& e : log.schedules)
        out << "sched " << e.computed_at << ' ' << e.target << ' ' << e.node
            << ' ' << e.child << ' ' << e.n_total << ' ' << e.n_down << ' '
            << e.n_up << ' ' << e.window_start << ' ' << e.alpha << ' '
            << e.cap << "\n";
    return out.str();
}

namespace {

// Slot indices the attached physical link actually transmits in. Kept local
// so the checker does not lean on the scheduler's own expansion code.
std::vector<long> replay_active_slots(long window_start, long n, int alpha,
                                      bool child_side) {
    std::vector<long> slots;
    if (alpha == 1) {
        for (long k = 0; k < n; ++k) slots.push_back(window_start + k);
    } else {
        const long offset = child_side ? 1 : 0;
        for (long k = 0; k < n; ++k)
            slots.push_back(window_start + offset + 2 * k);
    }
    return slots;
}

bool windows_disjoint(const SchedEvent& a, const SchedEvent& b) {
    const long a_end = a.window_start + static_cast<long>(a.alpha) * a.n_total;
    const long b_end = b.window_start + static_cast<long>(b.alpha) * b.n_total;
    return a_end <= b.window_start || b_end <= a.window_start;
}

std::string where(const SchedEvent& e) {
    std::ostringstream out;
    out << "subframe " << e.target << " node " << e.node << " child "
        << e.child;
    return out.str();
}

} // namespace

std::vector<std::string> validate_schedule_log(const std::string& text,
                                               std::size_t* report_count,
                                               std::size_t* schedule_count) {
    std::vector<std::string> violations;
    if (report_count) *report_count = 0;
    if (schedule_count) *schedule_count = 0;

    std::vector<ReportEvent> reports;
    std::vector<SchedEvent> scheds;
    std::string topo_text;
    long n_d = -1;

    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "ndata") {
            ls >> n_d;
        } else if (tag == "nodes" || tag == "node" || tag == "pair") {
            topo_text += line;
            topo_text += '\n';
        } else if (tag == "report") {
            ReportEvent r;
            ls >> r.subframe >> r.node >> r.nhat;
            reports.push_back(r);
        } else if (tag == "sched") {
            SchedEvent e;
            ls >> e.computed_at >> e.target >> e.node >> e.child >> e.n_total >>
                e.n_down >> e.n_up >> e.window_start >> e.alpha >> e.cap;
            scheds.push_back(e);
        } else {
            ls.setstate(std::ios::failbit);
        }
        if (ls.fail()) {
            violations.push_back("line " + std::to_string(line_no) +
                                 ": malformed record: " + line);
            return violations;
        }
    }

    if (report_count) *report_count = reports.size();
    if (schedule_count) *schedule_count = scheds.size();

    if (n_d < 1) {
        violations.push_back("header: missing or non-positive data slot count");
        return violations;
    }
    TreeTopology topo;
    try {
        topo = parse_topology(topo_text);
    } catch (const std::exception& ex) {
        violations.push_back(std::string("topology: ") + ex.what());
        return violations;
    }

    // Advertised values, per node in delivery order.
    std::map<NodeId, std::vector<ReportEvent>> by_node;
    for (const ReportEvent& r : reports) {
        if (r.node < 1 || r.node >= topo.num_nodes) {
            violations.push_back("report at subframe " +
                                 std::to_string(r.subframe) +
                                 ": unknown or macro node " +
                                 std::to_string(r.node));
            continue;
        }
        if (r.nhat < 0 || r.nhat > n_d)
            violations.push_back("report at subframe " +
                                 std::to_string(r.subframe) + " node " +
                                 std::to_string(r.node) +
                                 ": advertised value outside [0, n_d]");
        auto& list = by_node[r.node];
        if (!list.empty() && list.back().subframe == r.subframe)
            violations.push_back("report at subframe " +
                                 std::to_string(r.subframe) + " node " +
                                 std::to_string(r.node) +
                                 ": duplicate report in one subframe");
        list.push_back(r);
    }
    for (auto& [node, list] : by_node)
        std::stable_sort(list.begin(), list.end(),
                         [](const ReportEvent& a, const ReportEvent& b) {
                             return a.subframe < b.subframe;
                         });

    // The advertised value in force when a schedule was computed: reports go
    // up in the first control slot, schedules are computed in the second, so
    // a report from the same subframe is already visible.
    auto cap_in_force = [&](NodeId child, long computed_at) -> const ReportEvent* {
        auto it = by_node.find(child);
        if (it == by_node.end()) return nullptr;
        const ReportEvent* best = nullptr;
        for (const ReportEvent& r : it->second) {
            if (r.subframe > computed_at) break;
            best = &r;
        }
        return best;
    };

    std::map<std::pair<NodeId, long>, std::vector<const SchedEvent*>> groups;
    for (const SchedEvent& e : scheds) {
        if (e.node < 0 || e.node >= topo.num_nodes || e.child < 1 ||
            e.child >= topo.num_nodes || topo.parent[e.child] != e.node) {
            violations.push_back(where(e) + ": grant on a non-existent link");
            continue;
        }
        if (e.alpha != topo.links[e.child].alpha)
            violations.push_back(where(e) + ": expansion factor mismatch");
        if (e.n_total < 1)
            violations.push_back(where(e) + ": non-positive grant logged");
        if (e.n_down < 0 || e.n_up < 0 || e.n_down + e.n_up != e.n_total)
            violations.push_back(where(e) + ": direction split does not add up");
        if (e.window_start < 0 ||
            e.window_start + static_cast<long>(e.alpha) * e.n_total > n_d)
            violations.push_back(where(e) + ": window outside the data slots");
        if (e.target < e.computed_at)
            violations.push_back(where(e) + ": computed after its own subframe");

        const ReportEvent* cap = cap_in_force(e.child, e.computed_at);
        if (!cap) {
            violations.push_back(where(e) + ": grant before any report");
        } else {
            if (cap->nhat != e.cap)
                violations.push_back(where(e) +
                                     ": logged cap disagrees with the report");
            if (e.n_total > cap->nhat)
                violations.push_back(where(e) + ": grant exceeds advertised cap");
        }

        auto& group = groups[{e.node, e.target}];
        for (const SchedEvent* other : group)
            if (other->child == e.child)
                violations.push_back(where(e) + ": duplicate grant");
        group.push_back(&e);
    }

    for (const auto& [key, group] : groups) {
        const auto [node, target] = key;

        for (std::size_t a = 0; a + 1 < group.size(); ++a)
            for (std::size_t b = a + 1; b < group.size(); ++b)
                if (topo.interference.interferes(group[a]->child, group[b]->child) &&
                    !windows_disjoint(*group[a], *group[b]))
                    violations.push_back(
                        where(*group[a]) + ": window overlaps interfering child " +
                        std::to_string(group[b]->child));

        // The grant this node itself received for the same subframe, if any.
        const SchedEvent* own = nullptr;
        if (node != kMacroId) {
            auto it = groups.find({topo.parent[node], target});
            if (it != groups.end())
                for (const SchedEvent* e : it->second)
                    if (e->child == node) own = e;
        }

        std::map<long, int> busy;
        for (const SchedEvent* e : group) {
            if (own) {
                if (own->computed_at >= e->computed_at)
                    violations.push_back(where(*e) +
                                         ": computed before the parent grant");
                if (topo.interference.interferes(e->child, node) &&
                    !windows_disjoint(*e, *own))
                    violations.push_back(where(*e) +
                                         ": window overlaps the parent window");
            }
            for (long s : replay_active_slots(e->window_start, e->n_total,
                                              e->alpha, false))
                ++busy[s];
        }
        if (own)
            for (long s : replay_active_slots(own->window_start, own->n_total,
                                              own->alpha, true))
                ++busy[s];
        for (const auto& [slot, count] : busy)
            if (count > topo.radio_chains[node]) {
                violations.push_back("subframe " + std::to_string(target) +
                                     " node " + std::to_string(node) + ": slot " +
                                     std::to_string(slot) +
                                     " uses more radio chains than exist");
                break;
            }
    }

    return violations;
}

} // namespace bhsim
