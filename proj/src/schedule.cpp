#include "bhsim/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace bhsim {

namespace {

std::vector<int> side_slots(const LinkGrant& g, int first_offset) {
    std::vector<int> out;
    if (g.window_start < 0) return out;
    out.reserve(g.n_total);
    if (g.alpha == 1) {
        for (long k = 0; k < g.n_total; ++k)
            out.push_back(static_cast<int>(g.window_start + k));
    } else {
        for (long k = 0; k < g.n_total; ++k)
            out.push_back(static_cast<int>(g.window_start + 2 * k + first_offset));
    }
    return out;
}

bool windows_overlap(long start_a, long span_a, long start_b, long span_b) {
    return start_a < start_b + span_b && start_b < start_a + span_a;
}

} // namespace

std::vector<int> scheduler_side_slots(const LinkGrant& g) { return side_slots(g, 0); }

std::vector<int> child_side_slots(const LinkGrant& g) {
    return side_slots(g, g.alpha == 2 ? 1 : 0);
}

std::pair<long, long> split_directions(long n_total, std::int64_t queue_down,
                                       std::int64_t queue_up) {
    if (n_total < 0) throw EngineError("split: negative slot count");
    if (queue_down < 0 || queue_up < 0) throw EngineError("split: negative backlog");
    if (n_total == 0) return {0, 0};
    std::int64_t total = queue_down + queue_up;
    if (total == 0)
        throw EngineError("split: slots granted against empty backlogs");

    double share = static_cast<double>(n_total) * static_cast<double>(queue_down) /
                   static_cast<double>(total);
    long n_down = static_cast<long>(std::floor(share + 0.5));
    if (n_total >= 2 && queue_down > 0 && queue_up > 0) {
        n_down = std::max(1L, std::min(n_down, n_total - 1));
    }
    n_down = std::max(0L, std::min(n_down, n_total));
    return {n_down, n_total - n_down};
}

std::map<NodeId, std::int64_t> apportion_largest_remainder(
    std::int64_t quota, const std::map<NodeId, std::int64_t>& sizes) {
    std::map<NodeId, std::int64_t> take;
    std::int64_t total = 0;
    for (const auto& [id, size] : sizes) {
        if (size < 0) throw EngineError("apportion: negative queue size");
        total += size;
    }
    if (quota <= 0 || total == 0) return take;
    if (quota >= total) {
        for (const auto& [id, size] : sizes)
            if (size > 0) take[id] = size;
        return take;
    }

    std::int64_t assigned = 0;
    std::vector<std::pair<std::int64_t, NodeId>> remainders;
    for (const auto& [id, size] : sizes) {
        std::int64_t base = quota * size / total;
        if (base > 0) take[id] = base;
        assigned += base;
        std::int64_t rem = quota * size % total;
        if (rem > 0) remainders.emplace_back(rem, id);
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
              });
    for (const auto& [rem, id] : remainders) {
        if (assigned == quota) break;
        ++take[id];
        ++assigned;
    }
    return take;
}

long place_slots(std::vector<LinkGrant>& grants, const PlacementInput& in) {
    if (!in.interference) throw EngineError("placement: missing interference data");
    const int n_d = in.n_d;
    long repairs = 0;

    // Radio busy counts contributed by the node's own parent link, which was
    // placed by the parent and cannot move.
    std::vector<int> base_busy(n_d, 0);
    if (in.parent_grant) {
        for (int s : child_side_slots(*in.parent_grant)) {
            if (s < 0 || s >= n_d) throw EngineError("placement: parent window out of range");
            ++base_busy[s];
        }
    }

    while (true) {
        std::vector<size_t> order;
        for (size_t i = 0; i < grants.size(); ++i)
            if (grants[i].n_total > 0) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            long span_a = static_cast<long>(grants[a].alpha) * grants[a].n_total;
            long span_b = static_cast<long>(grants[b].alpha) * grants[b].n_total;
            if (span_a != span_b) return span_a > span_b;
            return grants[a].link < grants[b].link;
        });

        std::vector<int> busy = base_busy;
        std::vector<size_t> placed;
        bool all_placed = true;
        for (size_t idx : order) {
            LinkGrant& g = grants[idx];
            long span = static_cast<long>(g.alpha) * g.n_total;
            long found = -1;
            for (long start = 0; start + span <= n_d; ++start) {
                bool fits = true;
                if (in.parent_grant &&
                    in.interference->interferes(g.link, in.self) &&
                    windows_overlap(start, span, in.parent_grant->window_start,
                                    static_cast<long>(in.parent_grant->alpha) *
                                        in.parent_grant->n_total)) {
                    fits = false;
                }
                for (size_t pi : placed) {
                    if (!fits) break;
                    const LinkGrant& other = grants[pi];
                    if (in.interference->interferes(g.link, other.link) &&
                        windows_overlap(start, span, other.window_start,
                                        static_cast<long>(other.alpha) * other.n_total))
                        fits = false;
                }
                if (fits) {
                    LinkGrant probe = g;
                    probe.window_start = start;
                    for (int s : scheduler_side_slots(probe)) {
                        if (busy[s] + 1 > in.radio_chains) {
                            fits = false;
                            break;
                        }
                    }
                }
                if (fits) {
                    found = start;
                    break;
                }
            }
            if (found < 0) {
                ++repairs;
                --g.n_total;
                g.window_start = -1;
                all_placed = false;
                break;
            }
            g.window_start = found;
            for (int s : scheduler_side_slots(g)) ++busy[s];
            placed.push_back(idx);
        }
        if (all_placed) break;
    }

    for (LinkGrant& g : grants)
        if (g.n_total == 0) g.window_start = -1;
    return repairs;
}

} // namespace bhsim
