#include "bhsim/optimizer.hpp"

#include <numeric>

namespace bhsim {

namespace {

// Minimal grant supporting fraction `scale`: an active link needs enough
// slots to cover scale * effective demand, and never fewer than one.
std::vector<long> minimal_grant(const ScheduleProblem& p, double scale) {
    std::vector<long> n(p.links.size(), 0);
    for (size_t j = 0; j < p.links.size(); ++j) {
        const LinkEntry& l = p.links[j];
        if (!link_is_active(l)) continue;
        double needed = scale * static_cast<double>(effective_demand(l)) /
                        static_cast<double>(l.rate);
        n[j] = std::max(1L, ceil_slots(needed));
    }
    return n;
}

bool grant_fits(const ScheduleProblem& p, const std::vector<long>& n) {
    long total = 0;
    for (size_t j = 0; j < n.size(); ++j) {
        const LinkEntry& l = p.links[j];
        if (n[j] > l.upper_bound) return false;
        if (static_cast<long>(l.alpha) * n[j] > p.n_d) return false;
        total += n[j];
    }
    if (total > p.radio_budget) return false;
    for (auto [a, b] : p.interference) {
        long span = static_cast<long>(p.links[a].alpha) * n[a] +
                    static_cast<long>(p.links[b].alpha) * n[b];
        if (span > p.n_d) return false;
    }
    if (p.reservation) {
        const ParentReservation& res = *p.reservation;
        long free_span = p.n_d - static_cast<long>(res.alpha) * res.slots;
        for (size_t j = 0; j < n.size(); ++j)
            if (res.interferes[j] &&
                static_cast<long>(p.links[j].alpha) * n[j] > free_span)
                return false;
    }
    return true;
}

// Branch-and-bound state for the slot-count maximization pass.
struct SlotMax {
    const ScheduleProblem& p;
    size_t m;
    std::vector<long> lb;        // per-entry floor from the fixed fraction
    std::vector<long> ub;        // static cap: upper_bound, slot span, reservation
    std::vector<long> lb_suffix; // sum of lb over entries >= index
    std::vector<std::vector<int>> earlier_nbr; // interfering entries with smaller index
    std::vector<std::uint8_t> suffix_coupled;  // interference pair fully inside suffix
    std::vector<long> cur;
    std::vector<long> best;
    long best_sum = -1;

    explicit SlotMax(const ScheduleProblem& prob) : p(prob), m(prob.links.size()) {}

    long pair_cap(int fixed_idx, size_t k) const {
        long used = static_cast<long>(p.links[fixed_idx].alpha) * cur[fixed_idx];
        return (p.n_d - used) / p.links[k].alpha;
    }

    // Cap on entry k given every entry before `level` is fixed in cur.
    long capped_ub(size_t k, size_t level) const {
        long hi = ub[k];
        for (int j : earlier_nbr[k])
            if (static_cast<size_t>(j) < level) hi = std::min(hi, pair_cap(j, k));
        return hi;
    }

    void dfs(size_t level, long partial) {
        if (level == m) {
            if (partial > best_sum) {
                best_sum = partial;
                best = cur;
            }
            return;
        }

        // Entries from here on only constrain each other through the budget
        // once no interference pair lies fully inside the suffix; the best
        // completion is then directly constructible.
        if (!suffix_coupled[level]) {
            long total_ub = 0;
            std::vector<long> hi(m - level);
            for (size_t k = level; k < m; ++k) {
                hi[k - level] = capped_ub(k, level);
                if (hi[k - level] < lb[k]) return;
                total_ub += hi[k - level];
            }
            long take = std::min(total_ub, p.radio_budget - partial);
            if (take < lb_suffix[level]) return;
            if (partial + take <= best_sum) return;
            // Lexicographically smallest completion reaching `take`.
            long remaining = take;
            long tail_ub = total_ub;
            for (size_t k = level; k < m; ++k) {
                tail_ub -= hi[k - level];
                cur[k] = std::max(lb[k], remaining - tail_ub);
                remaining -= cur[k];
            }
            best_sum = partial + take;
            best = cur;
            return;
        }

        long hi = capped_ub(level, level);
        hi = std::min(hi, p.radio_budget - partial - lb_suffix[level + 1]);
        for (long v = lb[level]; v <= hi; ++v) {
            cur[level] = v;
            long optimistic = 0;
            for (size_t k = level + 1; k < m; ++k)
                optimistic += capped_ub(k, level + 1);
            optimistic = std::min(optimistic, p.radio_budget - partial - v);
            if (partial + v + optimistic > best_sum) dfs(level + 1, partial + v);
        }
        cur[level] = 0;
    }
};

} // namespace

void validate_problem(const ScheduleProblem& p) {
    if (p.n_d < 1) throw ConfigError("problem: n_d must be >= 1");
    if (p.radio_budget < 0) throw ConfigError("problem: radio budget must be >= 0");
    const int m = static_cast<int>(p.links.size());
    for (const LinkEntry& l : p.links) {
        if (l.demand < 0) throw ConfigError("problem: demand must be >= 0");
        if (l.queue < -1) throw ConfigError("problem: queue must be >= 0 or -1");
        if (l.rate < 1) throw ConfigError("problem: rate must be >= 1");
        if (l.alpha != 1 && l.alpha != 2) throw ConfigError("problem: alpha must be 1 or 2");
        if (l.upper_bound < 1 || l.upper_bound > p.n_d)
            throw ConfigError("problem: upper bound must lie in [1, n_d]");
    }
    for (auto [a, b] : p.interference)
        if (a < 0 || a >= m || b < 0 || b >= m || a == b)
            throw ConfigError("problem: interference pair indices out of range");
    if (p.reservation) {
        const ParentReservation& res = *p.reservation;
        if (res.alpha != 1 && res.alpha != 2)
            throw ConfigError("problem: reservation alpha must be 1 or 2");
        if (res.slots < 0 || static_cast<long>(res.alpha) * res.slots > p.n_d)
            throw ConfigError("problem: reservation exceeds the subframe");
        if (res.interferes.size() != p.links.size())
            throw ConfigError("problem: reservation flag count mismatch");
    }
}

ScheduleSolution solve_max_scale(const ScheduleProblem& p) {
    validate_problem(p);

    bool any_active = false;
    for (const LinkEntry& l : p.links)
        if (link_is_active(l)) any_active = true;
    if (!any_active) {
        ScheduleSolution sol;
        sol.scale = 1.0;
        sol.slots.assign(p.links.size(), 0);
        return sol;
    }

    // The optimum sits on a breakpoint where some link's slot need increments;
    // between breakpoints the minimal grant, and with it feasibility, cannot
    // change. Candidates are evaluated best first.
    std::vector<double> candidates{1.0};
    for (const LinkEntry& l : p.links) {
        std::int64_t eff = effective_demand(l);
        if (!link_is_active(l) || eff <= 0) continue;
        for (long v = 1; v <= p.n_d; ++v) {
            double s = static_cast<double>(v) * static_cast<double>(l.rate) /
                       static_cast<double>(eff);
            if (s < 1.0) candidates.push_back(s);
        }
    }
    std::sort(candidates.begin(), candidates.end(), std::greater<double>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    for (double s : candidates) {
        std::vector<long> n = minimal_grant(p, s);
        if (grant_fits(p, n)) {
            ScheduleSolution sol;
            sol.scale = s;
            sol.objective_slots = std::accumulate(n.begin(), n.end(), 0L);
            sol.slots = std::move(n);
            return sol;
        }
    }
    throw InfeasibleError("schedule: cannot grant every active link a slot");
}

ScheduleSolution solve_max_slots(const ScheduleProblem& p, double scale) {
    validate_problem(p);
    if (scale < 0.0 || scale > 1.0)
        throw ConfigError("slot maximization: scale must lie in [0, 1]");

    SlotMax bb(p);
    bb.lb = minimal_grant(p, scale);
    bb.ub.resize(bb.m);
    for (size_t j = 0; j < bb.m; ++j) {
        const LinkEntry& l = p.links[j];
        if (!link_is_active(l)) {
            bb.ub[j] = 0;
            continue;
        }
        long hi = std::min(l.upper_bound,
                           static_cast<long>(p.n_d) / l.alpha);
        if (p.reservation && p.reservation->interferes[j]) {
            long free_span = p.n_d - static_cast<long>(p.reservation->alpha) *
                                         p.reservation->slots;
            hi = std::min(hi, free_span / l.alpha);
        }
        bb.ub[j] = hi;
    }
    bb.lb_suffix.assign(bb.m + 1, 0);
    for (size_t j = bb.m; j > 0; --j)
        bb.lb_suffix[j - 1] = bb.lb_suffix[j] + bb.lb[j - 1];

    bb.earlier_nbr.assign(bb.m, {});
    bb.suffix_coupled.assign(bb.m + 1, 0);
    for (auto [a, b] : p.interference) {
        int lo = std::min(a, b), hi = std::max(a, b);
        bb.earlier_nbr[hi].push_back(lo);
        // The pair couples every suffix starting at or before its low index.
        for (int k = 0; k <= lo; ++k) bb.suffix_coupled[k] = 1;
    }

    bb.cur.assign(bb.m, 0);
    bb.dfs(0, 0);
    if (bb.best_sum < 0)
        throw ConfigError("slot maximization: the given scale is infeasible");

    ScheduleSolution sol;
    sol.scale = scale;
    sol.slots = std::move(bb.best);
    sol.objective_slots = bb.best_sum;
    return sol;
}

} // namespace bhsim
