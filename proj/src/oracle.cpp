#include "bhsim/optimizer.hpp"

namespace bhsim {

namespace {

// Slot-side constraints only: activity, per-link caps, interference pairs,
// parent reservation and the radio budget. The satisfaction fraction a grant
// supports is evaluated separately.
bool slots_fit(const ScheduleProblem& p, const std::vector<long>& n) {
    if (n.size() != p.links.size()) return false;
    long total = 0;
    for (size_t j = 0; j < n.size(); ++j) {
        const LinkEntry& l = p.links[j];
        if (!link_is_active(l)) {
            if (n[j] != 0) return false;
            continue;
        }
        if (n[j] < 1 || n[j] > l.upper_bound) return false;
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

// Largest fraction of every active link's effective demand covered by the
// grant. Links with nothing to serve impose no bound.
double supported_scale(const ScheduleProblem& p, const std::vector<long>& n) {
    double s = 1.0;
    for (size_t j = 0; j < n.size(); ++j) {
        const LinkEntry& l = p.links[j];
        std::int64_t eff = effective_demand(l);
        if (!link_is_active(l) || eff <= 0) continue;
        double cover = static_cast<double>(n[j]) * static_cast<double>(l.rate) /
                       static_cast<double>(eff);
        s = std::min(s, cover);
    }
    return s;
}

} // namespace

bool check_allocation(const ScheduleProblem& p, const std::vector<long>& n,
                      double scale) {
    if (!slots_fit(p, n)) return false;
    if (scale < 0.0 || scale > 1.0) return false;
    for (size_t j = 0; j < n.size(); ++j) {
        const LinkEntry& l = p.links[j];
        std::int64_t eff = effective_demand(l);
        if (!link_is_active(l) || eff <= 0) continue;
        double needed = scale * static_cast<double>(eff) /
                        static_cast<double>(l.rate);
        if (n[j] < ceil_slots(needed)) return false;
    }
    return true;
}

ScheduleSolution oracle_enumerate(const ScheduleProblem& p) {
    validate_problem(p);
    const size_t m = p.links.size();

    double points = 1.0;
    for (const LinkEntry& l : p.links) points *= static_cast<double>(l.upper_bound + 1);
    if (points > 1e7)
        throw OracleOverflowError("oracle: grant space exceeds 1e7 points");

    ScheduleSolution best;
    best.scale = -1.0;
    std::vector<long> n(m, 0);

    // Odometer enumeration, last index fastest, so grants appear in ascending
    // lexicographic order and the first optimum found is the smallest one.
    bool done = false;
    while (!done) {
        if (slots_fit(p, n)) {
            double s = supported_scale(p, n);
            long total = 0;
            for (long v : n) total += v;
            if (s > best.scale ||
                (s == best.scale && total > best.objective_slots)) {
                best.scale = s;
                best.objective_slots = total;
                best.slots = n;
            }
        }
        size_t j = m;
        while (true) {
            if (j == 0) {
                done = true;
                break;
            }
            --j;
            if (n[j] < p.links[j].upper_bound) {
                ++n[j];
                break;
            }
            n[j] = 0;
        }
    }

    if (best.scale < 0.0)
        throw InfeasibleError("oracle: no grant satisfies the constraints");
    return best;
}

} // namespace bhsim
