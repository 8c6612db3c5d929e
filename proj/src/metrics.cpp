#include "bhsim/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bhsim {

double jain_index(const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("fairness: no values given");
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        if (v < 0.0) throw ConfigError("fairness: values must be >= 0");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) throw ConfigError("fairness: undefined for all-zero values");
    return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

std::vector<double> window_average(const std::vector<double>& series, int window) {
    if (window < 1) throw ConfigError("smoothing: window must be >= 1");
    std::vector<double> out(series.size());
    double running = 0.0;
    for (size_t i = 0; i < series.size(); ++i) {
        running += series[i];
        if (i >= static_cast<size_t>(window)) running -= series[i - window];
        size_t span = std::min(i + 1, static_cast<size_t>(window));
        out[i] = running / static_cast<double>(span);
    }
    return out;
}

long tracking_latency(const std::vector<double>& series, size_t step_index,
                      double old_level, double new_level, double band,
                      int dwell, int smooth_window) {
    if (step_index >= series.size())
        throw ConfigError("tracking: step index outside the series");
    if (old_level == new_level)
        throw ConfigError("tracking: levels must differ");
    if (dwell < 1) throw ConfigError("tracking: dwell must be >= 1");

    std::vector<double> smooth = window_average(series, smooth_window);
    double tol = band * std::abs(new_level);
    for (size_t i = step_index; i + dwell <= smooth.size(); ++i) {
        bool settled = true;
        for (size_t k = i; k < i + static_cast<size_t>(dwell); ++k) {
            if (std::abs(smooth[k] - new_level) > tol) {
                settled = false;
                break;
            }
        }
        if (settled) return static_cast<long>(i - step_index);
    }
    return kNoConvergence;
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
    std::ostringstream out;
    out << "subframe,node,dl_bits,ul_bits,queue_dl_packets,queue_ul_packets,"
           "reported_nhat,placement_repairs\n";
    for (const MetricsRecord& rec : records) {
        std::int64_t dl_sum = 0, ul_sum = 0, qd_sum = 0, qu_sum = 0;
        long rep_sum = 0;
        for (size_t node = 0; node < rec.dl_bits.size(); ++node) {
            out << rec.subframe << ',' << node << ',' << rec.dl_bits[node]
                << ',' << rec.ul_bits[node] << ',' << rec.queue_dl_packets[node]
                << ',' << rec.queue_ul_packets[node] << ','
                << rec.reported_nhat[node] << ',' << rec.placement_repairs[node]
                << '\n';
            dl_sum += rec.dl_bits[node];
            ul_sum += rec.ul_bits[node];
            qd_sum += rec.queue_dl_packets[node];
            qu_sum += rec.queue_ul_packets[node];
            rep_sum += rec.placement_repairs[node];
        }
        out << rec.subframe << ",-1," << dl_sum << ',' << ul_sum << ','
            << qd_sum << ',' << qu_sum << ",0," << rep_sum << '\n';
    }
    return out.str();
}

} // namespace bhsim
