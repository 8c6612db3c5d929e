#include "bhsim/reporting.hpp"

#include <cmath>
#include <numeric>

namespace bhsim {

namespace {

long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5)); }

} // namespace

ReportingFilter::ReportingFilter(int window, double threshold)
    : window_(window), threshold_(threshold) {
    if (window < 1) throw ConfigError("filter: window must be >= 1");
    if (threshold < 0.0) throw ConfigError("filter: threshold must be >= 0");
}

long ReportingFilter::update(long raw) {
    values_.push_back(raw);
    if (static_cast<int>(values_.size()) > window_) values_.pop_front();

    double mean = static_cast<double>(std::accumulate(values_.begin(),
                                                      values_.end(), 0L)) /
                  static_cast<double>(values_.size());
    if (threshold_ == 0.0) {
        reported_ = round_half_up(mean);
    } else if (!primed_ || static_cast<int>(values_.size()) < window_) {
        reported_ = raw;
        primed_ = true;
    } else if (std::abs(static_cast<double>(reported_) - mean) >
               threshold_ * static_cast<double>(reported_)) {
        // Deviation is judged against the advertised value, so a stale
        // advertisement keeps re-triggering until it has caught up with the
        // window mean; judging against the mean would go quiet as soon as
        // the mean converges, freezing the advertisement wherever it was.
        reported_ = round_half_up(mean);
    }
    return reported_;
}

} // namespace bhsim
