#pragma once

#include <deque>

#include "bhsim/types.hpp"

namespace bhsim {

// Damps the per-subframe desired-slot sequence a BS sends its parent. A
// sliding window of recent raw values is kept; once the window has filled,
// the advertised value only moves when the window mean deviates from it by
// more than `threshold` of the advertised value, and then snaps to the
// rounded mean. A zero threshold disables damping: the advertised value
// tracks the rounded window mean every subframe. While the window is still
// filling, raw values pass through unchanged.
class ReportingFilter {
public:
    ReportingFilter() : ReportingFilter(1, 0.0) {}
    ReportingFilter(int window, double threshold);

    // Feeds the newest raw value and returns the advertised one.
    long update(long raw);

    long reported() const { return reported_; }
    int window() const { return window_; }

private:
    int window_ = 1;
    double threshold_ = 0.0;
    std::deque<long> values_;
    long reported_ = 0;
    bool primed_ = false;
};

} // namespace bhsim
