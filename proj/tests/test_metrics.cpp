#include <doctest.h>

#include <vector>

#include "bhsim/metrics.hpp"

using namespace bhsim;

TEST_CASE("metrics: jain index on the pinned examples") {
    CHECK(jain_index({5, 5, 5, 5}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jain_index({1, 3}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(jain_index({1, 0, 0, 0}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("metrics: jain index is scale invariant and bounded") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> scaled;
    for (double v : x) scaled.push_back(v * 733.25);
    CHECK(jain_index(x) == doctest::Approx(jain_index(scaled)).epsilon(1e-12));
    CHECK(jain_index(x) <= 1.0);
    CHECK(jain_index(x) >= 1.0 / static_cast<double>(x.size()));
}

TEST_CASE("metrics: jain index rejects degenerate input") {
    CHECK_THROWS_AS(jain_index({}), ConfigError);
    CHECK_THROWS_AS(jain_index({0, 0, 0}), ConfigError);
    CHECK_THROWS_AS(jain_index({1, -1}), ConfigError);
}

TEST_CASE("metrics: window average") {
    CHECK(window_average({3, 1, 4, 1, 5}, 1) == std::vector<double>{3, 1, 4, 1, 5});
    CHECK(window_average({7, 7, 7}, 3) == std::vector<double>{7, 7, 7});
    CHECK(window_average({0, 0, 4, 4}, 2) == std::vector<double>{0, 0, 2, 4});
}

TEST_CASE("metrics: tracking latency on an instant jump is zero") {
    std::vector<double> series{10, 10, 10, 20, 20, 20, 20, 20, 20, 20};
    CHECK(tracking_latency(series, 3, 10, 20, 0.10, 3) == 0);
}

TEST_CASE("metrics: tracking latency counts the out-of-band ramp") {
    // Five points still outside the 10% band around the new level of 20
    // (anything below 18), then settled; latency is 5 with dwell 3.
    std::vector<double> series{10, 10, 10, 10, 10, 10, 12, 14, 16, 17.9,
                               20, 20, 20, 20, 20};
    CHECK(tracking_latency(series, 5, 10, 20, 0.10, 3) == 5);
}

TEST_CASE("metrics: tracking latency reports no convergence") {
    std::vector<double> flat{10, 10, 10, 10, 10, 10, 10, 10};
    CHECK(tracking_latency(flat, 3, 10, 20, 0.10, 3) == kNoConvergence);
}

TEST_CASE("metrics: tracking latency validates its inputs") {
    std::vector<double> s{1, 2, 3, 4};
    CHECK_THROWS_AS(tracking_latency(s, 9, 1, 2, 0.1, 3), ConfigError);
    CHECK_THROWS_AS(tracking_latency(s, 1, 2, 2, 0.1, 3), ConfigError);
    CHECK_THROWS_AS(tracking_latency(s, 1, 1, 2, 0.1, 0), ConfigError);
}

TEST_CASE("metrics: csv layout is one node row per subframe plus aggregate") {
    MetricsRecord a;
    a.subframe = 1;
    a.dl_bits = {0, 100};
    a.ul_bits = {50, 0};
    a.queue_dl_packets = {2, 0};
    a.queue_ul_packets = {0, 3};
    a.reported_nhat = {0, 4};
    a.placement_repairs = {0, 0};
    a.aggregate_bits = 150;

    MetricsRecord b = a;
    b.subframe = 2;
    b.dl_bits = {0, 60};
    b.aggregate_bits = 110;

    const std::string csv = metrics_to_csv({a, b});
    const std::string expected =
        "subframe,node,dl_bits,ul_bits,queue_dl_packets,queue_ul_packets,"
        "reported_nhat,placement_repairs\n"
        "1,0,0,50,2,0,0,0\n"
        "1,1,100,0,0,3,4,0\n"
        "1,-1,100,50,2,3,0,0\n"
        "2,0,0,50,2,0,0,0\n"
        "2,1,60,0,0,3,4,0\n"
        "2,-1,60,50,2,3,0,0\n";
    CHECK(csv == expected);
}
