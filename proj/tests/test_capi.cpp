#include "doctest.h"

#include <cstring>
#include <string>

#include "bhsim.h"

namespace {

const char* const kConfig = R"({
    "topology":{"generate":{"num_nodes":5,"seed":3},"preset":"MI-ER"},
    "num_subframes":30,
    "schedule_log":true,
    "output":"capi-out",
    "demand":{"default":{"dl_gbps":0.4,"ul_gbps":0.2}}
})";

struct Sim {
    bhsim_sim* handle = nullptr;
    ~Sim() { bhsim_sim_destroy(handle); }
};

struct Str {
    char* p = nullptr;
    ~Str() { bhsim_free_string(p); }
    std::string view() const { return p ? std::string(p) : std::string(); }
};

} // namespace

TEST_CASE("capi: create, run, inspect, destroy") {
    Sim sim;
    REQUIRE(bhsim_sim_create(kConfig, &sim.handle) == BHSIM_OK);
    REQUIRE(sim.handle != nullptr);
    CHECK(bhsim_sim_subframes_done(sim.handle) == 0);
    CHECK(bhsim_sim_tree_height(sim.handle) >= 2);

    CHECK(bhsim_sim_run(sim.handle) == BHSIM_OK);
    CHECK(bhsim_sim_subframes_done(sim.handle) == 30);

    long long dl = 0, ul = 0;
    REQUIRE(bhsim_sim_delivered_bits(sim.handle, &dl, &ul) == BHSIM_OK);
    CHECK(dl > 0);
    CHECK(ul > 0);

    double dl_gbps = 0, ul_gbps = 0;
    REQUIRE(bhsim_sim_throughput_gbps(sim.handle, &dl_gbps, &ul_gbps) ==
            BHSIM_OK);
    // 30 subframes of 0.1 ms: Gbps = bits / 3e6.
    CHECK(dl_gbps == doctest::Approx(static_cast<double>(dl) / 3.0e6));
    CHECK(ul_gbps == doctest::Approx(static_cast<double>(ul) / 3.0e6));

    Str metrics;
    REQUIRE(bhsim_sim_metrics_csv(sim.handle, &metrics.p) == BHSIM_OK);
    CHECK(metrics.view().rfind("subframe,", 0) == 0);

    Str queues;
    REQUIRE(bhsim_sim_queue_csv(sim.handle, &queues.p) == BHSIM_OK);
    CHECK(queues.view().rfind("node,dl_packets,ul_packets\n", 0) == 0);

    Str hint;
    REQUIRE(bhsim_sim_output_hint(sim.handle, &hint.p) == BHSIM_OK);
    CHECK(hint.view() == "capi-out");
}

TEST_CASE("capi: the schedule log replays cleanly through the checker") {
    Sim sim;
    REQUIRE(bhsim_sim_create(kConfig, &sim.handle) == BHSIM_OK);
    REQUIRE(bhsim_sim_run(sim.handle) == BHSIM_OK);

    Str log;
    REQUIRE(bhsim_sim_schedule_log(sim.handle, &log.p) == BHSIM_OK);
    CHECK(log.view().rfind("ndata ", 0) == 0);

    Str report;
    long violations = -1, reports = 0, grants = 0;
    REQUIRE(bhsim_validate_log(log.p, &report.p, &violations, &reports,
                               &grants) == BHSIM_OK);
    CHECK(violations == 0);
    CHECK(report.view().empty());
    CHECK(reports > 0);
    CHECK(grants > 0);
}

TEST_CASE("capi: the schedule log is refused when not recorded") {
    Sim sim;
    const std::string quiet = R"({
        "topology":{"generate":{"num_nodes":4,"seed":1}},
        "num_subframes":5})";
    REQUIRE(bhsim_sim_create(quiet.c_str(), &sim.handle) == BHSIM_OK);
    REQUIRE(bhsim_sim_run(sim.handle) == BHSIM_OK);

    Str log;
    CHECK(bhsim_sim_schedule_log(sim.handle, &log.p) == BHSIM_ERR_ARGUMENT);
    CHECK(std::string(bhsim_last_error()).find("schedule log") !=
          std::string::npos);
}

TEST_CASE("capi: stepping is bounded by the configured run length") {
    Sim sim;
    REQUIRE(bhsim_sim_create(kConfig, &sim.handle) == BHSIM_OK);
    CHECK(bhsim_sim_step(sim.handle, 4) == BHSIM_OK);
    CHECK(bhsim_sim_subframes_done(sim.handle) == 4);
    CHECK(bhsim_sim_step(sim.handle, 1000) == BHSIM_OK);
    CHECK(bhsim_sim_subframes_done(sim.handle) == 30);
    CHECK(bhsim_sim_run(sim.handle) == BHSIM_OK);
    CHECK(bhsim_sim_subframes_done(sim.handle) == 30);
}

TEST_CASE("capi: config errors carry the field name") {
    bhsim_sim* handle = reinterpret_cast<bhsim_sim*>(&handle);
    CHECK(bhsim_sim_create(R"({"topology":{"generate":{"num_nodes":3}},
                              "typo":1})", &handle) == BHSIM_ERR_CONFIG);
    CHECK(handle == nullptr);
    CHECK(std::string(bhsim_last_error()).find("typo") != std::string::npos);

    CHECK(bhsim_sim_create_from_file("/nonexistent/s.json", &handle) ==
          BHSIM_ERR_CONFIG);
    CHECK(std::string(bhsim_last_error()).find("cannot read") !=
          std::string::npos);
}

TEST_CASE("capi: null arguments are rejected, never dereferenced") {
    CHECK(bhsim_sim_create(nullptr, nullptr) == BHSIM_ERR_ARGUMENT);
    CHECK(bhsim_sim_run(nullptr) == BHSIM_ERR_ARGUMENT);
    CHECK(bhsim_sim_step(nullptr, 1) == BHSIM_ERR_ARGUMENT);
    CHECK(bhsim_sim_delivered_bits(nullptr, nullptr, nullptr) ==
          BHSIM_ERR_ARGUMENT);
    CHECK(bhsim_sim_metrics_csv(nullptr, nullptr) == BHSIM_ERR_ARGUMENT);
    CHECK(bhsim_validate_log(nullptr, nullptr, nullptr, nullptr, nullptr) ==
          BHSIM_ERR_ARGUMENT);
    CHECK(bhsim_sim_subframes_done(nullptr) == 0);
    CHECK(bhsim_sim_tree_height(nullptr) == 0);
    bhsim_sim_destroy(nullptr);
    bhsim_free_string(nullptr);
    CHECK(std::strlen(bhsim_version()) > 0);
}

TEST_CASE("capi: generated topology text feeds back into a scenario") {
    Str text;
    REQUIRE(bhsim_generate_topology(6, 3, 0.2, 0.3, 7, 55416, &text.p) ==
            BHSIM_OK);
    CHECK(text.view().rfind("nodes 6", 0) == 0);

    std::string cfg = R"({"topology":{"text":)";
    // JSON-escape the newlines in the topology text.
    std::string escaped = "\"";
    for (char c : text.view())
        if (c == '\n') escaped += "\\n"; else escaped += c;
    escaped += "\"";
    cfg += escaped + R"(},"num_subframes":10})";

    Sim sim;
    REQUIRE(bhsim_sim_create(cfg.c_str(), &sim.handle) == BHSIM_OK);
    CHECK(bhsim_sim_run(sim.handle) == BHSIM_OK);

    CHECK(bhsim_generate_topology(1, 3, 0.0, 0.0, 7, 10, &text.p) ==
          BHSIM_ERR_CONFIG);
}

TEST_CASE("capi: identical configs replay to identical artifacts") {
    Sim a, b;
    REQUIRE(bhsim_sim_create(kConfig, &a.handle) == BHSIM_OK);
    REQUIRE(bhsim_sim_create(kConfig, &b.handle) == BHSIM_OK);
    REQUIRE(bhsim_sim_run(a.handle) == BHSIM_OK);
    REQUIRE(bhsim_sim_run(b.handle) == BHSIM_OK);

    Str ma, mb, ca, cb;
    REQUIRE(bhsim_sim_manifest(a.handle, &ma.p) == BHSIM_OK);
    REQUIRE(bhsim_sim_manifest(b.handle, &mb.p) == BHSIM_OK);
    REQUIRE(bhsim_sim_metrics_csv(a.handle, &ca.p) == BHSIM_OK);
    REQUIRE(bhsim_sim_metrics_csv(b.handle, &cb.p) == BHSIM_OK);
    CHECK(ma.view() == mb.view());
    CHECK(ca.view() == cb.view());
    CHECK(ma.view().find("\"link_rate_bits_per_slot\"") != std::string::npos);
}
