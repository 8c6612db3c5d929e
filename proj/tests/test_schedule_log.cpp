#include "doctest.h"

#include <string>
#include <vector>

#include "bhsim/schedule_log.hpp"

using namespace bhsim;

namespace {

// Star: macro 0 with two mutually interfering leaves.
std::string star_log_head() {
    return "ndata 22\n"
           "nodes 3\n"
           "node 0 -1 0 2 0\n"
           "node 1 0 1 1 10\n"
           "node 2 0 1 1 10\n"
           "pair 1 2\n";
}

// Chain 0 -> 1 -> 2 where the top link runs at double expansion.
std::string chain_log_head(int mid_radios, bool interfering) {
    std::string text =
        "ndata 22\n"
        "nodes 3\n"
        "node 0 -1 0 2 0\n"
        "node 1 0 2 " + std::to_string(mid_radios) + " 10\n"
        "node 2 1 1 1 10\n";
    if (interfering) text += "pair 1 2\n";
    return text;
}

std::vector<std::string> check(const std::string& text,
                               std::size_t* reports = nullptr,
                               std::size_t* schedules = nullptr) {
    return validate_schedule_log(text, reports, schedules);
}

} // namespace

TEST_CASE("log: a consistent star log passes with correct counts") {
    const std::string log = star_log_head() +
                            "report 1 1 5\n"
                            "report 1 2 5\n"
                            "sched 1 2 0 1 3 2 1 0 1 5\n"
                            "sched 1 2 0 2 3 2 1 3 1 5\n";
    std::size_t reports = 0, schedules = 0;
    auto violations = check(log, &reports, &schedules);
    for (const std::string& v : violations) INFO(v);
    CHECK(violations.empty());
    CHECK(reports == 2);
    CHECK(schedules == 2);
}

TEST_CASE("log: header and topology alone are a valid empty log") {
    std::size_t reports = 7, schedules = 7;
    auto violations = check(star_log_head(), &reports, &schedules);
    CHECK(violations.empty());
    CHECK(reports == 0);
    CHECK(schedules == 0);
}

TEST_CASE("log: a missing header is rejected") {
    auto violations = check("nodes 1\nnode 0 -1 0 2 0\n");
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("data slot count") != std::string::npos);
}

TEST_CASE("log: a malformed line stops the scan with one violation") {
    const std::string log = star_log_head() +
                            "report 1 1\n"
                            "sched 1 2 0 1 99 99 0 0 1 5\n";
    auto violations = check(log);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("malformed record") != std::string::npos);
}

TEST_CASE("log: an unparseable topology is reported once") {
    const std::string log = "ndata 22\n"
                            "nodes 2\n"
                            "node 0 -1 0 2 0\n"
                            "node 1 5 1 1 10\n";
    auto violations = check(log);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].rfind("topology: ", 0) == 0);
}

TEST_CASE("log: report sanity checks") {
    SUBCASE("macro or unknown reporter") {
        auto violations = check(star_log_head() + "report 1 0 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("unknown or macro node") != std::string::npos);
    }
    SUBCASE("advertised value outside the data slots") {
        auto violations = check(star_log_head() + "report 1 1 23\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("outside [0, n_d]") != std::string::npos);
    }
    SUBCASE("two reports from one node in one subframe") {
        auto violations = check(star_log_head() +
                                "report 1 1 5\n"
                                "report 1 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("duplicate report") != std::string::npos);
    }
}

TEST_CASE("log: grants are checked against the link and the window") {
    const std::string head = star_log_head() +
                             "report 1 1 5\n"
                             "report 1 2 5\n";

    SUBCASE("grant on a link that does not exist") {
        auto violations = check(head + "sched 1 2 1 2 1 1 0 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("non-existent link") != std::string::npos);
    }
    SUBCASE("expansion factor disagrees with the topology") {
        auto violations = check(head + "sched 1 2 0 1 3 2 1 0 2 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("expansion factor") != std::string::npos);
    }
    SUBCASE("zero-slot grants must not be logged") {
        auto violations = check(head + "sched 1 2 0 1 0 0 0 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("non-positive grant") != std::string::npos);
    }
    SUBCASE("direction split must add up") {
        auto violations = check(head + "sched 1 2 0 1 3 1 1 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("does not add up") != std::string::npos);
    }
    SUBCASE("window must stay inside the data slots") {
        auto violations = check(head + "sched 1 2 0 1 3 2 1 20 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("outside the data slots") != std::string::npos);
    }
    SUBCASE("a schedule may not target an earlier subframe") {
        auto violations = check(head + "sched 3 2 0 1 3 2 1 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("computed after its own subframe") !=
              std::string::npos);
    }
    SUBCASE("the same link may not be granted twice for one subframe") {
        auto violations = check(head +
                                "sched 1 2 0 1 2 1 1 0 1 5\n"
                                "sched 1 2 0 1 2 1 1 4 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("duplicate grant") != std::string::npos);
    }
}

TEST_CASE("log: grants are checked against the advertised cap") {
    SUBCASE("grant before any report") {
        auto violations = check(star_log_head() +
                                "report 3 1 5\n"
                                "sched 1 2 0 1 2 1 1 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("grant before any report") !=
              std::string::npos);
    }
    SUBCASE("logged cap must echo the report in force") {
        auto violations = check(star_log_head() +
                                "report 1 1 4\n"
                                "sched 1 2 0 1 2 1 1 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("disagrees with the report") !=
              std::string::npos);
    }
    SUBCASE("grant above the advertised cap") {
        auto violations = check(star_log_head() +
                                "report 1 1 5\n"
                                "sched 1 2 0 1 6 3 3 0 1 5\n");
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("exceeds advertised cap") !=
              std::string::npos);
    }
    SUBCASE("a newer report supersedes the old cap") {
        auto violations = check(star_log_head() +
                                "report 1 1 2\n"
                                "report 2 1 6\n"
                                "sched 2 3 0 1 6 3 3 0 1 6\n");
        CHECK(violations.empty());
    }
}

TEST_CASE("log: interfering children may not overlap in time") {
    const std::string head = star_log_head() +
                             "report 1 1 5\n"
                             "report 1 2 5\n";
    auto violations = check(head +
                            "sched 1 2 0 1 3 2 1 0 1 5\n"
                            "sched 1 2 0 2 3 2 1 2 1 5\n");
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("overlaps interfering child") !=
          std::string::npos);
}

TEST_CASE("log: a consistent double-expansion chain passes") {
    const std::string log = chain_log_head(2, true) +
                            "report 1 1 4\n"
                            "report 1 2 4\n"
                            "sched 1 3 0 1 3 2 1 0 2 4\n"
                            "sched 2 3 1 2 3 2 1 6 1 4\n";
    auto violations = check(log);
    for (const std::string& v : violations) INFO(v);
    CHECK(violations.empty());
}

TEST_CASE("log: a child schedule may not predate its parent grant") {
    const std::string log = chain_log_head(2, true) +
                            "report 1 1 4\n"
                            "report 1 2 4\n"
                            "sched 1 3 0 1 3 2 1 0 2 4\n"
                            "sched 1 3 1 2 3 2 1 6 1 4\n";
    auto violations = check(log);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("computed before the parent grant") !=
          std::string::npos);
}

TEST_CASE("log: an interfering child window may not touch the parent window") {
    const std::string log = chain_log_head(2, true) +
                            "report 1 1 4\n"
                            "report 1 2 4\n"
                            "sched 1 3 0 1 3 2 1 0 2 4\n"
                            "sched 2 3 1 2 1 1 0 0 1 4\n";
    auto violations = check(log);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("overlaps the parent window") !=
          std::string::npos);
}

TEST_CASE("log: slot sharing is bounded by the radio chains") {
    // Without interference the child grant may interleave with the node's
    // own uplink window, but only while a radio chain is free for each.
    const std::string body = "report 1 1 4\n"
                             "report 1 2 4\n"
                             "sched 1 3 0 1 3 2 1 0 2 4\n"
                             "sched 2 3 1 2 3 2 1 0 1 4\n";
    SUBCASE("two radio chains carry the overlap") {
        auto violations = check(chain_log_head(2, false) + body);
        for (const std::string& v : violations) INFO(v);
        CHECK(violations.empty());
    }
    SUBCASE("one radio chain cannot") {
        auto violations = check(chain_log_head(1, false) + body);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("more radio chains than exist") !=
              std::string::npos);
    }
}
