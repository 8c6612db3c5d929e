#include <doctest.h>

#include <map>
#include <vector>

#include "bhsim/schedule.hpp"
#include "bhsim/topology.hpp"

using namespace bhsim;

namespace {

LinkGrant grant(NodeId link, long n, int alpha = 1) {
    LinkGrant g;
    g.link = link;
    g.n_total = n;
    g.alpha = alpha;
    return g;
}

} // namespace

TEST_CASE("schedule: direction split follows the backlog ratio") {
    CHECK(split_directions(9, 200, 100) == std::pair<long, long>{6, 3});
    CHECK(split_directions(5, 70, 0) == std::pair<long, long>{5, 0});
    CHECK(split_directions(0, 70, 70) == std::pair<long, long>{0, 0});
}

TEST_CASE("schedule: both directions stay alive when both have backlog") {
    CHECK(split_directions(2, 1000, 1) == std::pair<long, long>{1, 1});
    CHECK(split_directions(2, 1, 1000) == std::pair<long, long>{1, 1});
    CHECK(split_directions(10, 1, 1000) == std::pair<long, long>{1, 9});
}

TEST_CASE("schedule: split rejects inconsistent input") {
    CHECK_THROWS_AS(split_directions(3, 0, 0), EngineError);
    CHECK_THROWS_AS(split_directions(-1, 1, 1), EngineError);
    CHECK_THROWS_AS(split_directions(3, -1, 1), EngineError);
}

TEST_CASE("schedule: apportionment takes everything under quota") {
    std::map<NodeId, std::int64_t> sizes{{3, 4}, {7, 2}};
    auto take = apportion_largest_remainder(6, sizes);
    CHECK(take == std::map<NodeId, std::int64_t>{{3, 4}, {7, 2}});
    take = apportion_largest_remainder(100, sizes);
    CHECK(take == std::map<NodeId, std::int64_t>{{3, 4}, {7, 2}});
}

TEST_CASE("schedule: apportionment breaks remainder ties by lower id") {
    std::map<NodeId, std::int64_t> sizes{{1, 10}, {2, 10}};
    auto take = apportion_largest_remainder(5, sizes);
    CHECK(take == std::map<NodeId, std::int64_t>{{1, 3}, {2, 2}});
}

TEST_CASE("schedule: apportionment with zero quota or empty queues") {
    std::map<NodeId, std::int64_t> sizes{{1, 10}};
    CHECK(apportion_largest_remainder(0, sizes).empty());
    CHECK(apportion_largest_remainder(5, {}).empty());
    CHECK(apportion_largest_remainder(5, {{1, 0}, {2, 0}}).empty());
}

TEST_CASE("schedule: apportionment follows proportions") {
    std::map<NodeId, std::int64_t> sizes{{1, 30}, {2, 10}, {3, 20}};
    auto take = apportion_largest_remainder(6, sizes);
    CHECK(take == std::map<NodeId, std::int64_t>{{1, 3}, {2, 1}, {3, 2}});
}

TEST_CASE("schedule: expanded window sides interleave for relayed links") {
    LinkGrant g = grant(1, 3, 2);
    g.window_start = 4;
    CHECK(scheduler_side_slots(g) == std::vector<int>{4, 6, 8});
    CHECK(child_side_slots(g) == std::vector<int>{5, 7, 9});

    LinkGrant plain = grant(2, 4, 1);
    plain.window_start = 10;
    CHECK(scheduler_side_slots(plain) == std::vector<int>{10, 11, 12, 13});
    CHECK(child_side_slots(plain) == std::vector<int>{10, 11, 12, 13});

    CHECK(scheduler_side_slots(grant(3, 5)).empty());  // not placed yet
}

TEST_CASE("schedule: placement is first-fit leftmost") {
    TreeTopology topo = parse_topology(
        "nodes 3\n"
        "node 0 -1 0 2 0\n"
        "node 1 0 1 1 10\n"
        "node 2 0 1 1 10\n");
    PlacementInput in;
    in.n_d = 22;
    in.self = 0;
    in.radio_chains = 2;
    in.interference = &topo.interference;

    std::vector<LinkGrant> single{grant(1, 5)};
    CHECK(place_slots(single, in) == 0);
    CHECK(single[0].window_start == 0);

    // No interference and two radios: both can share the leftmost window.
    std::vector<LinkGrant> pair_free{grant(1, 5), grant(2, 5)};
    CHECK(place_slots(pair_free, in) == 0);
    CHECK(pair_free[0].window_start == 0);
    CHECK(pair_free[1].window_start == 0);
}

TEST_CASE("schedule: interfering windows go side by side") {
    TreeTopology topo = parse_topology(
        "nodes 3\n"
        "node 0 -1 0 2 0\n"
        "node 1 0 1 1 10\n"
        "node 2 0 1 1 10\n"
        "pair 1 2\n");
    PlacementInput in;
    in.n_d = 22;
    in.self = 0;
    in.radio_chains = 2;
    in.interference = &topo.interference;

    std::vector<LinkGrant> grants{grant(1, 11), grant(2, 11)};
    CHECK(place_slots(grants, in) == 0);
    CHECK(grants[0].window_start == 0);
    CHECK(grants[1].window_start == 11);
}

TEST_CASE("schedule: a single radio chain forces disjoint active slots") {
    TreeTopology topo = parse_topology(
        "nodes 3\n"
        "node 0 -1 0 1 0\n"
        "node 1 0 1 1 10\n"
        "node 2 0 1 1 10\n");
    PlacementInput in;
    in.n_d = 22;
    in.self = 0;
    in.radio_chains = 1;
    in.interference = &topo.interference;

    std::vector<LinkGrant> grants{grant(1, 11), grant(2, 11)};
    CHECK(place_slots(grants, in) == 0);
    CHECK(grants[0].window_start == 0);
    CHECK(grants[1].window_start == 11);
}

TEST_CASE("schedule: placement avoids the fixed parent window when interfering") {
    TreeTopology topo = parse_topology(
        "nodes 3\n"
        "node 0 -1 0 2 0\n"
        "node 1 0 2 2 10\n"
        "node 2 1 1 1 10\n"
        "pair 1 2\n");
    LinkGrant parent = grant(1, 5, 2);  // node 1's own link upward, spans 0..9
    parent.window_start = 0;

    PlacementInput in;
    in.n_d = 22;
    in.self = 1;
    in.radio_chains = 2;
    in.interference = &topo.interference;
    in.parent_grant = parent;

    std::vector<LinkGrant> grants{grant(2, 6)};
    CHECK(place_slots(grants, in) == 0);
    CHECK(grants[0].window_start == 10);
}

TEST_CASE("schedule: a child grant may interleave with the parent relay slots") {
    // The parent relay keeps node 1 busy on the odd slots 1,3,5,7,9. A
    // non-interfering relayed child grant occupies the even slots of the same
    // span, so one radio chain suffices.
    TreeTopology topo = parse_topology(
        "nodes 3\n"
        "node 0 -1 0 2 0\n"
        "node 1 0 2 1 10\n"
        "node 2 1 2 1 10\n");
    LinkGrant parent = grant(1, 5, 2);
    parent.window_start = 0;

    PlacementInput in;
    in.n_d = 22;
    in.self = 1;
    in.radio_chains = 1;
    in.interference = &topo.interference;
    in.parent_grant = parent;

    std::vector<LinkGrant> grants{grant(2, 5, 2)};
    CHECK(place_slots(grants, in) == 0);
    CHECK(grants[0].window_start == 0);
}

TEST_CASE("schedule: an unplaceable clique is repaired by shrinking") {
    TreeTopology topo = parse_topology(
        "nodes 4\n"
        "node 0 -1 0 3 0\n"
        "node 1 0 1 1 10\n"
        "node 2 0 1 1 10\n"
        "node 3 0 1 1 10\n"
        "pair 1 2\npair 1 3\npair 2 3\n");
    PlacementInput in;
    in.n_d = 22;
    in.self = 0;
    in.radio_chains = 3;
    in.interference = &topo.interference;

    std::vector<LinkGrant> grants{grant(1, 8), grant(2, 8), grant(3, 8)};
    long repairs = place_slots(grants, in);
    CHECK(repairs == 2);
    long total = 0;
    for (const LinkGrant& g : grants) {
        total += g.n_total;
        CHECK(g.window_start >= 0);
        CHECK(g.window_start + g.alpha * g.n_total <= 22);
    }
    CHECK(total == 22);
    // Pairwise disjoint since all three interfere.
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            bool disjoint = grants[a].window_start + grants[a].n_total <=
                                grants[b].window_start ||
                            grants[b].window_start + grants[b].n_total <=
                                grants[a].window_start;
            CHECK(disjoint);
        }
}

TEST_CASE("schedule: placement requires interference data") {
    PlacementInput in;
    in.interference = nullptr;
    std::vector<LinkGrant> grants{grant(1, 1)};
    CHECK_THROWS_AS(place_slots(grants, in), EngineError);
}
