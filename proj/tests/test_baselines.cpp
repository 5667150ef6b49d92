#include "doctest.h"

#include "sagin/baselines.hpp"
#include "sagin/scenario.hpp"
#include "test_helpers.hpp"

using namespace sagin;
using namespace sagin::testing;

TEST_CASE("greedy picks the max entry first and goes myopic") {
    // classic trap: picking 5 forces the 1; the optimum pairs 4 + 4
    Market mk = make_market({make_rates({{5.0, 4.0}, {4.0, 1.0}})}, {{1, 1}});
    Matching m = greedy_association(mk);
    CHECK(m.edges[0].at(0) == 0);
    CHECK(m.edges[0].at(1) == 1);
    CHECK(total_value(m, mk) == 6.0);
}

TEST_CASE("greedy on a 1x1 market matches the only pair") {
    Market mk = make_market({make_rates({{3.0}})}, {{1}});
    Matching m = greedy_association(mk);
    CHECK(m.edges[0].at(0) == 0);
}

TEST_CASE("greedy respects quotas on the paper default") {
    Scenario s = generate_scenario(default_config(), 4);
    Matching m = greedy_association(s);
    Market mk = market_from_scenario(s);
    CHECK(matching_inconsistency(m, mk).empty());
    CHECK(m.edges[0].size() == 30);  // quota head-room, so everyone associates
    CHECK(m.edges[1].size() == 8);
    CHECK(m.edges[2].size() == 3);
}

TEST_CASE("distance: one user, one relay") {
    ScenarioConfig cfg = default_config();
    for (auto& lc : cfg.layers) lc.count = 1;
    Scenario s = generate_scenario(cfg, 6);
    Matching m = distance_association(s);
    CHECK(m.edges[0].at(0) == 0);
}

TEST_CASE("distance: contention drops the lowest-value requester") {
    // three users nearest to relay 0 (quota 2); relay 1 is farther away
    Market mk = make_market({make_rates({{9.0, 5.0}, {7.0, 5.0}, {8.0, 5.0}})}, {{2, 2}});
    std::vector<std::vector<Vec3>> pos = {
        {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}},
        {{1, 0, 10}, {500, 0, 10}},
    };
    Matching m = distance_association(mk, pos);
    CHECK(m.edges[0].size() == 2);
    CHECK(m.edges[0].at(0) == 0);   // value 9 kept
    CHECK(m.edges[0].at(2) == 0);   // value 8 kept
    CHECK(m.edges[0].count(1) == 0);  // value 7 rejected, stays unmatched
}

TEST_CASE("distance without contention equals nearest assignment") {
    ScenarioConfig cfg = default_config();
    cfg.layers[0].count = 8;  // 8 users on 8 UAVs, quota 6: no contention likely
    Scenario s = generate_scenario(cfg, 12);
    Matching m = distance_association(s);
    Market mk = market_from_scenario(s);
    for (const Node& u : s.layers[0]) {
        double best = 1e300;
        int nearest = -1;
        for (const Node& a : s.layers[1]) {
            const double d = distance_3d(u.position, a.position);
            if (d < best) {
                best = d;
                nearest = a.id;
            }
        }
        // either matched to the nearest or rejected by contention there
        if (m.edges[0].count(u.id)) CHECK(m.edges[0].at(u.id) == nearest);
    }
    CHECK(matching_inconsistency(m, mk).empty());
}

TEST_CASE("both baselines stay consistent on random markets") {
    rng::Engine meta(2222);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t nd = 2 + rng::uniform_index(meta, 8);
        const std::size_t nu = 1 + rng::uniform_index(meta, 4);
        const std::size_t ns = 1 + rng::uniform_index(meta, 2);
        std::vector<int> q1, q2;
        for (std::size_t j = 0; j < nu; ++j) q1.push_back(1 + int(rng::uniform_index(meta, 3)));
        for (std::size_t j = 0; j < ns; ++j) q2.push_back(1 + int(rng::uniform_index(meta, 3)));
        Market mk = make_market({random_rates(meta, nd, nu), random_rates(meta, nu, ns)}, {q1, q2});
        Matching g = greedy_association(mk);
        CHECK(matching_inconsistency(g, mk).empty());
        std::vector<std::vector<Vec3>> pos(3);
        for (std::size_t i = 0; i < nd; ++i)
            pos[0].push_back({rng::uniform_range(meta, 0, 100), rng::uniform_range(meta, 0, 100), 0});
        for (std::size_t i = 0; i < nu; ++i)
            pos[1].push_back({rng::uniform_range(meta, 0, 100), rng::uniform_range(meta, 0, 100), 50});
        for (std::size_t i = 0; i < ns; ++i)
            pos[2].push_back({rng::uniform_range(meta, 0, 100), rng::uniform_range(meta, 0, 100), 200});
        Matching d = distance_association(mk, pos);
        CHECK(matching_inconsistency(d, mk).empty());
    }
}

TEST_CASE("greedy beats distance when contention strands agents") {
    // all users huddle near relay 0; greedy spills the rest to relay 1,
    // the distance rule strands them
    Market mk = make_market({make_rates({{9.0, 4.0}, {8.0, 4.0}, {7.0, 4.0}, {6.0, 4.0}})}, {{2, 2}});
    std::vector<std::vector<Vec3>> pos = {
        {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}},
        {{0, 0, 10}, {900, 0, 10}},
    };
    Matching g = greedy_association(mk);
    Matching d = distance_association(mk, pos);
    CHECK(g.edges[0].size() == 4);
    CHECK(d.edges[0].size() == 2);
    double gv = 0, dv = 0;
    for (const auto& [i, j] : g.edges[0]) gv += mk.pairs[0].rates.at(i, j);
    for (const auto& [i, j] : d.edges[0]) dv += mk.pairs[0].rates.at(i, j);
    CHECK(gv > dv);
}
