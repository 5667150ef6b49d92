#include "doctest.h"

#include "sagin/baselines.hpp"
#include "sagin/msa.hpp"
#include "sagin/oracle.hpp"
#include "test_helpers.hpp"

using namespace sagin;
using namespace sagin::testing;

TEST_CASE("pair oracle solves the greedy trap exactly") {
    RateMatrix r = make_rates({{5.0, 4.0}, {4.0, 1.0}});
    PairOracleResult res = optimal_pair_assignment(r, {1, 1});
    CHECK(res.value == 8.0);
    CHECK(res.assignment.at(0) == 1);
    CHECK(res.assignment.at(1) == 0);
}

TEST_CASE("pair oracle: zero matrix returns the empty assignment") {
    RateMatrix r = make_rates({{0.0, 0.0}, {0.0, 0.0}});
    PairOracleResult res = optimal_pair_assignment(r, {1, 1});
    CHECK(res.value == 0.0);
    CHECK(res.assignment.empty());
}

TEST_CASE("pair oracle: single upstream with slack quota takes the column sum") {
    RateMatrix r = make_rates({{2.0}, {3.5}, {1.25}});
    PairOracleResult res = optimal_pair_assignment(r, {5});
    CHECK(res.value == doctest::Approx(6.75));
    CHECK(res.assignment.size() == 3);
}

TEST_CASE("pair oracle is permutation-equivariant") {
    rng::Engine eng(33);
    RateMatrix r = random_rates(eng, 5, 3, 10.0);
    std::vector<int> quotas{2, 1, 2};
    PairOracleResult base = optimal_pair_assignment(r, quotas);

    // relabel: reverse both id lists and permute the data accordingly
    RateMatrix perm;
    perm.downstream_ids = {4, 3, 2, 1, 0};
    perm.upstream_ids = {2, 1, 0};
    perm.rates.resize(15);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) perm.at(4 - i, 2 - j) = r.at(i, j);
    PairOracleResult other = optimal_pair_assignment(perm, {2, 1, 2});
    CHECK(other.value == doctest::Approx(base.value));
}

TEST_CASE("pair oracle refuses oversized instances") {
    rng::Engine eng(44);
    RateMatrix r = random_rates(eng, 14, 6, 10.0, 0.0);
    std::vector<int> quotas(6, 3);
    CHECK_THROWS_AS(optimal_pair_assignment(r, quotas, 1000), OracleBudgetError);
}

TEST_CASE("pair oracle dominates greedy and the pair dynamic") {
    rng::Engine meta(55);
    for (int trial = 0; trial < 40; ++trial) {
        RateMatrix r = random_rates(meta, 5, 3, 10.0);
        std::vector<int> quotas{2, 2, 2};
        Market mk = make_market({r}, {quotas});
        PairOracleResult oracle = optimal_pair_assignment(r, quotas);
        Matching g = greedy_association(mk);
        double gv = 0;
        for (const auto& [i, j] : g.edges[0]) gv += r.at(r.down_index(i), r.up_index(j));
        CHECK(oracle.value >= gv - 1e-9);
        CHECK(gv >= 0.0);

        Matching m(1);
        MsaConfig cfg;
        cfg.seed = meta();
        PairRunResult pr = run_pair(0, m, r, quotas, cfg, cfg.seed);
        CHECK(oracle.value >= pr.pair_value_sum - 1e-9);
    }
}

TEST_CASE("chain oracle: single chain bottleneck") {
    Market mk = make_market({make_rates({{5.0}}), make_rates({{4.0}}), make_rates({{10.0}})},
                            {{1}, {1}, {1}});
    ChainOracleResult res = optimal_chain_assignment(mk);
    CHECK(res.value == doctest::Approx(4.0));
    CHECK(res.matching.edges[0].at(0) == 0);
    CHECK(res.matching.edges[1].at(0) == 0);
    CHECK(res.matching.edges[2].at(0) == 0);
}

TEST_CASE("chain oracle is at least as good as greedy") {
    rng::Engine meta(66);
    for (int trial = 0; trial < 25; ++trial) {
        Market mk = make_market({random_rates(meta, 2, 2, 10.0), random_rates(meta, 2, 1, 10.0)},
                                {{1, 1}, {2}});
        ChainOracleResult oracle = optimal_chain_assignment(mk);
        Matching g = greedy_association(mk);
        CHECK(oracle.value >= total_value(g, mk) - 1e-9);
    }
}

TEST_CASE("chain oracle beats composed pair optima under tight clipping") {
    // two users at 6 and 5 on separate relays; relay uplinks 6 and 5, but
    // pairing the strong user with the weak uplink wastes capacity: the
    // per-pair optimum composed bottom-up ties the strong user to relay 0
    // first (6+5 raw), yet the joint optimum must match users across so the
    // clipped totals line up
    RateMatrix ground = make_rates({{6.0, 6.0}, {5.0, 5.0}});
    RateMatrix uplink = make_rates({{5.0}, {6.0}});  // relay 0 clips at 5, relay 1 at 6
    Market mk = make_market({ground, uplink}, {{1, 1}, {2}});

    // composed per-pair optimisation: pair 0 first, then pair 1 on clipped sums
    Matching composed(2);
    PairOracleResult p0 = optimal_pair_assignment(mk.pairs[0].rates, mk.pairs[0].upstream_quotas);
    composed.edges[0] = {p0.assignment.begin(), p0.assignment.end()};
    RateMatrix eff1 = effective_value_matrix(mk, 1, composed);
    PairOracleResult p1 = optimal_pair_assignment(eff1, mk.pairs[1].upstream_quotas);
    composed.edges[1] = {p1.assignment.begin(), p1.assignment.end()};

    ChainOracleResult joint = optimal_chain_assignment(mk);
    // pair 0 is value-blind here (both relays offer the same rate), the
    // lexicographic optimum puts user 0 on relay 0 and loses to the joint fit
    CHECK(total_value(composed, mk) == doctest::Approx(10.0));
    CHECK(joint.value == doctest::Approx(11.0));
    CHECK(joint.value > total_value(composed, mk));
}

TEST_CASE("chain oracle bounds the msa outcome on tiny instances") {
    rng::Engine meta(77);
    for (int trial = 0; trial < 25; ++trial) {
        Market mk = make_market({random_rates(meta, 3, 2, 10.0), random_rates(meta, 2, 2, 10.0)},
                                {{2, 2}, {1, 1}});
        MsaConfig cfg;
        cfg.seed = meta();
        cfg.record_trace = false;
        MsaResult res = run_msa(mk, cfg);
        ChainOracleResult oracle = optimal_chain_assignment(mk);
        CHECK(res.total_value <= oracle.value + 1e-9);
    }
}

TEST_CASE("chain oracle refuses oversized instances") {
    rng::Engine meta(88);
    Market mk = make_market({random_rates(meta, 8, 4, 10.0, 0.0), random_rates(meta, 4, 3, 10.0, 0.0),
                             random_rates(meta, 3, 2, 10.0, 0.0)},
                            {{3, 3, 3, 3}, {2, 2, 2}, {2, 2}});
    CHECK_THROWS_AS(optimal_chain_assignment(mk, 10000), OracleBudgetError);
}
