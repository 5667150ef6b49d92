#include "doctest.h"

#include <cmath>

#include "sagin/valuation.hpp"
#include "test_helpers.hpp"

using namespace sagin;
using namespace sagin::testing;

namespace {

// users -> relays -> sinks (K = 3) with one mid link per relay/sink cross.
Market chain_market(std::initializer_list<std::initializer_list<double>> user_rates,
                    std::initializer_list<std::initializer_list<double>> relay_rates,
                    std::vector<int> relay_quotas, std::vector<int> sink_quotas) {
    return make_market({make_rates(user_rates), make_rates(relay_rates)},
                       {relay_quotas, sink_quotas});
}

}  // namespace

TEST_CASE("pair_value: level 0 is the raw rate, higher levels clip") {
    RateMatrix r = make_rates({{5.0}});
    CHECK(pair_value(0, 0, 0, r, 0.0) == 5.0);
    RateMatrix link = make_rates({{4.0}});
    CHECK(pair_value(1, 0, 0, link, 5.0) == 4.0);   // min(5, 4)
    CHECK(pair_value(1, 0, 0, link, 0.0) == 0.0);   // relay with nothing below
    RateMatrix wide = make_rates({{10.0}});
    CHECK(pair_value(1, 0, 0, wide, 7.0) == 7.0);   // min(3+4, 10)
    CHECK_THROWS_AS(pair_value(0, 99, 0, r, 0.0), std::invalid_argument);
}

TEST_CASE("total_value folds the bottleneck of a single chain") {
    // user rate 5, relay uplink 4, sink uplink 10 -> end-to-end 4
    Market mk = make_market(
        {make_rates({{5.0}}), make_rates({{4.0}}), make_rates({{10.0}})},
        {{1}, {1}, {1}});
    Matching m(3);
    m.edges[0][0] = 0;
    m.edges[1][0] = 0;
    m.edges[2][0] = 0;
    CHECK(total_value(m, mk) == 4.0);

    Matching empty(3);
    CHECK(total_value(empty, mk) == 0.0);

    // incomplete chain accrues nothing
    Matching partial(3);
    partial.edges[0][0] = 0;
    CHECK(total_value(partial, mk) == 0.0);
}

TEST_CASE("total_value rejects inconsistent matchings by name") {
    Market mk = chain_market({{3.0, 1.0}, {4.0, 1.0}, {2.0, 1.0}}, {{9.0}, {9.0}}, {2, 2}, {2});
    Matching m(2);
    m.edges[0][0] = 0;
    m.edges[0][1] = 0;
    m.edges[0][2] = 0;  // relay 0 has quota 2
    CHECK_THROWS_WITH_AS(total_value(m, mk), doctest::Contains("quota"), std::invalid_argument);

    Matching bad_id(2);
    bad_id.edges[0][77] = 0;
    CHECK_THROWS_WITH_AS(total_value(bad_id, mk), doctest::Contains("unknown id"),
                         std::invalid_argument);
}

TEST_CASE("adding an edge to an incomplete chain never lowers the total") {
    rng::Engine eng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Market mk = make_market({random_rates(eng, 4, 3), random_rates(eng, 3, 2)},
                                {{2, 2, 2}, {2, 2}});
        Matching m(2);
        m.edges[1][0] = 0;
        m.edges[1][1] = 1;
        double prev = total_value(m, mk);
        for (int u = 0; u < 4; ++u) {
            m.edges[0][u] = u % 3;
            const double now = total_value(m, mk);
            CHECK(now >= prev - 1e-12);
            prev = now;
        }
    }
}

TEST_CASE("total never exceeds the matched ground rates") {
    rng::Engine eng(123);
    for (int trial = 0; trial < 50; ++trial) {
        Market mk = make_market({random_rates(eng, 5, 3), random_rates(eng, 3, 2)},
                                {{2, 2, 2}, {3, 3}});
        Matching m(2);
        for (int u = 0; u < 5; ++u) m.edges[0][u] = u % 3;
        for (int a = 0; a < 3; ++a) m.edges[1][a] = a % 2;
        double ground_sum = 0.0;
        for (const auto& [u, a] : m.edges[0])
            ground_sum += mk.pairs[0].rates.at(mk.pairs[0].rates.down_index(u),
                                               mk.pairs[0].rates.up_index(a));
        CHECK(total_value(m, mk) <= ground_sum + 1e-9);
    }
}

TEST_CASE("per-user split: plain examples") {
    // one user chain: {user0: 4}
    Market mk = make_market({make_rates({{5.0}}), make_rates({{4.0}}), make_rates({{10.0}})},
                            {{1}, {1}, {1}});
    Matching m(3);
    m.edges[0][0] = 0;
    m.edges[1][0] = 0;
    m.edges[2][0] = 0;
    auto shares = per_user_end_to_end(m, mk);
    CHECK(shares.at(0) == doctest::Approx(4.0));

    // two users 3 and 4 through one relay
    Market mk2 = chain_market({{3.0}, {4.0}}, {{10.0}}, {2}, {1});
    Matching m2(2);
    m2.edges[0][0] = 0;
    m2.edges[0][1] = 0;
    m2.edges[1][0] = 0;
    auto s2 = per_user_end_to_end(m2, mk2);
    CHECK(s2.at(0) == doctest::Approx(3.0));
    CHECK(s2.at(1) == doctest::Approx(4.0));

    // relay uplink 3.5 clips proportionally: 3.5 * 3/7 and 3.5 * 4/7
    Market mk3 = chain_market({{3.0}, {4.0}}, {{3.5}}, {2}, {1});
    Matching m3(2);
    m3.edges[0][0] = 0;
    m3.edges[0][1] = 0;
    m3.edges[1][0] = 0;
    auto s3 = per_user_end_to_end(m3, mk3);
    CHECK(s3.at(0) == doctest::Approx(1.5));
    CHECK(s3.at(1) == doctest::Approx(2.0));
}

TEST_CASE("per-user shares sum to the total on random matchings") {
    rng::Engine eng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        Market mk = make_market(
            {random_rates(eng, 6, 3), random_rates(eng, 3, 2), random_rates(eng, 2, 2)},
            {{3, 3, 3}, {2, 2}, {1, 1}});
        Matching m(3);
        for (int u = 0; u < 6; ++u)
            if (rng::uniform_double(eng) < 0.8) m.edges[0][u] = int(rng::uniform_index(eng, 3));
        // keep it consistent: drop overfull relays
        for (int a = 0; a < 3; ++a) {
            int load = 0;
            for (auto it = m.edges[0].begin(); it != m.edges[0].end();)
                it = (it->second == a && ++load > 3) ? m.edges[0].erase(it) : std::next(it);
        }
        for (int a = 0; a < 3; ++a)
            if (rng::uniform_double(eng) < 0.8) m.edges[1][a] = int(rng::uniform_index(eng, 2));
        for (int u = 0; u < 2; ++u) {
            int load = 0;
            for (auto it = m.edges[1].begin(); it != m.edges[1].end();)
                it = (it->second == u && ++load > 2) ? m.edges[1].erase(it) : std::next(it);
        }
        for (int h = 0; h < 2; ++h)
            if (rng::uniform_double(eng) < 0.8) m.edges[2][h] = int(rng::uniform_index(eng, 2));
        for (int h = 0; h < 2; ++h) {
            int load = 0;
            for (auto it = m.edges[2].begin(); it != m.edges[2].end();)
                it = (it->second == h && ++load > 1) ? m.edges[2].erase(it) : std::next(it);
        }
        const double total = total_value(m, mk);
        double sum = 0.0;
        for (const auto& [id, v] : per_user_end_to_end(m, mk)) sum += v;
        CHECK(sum == doctest::Approx(total).epsilon(1e-9));
    }
}

TEST_CASE("effective matrices clip by the lower matching") {
    Market mk = chain_market({{3.0}, {4.0}}, {{10.0, 2.0}}, {2}, {1, 1});
    Matching m(2);
    m.edges[0][0] = 0;
    m.edges[0][1] = 0;
    RateMatrix eff = effective_value_matrix(mk, 1, m);
    CHECK(eff.at(0, 0) == 7.0);  // min(3+4, 10)
    CHECK(eff.at(0, 1) == 2.0);  // min(7, 2)
    RateMatrix eff0 = effective_value_matrix(mk, 0, m);
    CHECK(eff0.at(0, 0) == 3.0);  // level 0 stays raw
}
