#pragma once

#include <initializer_list>
#include <vector>

#include "sagin/rng.hpp"
#include "sagin/valuation.hpp"

namespace sagin::testing {

inline RateMatrix make_rates(std::initializer_list<std::initializer_list<double>> rows) {
    RateMatrix m;
    std::size_t nu = rows.begin()->size();
    int id = 0;
    for (const auto& row : rows) {
        (void)row;
        m.downstream_ids.push_back(id++);
    }
    for (std::size_t j = 0; j < nu; ++j) m.upstream_ids.push_back(static_cast<int>(j));
    for (const auto& row : rows)
        for (double v : row) m.rates.push_back(v);
    return m;
}

inline Market make_market(std::vector<RateMatrix> rates, std::vector<std::vector<int>> quotas) {
    Market mk;
    for (std::size_t k = 0; k < rates.size(); ++k)
        mk.pairs.push_back({std::move(rates[k]), std::move(quotas[k])});
    return mk;
}

// Random pair instance with occasional zero entries, for fuzz harnesses.
inline RateMatrix random_rates(rng::Engine& eng, std::size_t nd, std::size_t nu, double scale = 10.0,
                               double zero_prob = 0.15) {
    RateMatrix m;
    for (std::size_t i = 0; i < nd; ++i) m.downstream_ids.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < nu; ++j) m.upstream_ids.push_back(static_cast<int>(j));
    m.rates.resize(nd * nu);
    for (double& v : m.rates) {
        v = rng::uniform_double(eng) < zero_prob ? 0.0 : rng::uniform_range(eng, 0.0, scale);
    }
    return m;
}

}  // namespace sagin::testing
