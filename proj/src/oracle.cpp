#include "sagin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sagin {

namespace {

struct PairSearch {
    const RateMatrix& v;
    std::vector<int> room;
    std::vector<int> pick;  // per downstream index: -1 or upstream index
    std::vector<double> suffix_max;
    long budget;
    long nodes = 0;
    double best_value = -1.0;
    std::vector<int> best_pick;

    explicit PairSearch(const RateMatrix& values, const std::vector<int>& quotas, long node_budget)
        : v(values), room(quotas.begin(), quotas.end()), pick(values.num_down(), -1),
          budget(node_budget) {
        // suffix_max[i] = sum over rows >= i of the row maximum (upper bound
        // on what the remaining rows can still add).
        suffix_max.assign(v.num_down() + 1, 0.0);
        for (std::size_t i = v.num_down(); i-- > 0;) {
            double row = 0.0;
            for (std::size_t j = 0; j < v.num_up(); ++j) row = std::max(row, v.at(i, j));
            suffix_max[i] = suffix_max[i + 1] + row;
        }
    }

    // Depth-first over rows; trying "unmatched" before the upstream nodes in
    // index order makes the first optimum found the lexicographically
    // smallest one, and pruning on <= keeps it.
    void rec(std::size_t i, double value) {
        if (++nodes > budget)
            throw OracleBudgetError("pair oracle: node budget exceeded (" + std::to_string(budget) +
                                    ")");
        if (i == v.num_down()) {
            if (value > best_value) {
                best_value = value;
                best_pick = pick;
            }
            return;
        }
        if (value + suffix_max[i] <= best_value) return;
        pick[i] = -1;
        rec(i + 1, value);
        for (std::size_t j = 0; j < v.num_up(); ++j) {
            if (room[j] <= 0) continue;
            --room[j];
            pick[i] = static_cast<int>(j);
            rec(i + 1, value + v.at(i, j));
            pick[i] = -1;
            ++room[j];
        }
    }
};

}  // namespace

PairOracleResult optimal_pair_assignment(const RateMatrix& rates,
                                         const std::vector<int>& upstream_quotas, long node_budget) {
    PairSearch search(rates, upstream_quotas, node_budget);
    search.rec(0, 0.0);
    PairOracleResult res;
    res.value = std::max(0.0, search.best_value);
    for (std::size_t i = 0; i < rates.num_down(); ++i)
        if (search.best_pick[i] >= 0)
            res.assignment[rates.downstream_ids[i]] = rates.upstream_ids[search.best_pick[i]];
    return res;
}

namespace {

struct ChainSearch {
    const Market& market;
    Matching current;
    long budget;
    long nodes = 0;
    double best_value = -1.0;
    Matching best;

    explicit ChainSearch(const Market& mk, long node_budget)
        : market(mk), current(mk.num_pairs()), budget(node_budget), best(mk.num_pairs()) {}

    void rec(int k, std::size_t i, std::vector<std::vector<int>>& room) {
        if (++nodes > budget)
            throw OracleBudgetError("chain oracle: node budget exceeded (" + std::to_string(budget) +
                                    ")");
        if (k == market.num_pairs()) {
            const double value = total_value(current, market);
            if (value > best_value) {
                best_value = value;
                best = current;
            }
            return;
        }
        const RateMatrix& v = market.pairs[k].rates;
        if (i == v.num_down()) {
            rec(k + 1, 0, room);
            return;
        }
        rec(k, i + 1, room);  // downstream i left unmatched first
        for (std::size_t j = 0; j < v.num_up(); ++j) {
            if (room[k][j] <= 0) continue;
            --room[k][j];
            current.edges[k][v.downstream_ids[i]] = v.upstream_ids[j];
            rec(k, i + 1, room);
            current.edges[k].erase(v.downstream_ids[i]);
            ++room[k][j];
        }
    }
};

}  // namespace

ChainOracleResult optimal_chain_assignment(const Market& market, long node_budget) {
    ChainSearch search(market, node_budget);
    std::vector<std::vector<int>> room;
    for (const PairMarket& pm : market.pairs) room.push_back(pm.upstream_quotas);
    search.rec(0, 0, room);
    ChainOracleResult res;
    res.value = std::max(0.0, search.best_value);
    res.matching = search.best_value >= 0.0 ? search.best : Matching(market.num_pairs());
    return res;
}

ChainOracleResult optimal_chain_assignment(const Scenario& s, long node_budget) {
    return optimal_chain_assignment(market_from_scenario(s), node_budget);
}

std::vector<BlockingPair> blocking_pairs_bruteforce(const Matching& m, int pair_index,
                                                    const AspirationState& state,
                                                    const RateMatrix& rates,
                                                    const std::vector<int>& upstream_quotas,
                                                    double epsilon) {
    std::vector<BlockingPair> out;
    for (std::size_t i = 0; i < rates.num_down(); ++i) {
        const int di = rates.downstream_ids[i];
        for (std::size_t j = 0; j < rates.num_up(); ++j) {
            const int uj = rates.upstream_ids[j];
            auto it = m.edges[pair_index].find(di);
            if (it != m.edges[pair_index].end() && it->second == uj) continue;
            // room or profitable eviction at j?
            int load = 0;
            double weakest = std::numeric_limits<double>::infinity();
            for (const auto& [xd, xu] : m.edges[pair_index]) {
                if (xu != uj) continue;
                ++load;
                weakest = std::min(weakest, rates.at(rates.down_index(xd), j));
            }
            const bool open = load < upstream_quotas[j] || rates.at(i, j) > weakest;
            if (!open) continue;
            if (rates.at(i, j) >= state.downstream[i] + state.upstream[j][i] + 2.0 * epsilon)
                out.push_back({di, uj});
        }
    }
    return out;
}

}  // namespace sagin
