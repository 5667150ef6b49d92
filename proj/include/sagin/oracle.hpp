#pragma once

#include <stdexcept>
#include <vector>

#include "sagin/msa.hpp"
#include "sagin/valuation.hpp"

namespace sagin {

// Thrown when an exhaustive search would exceed its node budget.
struct OracleBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PairOracleResult {
    std::map<int, int> assignment;  // downstream id -> upstream id
    double value = 0.0;
};

// Exact maximum-value quota-respecting assignment of one pair, by
// depth-first enumeration with a column-sum bound. Deterministic: among
// equal-value optima the lexicographically smallest assignment (unmatched
// ordered before any partner, partners ascending) is returned.
PairOracleResult optimal_pair_assignment(const RateMatrix& rates,
                                         const std::vector<int>& upstream_quotas,
                                         long node_budget = 10000000);

struct ChainOracleResult {
    Matching matching{0};
    double value = 0.0;
};

// Exact maximum of total_value over joint assignments of all pairs; captures
// the cross-layer clipping coupling. Tiny instances only (node budget).
ChainOracleResult optimal_chain_assignment(const Market& market, long node_budget = 10000000);
ChainOracleResult optimal_chain_assignment(const Scenario& s, long node_budget = 10000000);

// Independent re-scan for agreeable cross pairs, used to cross-check the
// msa stability certifier in tests.
std::vector<BlockingPair> blocking_pairs_bruteforce(const Matching& m, int pair_index,
                                                    const AspirationState& state,
                                                    const RateMatrix& rates,
                                                    const std::vector<int>& upstream_quotas,
                                                    double epsilon);

}  // namespace sagin
