#pragma once

#include <map>
#include <string>
#include <vector>

#include "sagin/channel.hpp"

namespace sagin {

// Multi-layer assignment: edges[k] maps downstream id -> upstream id for
// adjacent pair (k, k+1). Partial matchings are legal; consistency means no
// downstream id repeats within a pair and no upstream node exceeds its quota.
struct Matching {
    std::vector<std::map<int, int>> edges;

    explicit Matching(int num_pairs = 0) : edges(num_pairs) {}
    int num_pairs() const { return static_cast<int>(edges.size()); }
};

// Rates plus quotas for every adjacent pair; the algorithm-facing view of a
// scenario. upstream_quotas[k] aligns with pairs[k].upstream_ids.
struct PairMarket {
    RateMatrix rates;
    std::vector<int> upstream_quotas;
};

struct Market {
    std::vector<PairMarket> pairs;

    int num_pairs() const { return static_cast<int>(pairs.size()); }
    int num_layers() const { return num_pairs() + 1; }
};

Market market_from_scenario(const Scenario& s);

// Throws std::invalid_argument naming the violated constraint; the
// non-throwing variant returns the message instead ("" when consistent).
void validate_matching(const Matching& m, const Market& market);
std::string matching_inconsistency(const Matching& m, const Market& market);

// Chain value of the cross pair (i, j) at level k: the raw link rate at
// level 0, min(aggregated downstream value, link rate) above.
// `lower_value` is the aggregated subtree value of i under the current
// lower-layer matching. Throws on unknown ids.
double pair_value(int pair_level, int downstream_id, int upstream_id,
                  const RateMatrix& rates, double lower_value);

// Aggregated inbound subtree value for every node of layers 1..K-1 under
// `m`; result[k][idx] aligns with layer k's position in the pair matrices.
// result[0] is empty (users aggregate nothing).
std::vector<std::vector<double>> subtree_values(const Matching& m, const Market& market);

// The value matrix the pair-k game is played on: raw rates at level 0,
// min(subtree sum, link rate) above.
RateMatrix effective_value_matrix(const Market& market, int pair_index, const Matching& m);

// Sum of end-to-end rates: bottom-up min-clipped fold, summed over the top
// layer. Chains that do not reach the top layer contribute nothing.
// Rejects inconsistent matchings.
double total_value(const Matching& m, const Market& market);
double total_value(const Matching& m, const Scenario& s);

// Reporting split of the clipped capacities, proportional to subtree
// demands; values sum to total_value. Users on incomplete chains get 0.
std::map<int, double> per_user_end_to_end(const Matching& m, const Market& market);

// Edge list export: layer_pair, downstream_id, upstream_id, pair_value.
void write_matching_csv(const Matching& m, const Market& market, const std::string& path,
                        const std::string& header_comment = "");

}  // namespace sagin
