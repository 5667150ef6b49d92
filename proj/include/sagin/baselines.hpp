#pragma once

#include <vector>

#include "sagin/valuation.hpp"

namespace sagin {

// Centralized greedy: per pair bottom-up, repeatedly associate the largest
// entry of the pair's effective value matrix (ties: lowest downstream id,
// then lowest upstream id) until all downstream agents are associated or
// all quotas are full. Value matrices are rebuilt between pairs, not within.
Matching greedy_association(const Market& market);
Matching greedy_association(const Scenario& s);

// Distance-based: each downstream agent requests its 3D-nearest upstream
// node (ties: lowest id); each upstream node keeps its top-quota requesters
// by pair value (ties: lowest id); rejected agents stay unmatched.
// positions_per_layer[k] aligns with the pair matrices' id order.
Matching distance_association(const Market& market,
                              const std::vector<std::vector<Vec3>>& positions_per_layer);
Matching distance_association(const Scenario& s);

}  // namespace sagin
