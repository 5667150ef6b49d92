#include "sagin/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sagin {

namespace {

// One pair of the greedy scheme on a fixed value matrix: repeatedly take the
// largest entry among unassociated downstream x upstream-with-room.
std::map<int, int> greedy_pair(const RateMatrix& values, const std::vector<int>& quotas) {
    const std::size_t nd = values.num_down(), nu = values.num_up();
    std::vector<bool> done(nd, false);
    std::vector<int> room(quotas.begin(), quotas.end());
    std::map<int, int> edges;
    for (std::size_t round = 0; round < nd; ++round) {
        std::size_t bi = SIZE_MAX, bj = SIZE_MAX;
        double best = -1.0;
        for (std::size_t i = 0; i < nd; ++i) {
            if (done[i]) continue;
            for (std::size_t j = 0; j < nu; ++j) {
                if (room[j] <= 0) continue;
                const double v = values.at(i, j);
                // ties: lowest downstream id, then lowest upstream id
                const bool better =
                    v > best ||
                    (v == best && bi != SIZE_MAX &&
                     (values.downstream_ids[i] < values.downstream_ids[bi] ||
                      (values.downstream_ids[i] == values.downstream_ids[bi] &&
                       values.upstream_ids[j] < values.upstream_ids[bj])));
                if (better) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi == SIZE_MAX) break;  // quotas exhausted
        done[bi] = true;
        --room[bj];
        edges[values.downstream_ids[bi]] = values.upstream_ids[bj];
    }
    return edges;
}

// One pair of the distance scheme: request nearest upstream, keep the best
// `quota` requesters by pair value, rejected agents stay unmatched.
std::map<int, int> distance_pair(const RateMatrix& values, const std::vector<int>& quotas,
                                 const std::vector<Vec3>& down_pos, const std::vector<Vec3>& up_pos) {
    const std::size_t nd = values.num_down(), nu = values.num_up();
    std::vector<std::vector<std::size_t>> requests(nu);
    for (std::size_t i = 0; i < nd; ++i) {
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nu; ++j) {
            const double d = distance_3d(down_pos[i], up_pos[j]);
            if (d < best || (d == best && values.upstream_ids[j] < values.upstream_ids[nearest])) {
                best = d;
                nearest = j;
            }
        }
        requests[nearest].push_back(i);
    }
    std::map<int, int> edges;
    for (std::size_t j = 0; j < nu; ++j) {
        auto& cand = requests[j];
        std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
            if (values.at(a, j) != values.at(b, j)) return values.at(a, j) > values.at(b, j);
            return values.downstream_ids[a] < values.downstream_ids[b];
        });
        const std::size_t keep = std::min<std::size_t>(cand.size(), quotas[j]);
        for (std::size_t x = 0; x < keep; ++x)
            edges[values.downstream_ids[cand[x]]] = values.upstream_ids[j];
    }
    return edges;
}

}  // namespace

Matching greedy_association(const Market& market) {
    Matching m(market.num_pairs());
    for (int k = 0; k < market.num_pairs(); ++k) {
        const RateMatrix eff = effective_value_matrix(market, k, m);
        m.edges[k] = greedy_pair(eff, market.pairs[k].upstream_quotas);
    }
    return m;
}

Matching greedy_association(const Scenario& s) {
    return greedy_association(market_from_scenario(s));
}

Matching distance_association(const Market& market,
                              const std::vector<std::vector<Vec3>>& positions_per_layer) {
    if (static_cast<int>(positions_per_layer.size()) != market.num_layers())
        throw std::invalid_argument("distance_association: need positions for every layer");
    Matching m(market.num_pairs());
    for (int k = 0; k < market.num_pairs(); ++k) {
        const RateMatrix eff = effective_value_matrix(market, k, m);
        m.edges[k] = distance_pair(eff, market.pairs[k].upstream_quotas, positions_per_layer[k],
                                   positions_per_layer[k + 1]);
    }
    return m;
}

Matching distance_association(const Scenario& s) {
    std::vector<std::vector<Vec3>> pos(s.num_layers());
    for (int k = 0; k < s.num_layers(); ++k)
        for (const Node& n : s.layers[k]) pos[k].push_back(n.position);
    return distance_association(market_from_scenario(s), pos);
}

}  // namespace sagin
