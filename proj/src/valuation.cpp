#include "sagin/valuation.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace sagin {

Market market_from_scenario(const Scenario& s) {
    Market m;
    m.pairs.reserve(s.num_pairs());
    for (int k = 0; k < s.num_pairs(); ++k) {
        PairMarket pm;
        pm.rates = build_rate_matrix(s, k);
        for (const Node& n : s.layers[k + 1]) pm.upstream_quotas.push_back(n.quota);
        m.pairs.push_back(std::move(pm));
    }
    return m;
}

std::string matching_inconsistency(const Matching& m, const Market& market) {
    if (m.num_pairs() != market.num_pairs())
        return "matching has " + std::to_string(m.num_pairs()) + " pairs, market has " +
               std::to_string(market.num_pairs());
    for (int k = 0; k < market.num_pairs(); ++k) {
        const PairMarket& pm = market.pairs[k];
        std::vector<int> load(pm.rates.num_up(), 0);
        for (const auto& [di, uj] : m.edges[k]) {
            std::size_t i, j;
            try {
                i = pm.rates.down_index(di);
                j = pm.rates.up_index(uj);
            } catch (const std::invalid_argument&) {
                return "pair " + std::to_string(k) + ": edge (" + std::to_string(di) + ", " +
                       std::to_string(uj) + ") uses an unknown id";
            }
            (void)i;
            if (++load[j] > pm.upstream_quotas[j])
                return "pair " + std::to_string(k) + ": upstream node " + std::to_string(uj) +
                       " exceeds its quota of " + std::to_string(pm.upstream_quotas[j]);
        }
    }
    return "";
}

void validate_matching(const Matching& m, const Market& market) {
    const std::string err = matching_inconsistency(m, market);
    if (!err.empty()) throw std::invalid_argument("inconsistent matching: " + err);
}

double pair_value(int pair_level, int downstream_id, int upstream_id, const RateMatrix& rates,
                  double lower_value) {
    const double r = rates.at(rates.down_index(downstream_id), rates.up_index(upstream_id));
    if (pair_level == 0) return r;
    return std::min(lower_value, r);
}

std::vector<std::vector<double>> subtree_values(const Matching& m, const Market& market) {
    const int K = market.num_layers();
    std::vector<std::vector<double>> sub(K);
    for (int k = 1; k < K; ++k) sub[k].assign(market.pairs[k - 1].rates.num_up(), 0.0);
    for (int k = 0; k < K - 1; ++k) {
        const RateMatrix& rates = market.pairs[k].rates;
        for (const auto& [di, uj] : m.edges[k]) {
            const std::size_t i = rates.down_index(di);
            const std::size_t j = rates.up_index(uj);
            const double contrib = (k == 0) ? rates.at(i, j) : std::min(sub[k][i], rates.at(i, j));
            sub[k + 1][j] += contrib;
        }
    }
    return sub;
}

RateMatrix effective_value_matrix(const Market& market, int pair_index, const Matching& m) {
    RateMatrix eff = market.pairs[pair_index].rates;
    if (pair_index == 0) return eff;
    const auto sub = subtree_values(m, market);
    const auto& lower = sub[pair_index];
    for (std::size_t i = 0; i < eff.num_down(); ++i)
        for (std::size_t j = 0; j < eff.num_up(); ++j)
            eff.at(i, j) = std::min(lower[i], eff.at(i, j));
    return eff;
}

double total_value(const Matching& m, const Market& market) {
    validate_matching(m, market);
    const auto sub = subtree_values(m, market);
    double total = 0.0;
    for (double v : sub[market.num_layers() - 1]) total += v;
    return total;
}

double total_value(const Matching& m, const Scenario& s) {
    return total_value(m, market_from_scenario(s));
}

std::map<int, double> per_user_end_to_end(const Matching& m, const Market& market) {
    validate_matching(m, market);
    const int K = market.num_layers();
    const auto sub = subtree_values(m, market);

    // Scale factor of each node of layers 1..K-1: the fraction of its
    // aggregated inbound value that survives its own uplink clip (and the
    // clips above it). Top-layer nodes pass everything through.
    std::vector<std::vector<double>> scale(K);
    scale[K - 1].assign(market.pairs[K - 2].rates.num_up(), 1.0);
    for (int k = K - 2; k >= 1; --k) {
        scale[k].assign(market.pairs[k - 1].rates.num_up(), 0.0);
        const RateMatrix& rates = market.pairs[k].rates;
        for (const auto& [di, uj] : m.edges[k]) {
            const std::size_t i = rates.down_index(di);
            const std::size_t j = rates.up_index(uj);
            const double inbound = sub[k][i];
            if (inbound <= 0.0) continue;
            const double passed = std::min(inbound, rates.at(i, j));
            scale[k][i] = (passed / inbound) * scale[k + 1][j];
        }
    }

    std::map<int, double> out;
    const RateMatrix& ground = market.pairs[0].rates;
    for (int id : ground.downstream_ids) out[id] = 0.0;
    for (const auto& [di, uj] : m.edges[0]) {
        const std::size_t i = ground.down_index(di);
        const std::size_t j = ground.up_index(uj);
        const double s1 = (K == 2) ? 1.0 : scale[1][j];
        out[di] = ground.at(i, j) * s1;
    }
    return out;
}

void write_matching_csv(const Matching& m, const Market& market, const std::string& path,
                        const std::string& header_comment) {
    validate_matching(m, market);
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    if (!header_comment.empty()) out << header_comment;
    out << "layer_pair,downstream_id,upstream_id,pair_value_bps\n";
    out.precision(17);
    const auto sub = subtree_values(m, market);
    for (int k = 0; k < market.num_pairs(); ++k) {
        const RateMatrix& rates = market.pairs[k].rates;
        for (const auto& [di, uj] : m.edges[k]) {
            const double lower = (k == 0) ? 0.0 : sub[k][rates.down_index(di)];
            out << k << "," << di << "," << uj << "," << pair_value(k, di, uj, rates, lower) << "\n";
        }
    }
}

}  // namespace sagin
