#pragma once

#include <string>
#include <vector>

#include "sagin/scenario.hpp"

namespace sagin {

enum class LinkClass { GroundToAir, AirToAir, AirToSpace };

// Achievable rates between one adjacent layer pair; rates(i, j) is the rate
// of downstream node i transmitting to upstream node j, bits/s.
struct RateMatrix {
    std::vector<int> downstream_ids;
    std::vector<int> upstream_ids;
    std::vector<double> rates;  // row-major, n_down x n_up

    std::size_t num_down() const { return downstream_ids.size(); }
    std::size_t num_up() const { return upstream_ids.size(); }
    double at(std::size_t i, std::size_t j) const { return rates[i * num_up() + j]; }
    double& at(std::size_t i, std::size_t j) { return rates[i * num_up() + j]; }
    double max_entry() const;
    double mean_positive_entry() const;  // 0 if no positive entries
    std::size_t down_index(int id) const;  // throws on unknown id
    std::size_t up_index(int id) const;
};

// P_los = 1 / (1 + a*exp(-b*(theta - a))), clamped to [0, 1].
// Domain error outside elevation [0, 90].
double los_probability(double elevation_deg, double a, double b);

// Free-space path loss, dB: 20log10(d) + 20log10(f) + 20log10(4*pi/c).
double path_loss_fs_db(double distance_m, double freq_hz);

// Ground-to-air loss: FSPL + P_los*eta_los + (1 - P_los)*eta_nlos.
double path_loss_g2a_db(double distance_m, double elevation_deg, double freq_hz,
                        const ChannelParams& params);

// Shannon rate of the tx -> rx link. SNR(dB) = P_tx(dBm) + gains - PL -
// (N0 + 10log10(B)); rate = B*log2(1 + 10^(SNR/10)). Deterministic.
double link_rate_bps(const Node& tx, const Node& rx, double freq_hz,
                     double bandwidth_hz, double noise_density_dbm_hz,
                     LinkClass link, const ChannelParams& params);

// Link class used for adjacent pair k in a K-layer chain.
LinkClass link_class_for_pair(int pair_index, int num_layers);

RateMatrix build_rate_matrix(const Scenario& s, int pair_index);

void write_rate_matrix_csv(const RateMatrix& m, const std::string& path);

}  // namespace sagin
