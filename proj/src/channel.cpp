#include "sagin/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sagin {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

double RateMatrix::max_entry() const {
    double m = 0.0;
    for (double v : rates) m = std::max(m, v);
    return m;
}

double RateMatrix::mean_positive_entry() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : rates)
        if (v > 0.0) { sum += v; ++n; }
    return n ? sum / double(n) : 0.0;
}

std::size_t RateMatrix::down_index(int id) const {
    for (std::size_t i = 0; i < downstream_ids.size(); ++i)
        if (downstream_ids[i] == id) return i;
    throw std::invalid_argument("unknown downstream id " + std::to_string(id));
}

std::size_t RateMatrix::up_index(int id) const {
    for (std::size_t j = 0; j < upstream_ids.size(); ++j)
        if (upstream_ids[j] == id) return j;
    throw std::invalid_argument("unknown upstream id " + std::to_string(id));
}

double los_probability(double elevation_deg, double a, double b) {
    if (elevation_deg < 0.0 || elevation_deg > 90.0)
        throw std::domain_error("los_probability: elevation " + std::to_string(elevation_deg) +
                                " outside [0, 90]");
    const double p = 1.0 / (1.0 + a * std::exp(-b * (elevation_deg - a)));
    return std::clamp(p, 0.0, 1.0);
}

double path_loss_fs_db(double distance_m, double freq_hz) {
    if (distance_m <= 0.0) throw std::domain_error("path loss: distance must be positive");
    if (freq_hz <= 0.0) throw std::domain_error("path loss: frequency must be positive");
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(freq_hz) +
           20.0 * std::log10(4.0 * M_PI / kSpeedOfLight);
}

double path_loss_g2a_db(double distance_m, double elevation_deg, double freq_hz,
                        const ChannelParams& params) {
    const double p_los = los_probability(elevation_deg, params.los_a, params.los_b);
    return path_loss_fs_db(distance_m, freq_hz) + p_los * params.eta_los_db +
           (1.0 - p_los) * params.eta_nlos_db;
}

double link_rate_bps(const Node& tx, const Node& rx, double freq_hz, double bandwidth_hz,
                     double noise_density_dbm_hz, LinkClass link, const ChannelParams& params) {
    if (tx.layer >= rx.layer)
        throw std::invalid_argument("link_rate: tx layer " + std::to_string(tx.layer) +
                                    " not below rx layer " + std::to_string(rx.layer));
    if (bandwidth_hz <= 0.0) throw std::domain_error("link_rate: bandwidth must be positive");
    const double d = distance_3d(tx.position, rx.position);
    double pl;
    if (link == LinkClass::GroundToAir) {
        const double elev = std::max(0.0, elevation_deg(tx.position, rx.position));
        pl = path_loss_g2a_db(d, elev, freq_hz, params);
    } else {
        pl = path_loss_fs_db(d, freq_hz);
    }
    if (tx.tx_power_w <= 0.0) return 0.0;
    const double tx_dbm = 10.0 * std::log10(tx.tx_power_w * 1000.0);
    const double noise_dbm = noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    const double snr_db = tx_dbm + tx.antenna_gain_dbi + rx.antenna_gain_dbi - pl - noise_dbm;
    return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

LinkClass link_class_for_pair(int pair_index, int num_layers) {
    if (pair_index == 0) return LinkClass::GroundToAir;
    if (pair_index == num_layers - 2) return LinkClass::AirToSpace;
    return LinkClass::AirToAir;
}

RateMatrix build_rate_matrix(const Scenario& s, int pair_index) {
    if (pair_index < 0 || pair_index >= s.num_pairs())
        throw std::invalid_argument("build_rate_matrix: pair index " + std::to_string(pair_index) +
                                    " out of range");
    const auto& down = s.layers[pair_index];
    const auto& up = s.layers[pair_index + 1];
    const LinkClass link = link_class_for_pair(pair_index, s.num_layers());

    RateMatrix m;
    m.downstream_ids.reserve(down.size());
    m.upstream_ids.reserve(up.size());
    for (const Node& n : down) m.downstream_ids.push_back(n.id);
    for (const Node& n : up) m.upstream_ids.push_back(n.id);
    m.rates.resize(down.size() * up.size());
    for (std::size_t i = 0; i < down.size(); ++i)
        for (std::size_t j = 0; j < up.size(); ++j)
            m.at(i, j) = link_rate_bps(down[i], up[j], s.carrier_freq_hz[pair_index],
                                       s.bandwidth_hz[pair_index], s.noise_density_dbm_hz, link,
                                       s.channel);
    return m;
}

void write_rate_matrix_csv(const RateMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << "downstream_id";
    for (int id : m.upstream_ids) out << "," << id;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < m.num_down(); ++i) {
        out << m.downstream_ids[i];
        for (std::size_t j = 0; j < m.num_up(); ++j) out << "," << m.at(i, j);
        out << "\n";
    }
}

}  // namespace sagin
