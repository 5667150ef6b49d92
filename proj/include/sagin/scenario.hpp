#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sagin/geometry.hpp"

namespace sagin {

// One agent of the network. Layer 0 holds ground users; higher layers are
// relays/sinks. `quota` caps how many downstream agents the node may serve
// (0 for ground users, which never serve anyone).
struct Node {
    int id = 0;
    int layer = 0;
    Vec3 position{0.0, 0.0, 0.0};
    double tx_power_w = 0.0;
    double antenna_gain_dbi = 0.0;
    int quota = 0;
};

// Environment parameters of the probabilistic line-of-sight ground-to-air
// loss model: P_los = 1 / (1 + a*exp(-b*(theta - a))), plus the excess
// losses added on top of free-space loss for the LoS / NLoS cases.
struct ChannelParams {
    double los_a = 4.88;
    double los_b = 0.43;
    double eta_los_db = 0.1;
    double eta_nlos_db = 21.0;
};

// Immutable description of one network instance. Layer k transmits to
// layer k+1 on bandwidth_hz[k] / carrier_freq_hz[k] (size K-1 each).
struct Scenario {
    std::vector<std::vector<Node>> layers;
    std::vector<double> bandwidth_hz;
    std::vector<double> carrier_freq_hz;
    double noise_density_dbm_hz = -169.0;
    ChannelParams channel;
    std::array<double, 2> area_m{1000.0, 1000.0};
    std::uint64_t seed = 0;

    int num_layers() const { return static_cast<int>(layers.size()); }
    int num_pairs() const { return num_layers() - 1; }
};

enum class Placement { UniformArea, Grid, CenterOffset };

struct LayerConfig {
    std::string name;
    int count = 0;
    double altitude_m = 0.0;
    double tx_power_w = 0.0;
    double antenna_gain_dbi = 0.0;
    int quota = 0;
    Placement placement = Placement::UniformArea;
    double spacing_m = 100000.0;  // horizontal spacing for CenterOffset
};

struct ScenarioConfig {
    std::vector<LayerConfig> layers;
    std::array<double, 2> area_m{1000.0, 1000.0};
    std::vector<double> bandwidth_hz;
    std::vector<double> carrier_freq_hz;
    double noise_density_dbm_hz = -169.0;
    ChannelParams channel;
    std::uint64_t seed = 0;
};

// Default 4-layer configuration: 30 users (1 W) in a 1x1 km area, 8 UAVs
// at 100 m (3 W, quota 6), 3 HAPs at 17 km (10 W, 45 dBi, quota 3), 2
// satellites at 700 km (45 dBi, quota 2); 10 MHz per hop at 2.5/5/3 GHz,
// noise density -169 dBm/Hz, suburban LoS parameters.
ScenarioConfig default_config();

// Validation; throws std::invalid_argument naming the offending field/node.
void validate_scenario(const Scenario& s);
void validate_config(const ScenarioConfig& c);

// Places nodes according to the config. Users/UAVs are scattered uniformly
// (layer 0 at z = 0), Grid layers sit on a regular grid at their altitude,
// CenterOffset layers sit above the area centre at +-spacing offsets along
// x. Deterministic for a fixed seed.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Plain-text scenario files; save -> load round-trips exactly.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& c, const std::string& path);

}  // namespace sagin
