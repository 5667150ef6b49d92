#include "sagin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sagin/rng.hpp"

namespace sagin {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.area_m = {1000.0, 1000.0};
    c.noise_density_dbm_hz = -169.0;
    c.bandwidth_hz = {1e7, 1e7, 1e7};
    c.carrier_freq_hz = {2.5e9, 5e9, 3e9};
    c.channel = ChannelParams{};
    c.seed = 1;
    c.layers = {
        LayerConfig{"users", 30, 0.0, 1.0, 0.0, 0, Placement::UniformArea, 0.0},
        LayerConfig{"uavs", 8, 100.0, 3.0, 0.0, 6, Placement::UniformArea, 0.0},
        LayerConfig{"haps", 3, 17000.0, 10.0, 45.0, 3, Placement::Grid, 0.0},
        LayerConfig{"satellites", 2, 700000.0, 0.0, 45.0, 2, Placement::CenterOffset, 100000.0},
    };
    return c;
}

void validate_config(const ScenarioConfig& c) {
    const int K = static_cast<int>(c.layers.size());
    if (K < 2) throw std::invalid_argument("config: need at least 2 layers, got " + std::to_string(K));
    if (c.area_m[0] <= 0 || c.area_m[1] <= 0)
        throw std::invalid_argument("config: area sides must be positive");
    if (static_cast<int>(c.bandwidth_hz.size()) != K - 1)
        throw std::invalid_argument("config: bandwidth_hz needs one entry per transmitting layer (" +
                                    std::to_string(K - 1) + ")");
    if (static_cast<int>(c.carrier_freq_hz.size()) != K - 1)
        throw std::invalid_argument("config: carrier_freq_hz needs one entry per transmitting layer (" +
                                    std::to_string(K - 1) + ")");
    for (double b : c.bandwidth_hz)
        if (b <= 0) throw std::invalid_argument("config: bandwidth_hz entries must be positive");
    for (double f : c.carrier_freq_hz)
        if (f <= 0) throw std::invalid_argument("config: carrier_freq_hz entries must be positive");
    for (int k = 0; k < K; ++k) {
        const LayerConfig& lc = c.layers[k];
        const std::string where = "config layer " + std::to_string(k);
        if (lc.count < 1) throw std::invalid_argument(where + ": count must be >= 1");
        if (k == 0) {
            if (lc.altitude_m != 0.0) throw std::invalid_argument(where + ": ground layer altitude must be 0");
            if (lc.quota != 0) throw std::invalid_argument(where + ": ground layer quota must be 0");
        } else {
            if (lc.altitude_m <= 0.0) throw std::invalid_argument(where + ": altitude must be positive");
            if (lc.altitude_m <= c.layers[k - 1].altitude_m)
                throw std::invalid_argument(where + ": altitude must exceed layer " + std::to_string(k - 1));
            if (lc.quota < 1) throw std::invalid_argument(where + ": quota must be >= 1");
        }
        const bool top = (k == K - 1);
        if (!top && lc.tx_power_w <= 0)
            throw std::invalid_argument(where + ": tx_power_w must be positive for transmitting layers");
        if (lc.tx_power_w < 0) throw std::invalid_argument(where + ": tx_power_w must be >= 0");
    }
}

void validate_scenario(const Scenario& s) {
    const int K = s.num_layers();
    if (K < 2) throw std::invalid_argument("scenario: need at least 2 layers, got " + std::to_string(K));
    if (s.area_m[0] <= 0 || s.area_m[1] <= 0)
        throw std::invalid_argument("scenario: area sides must be positive");
    if (static_cast<int>(s.bandwidth_hz.size()) != K - 1)
        throw std::invalid_argument("scenario: bandwidth_hz needs " + std::to_string(K - 1) + " entries");
    if (static_cast<int>(s.carrier_freq_hz.size()) != K - 1)
        throw std::invalid_argument("scenario: carrier_freq_hz needs " + std::to_string(K - 1) + " entries");
    for (double b : s.bandwidth_hz)
        if (b <= 0) throw std::invalid_argument("scenario: bandwidth_hz entries must be positive");
    for (double f : s.carrier_freq_hz)
        if (f <= 0) throw std::invalid_argument("scenario: carrier_freq_hz entries must be positive");

    double prev_max_z = -1.0;
    for (int k = 0; k < K; ++k) {
        const auto& layer = s.layers[k];
        if (layer.empty()) throw std::invalid_argument("scenario: layer " + std::to_string(k) + " is empty");
        std::vector<int> ids;
        double min_z = layer.front().position[2], max_z = min_z;
        for (const Node& n : layer) {
            const std::string where = "layer " + std::to_string(k) + " node " + std::to_string(n.id);
            if (n.layer != k) throw std::invalid_argument(where + ": layer field mismatch");
            ids.push_back(n.id);
            min_z = std::min(min_z, n.position[2]);
            max_z = std::max(max_z, n.position[2]);
            if (k == 0) {
                if (n.position[2] != 0.0) throw std::invalid_argument(where + ": ground node altitude must be 0");
                if (n.quota != 0) throw std::invalid_argument(where + ": ground node quota must be 0");
            } else if (n.quota < 1) {
                throw std::invalid_argument(where + ": quota must be >= 1");
            }
            const bool top = (k == K - 1);
            if (!top && n.tx_power_w <= 0)
                throw std::invalid_argument(where + ": tx_power_w must be positive");
            if (n.tx_power_w < 0) throw std::invalid_argument(where + ": tx_power_w must be >= 0");
        }
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw std::invalid_argument("layer " + std::to_string(k) + ": duplicate node ids");
        if (k > 0 && min_z <= prev_max_z)
            throw std::invalid_argument("layer " + std::to_string(k) +
                                        ": altitudes must lie strictly above layer " + std::to_string(k - 1));
        prev_max_z = max_z;
    }
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    validate_config(config);
    Scenario s;
    s.area_m = config.area_m;
    s.bandwidth_hz = config.bandwidth_hz;
    s.carrier_freq_hz = config.carrier_freq_hz;
    s.noise_density_dbm_hz = config.noise_density_dbm_hz;
    s.channel = config.channel;
    s.seed = seed;

    rng::Engine eng(seed);
    const int K = static_cast<int>(config.layers.size());
    s.layers.resize(K);
    // Draw order: layers bottom to top, per node x then y. Grid/offset
    // layers draw nothing, so adding one does not shift other layers.
    for (int k = 0; k < K; ++k) {
        const LayerConfig& lc = config.layers[k];
        for (int i = 0; i < lc.count; ++i) {
            Node n;
            n.id = i;
            n.layer = k;
            n.tx_power_w = lc.tx_power_w;
            n.antenna_gain_dbi = lc.antenna_gain_dbi;
            n.quota = lc.quota;
            switch (lc.placement) {
                case Placement::UniformArea:
                    n.position[0] = rng::uniform_range(eng, 0.0, config.area_m[0]);
                    n.position[1] = rng::uniform_range(eng, 0.0, config.area_m[1]);
                    n.position[2] = lc.altitude_m;
                    break;
                case Placement::Grid: {
                    const int gx = static_cast<int>(std::ceil(std::sqrt(double(lc.count))));
                    const int gy = (lc.count + gx - 1) / gx;
                    n.position[0] = (i % gx + 0.5) / gx * config.area_m[0];
                    n.position[1] = (i / gx + 0.5) / gy * config.area_m[1];
                    n.position[2] = lc.altitude_m;
                    break;
                }
                case Placement::CenterOffset:
                    n.position[0] = config.area_m[0] / 2 + (i - (lc.count - 1) / 2.0) * lc.spacing_m;
                    n.position[1] = config.area_m[1] / 2;
                    n.position[2] = lc.altitude_m;
                    break;
            }
            s.layers[k].push_back(n);
        }
    }
    validate_scenario(s);
    return s;
}

// ---------------------------------------------------------------------------
// file format: "key = value..." lines grouped under [section] headers.
// Doubles are written with %.17g so save -> load round-trips bit-exactly.

namespace {

struct IniLine {
    int lineno;
    std::string key;
    std::vector<std::string> values;  // whitespace-separated tokens after '='
};

struct IniSection {
    std::string name;
    int lineno;
    std::vector<IniLine> lines;
};

std::vector<IniSection> parse_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::vector<IniSection> sections;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#' || line[start] == ';') continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        std::string body = line.substr(start, end - start + 1);
        if (body.front() == '[') {
            if (body.back() != ']')
                throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": malformed section header");
            sections.push_back({body.substr(1, body.size() - 2), lineno, {}});
            continue;
        }
        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        if (sections.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": entry outside any section");
        IniLine entry;
        entry.lineno = lineno;
        std::istringstream keys(body.substr(0, eq));
        std::string kw, tok;
        while (keys >> tok) entry.key += (entry.key.empty() ? "" : " ") + tok;
        std::istringstream vals(body.substr(eq + 1));
        while (vals >> tok) entry.values.push_back(tok);
        if (entry.key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
        sections.back().lines.push_back(std::move(entry));
    }
    return sections;
}

double parse_double(const std::string& path, const IniLine& l, const std::string& tok) {
    char* endp = nullptr;
    double v = std::strtod(tok.c_str(), &endp);
    if (endp == tok.c_str() || *endp != '\0')
        throw std::invalid_argument(path + ":" + std::to_string(l.lineno) + ": field '" + l.key +
                                    "': bad number '" + tok + "'");
    return v;
}

long long parse_int(const std::string& path, const IniLine& l, const std::string& tok) {
    char* endp = nullptr;
    long long v = std::strtoll(tok.c_str(), &endp, 10);
    if (endp == tok.c_str() || *endp != '\0')
        throw std::invalid_argument(path + ":" + std::to_string(l.lineno) + ": field '" + l.key +
                                    "': bad integer '" + tok + "'");
    return v;
}

const IniLine* find_key(const IniSection& sec, const std::string& key) {
    for (const auto& l : sec.lines)
        if (l.key == key) return &l;
    return nullptr;
}

const IniLine& need_key(const std::string& path, const IniSection& sec, const std::string& key) {
    const IniLine* l = find_key(sec, key);
    if (!l)
        throw std::invalid_argument(path + ": section [" + sec.name + "] is missing '" + key + "'");
    return *l;
}

double need_double(const std::string& path, const IniSection& sec, const std::string& key) {
    const IniLine& l = need_key(path, sec, key);
    if (l.values.size() != 1)
        throw std::invalid_argument(path + ":" + std::to_string(l.lineno) + ": '" + key + "' wants one value");
    return parse_double(path, l, l.values[0]);
}

long long need_int(const std::string& path, const IniSection& sec, const std::string& key) {
    const IniLine& l = need_key(path, sec, key);
    if (l.values.size() != 1)
        throw std::invalid_argument(path + ":" + std::to_string(l.lineno) + ": '" + key + "' wants one value");
    return parse_int(path, l, l.values[0]);
}

std::vector<double> need_doubles(const std::string& path, const IniSection& sec, const std::string& key,
                                 std::size_t n) {
    const IniLine& l = need_key(path, sec, key);
    if (l.values.size() != n)
        throw std::invalid_argument(path + ":" + std::to_string(l.lineno) + ": '" + key + "' wants " +
                                    std::to_string(n) + " values, got " + std::to_string(l.values.size()));
    std::vector<double> out;
    for (const auto& tok : l.values) out.push_back(parse_double(path, l, tok));
    return out;
}

void read_radio(const std::string& path, const IniSection& sec, int K, std::vector<double>& bw,
                std::vector<double>& freq, double& noise, ChannelParams& ch) {
    noise = need_double(path, sec, "noise_density_dbm_hz");
    bw = need_doubles(path, sec, "bandwidth_hz", K - 1);
    freq = need_doubles(path, sec, "carrier_freq_hz", K - 1);
    ch.los_a = need_double(path, sec, "los_a");
    ch.los_b = need_double(path, sec, "los_b");
    ch.eta_los_db = need_double(path, sec, "excess_loss_los_db");
    ch.eta_nlos_db = need_double(path, sec, "excess_loss_nlos_db");
}

void write_radio(std::ofstream& out, const std::vector<double>& bw, const std::vector<double>& freq,
                 double noise, const ChannelParams& ch) {
    out << "[radio]\n";
    out << "noise_density_dbm_hz = " << fmt_double(noise) << "\n";
    out << "bandwidth_hz =";
    for (double b : bw) out << " " << fmt_double(b);
    out << "\ncarrier_freq_hz =";
    for (double f : freq) out << " " << fmt_double(f);
    out << "\nlos_a = " << fmt_double(ch.los_a) << "\n";
    out << "los_b = " << fmt_double(ch.los_b) << "\n";
    out << "excess_loss_los_db = " << fmt_double(ch.eta_los_db) << "\n";
    out << "excess_loss_nlos_db = " << fmt_double(ch.eta_nlos_db) << "\n\n";
}

int layer_section_index(const std::string& path, const IniSection& sec) {
    // "layer N"
    std::istringstream is(sec.name);
    std::string word;
    int idx = -1;
    is >> word >> idx;
    if (word != "layer" || idx < 0 || !is.eof())
        throw std::invalid_argument(path + ":" + std::to_string(sec.lineno) + ": bad section [" + sec.name + "]");
    return idx;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    auto sections = parse_ini(path);
    if (sections.empty() || sections[0].name != "scenario")
        throw std::invalid_argument(path + ": expected a [scenario] section first");
    const IniSection& head = sections[0];
    const int K = static_cast<int>(need_int(path, head, "layers"));
    if (K < 2) throw std::invalid_argument(path + ": layers must be >= 2");

    Scenario s;
    s.seed = static_cast<std::uint64_t>(need_int(path, head, "seed"));
    s.area_m[0] = need_double(path, head, "area_x_m");
    s.area_m[1] = need_double(path, head, "area_y_m");
    s.layers.resize(K);

    bool radio_seen = false;
    std::vector<bool> layer_seen(K, false);
    for (std::size_t si = 1; si < sections.size(); ++si) {
        const IniSection& sec = sections[si];
        if (sec.name == "radio") {
            read_radio(path, sec, K, s.bandwidth_hz, s.carrier_freq_hz, s.noise_density_dbm_hz, s.channel);
            radio_seen = true;
            continue;
        }
        const int k = layer_section_index(path, sec);
        if (k >= K)
            throw std::invalid_argument(path + ":" + std::to_string(sec.lineno) + ": layer index " +
                                        std::to_string(k) + " out of range (layers = " + std::to_string(K) + ")");
        layer_seen[k] = true;
        for (const IniLine& l : sec.lines) {
            if (l.key == "name") continue;
            if (l.key != "node")
                throw std::invalid_argument(path + ":" + std::to_string(l.lineno) + ": unknown key '" + l.key +
                                            "' in [" + sec.name + "]");
            if (l.values.size() != 7)
                throw std::invalid_argument(path + ":" + std::to_string(l.lineno) +
                                            ": node wants 7 fields (id x y z tx_power_w gain_dbi quota)");
            Node n;
            n.id = static_cast<int>(parse_int(path, l, l.values[0]));
            n.layer = k;
            n.position = {parse_double(path, l, l.values[1]), parse_double(path, l, l.values[2]),
                          parse_double(path, l, l.values[3])};
            n.tx_power_w = parse_double(path, l, l.values[4]);
            n.antenna_gain_dbi = parse_double(path, l, l.values[5]);
            n.quota = static_cast<int>(parse_int(path, l, l.values[6]));
            s.layers[k].push_back(n);
        }
    }
    if (!radio_seen) throw std::invalid_argument(path + ": missing [radio] section");
    for (int k = 0; k < K; ++k)
        if (!layer_seen[k])
            throw std::invalid_argument(path + ": missing [layer " + std::to_string(k) + "] section");
    validate_scenario(s);
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    validate_scenario(s);
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << "# sagin-match scenario v1\n";
    out << "# units: position m, tx_power W, antenna_gain dBi, bandwidth Hz, carrier Hz,\n";
    out << "#        noise dBm/Hz, excess losses dB\n";
    out << "[scenario]\n";
    out << "layers = " << s.num_layers() << "\n";
    out << "seed = " << s.seed << "\n";
    out << "area_x_m = " << fmt_double(s.area_m[0]) << "\n";
    out << "area_y_m = " << fmt_double(s.area_m[1]) << "\n\n";
    write_radio(out, s.bandwidth_hz, s.carrier_freq_hz, s.noise_density_dbm_hz, s.channel);
    for (int k = 0; k < s.num_layers(); ++k) {
        out << "[layer " << k << "]\n";
        out << "# node = id x_m y_m z_m tx_power_w gain_dbi quota\n";
        for (const Node& n : s.layers[k]) {
            out << "node = " << n.id << " " << fmt_double(n.position[0]) << " " << fmt_double(n.position[1])
                << " " << fmt_double(n.position[2]) << " " << fmt_double(n.tx_power_w) << " "
                << fmt_double(n.antenna_gain_dbi) << " " << n.quota << "\n";
        }
        out << "\n";
    }
}

ScenarioConfig load_config(const std::string& path) {
    auto sections = parse_ini(path);
    if (sections.empty() || sections[0].name != "config")
        throw std::invalid_argument(path + ": expected a [config] section first");
    const IniSection& head = sections[0];
    const int K = static_cast<int>(need_int(path, head, "layers"));
    if (K < 2) throw std::invalid_argument(path + ": layers must be >= 2");

    ScenarioConfig c;
    c.seed = static_cast<std::uint64_t>(need_int(path, head, "seed"));
    c.area_m[0] = need_double(path, head, "area_x_m");
    c.area_m[1] = need_double(path, head, "area_y_m");
    c.layers.resize(K);

    bool radio_seen = false;
    std::vector<bool> layer_seen(K, false);
    for (std::size_t si = 1; si < sections.size(); ++si) {
        const IniSection& sec = sections[si];
        if (sec.name == "radio") {
            read_radio(path, sec, K, c.bandwidth_hz, c.carrier_freq_hz, c.noise_density_dbm_hz, c.channel);
            radio_seen = true;
            continue;
        }
        const int k = layer_section_index(path, sec);
        if (k >= K)
            throw std::invalid_argument(path + ":" + std::to_string(sec.lineno) + ": layer index out of range");
        layer_seen[k] = true;
        LayerConfig& lc = c.layers[k];
        if (const IniLine* l = find_key(sec, "name")) lc.name = l->values.empty() ? "" : l->values[0];
        lc.count = static_cast<int>(need_int(path, sec, "count"));
        lc.altitude_m = need_double(path, sec, "altitude_m");
        lc.tx_power_w = need_double(path, sec, "tx_power_w");
        lc.antenna_gain_dbi = need_double(path, sec, "antenna_gain_dbi");
        lc.quota = static_cast<int>(need_int(path, sec, "quota"));
        if (const IniLine* l = find_key(sec, "spacing_m"))
            lc.spacing_m = parse_double(path, *l, l->values.at(0));
        const IniLine& pl = need_key(path, sec, "placement");
        const std::string& p = pl.values.at(0);
        if (p == "uniform") lc.placement = Placement::UniformArea;
        else if (p == "grid") lc.placement = Placement::Grid;
        else if (p == "center_offset") lc.placement = Placement::CenterOffset;
        else
            throw std::invalid_argument(path + ":" + std::to_string(pl.lineno) + ": unknown placement '" + p +
                                        "' (uniform|grid|center_offset)");
    }
    if (!radio_seen) throw std::invalid_argument(path + ": missing [radio] section");
    for (int k = 0; k < K; ++k)
        if (!layer_seen[k])
            throw std::invalid_argument(path + ": missing [layer " + std::to_string(k) + "] section");
    validate_config(c);
    return c;
}

void save_config(const ScenarioConfig& c, const std::string& path) {
    validate_config(c);
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << "# sagin-match config v1\n";
    out << "# units: altitude/area/spacing m, tx_power W, antenna_gain dBi,\n";
    out << "#        bandwidth Hz, carrier Hz, noise dBm/Hz, excess losses dB\n";
    out << "[config]\n";
    out << "layers = " << c.layers.size() << "\n";
    out << "seed = " << c.seed << "\n";
    out << "area_x_m = " << fmt_double(c.area_m[0]) << "\n";
    out << "area_y_m = " << fmt_double(c.area_m[1]) << "\n\n";
    write_radio(out, c.bandwidth_hz, c.carrier_freq_hz, c.noise_density_dbm_hz, c.channel);
    for (std::size_t k = 0; k < c.layers.size(); ++k) {
        const LayerConfig& lc = c.layers[k];
        out << "[layer " << k << "]\n";
        if (!lc.name.empty()) out << "name = " << lc.name << "\n";
        out << "count = " << lc.count << "\n";
        out << "altitude_m = " << fmt_double(lc.altitude_m) << "\n";
        out << "tx_power_w = " << fmt_double(lc.tx_power_w) << "\n";
        out << "antenna_gain_dbi = " << fmt_double(lc.antenna_gain_dbi) << "\n";
        out << "quota = " << lc.quota << "\n";
        const char* p = lc.placement == Placement::UniformArea ? "uniform"
                        : lc.placement == Placement::Grid      ? "grid"
                                                               : "center_offset";
        out << "placement = " << p << "\n";
        if (lc.placement == Placement::CenterOffset) out << "spacing_m = " << fmt_double(lc.spacing_m) << "\n";
        out << "\n";
    }
}

}  // namespace sagin
