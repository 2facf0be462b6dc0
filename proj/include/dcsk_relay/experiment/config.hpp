#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcsk_relay/montecarlo.hpp"
#include "dcsk_relay/params.hpp"

namespace dcsk_relay::experiment {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid config:";
        for (const auto& i : v) s += "\n  " + i;
        return s;
    }
    std::vector<std::string> issues_;
};

enum class Metric { ber, delay };

inline const char* to_string(Metric m) { return m == Metric::ber ? "ber" : "delay"; }

// Physical knobs in the units a user types. Converted to SystemParams (linear
// watts) by resolve().
struct Knobs {
    double snr_db = 20.0;
    std::size_t beta = 160;
    double theta = 0.5;
    double eta = 0.6;
    double delta = 1.05;
    std::size_t J = 10;
    double ps_dbm = 1.0;
    std::optional<double> pd_dbm;
    double pi_ratio = 0.01; // P_I / P_S
    double alpha = 4.0;
    double d_sr = 1.0;
    double d_rd = 1.0;
    std::optional<double> d_sum; // when set, d_rd = d_sum - d_sr
    std::vector<int> tap_delays{0, 2, 5};
    std::size_t packet_bits = 100;
    bool n0_ir_equals_n0 = true;
    ChipNormalization normalization = ChipNormalization::unit_bit_energy;
};

inline SystemParams resolve(const Knobs& k) {
    SystemParams p;
    p.beta = k.beta;
    p.theta = k.theta;
    p.eta = k.eta;
    p.delta = k.delta;
    p.buffer_capacity = k.J;
    p.ps = dbm_to_watts(k.ps_dbm);
    if (k.pd_dbm) p.pd_override = dbm_to_watts(*k.pd_dbm);
    p.decoding_cost = k.pi_ratio * p.ps;
    const double d_rd = k.d_sum ? *k.d_sum - k.d_sr : k.d_rd;
    p.sr = ChannelProfile::equal_power(k.tap_delays, k.d_sr, k.alpha);
    p.rd = ChannelProfile::equal_power(k.tap_delays, d_rd, k.alpha);
    p.set_snr_db(k.snr_db);
    if (!k.n0_ir_equals_n0) p.n0_ir_override.reset();
    p.packet_bits = k.packet_bits;
    p.normalization = k.normalization;
    return p;
}

struct Sweep {
    std::string variable;
    std::vector<double> values;
};

inline const std::vector<std::string>& sweep_variables() {
    static const std::vector<std::string> v{"snr_db", "theta", "delta", "d_sr", "J"};
    return v;
}

inline const std::vector<std::string>& protocol_names() {
    static const std::vector<std::string> v{"P1", "P2", "SNR1", "SNR2", "conv_sd", "conv_no_buffer_swipt",
                                            "conv_dcsk_relay"};
    return v;
}

struct ExperimentConfig {
    std::string figure_id = "custom";
    Sweep sweep;
    std::optional<Sweep> series;
    std::vector<std::string> protocols;
    Metric metric = Metric::ber;
    PhyMode phy = PhyMode::chip_level;
    Knobs knobs;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    std::uint64_t slots = 20000;
    std::uint64_t trials = 1;
    std::size_t workers = 1;
    std::size_t quadrature_order = 40;
    std::vector<std::string> warnings;
};

inline void apply_variable(Knobs& k, const std::string& var, double v) {
    if (var == "snr_db") k.snr_db = v;
    else if (var == "theta") k.theta = v;
    else if (var == "delta") k.delta = v;
    else if (var == "d_sr") k.d_sr = v;
    else if (var == "J") k.J = static_cast<std::size_t>(std::llround(v));
    else throw std::invalid_argument("unknown sweep variable '" + var + "'");
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

inline std::optional<double> to_number(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) return std::nullopt;
    return v;
}

// "a, b, c" or "start:step:stop" (inclusive, tolerant to rounding)
inline std::optional<std::vector<double>> to_grid(const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        auto parts = split(s, ':');
        if (parts.size() != 3) return std::nullopt;
        auto a = to_number(parts[0]), h = to_number(parts[1]), b = to_number(parts[2]);
        if (!a || !h || !b || *h == 0.0) return std::nullopt;
        const double n = std::floor((*b - *a) / *h + 1e-9);
        if (n < 0 || n > 1e6) return std::nullopt;
        for (long i = 0; i <= long(n); ++i) {
            const double v = *a + double(i) * *h;
            out.push_back(std::round(v * 1e12) / 1e12);
        }
        return out;
    }
    if (trim(s).empty()) return out;
    for (const auto& t : split(s, ',')) {
        auto v = to_number(t);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

inline bool strictly_monotone(const std::vector<double>& v) {
    if (v.size() < 2) return true;
    const bool inc = v[1] > v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        if (inc ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    return true;
}

} // namespace detail

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> v{"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"};
    return v;
}

// Text of each figure preset, in the same grammar users write.
inline std::optional<std::string> preset_text(const std::string& name) {
    static const std::map<std::string, std::string> presets{
        {"fig4", "metric = ber\nsweep.variable = snr_db\nsweep.values = 10:2:30\n"
                 "protocols = P1, P2, conv_no_buffer_swipt, conv_sd\n"},
        {"fig5", "metric = ber\nsweep.variable = theta\nsweep.values = 0.1:0.1:0.9\n"
                 "series.variable = snr_db\nseries.values = 20, 30\nprotocols = P1, P2\n"},
        {"fig6", "metric = ber\nparams.snr_db = 25\nsweep.variable = delta\nsweep.values = 0.2:0.2:3.0\n"
                 "series.variable = J\nseries.values = 10, 30, 50\nprotocols = P1, P2\n"},
        {"fig7", "metric = ber\nparams.snr_db = 20\nparams.tap_delays = 0\nparams.d_sum = 2\n"
                 "sweep.variable = d_sr\nsweep.values = 0.2:0.2:1.8\n"
                 "protocols = P1, P2, conv_no_buffer_swipt, conv_dcsk_relay\n"},
        {"fig8", "metric = delay\nparams.snr_db = 30\nsweep.variable = delta\nsweep.values = 0.2:0.2:3.0\n"
                 "series.variable = J\nseries.values = 10, 50, 100\nprotocols = P1, P2\nslots = 200000\ntrials = 5\n"},
        {"fig9", "metric = delay\nparams.snr_db = 30\nsweep.variable = J\nsweep.values = 10:10:100\n"
                 "series.variable = delta\nseries.values = 0.8, 1.05, 1.5\nprotocols = P1, P2\nslots = 200000\ntrials = 5\n"},
        {"fig10", "metric = ber\nsweep.variable = snr_db\nsweep.values = 10:2:30\nprotocols = P1, P2, SNR1, SNR2\n"},
        {"fig11", "metric = delay\nsweep.variable = snr_db\nsweep.values = 10:2:30\nprotocols = P1, P2, SNR1, SNR2\n"
                  "slots = 200000\ntrials = 5\n"},
    };
    auto it = presets.find(name);
    if (it == presets.end()) return std::nullopt;
    return it->second;
}

namespace detail {

struct Line {
    std::size_t number;
    std::string key, value;
};

inline std::vector<Line> tokenize(const std::string& text, std::vector<std::string>& issues) {
    std::vector<Line> out;
    std::istringstream is(text);
    std::string raw;
    std::size_t n = 0;
    while (std::getline(is, raw)) {
        ++n;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(n) + ": expected 'key = value'");
            continue;
        }
        out.push_back({n, trim(s.substr(0, eq)), trim(s.substr(eq + 1))});
    }
    return out;
}

inline void apply_line(ExperimentConfig& c, const Line& ln, std::vector<std::string>& issues, bool& phy_set) {
    const std::string where = "line " + std::to_string(ln.number) + ": " + ln.key;
    auto bad = [&](const std::string& why) { issues.push_back(where + ": " + why); };
    auto num = [&](double& dst) {
        if (auto v = to_number(ln.value)) dst = *v; else bad("expected a number, got '" + ln.value + "'");
    };
    auto count = [&](auto& dst, double lo) {
        auto v = to_number(ln.value);
        if (!v || *v != std::floor(*v) || *v < lo) bad("expected an integer >= " + std::to_string(long(lo)));
        else dst = static_cast<std::remove_reference_t<decltype(dst)>>(*v);
    };
    auto grid = [&](std::vector<double>& dst) {
        if (auto g = to_grid(ln.value)) dst = *g; else bad("malformed value list '" + ln.value + "'");
    };

    const std::string& k = ln.key;
    Knobs& kn = c.knobs;
    if (k == "preset") bad("preset must be the first setting");
    else if (k == "figure_id") c.figure_id = ln.value;
    else if (k == "metric") {
        if (ln.value == "ber") c.metric = Metric::ber;
        else if (ln.value == "delay") c.metric = Metric::delay;
        else bad("expected 'ber' or 'delay'");
    } else if (k == "phy") {
        phy_set = true;
        if (ln.value == "chip") c.phy = PhyMode::chip_level;
        else if (ln.value == "link") c.phy = PhyMode::link_only;
        else bad("expected 'chip' or 'link'");
    } else if (k == "sweep.variable") c.sweep.variable = ln.value;
    else if (k == "sweep.values") grid(c.sweep.values);
    else if (k == "series.variable") {
        if (ln.value == "none") c.series.reset();
        else { if (!c.series) c.series = Sweep{}; c.series->variable = ln.value; }
    } else if (k == "series.values") {
        if (!c.series) c.series = Sweep{};
        grid(c.series->values);
    } else if (k == "protocols") c.protocols = split(ln.value, ',');
    else if (k == "output_dir") c.output_dir = ln.value;
    else if (k == "seed") count(c.seed, 0);
    else if (k == "slots") count(c.slots, 1);
    else if (k == "trials") count(c.trials, 1);
    else if (k == "workers") count(c.workers, 1);
    else if (k == "quadrature_order") count(c.quadrature_order, 20);
    else if (k == "params.snr_db") num(kn.snr_db);
    else if (k == "params.beta") count(kn.beta, 1);
    else if (k == "params.theta") num(kn.theta);
    else if (k == "params.eta") num(kn.eta);
    else if (k == "params.delta") num(kn.delta);
    else if (k == "params.J") count(kn.J, 1);
    else if (k == "params.ps_dbm") num(kn.ps_dbm);
    else if (k == "params.pd_dbm") { double v = 0; if (auto x = to_number(ln.value)) { v = *x; kn.pd_dbm = v; } else bad("expected a number"); }
    else if (k == "params.pi_ratio") num(kn.pi_ratio);
    else if (k == "params.alpha") num(kn.alpha);
    else if (k == "params.d_sr") num(kn.d_sr);
    else if (k == "params.d_rd") { num(kn.d_rd); kn.d_sum.reset(); }
    else if (k == "params.d_sum") {
        if (ln.value == "none") kn.d_sum.reset();
        else if (auto x = to_number(ln.value)) kn.d_sum = *x;
        else bad("expected a number or 'none'");
    } else if (k == "params.tap_delays") {
        kn.tap_delays.clear();
        for (const auto& t : split(ln.value, ',')) {
            auto v = to_number(t);
            if (!v || *v != std::floor(*v) || *v < 0) { bad("tap delays must be non-negative integers"); break; }
            kn.tap_delays.push_back(int(*v));
        }
    } else if (k == "params.packet_bits") count(kn.packet_bits, 1);
    else if (k == "params.n0_ir") {
        if (ln.value == "n0") kn.n0_ir_equals_n0 = true;
        else if (ln.value == "composed") kn.n0_ir_equals_n0 = false;
        else bad("expected 'n0' or 'composed'");
    } else if (k == "params.normalization") {
        if (ln.value == "unit_bit_energy") kn.normalization = ChipNormalization::unit_bit_energy;
        else if (ln.value == "raw") kn.normalization = ChipNormalization::raw;
        else bad("expected 'unit_bit_energy' or 'raw'");
    } else bad("unknown key");
}

inline void check_sweep(const Sweep& s, const std::string& name, std::vector<std::string>& issues) {
    const auto& vars = sweep_variables();
    if (std::find(vars.begin(), vars.end(), s.variable) == vars.end())
        issues.push_back(name + ".variable: unknown variable '" + s.variable + "'");
    if (s.values.empty()) issues.push_back(name + ".values: grid is empty");
    else if (!strictly_monotone(s.values)) issues.push_back(name + ".values: grid must be strictly monotone");
    if (s.variable == "J")
        for (double v : s.values)
            if (v < 1 || v != std::floor(v)) { issues.push_back(name + ".values: J must be a positive integer"); break; }
}

inline void check_knobs(const Knobs& k, const std::string& path, std::vector<std::string>& issues,
                        std::vector<std::string>& warnings) {
    if (!(k.theta >= 0.0 && k.theta <= 1.0)) issues.push_back(path + "theta: must lie in [0,1]");
    if (!(k.eta >= 0.0 && k.eta <= 1.0)) issues.push_back(path + "eta: must lie in [0,1]");
    if (k.delta < 0.0) issues.push_back(path + "delta: must be >= 0");
    else if (k.delta == 0.0)
        warnings.push_back(path + "delta: 0 makes the S->R link win every comparison");
    if (k.pi_ratio < 0.0) issues.push_back(path + "pi_ratio: decoding cost must be >= 0");
    if (k.alpha < 0.0) issues.push_back(path + "alpha: must be >= 0");
    if (!(k.d_sr > 0.0)) issues.push_back(path + "d_sr: must be > 0");
    const double d_rd = k.d_sum ? *k.d_sum - k.d_sr : k.d_rd;
    if (!(d_rd > 0.0)) issues.push_back(path + "d_rd: must be > 0");
    if (k.tap_delays.empty()) issues.push_back(path + "tap_delays: at least one path required");
    for (std::size_t i = 1; i < k.tap_delays.size(); ++i)
        if (k.tap_delays[i] <= k.tap_delays[i - 1]) {
            issues.push_back(path + "tap_delays: must be strictly increasing");
            break;
        }
    if (!k.tap_delays.empty() && std::size_t(k.tap_delays.back()) >= 2 * k.beta)
        issues.push_back(path + "tap_delays: delay spread exceeds the frame");
}

} // namespace detail

// Parses and validates a config. A leading 'preset = figN' line starts from
// that preset; later lines override it. Throws ConfigError listing every
// problem with its line or field path.
inline ExperimentConfig validate_config(const std::string& text) {
    std::vector<std::string> issues;
    auto lines = detail::tokenize(text, issues);
    ExperimentConfig c;
    bool phy_set = false;
    std::size_t start = 0;
    if (!lines.empty() && lines[0].key == "preset") {
        const std::string name = lines[0].value;
        auto pt = preset_text(name);
        if (!pt) {
            issues.push_back("line " + std::to_string(lines[0].number) + ": preset: unknown preset '" + name + "'");
        } else {
            std::vector<std::string> inner;
            for (const auto& l : detail::tokenize(*pt, inner)) detail::apply_line(c, l, inner, phy_set);
            c.figure_id = name;
        }
        start = 1;
    }
    for (std::size_t i = start; i < lines.size(); ++i) detail::apply_line(c, lines[i], issues, phy_set);

    detail::check_sweep(c.sweep, "sweep", issues);
    if (c.series) detail::check_sweep(*c.series, "series", issues);
    if (c.series && c.series->variable == c.sweep.variable)
        issues.push_back("series.variable: must differ from sweep.variable");
    if (c.protocols.empty()) issues.push_back("protocols: at least one protocol required");
    for (const auto& p : c.protocols) {
        const auto& names = protocol_names();
        if (std::find(names.begin(), names.end(), p) == names.end())
            issues.push_back("protocols: unknown protocol '" + p + "'");
    }
    detail::check_knobs(c.knobs, "params.", issues, c.warnings);
    // every grid point must also be physical
    auto check_grid = [&](const Sweep& s, const std::string& name) {
        for (double v : s.values) {
            Knobs k = c.knobs;
            try {
                apply_variable(k, s.variable, v);
            } catch (const std::exception&) {
                return;
            }
            std::vector<std::string> w;
            detail::check_knobs(k, name + ".values[" + std::to_string(v) + "].", issues, w);
        }
    };
    if (issues.empty()) {
        check_grid(c.sweep, "sweep");
        if (c.series) check_grid(*c.series, "series");
    }
    if (!issues.empty()) throw ConfigError(issues);
    if (!phy_set) c.phy = c.metric == Metric::delay ? PhyMode::link_only : PhyMode::chip_level;
    return c;
}

inline ExperimentConfig preset_config(const std::string& name) { return validate_config("preset = " + name + "\n"); }

} // namespace dcsk_relay::experiment
