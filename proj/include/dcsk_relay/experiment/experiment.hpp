#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dcsk_relay/experiment/config.hpp"
#include "dcsk_relay/montecarlo.hpp"
#include "dcsk_relay/theory/theory.hpp"

namespace dcsk_relay::experiment {

struct PointResult {
    double sweep_value = 0.0;
    std::optional<double> series_value;
    std::string protocol;
    Metric metric = Metric::ber;
    double sim = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = std::numeric_limits<double>::quiet_NaN();
    double theory = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::uint64_t slots = 0;
    std::uint64_t bits = 0, bit_errors = 0, delay_packets = 0;
    std::string status = "ok"; // ok | warning | error
    std::vector<std::string> messages;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<PointResult> points;
    std::filesystem::path csv_path, manifest_path;
    double wall_seconds = 0.0;
    std::size_t failed() const {
        std::size_t n = 0;
        for (const auto& p : points) n += p.status == "error";
        return n;
    }
};

namespace detail {

struct Job {
    std::size_t series_idx, sweep_idx, protocol_idx;
};

inline std::optional<Protocol> parse_protocol(const std::string& s) {
    for (auto p : {Protocol::p1, Protocol::p2, Protocol::snr1, Protocol::snr2})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

inline std::optional<Baseline> parse_baseline(const std::string& s) {
    for (auto b : {Baseline::conv_sd, Baseline::conv_no_buffer_swipt, Baseline::conv_dcsk_relay})
        if (s == to_string(b)) return b;
    return std::nullopt;
}

// Standard error of the mean over independent batches.
inline double batch_stderr(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

inline PointResult run_point(const ExperimentConfig& cfg, const Job& job, const theory::GaussHermiteRule& rule) {
    PointResult r;
    r.protocol = cfg.protocols[job.protocol_idx];
    r.metric = cfg.metric;
    r.sweep_value = cfg.sweep.values[job.sweep_idx];
    Knobs k = cfg.knobs;
    if (cfg.series) {
        r.series_value = cfg.series->values[job.series_idx];
        apply_variable(k, cfg.series->variable, *r.series_value);
    }
    apply_variable(k, cfg.sweep.variable, r.sweep_value);

    // every protocol at one grid point shares its seed
    const std::size_t point = job.series_idx * cfg.sweep.values.size() + job.sweep_idx;
    r.seed = derive_seed(cfg.seed, point);
    r.slots = cfg.slots;
    auto fail = [&](const std::string& what) {
        r.status = "error";
        r.messages.push_back(what);
    };
    SystemParams p;
    try {
        p = resolve(k);
        p.seed = r.seed;
        p.slots = cfg.slots;
        p.validate();
    } catch (const std::exception& e) {
        fail(e.what());
        return r;
    }

    RunOptions opt;
    opt.phy = cfg.phy;
    const auto proto = parse_protocol(r.protocol);
    const auto base = parse_baseline(r.protocol);
    try {
        // trials are seeded as in run_trials; delay stderr comes from their spread
        RunResult sim;
        std::vector<double> trial_delay;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            SystemParams q = p;
            q.seed = derive_seed(p.seed, t);
            RunResult one = proto ? run_protocol_sim(q, *proto, opt) : run_baseline_sim(q, *base, opt);
            trial_delay.push_back(one.avg_delay_slots());
            sim += one;
        }
        dcsk_relay::detail::finish_warnings(sim);
        r.bits = sim.bits;
        r.bit_errors = sim.bit_errors;
        r.delay_packets = sim.delay_packets;
        if (cfg.metric == Metric::ber) {
            r.sim = sim.end_to_end_ber();
            r.stderr_ = sim.confidence();
        } else {
            r.sim = sim.avg_delay_slots();
            r.stderr_ = batch_stderr(trial_delay);
            if (trial_delay.size() < 2) r.messages.push_back("delay stderr needs trials >= 2");
        }
        for (const auto& w : sim.warnings) {
            // link-only runs carry no bits, so the bit-count warnings are noise there
            if (cfg.metric == Metric::delay && w == dcsk_relay::detail::kFewErrors) continue;
            r.messages.push_back(w);
        }
    } catch (const std::exception& e) {
        fail(std::string("simulation: ") + e.what());
    }

    if (proto && is_energy_based(*proto)) {
        try {
            if (cfg.metric == Metric::ber) {
                const auto tp = theory::evaluate(p, *proto, rule);
                r.theory = tp.ber_bound;
                for (const auto& w : tp.warnings) r.messages.push_back("theory: " + w);
            } else {
                r.theory = theory::delay_components(p, *proto).total();
            }
        } catch (const std::exception& e) {
            r.messages.push_back(std::string("theory unavailable: ") + e.what());
        }
    }
    if (r.status == "ok" && !r.messages.empty()) r.status = "warning";
    return r;
}

inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

inline nlohmann::json num_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

} // namespace detail

inline void write_csv(std::ostream& os, const std::vector<PointResult>& pts) {
    os << "sweep,series,protocol,metric,sim,stderr,theory,seed,slots,status\n";
    for (const auto& p : pts) {
        std::string status = p.status;
        for (const auto& m : p.messages) status += "; " + m;
        os << detail::fmt_num(p.sweep_value) << ','
           << (p.series_value ? detail::fmt_num(*p.series_value) : std::string()) << ','
           << detail::csv_field(p.protocol) << ',' << to_string(p.metric) << ',' << detail::fmt_num(p.sim) << ','
           << detail::fmt_num(p.stderr_) << ',' << detail::fmt_num(p.theory) << ',' << p.seed << ',' << p.slots
           << ',' << detail::csv_field(status) << '\n';
    }
}

inline nlohmann::json manifest(const ExperimentResult& res) {
    const auto& c = res.config;
    const auto& k = c.knobs;
    nlohmann::json j;
    j["figure_id"] = c.figure_id;
    j["metric"] = to_string(c.metric);
    j["phy"] = c.phy == PhyMode::chip_level ? "chip" : "link";
    j["sweep"] = {{"variable", c.sweep.variable}, {"values", c.sweep.values}};
    if (c.series) j["series"] = {{"variable", c.series->variable}, {"values", c.series->values}};
    else j["series"] = nullptr;
    j["protocols"] = c.protocols;
    j["seed"] = c.seed;
    j["slots"] = c.slots;
    j["trials"] = c.trials;
    j["workers"] = c.workers;
    j["quadrature_order"] = c.quadrature_order;
    j["params"] = {{"snr_db", k.snr_db},
                   {"beta", k.beta},
                   {"theta", k.theta},
                   {"eta", k.eta},
                   {"delta", k.delta},
                   {"J", k.J},
                   {"ps_dbm", k.ps_dbm},
                   {"pd_dbm", k.pd_dbm ? nlohmann::json(*k.pd_dbm) : nlohmann::json(nullptr)},
                   {"pi_ratio", k.pi_ratio},
                   {"alpha", k.alpha},
                   {"d_sr", k.d_sr},
                   {"d_rd", k.d_rd},
                   {"d_sum", k.d_sum ? nlohmann::json(*k.d_sum) : nlohmann::json(nullptr)},
                   {"tap_delays", k.tap_delays},
                   {"packet_bits", k.packet_bits},
                   {"n0_ir", k.n0_ir_equals_n0 ? "n0" : "composed"},
                   {"normalization", k.normalization == ChipNormalization::raw ? "raw" : "unit_bit_energy"}};
    j["config_warnings"] = c.warnings;
    j["csv"] = res.csv_path.filename().string();
    j["wall_seconds"] = res.wall_seconds;
    j["failed_points"] = res.failed();
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& p : res.points) {
        pts.push_back({{"sweep", p.sweep_value},
                       {"series", p.series_value ? nlohmann::json(*p.series_value) : nlohmann::json(nullptr)},
                       {"protocol", p.protocol},
                       {"sim", detail::num_or_null(p.sim)},
                       {"stderr", detail::num_or_null(p.stderr_)},
                       {"theory", detail::num_or_null(p.theory)},
                       {"seed", p.seed},
                       {"bits", p.bits},
                       {"bit_errors", p.bit_errors},
                       {"delay_packets", p.delay_packets},
                       {"status", p.status},
                       {"messages", p.messages}});
    }
    return j;
}

// Runs every (series, sweep, protocol) point on a worker pool. A failing
// point is recorded and the rest still run. Output goes to
// <output_dir>/<figure_id>.csv and <figure_id>.json.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files = true) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.config = cfg;
    const std::size_t ns = cfg.series ? cfg.series->values.size() : 1;
    std::vector<detail::Job> jobs;
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t x = 0; x < cfg.sweep.values.size(); ++x)
            for (std::size_t q = 0; q < cfg.protocols.size(); ++q) jobs.push_back({s, x, q});
    res.points.resize(jobs.size());

    const theory::GaussHermiteRule rule(cfg.quadrature_order);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            try {
                res.points[i] = detail::run_point(cfg, jobs[i], rule);
            } catch (const std::exception& e) {
                res.points[i].status = "error";
                res.points[i].messages.push_back(e.what());
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, jobs.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (write_files) {
        const std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        res.csv_path = dir / (cfg.figure_id + ".csv");
        res.manifest_path = dir / (cfg.figure_id + ".json");
        std::ofstream csv(res.csv_path);
        if (!csv) throw std::runtime_error("cannot write " + res.csv_path.string());
        write_csv(csv, res.points);
        if (!csv) throw std::runtime_error("write failed for " + res.csv_path.string());
        std::ofstream js(res.manifest_path);
        if (!js) throw std::runtime_error("cannot write " + res.manifest_path.string());
        js << manifest(res).dump(2) << '\n';
        if (!js) throw std::runtime_error("write failed for " + res.manifest_path.string());
    }
    return res;
}

} // namespace dcsk_relay::experiment
