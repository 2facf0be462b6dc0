#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcsk_relay/channel.hpp"
#include "dcsk_relay/dcsk.hpp"

namespace dcsk_relay {

enum class Protocol { p1, p2, snr1, snr2 };
enum class Baseline { conv_sd, conv_no_buffer_swipt, conv_dcsk_relay };

inline const char* to_string(Protocol p) {
    switch (p) {
    case Protocol::p1: return "P1";
    case Protocol::p2: return "P2";
    case Protocol::snr1: return "SNR1";
    case Protocol::snr2: return "SNR2";
    }
    return "?";
}

inline const char* to_string(Baseline b) {
    switch (b) {
    case Baseline::conv_sd: return "conv_sd";
    case Baseline::conv_no_buffer_swipt: return "conv_no_buffer_swipt";
    case Baseline::conv_dcsk_relay: return "conv_dcsk_relay";
    }
    return "?";
}

// 1 = P1 decision table, 2 = P2 decision table
inline int table_of(Protocol p) { return (p == Protocol::p1 || p == Protocol::snr1) ? 1 : 2; }
inline bool is_energy_based(Protocol p) { return p == Protocol::p1 || p == Protocol::p2; }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct SystemParams {
    std::size_t beta = 160;
    double theta = 0.5;
    double eta = 0.6;
    double delta = 1.05;
    std::size_t buffer_capacity = 10;

    double ps = dbm_to_watts(1.0);
    std::optional<double> pd_override;
    double decoding_cost = dbm_to_watts(1.0) / 100.0;

    ChannelProfile sr = ChannelProfile::three_path();
    ChannelProfile rd = ChannelProfile::three_path();

    double n0_sr = dbm_to_watts(1.0) / 100.0;
    double n0_rd = dbm_to_watts(1.0) / 100.0;
    // Conversion noise of the information receiver.
    double n0_si = dbm_to_watts(1.0) / 100.0;
    // When set, the information receiver sees exactly this noise level.
    std::optional<double> n0_ir_override;

    std::size_t packet_bits = 100;
    std::uint64_t slots = 100000;
    std::uint64_t seed = 1;
    ChipNormalization normalization = ChipNormalization::unit_bit_energy;

    double pd() const { return pd_override.value_or(ps); }
    double n0_ir() const {
        return n0_ir_override ? *n0_ir_override : (1.0 - theta) * n0_sr + n0_si;
    }
    std::size_t warmup_slots() const { return 10 * buffer_capacity; }

    // Sets every noise level from P_S/N_0 in dB, with the information
    // receiver pinned to the same N_0.
    void set_snr_db(double snr_db) {
        const double n0 = ps / db_to_linear(snr_db);
        n0_sr = n0_rd = n0_si = n0;
        n0_ir_override = n0;
    }

    // beta=160, eta=0.6, theta=0.5, delta=1.05, J=10, P_S=P_D=1 dBm,
    // P_I=P_S/100, three equal-power paths per link at unit distance.
    static SystemParams defaults(double snr_db = 20.0) {
        SystemParams p;
        p.set_snr_db(snr_db);
        return p;
    }

    void validate() const {
        std::vector<std::string> bad;
        if (beta < 1) bad.push_back("beta must be >= 1");
        if (buffer_capacity < 1) bad.push_back("buffer_capacity must be >= 1");
        if (!(theta >= 0.0 && theta <= 1.0)) bad.push_back("theta must lie in [0,1]");
        if (!(eta >= 0.0 && eta <= 1.0)) bad.push_back("eta must lie in [0,1]");
        if (!(delta >= 0.0) || !std::isfinite(delta)) bad.push_back("delta must be finite and >= 0");
        if (!(ps >= 0.0)) bad.push_back("ps must be >= 0");
        if (pd_override && !(*pd_override >= 0.0)) bad.push_back("pd must be >= 0");
        if (!(decoding_cost >= 0.0)) bad.push_back("decoding_cost must be >= 0");
        if (!(n0_sr >= 0.0) || !(n0_rd >= 0.0) || !(n0_si >= 0.0)) bad.push_back("noise levels must be >= 0");
        if (n0_ir_override && !(*n0_ir_override >= 0.0)) bad.push_back("n0_ir must be >= 0");
        if (packet_bits < 1) bad.push_back("packet_bits must be >= 1");
        for (const auto* prof : {&sr, &rd}) {
            try {
                (void)dcsk_relay::validate(*prof, beta);
            } catch (const std::invalid_argument& e) {
                bad.push_back(std::string(prof == &sr ? "sr: " : "rd: ") + e.what());
            }
        }
        if (!bad.empty()) {
            std::string msg = "invalid SystemParams:";
            for (auto& b : bad) msg += " " + b + ";";
            throw std::invalid_argument(msg);
        }
    }
};

} // namespace dcsk_relay
