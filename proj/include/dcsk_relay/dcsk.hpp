#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcsk_relay {

class degenerate_sequence_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// How a reference sequence is scaled before it is put on the air.
//  raw:             logistic-map iterates as generated
//  unit_bit_energy: reference half scaled to energy 1/2, so the full 2*beta
//                   chip frame carries unit energy per bit
enum class ChipNormalization { raw, unit_bit_energy };

struct ChaoticFrame {
    std::vector<double> reference;
    std::vector<double> data;
    int bit = 0;

    std::size_t beta() const { return reference.size(); }

    std::vector<double> chips() const {
        std::vector<double> out(reference);
        out.insert(out.end(), data.begin(), data.end());
        return out;
    }
};

struct DecisionMetric {
    double z = 0.0;
};

struct Demodulated {
    int bit = 0;
    DecisionMetric metric;
};

inline double logistic_step(double c) {
    if (!(std::fabs(c) <= 1.0))
        throw std::domain_error("logistic_step: |c| must be <= 1");
    return 1.0 - 2.0 * c * c;
}

inline bool is_logistic_fixed_point(double c) { return c == 0.5 || c == -1.0; }

inline void generate_chaos_into(double seed, std::span<double> out) {
    if (!(std::fabs(seed) <= 1.0))
        throw std::domain_error("generate_chaos: seed outside [-1, 1]");
    if (is_logistic_fixed_point(seed))
        throw degenerate_sequence_error("generate_chaos: seed is a fixed point of the logistic map");
    double c = seed;
    for (auto& x : out) {
        x = c;
        c = 1.0 - 2.0 * c * c;
    }
}

inline std::vector<double> generate_chaos(double seed, std::size_t length) {
    std::vector<double> out(length);
    if (length == 0) return out;
    generate_chaos_into(seed, out);
    return out;
}

// Scale so that sum(ref^2) == 1/2. A reference with no energy cannot be
// normalized and is reported as degenerate.
inline void normalize_reference(std::span<double> reference) {
    double e = 0.0;
    for (double x : reference) e += x * x;
    if (!(e > 0.0))
        throw degenerate_sequence_error("normalize_reference: zero-energy reference");
    const double s = std::sqrt(0.5 / e);
    for (auto& x : reference) x *= s;
}

inline void modulate_into(int bit, std::span<const double> reference, std::span<double> frame) {
    const std::size_t beta = reference.size();
    if (frame.size() != 2 * beta)
        throw std::length_error("modulate: frame must hold 2*beta chips");
    const double sign = bit ? 1.0 : -1.0;
    for (std::size_t k = 0; k < beta; ++k) {
        frame[k] = reference[k];
        frame[beta + k] = sign * reference[k];
    }
}

inline ChaoticFrame modulate(int bit, std::span<const double> reference) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("modulate: bit must be 0 or 1");
    if (reference.empty()) throw std::length_error("modulate: empty reference");
    ChaoticFrame f;
    f.bit = bit;
    f.reference.assign(reference.begin(), reference.end());
    f.data.resize(reference.size());
    const double sign = bit ? 1.0 : -1.0;
    for (std::size_t k = 0; k < reference.size(); ++k) f.data[k] = sign * reference[k];
    return f;
}

inline double correlate(std::span<const double> received) {
    if (received.empty() || received.size() % 2 != 0)
        throw std::length_error("demodulate: received frame must have 2*beta chips");
    const std::size_t beta = received.size() / 2;
    double z = 0.0;
    for (std::size_t k = 0; k < beta; ++k) z += received[k] * received[beta + k];
    return z;
}

// Tie z == 0 decides bit 0.
inline Demodulated demodulate(std::span<const double> received) {
    const double z = correlate(received);
    return {z > 0.0 ? 1 : 0, {z}};
}

inline Demodulated demodulate(std::span<const double> received, std::size_t beta) {
    if (received.size() != 2 * beta)
        throw std::length_error("demodulate: expected " + std::to_string(2 * beta) + " chips");
    return demodulate(received);
}

} // namespace dcsk_relay
