#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace dcsk_relay {

struct ChannelProfile {
    std::vector<double> tap_mean_powers{1.0};
    std::vector<int> tap_delays{0};
    double distance = 1.0;
    double path_loss_exponent = 4.0;

    std::size_t num_paths() const { return tap_mean_powers.size(); }
    double total_power() const {
        return std::accumulate(tap_mean_powers.begin(), tap_mean_powers.end(), 0.0);
    }
    double path_loss() const { return std::pow(distance, path_loss_exponent); }

    // Equal-power L-path profile with total mean power 1.
    static ChannelProfile equal_power(std::vector<int> delays, double distance, double alpha) {
        ChannelProfile p;
        p.tap_mean_powers.assign(delays.size(), 1.0 / static_cast<double>(delays.size()));
        p.tap_delays = std::move(delays);
        p.distance = distance;
        p.path_loss_exponent = alpha;
        return p;
    }

    // Three equal paths at chip delays 0, 2, 5.
    static ChannelProfile three_path(double distance = 1.0, double alpha = 4.0) {
        return equal_power({0, 2, 5}, distance, alpha);
    }

    static ChannelProfile single_path(double distance = 1.0, double alpha = 4.0) {
        return equal_power({0}, distance, alpha);
    }
};

// Throws std::invalid_argument on a malformed profile; returns soft warnings.
inline std::vector<std::string> validate(const ChannelProfile& p, std::size_t beta) {
    std::vector<std::string> warnings;
    if (p.tap_mean_powers.empty())
        throw std::invalid_argument("channel profile: no paths");
    if (p.tap_mean_powers.size() != p.tap_delays.size())
        throw std::invalid_argument("channel profile: tap powers and delays differ in length");
    for (double w : p.tap_mean_powers)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("channel profile: tap mean powers must be positive");
    for (std::size_t l = 0; l < p.tap_delays.size(); ++l) {
        if (p.tap_delays[l] < 0)
            throw std::invalid_argument("channel profile: negative tap delay");
        if (l > 0 && p.tap_delays[l] <= p.tap_delays[l - 1])
            throw std::invalid_argument("channel profile: tap delays must be strictly increasing");
    }
    if (!(p.distance > 0.0))
        throw std::invalid_argument("channel profile: distance must be positive");
    if (!(p.path_loss_exponent >= 0.0))
        throw std::invalid_argument("channel profile: path-loss exponent must be non-negative");
    if (beta > 0 && static_cast<std::size_t>(p.tap_delays.back()) >= 2 * beta)
        throw std::invalid_argument("channel profile: delay spread exceeds frame length");
    if (beta > 0 && 10.0 * p.tap_delays.back() > static_cast<double>(beta))
        warnings.push_back("channel profile: max delay exceeds beta/10, inter-chip interference is not negligible");
    return warnings;
}

struct ChannelRealization {
    std::vector<double> taps;
    const ChannelProfile* profile = nullptr;
    std::int64_t slot_index = 0;
};

template <class Rng>
ChannelRealization draw_realization(const ChannelProfile& profile, Rng& rng, std::int64_t slot = 0) {
    ChannelRealization r;
    r.profile = &profile;
    r.slot_index = slot;
    r.taps.resize(profile.num_paths());
    std::exponential_distribution<double> expo(1.0);
    for (std::size_t l = 0; l < r.taps.size(); ++l)
        r.taps[l] = std::sqrt(profile.tap_mean_powers[l] * expo(rng));
    return r;
}

inline double channel_energy(const ChannelRealization& r) {
    double e = 0.0;
    for (double h : r.taps) e += h * h;
    return e;
}

// Linear convolution with zero fill before the frame start, then AWGN of
// variance noise_psd/2 per chip. noise_psd == 0 draws nothing from rng.
template <class Rng>
void propagate_into(std::span<const double> chips, const ChannelRealization& r, double tx_power,
                    double noise_psd, Rng& rng, std::span<double> out) {
    if (!r.profile) throw std::invalid_argument("propagate: realization without profile");
    const auto& delays = r.profile->tap_delays;
    const std::size_t n = chips.size();
    if (out.size() != n) throw std::length_error("propagate: output size mismatch");
    for (int d : delays)
        if (static_cast<std::size_t>(d) >= n)
            throw std::invalid_argument("propagate: tap delay >= frame length");

    const double amp = std::sqrt(tx_power / r.profile->path_loss());
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t l = 0; l < r.taps.size(); ++l) {
        const double g = amp * r.taps[l];
        const std::size_t d = static_cast<std::size_t>(delays[l]);
        for (std::size_t k = d; k < n; ++k) out[k] += g * chips[k - d];
    }
    if (noise_psd > 0.0) {
        boost::random::normal_distribution<double> gauss(0.0, std::sqrt(noise_psd / 2.0));
        for (auto& y : out) y += gauss(rng);
    }
}

template <class Rng>
std::vector<double> propagate(std::span<const double> chips, const ChannelRealization& r,
                              double tx_power, double noise_psd, Rng& rng) {
    std::vector<double> out(chips.size());
    propagate_into(chips, r, tx_power, noise_psd, rng, std::span<double>(out));
    return out;
}

} // namespace dcsk_relay
