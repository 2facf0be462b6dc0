#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "dcsk_relay/channel.hpp"
#include "dcsk_relay/params.hpp"
#include "dcsk_relay/theory/special_functions.hpp"

namespace dcsk_relay {

struct HarvestReport {
    double p_sr_eh = 0.0;
    double p_dr_eh = 0.0;
    bool shortage = false;
    // P_I at harvest time; decoding needs strictly more than this.
    double decoding_cost = 0.0;

    bool decodable() const { return p_sr_eh > decoding_cost; }
    // What the relay would keep after decoding a packet in this slot.
    double residual() const { return p_sr_eh - decoding_cost; }
};

struct EnergyLedgerEntry {
    std::uint64_t packet_id = 0;
    double residual_power = 0.0;
};

inline HarvestReport harvest(const ChannelRealization& sr, const ChannelRealization& rd,
                             const SystemParams& p) {
    HarvestReport r;
    r.decoding_cost = p.decoding_cost;
    r.p_sr_eh = p.eta * p.theta * p.ps * channel_energy(sr) / p.sr.path_loss();
    r.p_dr_eh = p.eta * p.theta * p.pd() * channel_energy(rd) / p.rd.path_loss();
    r.shortage = r.p_sr_eh < p.decoding_cost;
    return r;
}

// sqrt(1-theta) power split toward the information receiver plus conversion
// noise of variance n0_si/2 per chip, in place.
template <class Rng>
void split_for_decoding_inplace(std::span<double> chips, double theta, double n0_si, Rng& rng) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("split_for_decoding: theta must lie in [0,1]");
    const double a = std::sqrt(1.0 - theta);
    if (n0_si > 0.0) {
        boost::random::normal_distribution<double> gauss(0.0, std::sqrt(n0_si / 2.0));
        for (auto& x : chips) x = a * x + gauss(rng);
    } else {
        for (auto& x : chips) x *= a;
    }
}

template <class Rng>
std::vector<double> split_for_decoding(std::span<const double> received, double theta, double n0_si,
                                       Rng& rng) {
    std::vector<double> out(received.begin(), received.end());
    split_for_decoding_inplace(std::span<double>(out), theta, n0_si, rng);
    return out;
}

// Probability that the S->R pilot harvest falls below P_I. The sum of L
// equal-power Rayleigh powers with total mean Omega is Gamma(L, Omega/L).
inline double energy_shortage_probability(const SystemParams& p) {
    if (p.decoding_cost < 0.0) throw std::domain_error("energy_shortage_probability: P_I < 0");
    const double scale = p.eta * p.theta * p.ps;
    if (!(scale > 0.0))
        throw std::domain_error("energy_shortage_probability: eta*theta*P_S must be > 0");
    const double L = static_cast<double>(p.sr.num_paths());
    const double omega = p.sr.total_power();
    const double x = p.decoding_cost * L * p.sr.path_loss() / (scale * omega);
    return theory::regularized_lower_gamma(L, x);
}

} // namespace dcsk_relay
