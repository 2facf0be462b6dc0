#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "dcsk_relay/params.hpp"
#include "dcsk_relay/theory/buffer_chain.hpp"

namespace dcsk_relay::theory {

struct DelayBreakdown {
    double queue_length = 0.0; // Q
    double arrival_rate = 0.0; // R
    double t_qt = 0.0;         // queuing delay Q/R
    double t_st = 0.0;         // silent slots from energy shortage
    double t_cs = 0.0;         // P2 only: empty-buffer slots where R->D won
    double total() const { return t_qt + t_st + t_cs; }
};

// Mean queue length of P1 in closed form (geometric sums), limit at xi = 1.
inline double queue_length_p1(const BufferChain& c) {
    const double J = double(c.capacity);
    const double xi = xi_p1(c.p_sr, c.p_rd, c.p_es);
    if (std::fabs(xi - 1.0) < kBalanceTolerance) return c.p_full() * (J * (J - 1.0) / (2.0 * c.p_rd) + J);
    const double g = 1.0 - 1.0 / xi;
    return c.p_full() * ((std::pow(xi, J - 1.0) - 1.0) / (c.p_rd * g * g) - (J - 1.0) / (c.p_rd * g) + J);
}

// Mean queue length of P2 in closed form, limit at rho = 1.
inline double queue_length_p2(const BufferChain& c) {
    const double J = double(c.capacity);
    const double rho = c.p_rd / ((1.0 - c.p_es) * (1.0 - c.p_rd));
    if (std::fabs(rho - 1.0) < kBalanceTolerance) return c.p_full() * (J * (J + 1.0) / 2.0);
    const double g = 1.0 - 1.0 / rho;
    return c.p_full() * ((std::pow(rho, J - 1.0) - 1.0) / (g * g) - (J - 1.0) / g + J);
}

// Mean number of shortage slots before a successful reception.
inline double silent_shortage_delay(double p_es) {
    if (p_es >= 1.0) return std::numeric_limits<double>::infinity();
    return p_es / (1.0 - p_es);
}

inline DelayBreakdown delay_breakdown(const BufferChain& c) {
    DelayBreakdown d;
    const double up = (1.0 - c.p_es) * c.p_sr;
    d.t_st = silent_shortage_delay(c.p_es);
    if (c.protocol == Protocol::p1) {
        d.queue_length = queue_length_p1(c);
        d.arrival_rate = up * (1.0 - c.p_full()) + c.p_rd * c.p_empty();
    } else {
        d.queue_length = queue_length_p2(c);
        d.arrival_rate = up * (1.0 - c.p_full());
        const double p0 = c.p_empty();
        d.t_cs = p0 < 1.0 ? p0 / (1.0 - p0) : std::numeric_limits<double>::infinity();
    }
    d.t_qt = d.arrival_rate > 0.0 ? d.queue_length / d.arrival_rate : std::numeric_limits<double>::infinity();
    return d;
}

} // namespace dcsk_relay::theory
