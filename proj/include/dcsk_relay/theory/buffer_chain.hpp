#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dcsk_relay/params.hpp"

namespace dcsk_relay::theory {

// Below this distance from a balanced chain the geometric sums switch to
// their limiting forms.
inline constexpr double kBalanceTolerance = 1e-6;

struct BufferChain {
    Protocol protocol = Protocol::p1;
    std::size_t capacity = 1;
    double p_sr = 0.5, p_rd = 0.5, p_es = 0.0;
    std::vector<double> steady_state;

    double p_empty() const { return steady_state.front(); }
    double p_full() const { return steady_state.back(); }
    double mean_occupancy() const {
        double q = 0.0;
        for (std::size_t j = 0; j < steady_state.size(); ++j) q += double(j) * steady_state[j];
        return q;
    }

    // One-step transition matrix, row-stochastic, (J+1)x(J+1).
    std::vector<std::vector<double>> transition_matrix() const {
        const std::size_t J = capacity;
        std::vector<std::vector<double>> T(J + 1, std::vector<double>(J + 1, 0.0));
        const double up = (1.0 - p_es) * p_sr;
        if (protocol == Protocol::p1) {
            T[0][1] = 1.0 - p_es * p_sr;
            T[0][0] = p_es * p_sr;
            for (std::size_t v = 1; v < J; ++v) {
                T[v][v + 1] = up;
                T[v][v] = p_es * p_sr;
                T[v][v - 1] = p_rd;
            }
            T[J][J - 1] = 1.0;
        } else {
            for (std::size_t v = 0; v <= J; ++v) {
                double stay = 1.0;
                if (v < J) { T[v][v + 1] = up; stay -= up; }
                if (v > 0) { T[v][v - 1] = p_rd; stay -= p_rd; }
                T[v][v] = stay;
            }
        }
        return T;
    }
};

namespace detail {

// k*log(x) with 0*log(0) taken as 0.
inline double klog(double k, double x) {
    if (k == 0.0) return 0.0;
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return k * std::log(x);
}

inline std::vector<double> normalize_log_weights(const std::vector<double>& lw) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : lw) mx = std::max(mx, v);
    std::vector<double> p(lw.size(), 0.0);
    if (!std::isfinite(mx)) {
        p[0] = 1.0; // every weight vanished: chain never leaves the empty state
        return p;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) s += (p[i] = std::exp(lw[i] - mx));
    for (auto& v : p) v /= s;
    return p;
}

inline void check_probs(double p_sr, double p_rd, double p_es) {
    for (double v : {p_sr, p_rd, p_es})
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("buffer chain: probabilities must lie in [0,1]");
}

} // namespace detail

// Stationary occupancy of the buffer chain.
//  P1: 0 -> 1 w.p. 1 - P_ES P_SR, interior up (1-P_ES)P_SR / down P_RD, full -> J-1 always.
//  P2: birth-death with up (1-P_ES)P_SR, down P_RD, self-loops elsewhere.
inline BufferChain steady_state(Protocol protocol, std::size_t J, double p_sr, double p_rd, double p_es) {
    if (J < 1) throw std::invalid_argument("steady_state: J must be >= 1");
    if (protocol != Protocol::p1 && protocol != Protocol::p2)
        throw std::invalid_argument("steady_state: only P1 and P2 have a chain model");
    detail::check_probs(p_sr, p_rd, p_es);
    BufferChain c{protocol, J, p_sr, p_rd, p_es, {}};
    const double up = (1.0 - p_es) * p_sr;
    std::vector<double> lw(J + 1);
    const double dJ = double(J);
    if (protocol == Protocol::p1) {
        // weights scaled by up^J:
        //   j = J: up^J;  1 <= j <= J-1: P_RD^{J-j-1} up^j;  j = 0: up P_RD^{J-1} / (1 - P_ES P_SR)
        const double leave0 = 1.0 - p_es * p_sr;
        lw[J] = detail::klog(dJ, up);
        for (std::size_t j = 1; j < J; ++j)
            lw[j] = detail::klog(dJ - double(j) - 1.0, p_rd) + detail::klog(double(j), up);
        if (J == 1) {
            // full state returns to 0 with certainty: P_1 = (1 - P_ES P_SR) P_0
            lw[0] = 0.0;
            lw[1] = std::log(leave0);
            if (leave0 <= 0.0) lw[1] = -std::numeric_limits<double>::infinity();
        } else {
            lw[0] = leave0 > 0.0 ? std::log(up) + detail::klog(dJ - 1.0, p_rd) - std::log(leave0)
                                 : 0.0;
            if (leave0 <= 0.0) {
                // P_ES = P_SR = 1: nothing ever enters
                std::fill(lw.begin(), lw.end(), -std::numeric_limits<double>::infinity());
                lw[0] = 0.0;
            }
        }
    } else {
        for (std::size_t j = 0; j <= J; ++j)
            lw[j] = detail::klog(double(j), up) + detail::klog(dJ - double(j), p_rd);
    }
    c.steady_state = detail::normalize_log_weights(lw);
    return c;
}

inline double xi_p1(double p_sr, double p_rd, double p_es) { return p_rd / ((1.0 - p_es) * p_sr); }

// Full-buffer probability of P1 in closed form.
inline double p_full_p1(std::size_t J, double p_sr, double p_rd, double p_es) {
    const double xi = xi_p1(p_sr, p_rd, p_es);
    const double dJ = double(J);
    const double geo = std::fabs(xi - 1.0) < kBalanceTolerance ? dJ - 1.0 : (xi - std::pow(xi, dJ)) / (1.0 - xi);
    return 1.0 / (1.0 + geo / p_rd + std::pow(xi, dJ - 1.0) / (1.0 - p_es * p_sr));
}

inline double p_empty_p1(std::size_t J, double p_sr, double p_rd, double p_es) {
    const double xi = xi_p1(p_sr, p_rd, p_es);
    return std::pow(xi, double(J) - 1.0) / (1.0 - p_es * p_sr) * p_full_p1(J, p_sr, p_rd, p_es);
}

inline double p_full_p2(std::size_t J, double p_sr, double p_rd, double p_es) {
    const double a = p_sr * (1.0 - p_es), b = p_rd, dJ = double(J);
    if (std::fabs(a / b - 1.0) < kBalanceTolerance) return 1.0 / (dJ + 1.0);
    return std::pow(a, dJ) * (a - b) / (std::pow(a, dJ + 1.0) - std::pow(b, dJ + 1.0));
}

inline double p_empty_p2(std::size_t J, double p_sr, double p_rd, double p_es) {
    const double a = (1.0 - p_es) * (1.0 - p_rd), b = p_rd, dJ = double(J);
    (void)p_sr;
    if (std::fabs(a / b - 1.0) < kBalanceTolerance) return 1.0 / (dJ + 1.0);
    return std::pow(b, dJ) * (b - a) / (std::pow(b, dJ + 1.0) - std::pow(a, dJ + 1.0));
}

} // namespace dcsk_relay::theory
