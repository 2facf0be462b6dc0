#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcsk_relay::theory {

namespace detail {

inline double gamma_series(double a, double x, double log_prefactor) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(log_prefactor);
}

// Modified Lentz evaluation of the upper-tail continued fraction.
inline double gamma_cont_fraction(double a, double x, double log_prefactor) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefactor) * h;
}

inline double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

} // namespace detail

// P(a, x) = gamma(a, x) / Gamma(a)
inline double regularized_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("regularized_lower_gamma: a must be > 0");
    if (!(x >= 0.0)) throw std::domain_error("regularized_lower_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double lp = detail::log_prefactor(a, x);
    if (x < a + 1.0) return detail::gamma_series(a, x, lp);
    return 1.0 - detail::gamma_cont_fraction(a, x, lp);
}

// Q(a, x) = 1 - P(a, x), computed without cancellation in either tail.
inline double regularized_upper_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("regularized_upper_gamma: a must be > 0");
    if (!(x >= 0.0)) throw std::domain_error("regularized_upper_gamma: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double lp = detail::log_prefactor(a, x);
    if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x, lp);
    return detail::gamma_cont_fraction(a, x, lp);
}

// Density of Gamma(shape, scale).
inline double gamma_pdf(double x, double shape, double scale) {
    if (x <= 0.0) return (x == 0.0 && shape == 1.0) ? 1.0 / scale : 0.0;
    return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale));
}

inline double gamma_cdf(double x, double shape, double scale) {
    return x <= 0.0 ? 0.0 : regularized_lower_gamma(shape, x / scale);
}

// G^{2,0}_{0,2}(x | b1, b2) = 2 x^{(b1+b2)/2} K_{b1-b2}(2 sqrt(x))
inline double meijer_g_2002(double x, double b1, double b2) {
    if (!(x > 0.0)) throw std::domain_error("meijer_g_2002: x must be > 0");
    const double nu = std::fabs(b1 - b2);
    const double arg = 2.0 * std::sqrt(x);
    // libstdc++ underflows to zero here anyway; skip the range error.
    if (arg > 700.0) return 0.0;
    return 2.0 * std::pow(x, 0.5 * (b1 + b2)) * std::cyl_bessel_k(nu, arg);
}

// Single-link DCSK bit error probability at instantaneous SNR gamma.
inline double dcsk_ber(double gamma, double beta) {
    if (gamma <= 0.0) return 0.5;
    return 0.5 * std::erfc(gamma / std::sqrt(8.0 * gamma + 8.0 * beta));
}

} // namespace dcsk_relay::theory
