#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dcsk_relay::theory {

// Gauss-Hermite rule for the weight exp(-x^2): sum w_m f(x_m) ~ int e^{-x^2} f.
class GaussHermiteRule {
public:
    explicit GaussHermiteRule(std::size_t order = 40) : m_(order) {
        if (order < 1) throw std::invalid_argument("GaussHermiteRule: order must be >= 1");
        build();
    }

    std::size_t order() const { return m_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    // w_m * exp(x_m^2), for integrating functions that carry no Gaussian factor.
    const std::vector<double>& unweighted() const { return unweighted_; }

    // int_{-inf}^{inf} g(t) dt with the rule centred at `center`, spread `scale`.
    template <class F>
    double integrate_real_line(F&& g, double center = 0.0, double scale = 1.0) const {
        double s = 0.0;
        for (std::size_t m = 0; m < m_; ++m) s += unweighted_[m] * g(center + scale * nodes_[m]);
        return scale * s;
    }

private:
    void build() {
        const std::size_t n = m_;
        nodes_.assign(n, 0.0);
        weights_.assign(n, 0.0);
        unweighted_.assign(n, 0.0);
        const double pim4 = std::pow(std::numbers::pi, -0.25);
        const std::size_t half = (n + 1) / 2;
        double z = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            // initial guesses for the largest roots first
            if (i == 0)
                z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
            else if (i == 1)
                z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
            else if (i == 2)
                z = 1.86 * z - 0.86 * nodes_[0];
            else if (i == 3)
                z = 1.91 * z - 0.91 * nodes_[1];
            else
                z = 2.0 * z - nodes_[i - 2];

            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // orthonormal Hermite recurrence
                double p1 = pim4, p2 = 0.0;
                for (std::size_t j = 1; j <= n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
                }
                pp = std::sqrt(2.0 * n) * p2;
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
            }
            nodes_[i] = z;
            nodes_[n - 1 - i] = -z;
            weights_[i] = weights_[n - 1 - i] = 2.0 / (pp * pp);
        }
        if (n % 2 == 1) nodes_[half - 1] = 0.0;
        // ascending order
        std::reverse(nodes_.begin(), nodes_.end());
        std::reverse(weights_.begin(), weights_.end());
        for (std::size_t m = 0; m < n; ++m)
            unweighted_[m] = std::exp(std::log(weights_[m]) + nodes_[m] * nodes_[m]);
    }

    std::size_t m_;
    std::vector<double> nodes_, weights_, unweighted_;
};

// Peak position and spread of a positive integrand on the real line, used to
// place a Gauss-Hermite rule where the mass is.
struct PeakFrame {
    double center = 0.0;
    double scale = 1.0;
    bool empty = false;
};

// Locates the peak of g on [lo, hi] by a coarse scan plus golden-section
// refinement; the spread is taken from the points where g falls to
// exp(-1/2) of its peak on either side (the wider of the two).
template <class F>
PeakFrame locate_peak(F&& g, double lo, double hi, double step = 0.25) {
    PeakFrame pf;
    double best_x = lo, best = -1.0;
    for (double x = lo; x <= hi; x += step) {
        const double v = g(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    if (!(best > 0.0)) {
        pf.empty = true;
        return pf;
    }
    double a = best_x - step, b = best_x + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 60 && b - a > 1e-9; ++it) {
        if (gc > gd) {
            b = d; d = c; gd = gc;
            c = b - gr * (b - a); gc = g(c);
        } else {
            a = c; c = d; gc = gd;
            d = a + gr * (b - a); gd = g(d);
        }
    }
    double xm = 0.5 * (a + b);
    double peak = g(xm);
    if (best > peak) {
        xm = best_x;
        peak = best;
    }
    const double target = peak * std::exp(-0.5);
    auto side = [&](double dir) {
        double prev = xm, x = xm;
        for (double h = 0.01; h < hi - lo + 1.0; h *= 1.25) {
            x = xm + dir * h;
            if (g(x) < target) break;
            prev = x;
        }
        // bisection between prev (above) and x (below)
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (prev + x);
            if (g(mid) >= target) prev = mid; else x = mid;
        }
        return std::fabs(0.5 * (prev + x) - xm);
    };
    const double sigma = std::max(side(-1.0), side(1.0));
    pf.center = xm;
    pf.scale = std::sqrt(2.0) * std::max(sigma, 1e-6);
    return pf;
}

// int_{-inf}^{inf} g(t) dt for a unimodal-ish positive g, with the rule
// recentred on the peak found in [lo, hi].
template <class F>
double adaptive_hermite_integral(const GaussHermiteRule& rule, F&& g, double lo = -80.0, double hi = 80.0) {
    const PeakFrame pf = locate_peak(g, lo, hi);
    if (pf.empty) return 0.0;
    return rule.integrate_real_line(g, pf.center, pf.scale);
}

} // namespace dcsk_relay::theory
