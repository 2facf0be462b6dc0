#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcsk_relay/params.hpp"
#include "dcsk_relay/swipt.hpp"
#include "dcsk_relay/theory/buffer_chain.hpp"
#include "dcsk_relay/theory/delay.hpp"
#include "dcsk_relay/theory/gauss_hermite.hpp"
#include "dcsk_relay/theory/special_functions.hpp"

namespace dcsk_relay::theory {

// Averages the analysis is written in. "Per path" quantities are the scale
// of the Gamma law of the L-path sum (total mean / L).
struct AnalyticInputs {
    double l_sr = 3, l_rd = 3;
    double beta = 160;
    double p_es = 0;
    double pbar_sr = 0;   // per-path mean S->R harvest
    double pbar_dr = 0;   // per-path mean D->R harvest
    double w1 = 0;        // gamma_SR = w1 * P_SR,EH
    double w2 = 0;        // gamma_RD = w2 * P_R * P_DR,EH
    double gbar_sr = 0;   // per-path mean S->R SNR at the information receiver
    double pbar_r = 0;    // per-path scale of the relay transmit power
    double mean_pr = 0;   // mean relay transmit power
    double a = 0;         // 2 / d_rd^alpha
    double omega_rd_l = 0;
    double n0_rd = 0;
    double delta = 1;
    double decoding_cost = 0;

    static AnalyticInputs from(const SystemParams& p) {
        if (!(p.theta > 0.0 && p.theta < 1.0)) throw std::domain_error("theory: theta must lie in (0,1)");
        if (!(p.eta > 0.0)) throw std::domain_error("theory: eta must be > 0");
        if (!(p.n0_ir() > 0.0) || !(p.n0_rd > 0.0)) throw std::domain_error("theory: noise levels must be > 0");
        AnalyticInputs in;
        in.l_sr = double(p.sr.num_paths());
        in.l_rd = double(p.rd.num_paths());
        in.beta = double(p.beta);
        in.delta = p.delta;
        in.decoding_cost = p.decoding_cost;
        in.p_es = energy_shortage_probability(p);
        const double ets = p.eta * p.theta;
        in.pbar_sr = ets * p.ps * (p.sr.total_power() / in.l_sr) / p.sr.path_loss();
        in.pbar_dr = ets * p.pd() * (p.rd.total_power() / in.l_rd) / p.rd.path_loss();
        in.w1 = 2.0 * (1.0 - p.theta) / (ets * p.n0_ir());
        in.w2 = 2.0 / (ets * p.pd() * p.n0_rd);
        in.gbar_sr = in.w1 * in.pbar_sr;
        in.mean_pr = ets * p.ps * p.sr.total_power() / p.sr.path_loss() - p.decoding_cost;
        if (!(in.mean_pr > 0.0))
            throw std::domain_error("theory: mean harvested power does not exceed the decoding cost");
        in.pbar_r = in.mean_pr / in.l_sr;
        in.a = 2.0 / p.rd.path_loss();
        in.omega_rd_l = p.rd.total_power() / in.l_rd;
        in.n0_rd = p.n0_rd;
        return in;
    }
};

// Pr(X > delta Y), X ~ Gamma(L_sr, pbar_sr), Y ~ Gamma(L_rd, pbar_dr), integer L_sr.
inline double link_selection_probability(double l_sr, double l_rd, double pbar_sr, double pbar_dr, double delta) {
    if (!(l_sr >= 1.0 && l_rd >= 1.0)) throw std::domain_error("link_selection_probability: path counts must be >= 1");
    if (!(pbar_sr > 0.0 && pbar_dr > 0.0)) throw std::domain_error("link_selection_probability: average harvests must be > 0");
    if (delta <= 0.0) return 1.0;
    const double s = delta * pbar_dr + pbar_sr;
    double sum = 0.0;
    for (int l = 0; l < int(l_sr); ++l) {
        const double lt = std::lgamma(l_rd + l) - std::lgamma(l + 1.0) + l * std::log(delta * pbar_dr) +
                          l_rd * std::log(pbar_sr) - (l + l_rd) * std::log(s) - std::lgamma(l_rd);
        sum += std::exp(lt);
    }
    return std::clamp(sum, 0.0, 1.0);
}

struct SelectionProbabilities {
    double p_sr = 0.5, p_rd = 0.5;
};

inline SelectionProbabilities link_selection_probs(const SystemParams& p) {
    const double ets = p.eta * p.theta;
    const double lsr = double(p.sr.num_paths()), lrd = double(p.rd.num_paths());
    const double psr = ets * p.ps * (p.sr.total_power() / lsr) / p.sr.path_loss();
    const double pdr = ets * p.pd() * (p.rd.total_power() / lrd) / p.rd.path_loss();
    const double s = link_selection_probability(lsr, lrd, psr, pdr, p.delta);
    return {s, 1.0 - s};
}

namespace detail {

inline double log_gamma_pdf(double x, double shape, double scale) {
    return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

// E[f(X)] for X ~ Gamma(shape, scale), integrated over kappa = ln x.
template <class F>
double gamma_expectation(const GaussHermiteRule& rule, double shape, double scale, F&& f) {
    const double c = std::log(scale);
    auto g = [&](double k) {
        const double x = std::exp(k + c);
        const double lw = shape * (k + c) - x / scale - std::lgamma(shape) - shape * c;
        const double w = std::exp(lw);
        return w > 0.0 ? w * f(x) : 0.0;
    };
    // kappa is measured from ln(scale), so one scan window fits every scale
    const PeakFrame pf = locate_peak(g, -60.0, 12.0);
    if (pf.empty) return 0.0;
    return rule.integrate_real_line(g, pf.center, pf.scale);
}

} // namespace detail

// Conditional BER terms and their unconditioned counterparts.
struct BerComponents {
    double p_es = 0, p_sr = 0, p_rd = 0;
    double p_empty = 0, p_full = 0;
    double k1 = 0, k2 = 0;
    double pe_sr_cond = 0, pe_rd_cond = 0;     // given the link was chosen by comparison
    double pe_sr_uncond = 0, pe_rd_uncond = 0; // forced by buffer state
    double t_qt = 0, t_st = 0, t_cs = 0;
};

// (1-P_ES)/2 E[erfc(.) ; P_SR,EH >= delta P_DR,EH]
inline double k1_term(const AnalyticInputs& in, const GaussHermiteRule& rule) {
    const double beta = in.beta;
    auto f = [&](double v) {
        const double sel = gamma_cdf(v / in.delta, in.l_rd, in.pbar_dr);
        return sel * dcsk_ber(in.w1 * v, beta);
    };
    return (1.0 - in.p_es) * detail::gamma_expectation(rule, in.l_sr, in.pbar_sr, f);
}

// E[ber(gamma_RD) ; P_DR,EH > P_SR,EH/delta] with the relay power drawn from
// its own Gamma law, independent of the departure slot's pilots.
inline double k2_term(const AnalyticInputs& in, const GaussHermiteRule& rule) {
    const double beta = in.beta;
    auto outer = [&](double z) {
        const double sel = in.delta > 0.0 ? gamma_cdf(in.delta * z, in.l_sr, in.pbar_sr) : 0.0;
        if (sel <= 0.0) return 0.0;
        const double inner = detail::gamma_expectation(rule, in.l_sr, in.pbar_r,
                                                       [&](double x) { return dcsk_ber(in.w2 * x * z, beta); });
        return sel * inner;
    };
    return detail::gamma_expectation(rule, in.l_rd, in.pbar_dr, outer);
}

// Closed-form upper bound for K2 obtained from the Chernoff bound
// erfc(x) <= exp(-x^2) with the noise-by-noise term dropped; relay power
// taken as the same slot's harvest minus P_I (clamped at zero).
inline double k2_chernoff_bound(const AnalyticInputs& in, const GaussHermiteRule& rule) {
    const double lsr = in.l_sr, lrd = in.l_rd, d = in.delta;
    auto g = [&](double k) {
        const double v = std::exp(k);
        const double pr = std::max(v - in.decoding_cost, 0.0);
        double s = 0.0;
        for (int l = 0; l < int(lrd); ++l) {
            const double expo = -(1.0 / in.pbar_sr + in.w2 * pr / (8.0 * d) + 1.0 / (d * in.pbar_dr)) * v +
                                k * (lsr + l);
            const double lt = (lrd - l) * std::log(8.0) + expo - std::lgamma(l + 1.0) - l * std::log(d) -
                              std::lgamma(lsr) - lsr * std::log(in.pbar_sr) - l * std::log(in.pbar_dr) -
                              (lrd - l) * std::log(in.w2 * pr * in.pbar_dr + 8.0);
            s += std::exp(lt);
        }
        return s;
    };
    const double c = std::log(in.pbar_sr);
    const PeakFrame pf = locate_peak(g, c - 60.0, c + 12.0);
    if (pf.empty) return 0.0;
    return rule.integrate_real_line(g, pf.center, pf.scale);
}

// (1-P_ES)/2 E[erfc(.)] over the unconditioned S->R SNR.
inline double pe_sr_unconditioned(const AnalyticInputs& in, const GaussHermiteRule& rule) {
    return (1.0 - in.p_es) *
           detail::gamma_expectation(rule, in.l_sr, in.gbar_sr, [&](double g) { return dcsk_ber(g, in.beta); });
}

// Density of gamma_RD = A * P_R * sum(h_rd^2)/N0 via the Meijer-G form.
inline double gamma_rd_pdf(double z, const AnalyticInputs& in) {
    if (!(z > 0.0)) return 0.0;
    const double a = in.l_sr, b = in.l_rd;
    const double scale = in.a * in.pbar_r * in.omega_rd_l / in.n0_rd;
    const double u = z / scale;
    const double lg = std::log(meijer_g_2002(u, b - a, 0.0));
    if (!std::isfinite(lg)) return 0.0;
    return std::exp((a - 1.0) * std::log(u) + lg - std::lgamma(a) - std::lgamma(b) - std::log(scale));
}

// E[ber(gamma_RD)] with gamma_RD distributed by gamma_rd_pdf.
inline double pe_rd_unconditioned(const AnalyticInputs& in, const GaussHermiteRule& rule) {
    const double scale = in.a * in.pbar_r * in.omega_rd_l / in.n0_rd;
    const double c = std::log(scale);
    auto g = [&](double k) {
        const double z = std::exp(k + c);
        const double f = gamma_rd_pdf(z, in);
        return f > 0.0 ? f * z * dcsk_ber(z, in.beta) : 0.0;
    };
    const PeakFrame pf = locate_peak(g, -60.0, 12.0);
    if (pf.empty) return 0.0;
    return rule.integrate_real_line(g, pf.center, pf.scale);
}

enum class K2Model { quadrature, chernoff_bound };

struct TheoryPoint {
    double ber_bound = 0.0;
    double avg_delay = 0.0;
    BerComponents components;
    std::vector<std::string> warnings;
    bool converged = true;
};

namespace detail {

inline double clamp_prob(double v, const char* name, std::vector<std::string>& warnings) {
    if (v < -1e-9 || v > 1.0 + 1e-9)
        warnings.push_back(std::string(name) + " clamped to [0,1] from " + std::to_string(v));
    return std::clamp(v, 0.0, 1.0);
}

inline BerComponents components(const SystemParams& p, Protocol protocol, const GaussHermiteRule& rule,
                                K2Model model, std::vector<std::string>& warnings) {
    const AnalyticInputs in = AnalyticInputs::from(p);
    BerComponents c;
    c.p_es = in.p_es;
    const auto sel = link_selection_probs(p);
    c.p_sr = sel.p_sr;
    c.p_rd = sel.p_rd;
    const BufferChain chain = steady_state(protocol, p.buffer_capacity, c.p_sr, c.p_rd, c.p_es);
    c.p_empty = chain.p_empty();
    c.p_full = chain.p_full();
    const DelayBreakdown d = delay_breakdown(chain);
    c.t_qt = d.t_qt;
    c.t_st = d.t_st;
    c.t_cs = d.t_cs;

    c.k1 = k1_term(in, rule);
    c.k2 = model == K2Model::quadrature ? k2_term(in, rule) : k2_chernoff_bound(in, rule);
    c.pe_sr_cond = clamp_prob(c.p_sr > 0.0 ? c.k1 / c.p_sr : 0.0, "P'_SR", warnings);
    c.pe_rd_cond = clamp_prob(c.p_rd > 0.0 ? c.k2 / c.p_rd : 0.0, "P'_RD", warnings);
    c.pe_sr_uncond = clamp_prob(pe_sr_unconditioned(in, rule), "P''_SR", warnings);
    c.pe_rd_uncond = clamp_prob(pe_rd_unconditioned(in, rule), "P''_RD", warnings);
    return c;
}

inline double assemble(Protocol protocol, const BerComponents& c) {
    if (protocol == Protocol::p2) return c.pe_sr_cond + c.pe_rd_cond;
    const double e = c.p_empty, f = c.p_full;
    return (1 - e) * (1 - f) * (c.pe_sr_cond + c.pe_rd_cond) + e * f * (c.pe_sr_uncond + c.pe_rd_uncond) +
           e * (1 - f) * (c.pe_sr_uncond + c.pe_rd_cond) + (1 - e) * f * (c.pe_sr_cond + c.pe_rd_uncond);
}

} // namespace detail

// Evaluates the BER bound and the delay for P1 or P2. A second pass at twice
// the rule order checks quadrature convergence.
inline TheoryPoint evaluate(const SystemParams& p, Protocol protocol, const GaussHermiteRule& rule,
                            K2Model model = K2Model::quadrature, bool check_convergence = true) {
    if (protocol != Protocol::p1 && protocol != Protocol::p2)
        throw std::invalid_argument("theory: only P1 and P2 have closed-form analysis");
    if (rule.order() < 20) throw std::invalid_argument("theory: Gauss-Hermite order must be >= 20");
    TheoryPoint tp;
    tp.components = detail::components(p, protocol, rule, model, tp.warnings);
    tp.ber_bound = detail::clamp_prob(detail::assemble(protocol, tp.components), "BER bound", tp.warnings);
    tp.avg_delay = tp.components.t_qt + tp.components.t_st + tp.components.t_cs;
    if (check_convergence) {
        const GaussHermiteRule fine(2 * rule.order());
        std::vector<std::string> ignore;
        const double ref = detail::assemble(protocol, detail::components(p, protocol, fine, model, ignore));
        if (std::fabs(tp.ber_bound - ref) > 1e-6 * std::fabs(ref)) {
            tp.converged = false;
            tp.warnings.push_back("quadrature not converged: order " + std::to_string(rule.order()) + " vs " +
                                  std::to_string(fine.order()) + " differ by " +
                                  std::to_string(std::fabs(tp.ber_bound - ref) / std::fabs(ref)) + " relative");
        }
    }
    return tp;
}

inline TheoryPoint ber_protocol1(const SystemParams& p, const GaussHermiteRule& rule) {
    return evaluate(p, Protocol::p1, rule);
}
inline TheoryPoint ber_protocol2(const SystemParams& p, const GaussHermiteRule& rule) {
    return evaluate(p, Protocol::p2, rule);
}

inline DelayBreakdown delay_components(const SystemParams& p, Protocol protocol) {
    const auto sel = link_selection_probs(p);
    const double pes = energy_shortage_probability(p);
    return delay_breakdown(steady_state(protocol, p.buffer_capacity, sel.p_sr, sel.p_rd, pes));
}

inline double delay_protocol1(const SystemParams& p) { return delay_components(p, Protocol::p1).total(); }
inline double delay_protocol2(const SystemParams& p) { return delay_components(p, Protocol::p2).total(); }

} // namespace dcsk_relay::theory
