#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "dcsk_relay/channel.hpp"
#include "dcsk_relay/dcsk.hpp"
#include "dcsk_relay/linksel.hpp"
#include "dcsk_relay/params.hpp"
#include "dcsk_relay/swipt.hpp"

namespace dcsk_relay {

// Same sequence as std::mt19937_64; the Boost engine is markedly faster.
using Rng = boost::random::mt19937_64;

// chip_level pushes every bit through the DCSK waveform path; link_only runs
// the harvest/decide/buffer machinery alone (occupancy, shortage, delay).
enum class PhyMode { chip_level, link_only };

struct SlotOutcome {
    std::int64_t slot = 0;
    LinkDecision decision;
    std::uint32_t bits_tx = 0;
    std::uint32_t bits_err = 0;
    HarvestReport harvested;
    std::size_t buffer_after = 0;
};

struct RunOptions {
    PhyMode phy = PhyMode::chip_level;
    bool keep_trace = false;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

inline Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

struct RunResult {
    std::uint64_t slots_observed = 0;
    std::uint64_t shortage_slots = 0;
    std::uint64_t sr_slots = 0, rd_slots = 0, silent_slots = 0;
    // slots with 0 < occupancy < J, and how often S->R won the comparison there
    std::uint64_t interior_slots = 0, interior_sr_wins = 0;

    std::uint64_t packets_received = 0, packets_delivered = 0, outages = 0;
    std::uint64_t bits = 0, bit_errors = 0;
    std::uint64_t hop1_errors = 0, hop2_errors = 0, both_hop_errors = 0;
    std::uint64_t sum_sq_packet_errors = 0;

    std::uint64_t delay_packets = 0;
    std::uint64_t delay_queue_sum = 0;
    std::uint64_t delay_silent_sum = 0;

    std::vector<std::uint64_t> occupancy_hist;
    std::vector<SlotOutcome> trace;
    std::vector<std::string> warnings;

    double end_to_end_ber() const { return bits ? double(bit_errors) / double(bits) : 0.0; }

    // Standard error of the BER with packets as independent clusters.
    double confidence() const {
        if (packets_delivered < 2 || bits == 0) return 0.0;
        const double n = double(packets_delivered);
        const double per = double(bits) / n;
        const double s1 = double(bit_errors), s2 = double(sum_sq_packet_errors);
        const double var = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0)) / (per * per);
        return std::sqrt(var / n);
    }
    double ber_stderr() const { return confidence(); }

    double hop1_ber() const { return bits ? double(hop1_errors) / double(bits) : 0.0; }
    double hop2_ber() const { return bits ? double(hop2_errors) / double(bits) : 0.0; }

    double avg_delay_slots() const {
        return delay_packets ? double(delay_queue_sum + delay_silent_sum) / double(delay_packets)
                             : std::numeric_limits<double>::quiet_NaN();
    }
    double avg_queue_delay() const {
        return delay_packets ? double(delay_queue_sum) / double(delay_packets)
                             : std::numeric_limits<double>::quiet_NaN();
    }
    double shortage_rate() const { return slots_observed ? double(shortage_slots) / double(slots_observed) : 0.0; }
    double p_sr_selected() const { return slots_observed ? double(sr_slots) / double(slots_observed) : 0.0; }
    double p_rd_selected() const { return slots_observed ? double(rd_slots) / double(slots_observed) : 0.0; }
    double interior_sr_rate() const {
        return interior_slots ? double(interior_sr_wins) / double(interior_slots) : 0.0;
    }
    std::vector<double> occupancy_distribution() const {
        std::vector<double> d(occupancy_hist.size(), 0.0);
        std::uint64_t n = 0;
        for (auto c : occupancy_hist) n += c;
        if (n)
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = double(occupancy_hist[i]) / double(n);
        return d;
    }
    // Nothing reached the destination.
    bool flagged() const { return packets_delivered == 0; }

    RunResult& operator+=(const RunResult& o) {
        slots_observed += o.slots_observed;
        shortage_slots += o.shortage_slots;
        sr_slots += o.sr_slots;
        rd_slots += o.rd_slots;
        silent_slots += o.silent_slots;
        interior_slots += o.interior_slots;
        interior_sr_wins += o.interior_sr_wins;
        packets_received += o.packets_received;
        packets_delivered += o.packets_delivered;
        outages += o.outages;
        bits += o.bits;
        bit_errors += o.bit_errors;
        hop1_errors += o.hop1_errors;
        hop2_errors += o.hop2_errors;
        both_hop_errors += o.both_hop_errors;
        sum_sq_packet_errors += o.sum_sq_packet_errors;
        delay_packets += o.delay_packets;
        delay_queue_sum += o.delay_queue_sum;
        delay_silent_sum += o.delay_silent_sum;
        if (occupancy_hist.size() < o.occupancy_hist.size()) occupancy_hist.resize(o.occupancy_hist.size(), 0);
        for (std::size_t i = 0; i < o.occupancy_hist.size(); ++i) occupancy_hist[i] += o.occupancy_hist[i];
        for (const auto& w : o.warnings)
            if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
        return *this;
    }
};

// Per-packet delay bookkeeping from the slot sequence alone. Silent slots
// that the delay analysis charges to packets are held in a counter and
// added to the next arrival:
//   table 1: silent slots with an empty buffer (shortage)
//   table 2: empty-buffer slots where R->D won, and full-buffer shortage slots
class DelayMeter {
public:
    DelayMeter(int table, std::size_t capacity, std::int64_t count_from = 0)
        : table_(table), capacity_(capacity), count_from_(count_from) {}

    bool attributable(const LinkDecision& d, std::size_t occupancy_before) const {
        if (d.action != Action::silent) return false;
        if (table_ == 1) return occupancy_before == 0;
        return (occupancy_before == 0 && d.cause == Cause::buffer_empty) ||
               (occupancy_before >= capacity_ && d.cause == Cause::shortage);
    }

    void observe(std::int64_t slot, const LinkDecision& d, std::size_t occupancy_before) {
        switch (d.action) {
        case Action::sr_receive:
            fifo_.push_back({slot, pending_});
            pending_ = 0;
            break;
        case Action::rd_transmit: {
            if (fifo_.empty()) throw std::logic_error("DelayMeter: departure from empty buffer");
            const Entry e = fifo_.front();
            fifo_.pop_front();
            if (e.arrival >= count_from_) {
                ++packets_;
                queue_sum_ += static_cast<std::uint64_t>(slot - e.arrival);
                silent_sum_ += e.silent;
            }
            break;
        }
        case Action::silent:
            if (attributable(d, occupancy_before)) ++pending_;
            break;
        }
    }

    std::uint64_t packets() const { return packets_; }
    std::uint64_t queue_sum() const { return queue_sum_; }
    std::uint64_t silent_sum() const { return silent_sum_; }

private:
    struct Entry {
        std::int64_t arrival;
        std::uint64_t silent;
    };
    int table_;
    std::size_t capacity_;
    std::int64_t count_from_;
    std::deque<Entry> fifo_;
    std::uint64_t pending_ = 0;
    std::uint64_t packets_ = 0, queue_sum_ = 0, silent_sum_ = 0;
};

struct DelayMeasurement {
    double avg_delay_slots = std::numeric_limits<double>::quiet_NaN();
    double avg_queue_delay = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t packets = 0;
    bool undefined = true;
};

// Replays a trace that starts from an empty buffer.
inline DelayMeasurement measure_delay(std::span<const SlotOutcome> trace, Protocol protocol,
                                      std::size_t capacity) {
    DelayMeasurement m;
    DelayMeter meter(table_of(protocol), capacity);
    std::size_t occ = 0;
    for (const auto& s : trace) {
        meter.observe(s.slot, s.decision, occ);
        occ = s.buffer_after;
    }
    m.packets = meter.packets();
    if (m.packets == 0) return m;
    m.undefined = false;
    m.avg_queue_delay = double(meter.queue_sum()) / double(m.packets);
    m.avg_delay_slots = double(meter.queue_sum() + meter.silent_sum()) / double(m.packets);
    return m;
}

namespace detail {

// Waveform-level DCSK link: draws a fresh chaotic reference per bit,
// propagates and correlates. Buffers are reused across bits.
class DcskLink {
public:
    DcskLink(std::size_t beta, ChipNormalization norm) : beta_(beta), norm_(norm), ref_(beta), frame_(2 * beta), rx_(2 * beta) {}

    int send(int bit, const ChannelRealization& ch, double tx_power, double noise_psd, Rng& rng) {
        double seed;
        do {
            seed = seed_dist_(rng);
        } while (is_logistic_fixed_point(seed));
        generate_chaos_into(seed, ref_);
        if (norm_ == ChipNormalization::unit_bit_energy) normalize_reference(ref_);
        modulate_into(bit, ref_, frame_);
        propagate_into(std::span<const double>(frame_), ch, tx_power, noise_psd, rng, std::span<double>(rx_));
        return correlate(rx_) > 0.0 ? 1 : 0;
    }

private:
    std::size_t beta_;
    ChipNormalization norm_;
    std::vector<double> ref_, frame_, rx_;
    boost::random::uniform_real_distribution<double> seed_dist_{-1.0, 1.0};
};

class BitSource {
public:
    int next(Rng& rng) {
        if (left_ == 0) {
            word_ = rng();
            left_ = 64;
        }
        const int b = static_cast<int>(word_ & 1u);
        word_ >>= 1;
        --left_;
        return b;
    }

private:
    std::uint64_t word_ = 0;
    int left_ = 0;
};

inline constexpr const char* kNoDelivery = "no packet reached the destination";
inline constexpr const char* kFewErrors = "fewer than 10 bit errors observed; BER estimate is unreliable";

// Count-dependent warnings; recomputed after trials are merged.
inline void finish_warnings(RunResult& r) {
    std::erase_if(r.warnings, [](const std::string& w) { return w == kNoDelivery || w == kFewErrors; });
    if (r.flagged()) r.warnings.push_back(kNoDelivery);
    if (r.bits > 0 && r.bit_errors < 10) r.warnings.push_back(kFewErrors);
}

} // namespace detail

inline double snr_sr(const SystemParams& p, const ChannelRealization& sr) {
    const double n0 = p.n0_ir();
    return n0 > 0.0 ? 2.0 * (1.0 - p.theta) * p.ps * channel_energy(sr) / (p.sr.path_loss() * n0)
                    : std::numeric_limits<double>::infinity();
}

inline double snr_rd(const SystemParams& p, double relay_power, const ChannelRealization& rd) {
    return p.n0_rd > 0.0 ? 2.0 * relay_power * channel_energy(rd) / (p.rd.path_loss() * p.n0_rd)
                         : std::numeric_limits<double>::infinity();
}

// One independent trial of a buffer-aided protocol, seeded from params.seed.
inline RunResult run_protocol_sim(const SystemParams& p, Protocol protocol, const RunOptions& opt = {}) {
    p.validate();
    RunResult res;
    for (const auto* prof : {&p.sr, &p.rd})
        for (auto& w : validate(*prof, p.beta)) res.warnings.push_back(w);

    Rng rng = make_rng(p.seed);
    const std::size_t J = p.buffer_capacity;
    const auto warmup = static_cast<std::int64_t>(p.warmup_slots());
    const auto total = static_cast<std::int64_t>(p.slots) + warmup;
    const int table = table_of(protocol);
    const bool chips = opt.phy == PhyMode::chip_level;

    BufferState buffer(J);
    DelayMeter meter(table, J, warmup);
    detail::DcskLink link(p.beta, p.normalization);
    detail::BitSource source;
    res.occupancy_hist.assign(J + 1, 0);
    std::uint64_t next_id = 0;
    const double sr_power = (1.0 - p.theta) * p.ps;
    const double n0_ir = p.n0_ir();

    for (std::int64_t slot = 0; slot < total; ++slot) {
        const ChannelRealization sr = draw_realization(p.sr, rng, slot);
        const ChannelRealization rd = draw_realization(p.rd, rng, slot);
        const HarvestReport rep = harvest(sr, rd, p);
        const BufferLevel level = buffer.level();

        bool wins;
        LinkDecision dec;
        if (is_energy_based(protocol)) {
            wins = sr_wins_energy(rep, p.delta);
            dec = table == 1 ? decide_protocol1(level, rep, p.delta) : decide_protocol2(level, rep, p.delta);
        } else {
            const double pr = buffer.empty() ? std::max(rep.residual(), 0.0) : buffer.head().energy.residual_power;
            const double gsr = snr_sr(p, sr), grd = snr_rd(p, pr, rd);
            wins = gsr >= p.delta * grd;
            dec = decide_snr_baseline(level, rep, gsr, grd, p.delta, table);
        }

        const bool observed = slot >= warmup;
        SlotOutcome out;
        out.slot = slot;
        out.decision = dec;
        out.harvested = rep;

        if (observed) {
            ++res.slots_observed;
            ++res.occupancy_hist[level.occupancy];
            if (rep.shortage) ++res.shortage_slots;
            if (!level.empty() && !level.full()) {
                ++res.interior_slots;
                if (wins) ++res.interior_sr_wins;
            }
        }

        meter.observe(slot, dec, level.occupancy);

        if (dec.action == Action::sr_receive) {
            PacketRecord pkt;
            pkt.id = next_id++;
            pkt.arrival_slot = slot;
            pkt.energy = {pkt.id, rep.residual()};
            if (chips) {
                pkt.source_bits.resize(p.packet_bits);
                pkt.decoded_bits.resize(p.packet_bits);
                std::uint32_t errs = 0;
                for (std::size_t i = 0; i < p.packet_bits; ++i) {
                    const int b = source.next(rng);
                    // Antenna and conversion noise enter as one draw at the N_0,IR total.
                    const int d = link.send(b, sr, sr_power, n0_ir, rng);
                    pkt.source_bits[i] = static_cast<std::uint8_t>(b);
                    pkt.decoded_bits[i] = static_cast<std::uint8_t>(d);
                    errs += (b != d);
                }
                out.bits_tx = static_cast<std::uint32_t>(p.packet_bits);
                out.bits_err = errs;
            }
            apply_decision(buffer, dec, std::move(pkt));
            if (observed) {
                ++res.sr_slots;
                ++res.packets_received;
            }
        } else if (dec.action == Action::rd_transmit) {
            PacketRecord pkt = *apply_decision(buffer, dec);
            std::uint64_t e2e = 0, h1 = 0, h2 = 0, both = 0;
            if (chips) {
                for (std::size_t i = 0; i < pkt.decoded_bits.size(); ++i) {
                    const int relayed = pkt.decoded_bits[i];
                    const int dest = link.send(relayed, rd, pkt.energy.residual_power, p.n0_rd, rng);
                    const bool e1 = relayed != pkt.source_bits[i];
                    const bool e2 = dest != relayed;
                    h1 += e1;
                    h2 += e2;
                    both += (e1 && e2);
                    e2e += (dest != pkt.source_bits[i]);
                }
                out.bits_tx = static_cast<std::uint32_t>(pkt.decoded_bits.size());
                out.bits_err = static_cast<std::uint32_t>(h2);
            }
            if (observed) {
                ++res.rd_slots;
                ++res.packets_delivered;
                res.bits += pkt.decoded_bits.size();
                res.bit_errors += e2e;
                res.hop1_errors += h1;
                res.hop2_errors += h2;
                res.both_hop_errors += both;
                res.sum_sq_packet_errors += e2e * e2e;
            }
        } else if (observed) {
            ++res.silent_slots;
        }

        out.buffer_after = buffer.occupancy();
        if (opt.keep_trace) res.trace.push_back(out);
    }

    res.delay_packets = meter.packets();
    res.delay_queue_sum = meter.queue_sum();
    res.delay_silent_sum = meter.silent_sum();
    detail::finish_warnings(res);
    return res;
}

// Fixed-schedule comparators. Every relay attempt occupies two slots.
inline RunResult run_baseline_sim(const SystemParams& p, Baseline baseline, const RunOptions& opt = {}) {
    p.validate();
    RunResult res;
    Rng rng = make_rng(p.seed);
    detail::DcskLink link(p.beta, p.normalization);
    detail::BitSource source;
    const bool chips = opt.phy == PhyMode::chip_level;
    const std::int64_t total = static_cast<std::int64_t>(p.slots);

    ChannelProfile sd = p.sr;
    sd.distance = p.sr.distance + p.rd.distance;

    auto deliver = [&](std::uint64_t e2e, std::uint64_t h1, std::uint64_t h2, std::uint64_t both, std::size_t nbits) {
        ++res.packets_delivered;
        res.bits += nbits;
        res.bit_errors += e2e;
        res.hop1_errors += h1;
        res.hop2_errors += h2;
        res.both_hop_errors += both;
        res.sum_sq_packet_errors += e2e * e2e;
    };

    std::vector<std::uint8_t> src(p.packet_bits), mid(p.packet_bits);

    if (baseline == Baseline::conv_sd) {
        for (std::int64_t slot = 0; slot < total; ++slot) {
            const ChannelRealization ch = draw_realization(sd, rng, slot);
            ++res.slots_observed;
            ++res.sr_slots;
            ++res.packets_received;
            std::uint64_t e = 0;
            if (chips)
                for (std::size_t i = 0; i < p.packet_bits; ++i) {
                    const int b = source.next(rng);
                    e += (link.send(b, ch, p.ps, p.n0_rd, rng) != b);
                }
            deliver(e, e, 0, 0, chips ? p.packet_bits : 0);
            ++res.delay_packets;
        }
    } else {
        const bool swipt = baseline == Baseline::conv_no_buffer_swipt;
        for (std::int64_t slot = 0; slot + 1 < total; slot += 2) {
            const ChannelRealization sr = draw_realization(p.sr, rng, slot);
            res.slots_observed += 2;
            double relay_power = p.pd();
            double hop1_power = p.ps, hop1_noise = p.n0_sr;
            if (swipt) {
                const ChannelRealization rd_pilot = draw_realization(p.rd, rng, slot);
                const HarvestReport rep = harvest(sr, rd_pilot, p);
                if (rep.shortage) ++res.shortage_slots;
                if (!rep.decodable()) {
                    ++res.outages;
                    res.silent_slots += 2;
                    continue;
                }
                relay_power = rep.residual();
                hop1_power = (1.0 - p.theta) * p.ps;
                hop1_noise = p.n0_ir();
            }
            ++res.sr_slots;
            ++res.rd_slots;
            ++res.packets_received;
            const ChannelRealization rd = draw_realization(p.rd, rng, slot + 1);
            std::uint64_t e2e = 0, h1 = 0, h2 = 0, both = 0;
            if (chips) {
                for (std::size_t i = 0; i < p.packet_bits; ++i) {
                    src[i] = static_cast<std::uint8_t>(source.next(rng));
                    mid[i] = static_cast<std::uint8_t>(link.send(src[i], sr, hop1_power, hop1_noise, rng));
                }
                for (std::size_t i = 0; i < p.packet_bits; ++i) {
                    const int dest = link.send(mid[i], rd, relay_power, p.n0_rd, rng);
                    const bool e1 = mid[i] != src[i], e2 = dest != mid[i];
                    h1 += e1;
                    h2 += e2;
                    both += (e1 && e2);
                    e2e += (dest != src[i]);
                }
            }
            deliver(e2e, h1, h2, both, chips ? p.packet_bits : 0);
            ++res.delay_packets;
            res.delay_queue_sum += 1;
        }
    }
    detail::finish_warnings(res);
    return res;
}

// Runs `trials` independent trials (seeds derived from params.seed) on up to
// `workers` threads and sums them in trial order.
inline RunResult run_trials(const SystemParams& p, const std::function<RunResult(const SystemParams&)>& one,
                            std::size_t trials, std::size_t workers = 1) {
    if (trials == 0) throw std::invalid_argument("run_trials: trials must be >= 1");
    std::vector<RunResult> parts(trials);
    std::vector<std::string> errors(trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
            SystemParams q = p;
            q.seed = derive_seed(p.seed, t);
            try {
                parts[t] = one(q);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, trials));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (!e.empty()) throw std::runtime_error("trial failed: " + e);
    RunResult total;
    for (auto& r : parts) total += r;
    detail::finish_warnings(total);
    return total;
}

inline RunResult run_protocol_trials(const SystemParams& p, Protocol protocol, std::size_t trials,
                                     std::size_t workers = 1, const RunOptions& opt = {}) {
    return run_trials(p, [&](const SystemParams& q) { return run_protocol_sim(q, protocol, opt); }, trials, workers);
}

inline RunResult run_baseline_trials(const SystemParams& p, Baseline baseline, std::size_t trials,
                                     std::size_t workers = 1, const RunOptions& opt = {}) {
    return run_trials(p, [&](const SystemParams& q) { return run_baseline_sim(q, baseline, opt); }, trials, workers);
}

} // namespace dcsk_relay
