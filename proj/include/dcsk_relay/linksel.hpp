#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcsk_relay/swipt.hpp"

namespace dcsk_relay {

enum class Action { sr_receive, rd_transmit, silent };
// Which table row fired.
enum class Cause { buffer_full, buffer_empty, energy_compare, shortage };

inline const char* to_string(Action a) {
    switch (a) {
    case Action::sr_receive: return "SR_receive";
    case Action::rd_transmit: return "RD_transmit";
    case Action::silent: return "Silent";
    }
    return "?";
}

inline const char* to_string(Cause c) {
    switch (c) {
    case Cause::buffer_full: return "buffer_full";
    case Cause::buffer_empty: return "buffer_empty";
    case Cause::energy_compare: return "energy_compare";
    case Cause::shortage: return "shortage";
    }
    return "?";
}

struct LinkDecision {
    Action action = Action::silent;
    Cause cause = Cause::shortage;
    bool operator==(const LinkDecision&) const = default;
};

struct PacketRecord {
    std::uint64_t id = 0;
    std::vector<std::uint8_t> source_bits;
    std::vector<std::uint8_t> decoded_bits;
    std::int64_t arrival_slot = 0;
    EnergyLedgerEntry energy;
};

struct BufferLevel {
    std::size_t occupancy = 0;
    std::size_t capacity = 1;
    bool empty() const { return occupancy == 0; }
    bool full() const { return occupancy >= capacity; }
};

class BufferState {
public:
    explicit BufferState(std::size_t capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("BufferState: capacity must be >= 1");
    }

    std::size_t occupancy() const { return queue_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return queue_.empty(); }
    bool full() const { return queue_.size() >= capacity_; }
    BufferLevel level() const { return {queue_.size(), capacity_}; }
    const PacketRecord& head() const { return queue_.front(); }
    const std::deque<PacketRecord>& queue() const { return queue_; }

    void push(PacketRecord pkt) {
        if (full()) throw std::logic_error("BufferState: append on full buffer");
        if (!(pkt.energy.residual_power > 0.0))
            throw std::logic_error("BufferState: stored packet must carry positive residual power");
        queue_.push_back(std::move(pkt));
    }

    PacketRecord pop() {
        if (empty()) throw std::logic_error("BufferState: pop on empty buffer");
        PacketRecord p = std::move(queue_.front());
        queue_.pop_front();
        return p;
    }

private:
    std::size_t capacity_;
    std::deque<PacketRecord> queue_;
};

namespace detail {

// Shared table logic; `sr_wins` is the outcome of the link comparison.
inline LinkDecision table1(BufferLevel b, bool sr_wins, bool decodable) {
    if (b.empty())
        return decodable ? LinkDecision{Action::sr_receive, Cause::buffer_empty}
                         : LinkDecision{Action::silent, Cause::shortage};
    if (b.full()) return {Action::rd_transmit, Cause::buffer_full};
    if (sr_wins)
        return decodable ? LinkDecision{Action::sr_receive, Cause::energy_compare}
                         : LinkDecision{Action::silent, Cause::shortage};
    return {Action::rd_transmit, Cause::energy_compare};
}

inline LinkDecision table2(BufferLevel b, bool sr_wins, bool decodable) {
    if (sr_wins) {
        if (!decodable) return {Action::silent, Cause::shortage};
        if (b.full()) return {Action::silent, Cause::buffer_full};
        return {Action::sr_receive, Cause::energy_compare};
    }
    if (b.empty()) return {Action::silent, Cause::buffer_empty};
    return {Action::rd_transmit, Cause::energy_compare};
}

} // namespace detail

// Ties in the comparison go to S->R.
inline bool sr_wins_energy(const HarvestReport& r, double delta) { return r.p_sr_eh >= delta * r.p_dr_eh; }

inline LinkDecision decide_protocol1(BufferLevel b, const HarvestReport& r, double delta) {
    return detail::table1(b, sr_wins_energy(r, delta), r.decodable());
}
inline LinkDecision decide_protocol1(const BufferState& b, const HarvestReport& r, double delta) {
    return decide_protocol1(b.level(), r, delta);
}

inline LinkDecision decide_protocol2(BufferLevel b, const HarvestReport& r, double delta) {
    return detail::table2(b, sr_wins_energy(r, delta), r.decodable());
}
inline LinkDecision decide_protocol2(const BufferState& b, const HarvestReport& r, double delta) {
    return decide_protocol2(b.level(), r, delta);
}

// Same tables with instantaneous SNRs in the comparison; decodability is still
// judged on harvested power.
inline LinkDecision decide_snr_baseline(BufferLevel b, const HarvestReport& r, double gamma_sr,
                                        double gamma_rd, double delta, int variant) {
    const bool wins = gamma_sr >= delta * gamma_rd;
    if (variant == 1) return detail::table1(b, wins, r.decodable());
    if (variant == 2) return detail::table2(b, wins, r.decodable());
    throw std::invalid_argument("decide_snr_baseline: variant must be 1 or 2");
}
inline LinkDecision decide_snr_baseline(const BufferState& b, const HarvestReport& r, double gamma_sr,
                                        double gamma_rd, double delta, int variant) {
    return decide_snr_baseline(b.level(), r, gamma_sr, gamma_rd, delta, variant);
}

// Returns the departing packet on RD_transmit.
inline std::optional<PacketRecord> apply_decision(BufferState& buf, const LinkDecision& d,
                                                  std::optional<PacketRecord> packet_in = std::nullopt) {
    switch (d.action) {
    case Action::sr_receive:
        if (!packet_in) throw std::logic_error("apply_decision: SR_receive without a packet");
        buf.push(std::move(*packet_in));
        return std::nullopt;
    case Action::rd_transmit:
        return buf.pop();
    case Action::silent:
        return std::nullopt;
    }
    return std::nullopt;
}

struct DecisionTraceRow {
    std::int64_t slot = 0;
    std::size_t occupancy = 0;
    LinkDecision decision;
};

inline void write_decision_trace(std::ostream& os, std::span<const DecisionTraceRow> rows) {
    os << "slot,occupancy,action,cause\n";
    for (const auto& r : rows)
        os << r.slot << ',' << r.occupancy << ',' << to_string(r.decision.action) << ','
           << to_string(r.decision.cause) << '\n';
}

} // namespace dcsk_relay
