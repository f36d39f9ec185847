#pragma once

// Discrete-event core.
//
// The simulator replays node presence and contacts, runs epidemic ad hoc
// forwarding of the active content message, and carries every
// infrastructure transfer (downlink pushes and uplink control messages).
// Everything the controller decides is injected through SimHooks.
//
// Transfer model: constant-rate fluid transfers. A transfer that fails or is
// aborted counts the bytes moved until it stopped. A node takes part in at
// most one ad hoc transfer at a time, as sender or receiver. Each node has a
// dedicated downlink and a FIFO uplink; LEAVE is delivered instantly.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "common.hpp"
#include "contacts.hpp"
#include "messages.hpp"
#include "metrics.hpp"
#include "mobility.hpp"

namespace pnt {

enum class Medium : std::uint8_t { adhoc, infra_down, infra_up };
enum class TransferStatus : std::uint8_t { in_progress, completed, failed, aborted };
enum class PushCause : std::uint8_t { scheduled, panic, deadline, reference, oracle };
enum class PushResult : std::uint8_t { started, already_holds, already_pushing, not_subscribed, no_message };

// Endpoint used for the controller side of infrastructure transfers.
inline constexpr NodeId kController = node_id(0xffffffffU);

struct LinkSpec {
    std::uint64_t adhoc_rate = 1'000'000;     // bytes/s
    std::uint64_t infra_down_rate = 100'000;  // bytes/s
    std::uint64_t infra_up_rate = 10'000;     // bytes/s

    void validate() const {
        if (adhoc_rate == 0 || infra_down_rate == 0 || infra_up_rate == 0)
            throw ConfigError("link rates must be positive");
    }
};

struct Transfer {
    std::uint32_t id = 0;
    Medium medium = Medium::adhoc;
    NodeId src{};
    NodeId dst{};
    bool control = false;
    ControlKind control_kind = ControlKind::enter;
    std::uint32_t message = 0;
    Time start{};
    Time end{};
    std::uint64_t bytes_total = 0;
    std::uint64_t bytes_moved = 0;
    TransferStatus status = TransferStatus::in_progress;
};

struct SimConfig {
    LinkSpec links;
    std::uint64_t control_size = 256;
    std::optional<Time> gps_report_interval;
    std::optional<Time> neighbor_report_interval;
    bool adhoc_enabled = true;
    bool record_series = true;
};

class Simulator;

class SimHooks {
public:
    virtual ~SimHooks() = default;
    virtual void on_start(Simulator&) {}
    virtual void on_timer(Simulator&, std::uint32_t /*tag*/, std::uint32_t /*arg*/) {}
    virtual void on_control(Simulator&, const ControlMessage&) {}
    virtual void on_push_end(Simulator&, NodeId, TransferStatus) {}
    virtual void on_delivered(Simulator&, NodeId, Via) {}
    virtual void on_message_expired(Simulator&, MessageRecord&) {}
};

// Per-node delivery outcome of the first content reception.
struct NodeOutcome {
    NodeId id{};
    Time enter{};
    Time leave{};
    std::optional<Time> infected_at;
    Via via = Via::none;
    bool pushed = false;
};

enum class EventKind : std::uint8_t {
    transfer_end,
    contact_down,
    node_leave,
    message_expire,
    scenario_timer,
    node_enter,
    contact_up,
    report_timer,
};

struct Event {
    Time time{};
    EventKind kind{};
    std::uint64_t key = 0;
    std::uint64_t seq = 0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
};

// Min-queue on (time, kind, key, insertion order).
class EventQueue {
public:
    void push(Event e) {
        e.seq = next_seq_++;
        heap_.push(e);
    }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        assert(e.time >= last_);
        last_ = e.time;
        return e;
    }

private:
    struct Later {
        bool operator()(const Event& x, const Event& y) const noexcept {
            return std::tie(x.time, x.kind, x.key, x.seq) > std::tie(y.time, y.kind, y.key, y.seq);
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    Time last_{Time::min()};
};

class Simulator {
public:
    Simulator(const ContactTrace& contacts, const MobilityTrace* mobility, SimConfig cfg, SimHooks& hooks)
        : ct_(contacts), mobility_(mobility), cfg_(std::move(cfg)), hooks_(hooks) {
        cfg_.links.validate();
        if (cfg_.control_size == 0) throw ConfigError("control message size must be positive");
        if (cfg_.gps_report_interval && !mobility_)
            throw ConfigError("position reports need a mobility trace");
        const auto nodes = ct_.nodes();
        nodes_.reserve(nodes.size());
        for (std::uint32_t i = 0; i < nodes.size(); ++i) {
            NodeState n;
            n.id = nodes[i].id;
            n.enter = from_seconds(nodes[i].presence.enter);
            n.leave = from_seconds(nodes[i].presence.leave);
            nodes_.push_back(std::move(n));
            queue_.push({nodes_[i].enter, EventKind::node_enter, i, 0, i, 0});
            queue_.push({nodes_[i].leave, EventKind::node_leave, i, 0, i, 0});
        }
        for (const auto& c : ct_.contacts()) {
            const auto a = index(c.a);
            const auto b = index(c.b);
            const auto key = (static_cast<std::uint64_t>(a) << 32) | b;
            queue_.push({from_seconds(c.start), EventKind::contact_up, key, 0, a, b});
            queue_.push({from_seconds(c.end), EventKind::contact_down, key, 0, a, b});
        }
    }

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    void run() {
        hooks_.on_start(*this);
        while (!queue_.empty()) {
            const Event e = queue_.pop();
            now_ = e.time;
            dispatch(e);
        }
        report_.infra_load = report_.infra_content_load + report_.control_load;
        report_.transfers = log_.size();
    }

    // --- queries -------------------------------------------------------------

    Time now() const noexcept { return now_; }
    const SimConfig& config() const noexcept { return cfg_; }
    const ContactTrace& contacts() const noexcept { return ct_; }
    const MobilityTrace* mobility() const noexcept { return mobility_; }
    const std::optional<ContentMessage>& message() const noexcept { return msg_; }
    std::span<const Transfer> transfers() const noexcept { return log_; }
    const RunReport& report() const noexcept { return report_; }
    RunReport& report() noexcept { return report_; }

    Time push_duration() const {
        return transfer_duration(msg_ ? msg_->size : 0, cfg_.links.infra_down_rate);
    }

    bool present(NodeId n) const { return node(n).present; }
    bool subscribed(NodeId n) const { return node(n).subscribed; }
    bool holds_content(NodeId n) const { return node(n).infected; }
    bool adhoc_busy(NodeId n) const { return node(n).adhoc.has_value(); }
    bool pushing(NodeId n) const { return node(n).push.has_value(); }

    std::vector<NodeId> present_nodes() const {
        std::vector<NodeId> out;
        for (const auto& n : nodes_)
            if (n.present) out.push_back(n.id);
        return out;
    }

    std::vector<NodeOutcome> outcomes() const {
        std::vector<NodeOutcome> out;
        out.reserve(nodes_.size());
        for (const auto& n : nodes_) out.push_back({n.id, n.enter, n.leave, n.infected_at, n.via, n.pushed});
        return out;
    }

    // --- actions available to hooks -----------------------------------------

    void schedule(Time at, std::uint32_t tag, std::uint32_t arg) {
        if (at < now_) throw Error("timer scheduled in the past");
        queue_.push({at, EventKind::scenario_timer, (static_cast<std::uint64_t>(tag) << 32) | arg, 0, tag, arg});
    }

    void create_message(const ContentMessage& m) {
        if (msg_) throw Error("a content message is already active");
        if (!(m.expires > m.created) || m.size == 0) throw Error("invalid content message");
        msg_ = m;
        record_ = MessageRecord{};
        record_.id = m.id;
        record_.created_s = to_seconds(m.created);
        record_.expires_s = m.expires == kNever ? 0.0 : to_seconds(m.expires);
        for (auto& n : nodes_) n.infected = false;
        infected_subscribed_ = 0;
        if (m.expires != kNever) queue_.push({m.expires, EventKind::message_expire, m.id, 0, m.id, 0});
        note_series();
    }

    // Marks a node as holding the content without a transfer. Nodes not yet
    // present get it on entry.
    void seed_infection(NodeId id) {
        if (!msg_) throw Error("no active message to seed");
        auto& n = node(id);
        if (!n.present) {
            n.seeded = true;
            return;
        }
        infect(n, Via::seeded);
        try_send(index(id));
    }

    PushResult begin_infra_push(NodeId id, PushCause cause) {
        if (!msg_) return PushResult::no_message;
        auto& n = node(id);
        if (!n.present || !n.subscribed) return PushResult::not_subscribed;
        if (n.infected) return PushResult::already_holds;
        if (n.push) return PushResult::already_pushing;
        auto& t = new_transfer(Medium::infra_down, kController, id, msg_->size);
        t.message = msg_->id;
        n.push = t.id;
        n.pushed = true;
        ++record_.pushes;
        if (cause == PushCause::panic) ++record_.panic_pushes;
        queue_.push({now_ + transfer_duration(msg_->size, cfg_.links.infra_down_rate), EventKind::transfer_end,
                     t.id, 0, t.id, 0});
        return PushResult::started;
    }

    // Starts an ad hoc copy if both ends are idle, in contact, and the
    // destination lacks the content. Returns the transfer id.
    std::optional<std::uint32_t> begin_adhoc_transfer(NodeId src, NodeId dst) {
        return begin_adhoc(index(src), index(dst));
    }

private:
    struct NodeState {
        NodeId id{};
        Time enter{};
        Time leave{};
        bool present = false;
        bool subscribed = false;
        bool infected = false;
        bool seeded = false;
        Time subscribed_at{};
        std::optional<std::uint32_t> adhoc;
        std::optional<std::uint32_t> push;
        std::optional<std::uint32_t> uplink;
        std::optional<ControlMessage> in_flight;
        std::deque<ControlMessage> uplink_queue;
        std::vector<std::pair<Time, std::uint32_t>> neighbors;  // (contact up, node index), ascending
        std::optional<Time> infected_at;
        Via via = Via::none;
        bool pushed = false;
    };

    std::uint32_t index(NodeId id) const {
        const auto nodes = ct_.nodes();
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const NodePresence& p, NodeId v) { return p.id < v; });
        if (it == nodes.end() || it->id != id) throw Error("unknown node " + to_string(id));
        return static_cast<std::uint32_t>(it - nodes.begin());
    }
    NodeState& node(NodeId id) { return nodes_[index(id)]; }
    const NodeState& node(NodeId id) const { return nodes_[index(id)]; }

    std::uint64_t rate(Medium m) const noexcept {
        switch (m) {
            case Medium::adhoc: return cfg_.links.adhoc_rate;
            case Medium::infra_down: return cfg_.links.infra_down_rate;
            case Medium::infra_up: return cfg_.links.infra_up_rate;
        }
        return 1;
    }

    Transfer& new_transfer(Medium m, NodeId src, NodeId dst, std::uint64_t bytes) {
        Transfer t;
        t.id = static_cast<std::uint32_t>(log_.size());
        t.medium = m;
        t.src = src;
        t.dst = dst;
        t.start = now_;
        t.bytes_total = bytes;
        log_.push_back(t);
        return log_.back();
    }

    void finish(Transfer& t, TransferStatus status) {
        assert(t.status == TransferStatus::in_progress);
        t.status = status;
        t.end = now_;
        t.bytes_moved = status == TransferStatus::completed ? t.bytes_total
                                                            : bytes_after(rate(t.medium), now_ - t.start, t.bytes_total);
        account(t);
    }

    void account(const Transfer& t) {
        switch (t.medium) {
            case Medium::adhoc:
                report_.adhoc_load += t.bytes_moved;
                record_.adhoc_bytes += t.bytes_moved;
                break;
            case Medium::infra_down:
                report_.infra_content_load += t.bytes_moved;
                record_.infra_bytes += t.bytes_moved;
                break;
            case Medium::infra_up: report_.control_load += t.bytes_moved; break;
        }
    }

    void note_series() {
        if (!cfg_.record_series || !msg_) return;
        SeriesPoint p{msg_->id, to_seconds(now_), infected_subscribed_, subscribed_};
        auto& s = report_.infection_series;
        if (!s.empty() && s.back().message == p.message) {
            if (s.back().infected == p.infected && s.back().subscribed == p.subscribed) return;
            if (s.back().time_s == p.time_s) {
                s.back() = p;
                if (s.size() >= 2 && s[s.size() - 2].message == p.message &&
                    s[s.size() - 2].infected == p.infected && s[s.size() - 2].subscribed == p.subscribed)
                    s.pop_back();
                return;
            }
        }
        s.push_back(p);
    }

    void infect(NodeState& n, Via via) {
        n.infected = true;
        if (!n.infected_at) {
            n.infected_at = now_;
            n.via = via;
        }
        if (n.subscribed) {
            ++infected_subscribed_;
            note_series();
        }
    }

    void dispatch(const Event& e) {
        switch (e.kind) {
            case EventKind::transfer_end: on_transfer_end(e.a); break;
            case EventKind::contact_down: on_contact_down(e.a, e.b); break;
            case EventKind::node_leave: on_leave(e.a); break;
            case EventKind::message_expire: on_expire(); break;
            case EventKind::scenario_timer: hooks_.on_timer(*this, e.a, e.b); break;
            case EventKind::node_enter: on_enter(e.a); break;
            case EventKind::contact_up: on_contact_up(e.a, e.b); break;
            case EventKind::report_timer: on_report(e.a, e.b); break;
        }
    }

    // --- uplink ----------------------------------------------------------------

    void enqueue_control(std::uint32_t i, ControlMessage m) {
        nodes_[i].uplink_queue.push_back(std::move(m));
        start_uplink(i);
    }

    void start_uplink(std::uint32_t i) {
        auto& n = nodes_[i];
        if (n.uplink || n.uplink_queue.empty() || !n.present) return;
        n.in_flight = std::move(n.uplink_queue.front());
        n.uplink_queue.pop_front();
        auto& t = new_transfer(Medium::infra_up, n.id, kController, cfg_.control_size);
        t.control = true;
        t.control_kind = n.in_flight->kind;
        t.message = n.in_flight->message;
        n.uplink = t.id;
        queue_.push({now_ + transfer_duration(cfg_.control_size, cfg_.links.infra_up_rate), EventKind::transfer_end,
                     t.id, 0, t.id, 0});
    }

    // --- ad hoc ----------------------------------------------------------------

    bool in_contact(std::uint32_t a, std::uint32_t b) const {
        const auto& nb = nodes_[a].neighbors;
        return std::any_of(nb.begin(), nb.end(), [b](const auto& p) { return p.second == b; });
    }

    std::optional<std::uint32_t> begin_adhoc(std::uint32_t i, std::uint32_t j) {
        auto& s = nodes_[i];
        auto& d = nodes_[j];
        if (!cfg_.adhoc_enabled || !msg_ || now_ >= msg_->expires) return std::nullopt;
        if (!s.infected || d.infected || s.adhoc || d.adhoc || !in_contact(i, j)) return std::nullopt;
        auto& t = new_transfer(Medium::adhoc, s.id, d.id, msg_->size);
        t.message = msg_->id;
        s.adhoc = t.id;
        d.adhoc = t.id;
        queue_.push({now_ + transfer_duration(msg_->size, cfg_.links.adhoc_rate), EventKind::transfer_end, t.id, 0,
                     t.id, 0});
        return t.id;
    }

    // Serve the uninfected idle neighbour whose contact is oldest.
    void try_send(std::uint32_t i) {
        const auto& n = nodes_[i];
        if (!cfg_.adhoc_enabled || !msg_ || !n.infected || n.adhoc || !n.present) return;
        for (const auto& [since, j] : n.neighbors) {
            const auto& m = nodes_[j];
            if (!m.infected && !m.adhoc && m.present) {
                begin_adhoc(i, j);
                return;
            }
        }
    }

    void freed(std::uint32_t i) {
        try_send(i);
        const auto neighbors = nodes_[i].neighbors;
        for (const auto& [since, j] : neighbors) try_send(j);
    }

    static void insert_neighbor(std::vector<std::pair<Time, std::uint32_t>>& v, Time t, std::uint32_t j) {
        const std::pair<Time, std::uint32_t> item{t, j};
        v.insert(std::upper_bound(v.begin(), v.end(), item), item);
    }

    static void erase_neighbor(std::vector<std::pair<Time, std::uint32_t>>& v, std::uint32_t j) {
        std::erase_if(v, [j](const auto& p) { return p.second == j; });
    }

    void on_contact_up(std::uint32_t a, std::uint32_t b) {
        insert_neighbor(nodes_[a].neighbors, now_, b);
        insert_neighbor(nodes_[b].neighbors, now_, a);
        try_send(a);
        try_send(b);
    }

    void on_contact_down(std::uint32_t a, std::uint32_t b) {
        erase_neighbor(nodes_[a].neighbors, b);
        erase_neighbor(nodes_[b].neighbors, a);
        auto& na = nodes_[a];
        auto& nb = nodes_[b];
        if (na.adhoc && na.adhoc == nb.adhoc) {
            finish(log_[*na.adhoc], TransferStatus::failed);
            na.adhoc.reset();
            nb.adhoc.reset();
            freed(a);
            freed(b);
        }
    }

    // --- transfers ending --------------------------------------------------------

    void on_transfer_end(std::uint32_t id) {
        auto& t = log_[id];
        if (t.status != TransferStatus::in_progress) return;
        switch (t.medium) {
            case Medium::infra_up: {
                finish(t, TransferStatus::completed);
                const auto i = index(t.src);
                auto& n = nodes_[i];
                n.uplink.reset();
                ControlMessage m = std::move(*n.in_flight);
                n.in_flight.reset();
                if (m.kind == ControlKind::enter && n.present) {
                    n.subscribed = true;
                    n.subscribed_at = now_;
                    ++subscribed_;
                    if (n.infected && msg_) ++infected_subscribed_;
                    note_series();
                }
                start_uplink(i);
                hooks_.on_control(*this, m);
                break;
            }
            case Medium::infra_down: {
                finish(t, TransferStatus::completed);
                const auto i = index(t.dst);
                nodes_[i].push.reset();
                std::optional<std::uint32_t> partner = deliver(i, Via::infra);
                hooks_.on_push_end(*this, t.dst, TransferStatus::completed);
                hooks_.on_delivered(*this, nodes_[i].id, Via::infra);
                if (partner) freed(*partner);
                freed(i);
                break;
            }
            case Medium::adhoc: {
                finish(t, TransferStatus::completed);
                const auto s = index(t.src);
                const auto d = index(t.dst);
                nodes_[s].adhoc.reset();
                nodes_[d].adhoc.reset();
                deliver(d, Via::adhoc);
                hooks_.on_delivered(*this, nodes_[d].id, Via::adhoc);
                freed(s);
                freed(d);
                break;
            }
        }
    }

    // Marks i infected, cancels the competing transfer on the other medium
    // and queues the ACK. Returns the freed ad hoc sender, if any.
    std::optional<std::uint32_t> deliver(std::uint32_t i, Via via) {
        auto& n = nodes_[i];
        std::optional<std::uint32_t> partner;
        std::optional<NodeId> aborted_push;
        if (via == Via::adhoc && n.push) {
            finish(log_[*n.push], TransferStatus::aborted);
            n.push.reset();
            aborted_push = n.id;
        }
        if (via == Via::infra && n.adhoc) {
            auto& t = log_[*n.adhoc];
            partner = index(t.src);
            finish(t, TransferStatus::aborted);
            nodes_[*partner].adhoc.reset();
            n.adhoc.reset();
        }
        infect(n, via);
        enqueue_control(i, ControlMessage{ControlKind::ack, n.id, now_, msg_->id, {}, {}});
        if (aborted_push) hooks_.on_push_end(*this, *aborted_push, TransferStatus::aborted);
        return partner;
    }

    // --- presence ----------------------------------------------------------------

    void on_enter(std::uint32_t i) {
        auto& n = nodes_[i];
        n.present = true;
        if (n.seeded && msg_) infect(n, Via::seeded);
        enqueue_control(i, ControlMessage{ControlKind::enter, n.id, now_, 0, {}, {}});
        if (cfg_.gps_report_interval) queue_.push({now_, EventKind::report_timer, i, 0, i, 0});
        if (cfg_.neighbor_report_interval) queue_.push({now_, EventKind::report_timer, i, 0, i, 1});
    }

    void on_report(std::uint32_t i, std::uint32_t kind) {
        auto& n = nodes_[i];
        if (!n.present) return;
        ControlMessage m;
        m.node = n.id;
        m.generated = now_;
        if (kind == 0) {
            m.kind = ControlKind::gps_report;
            if (auto p = mobility_->position_at(n.id, to_seconds(now_))) m.position = *p;
            queue_.push({now_ + *cfg_.gps_report_interval, EventKind::report_timer, i, 0, i, 0});
        } else {
            m.kind = ControlKind::neighbor_report;
            for (const auto& [since, j] : n.neighbors) m.neighbors.push_back(nodes_[j].id);
            std::sort(m.neighbors.begin(), m.neighbors.end());
            queue_.push({now_ + *cfg_.neighbor_report_interval, EventKind::report_timer, i, 0, i, 1});
        }
        enqueue_control(i, std::move(m));
    }

    void on_leave(std::uint32_t i) {
        auto& n = nodes_[i];
        std::vector<std::uint32_t> to_free;
        for (const auto& [since, j] : n.neighbors) erase_neighbor(nodes_[j].neighbors, i);
        n.neighbors.clear();
        if (n.adhoc) {
            auto& t = log_[*n.adhoc];
            const auto other = index(t.src == n.id ? t.dst : t.src);
            finish(t, TransferStatus::failed);
            nodes_[other].adhoc.reset();
            n.adhoc.reset();
            to_free.push_back(other);
        }
        bool push_failed = false;
        if (n.push) {
            finish(log_[*n.push], TransferStatus::failed);
            n.push.reset();
            push_failed = true;
        }
        if (n.uplink) {
            finish(log_[*n.uplink], TransferStatus::failed);
            n.uplink.reset();
            n.in_flight.reset();
        }
        n.uplink_queue.clear();
        if (n.subscribed) {
            --subscribed_;
            if (n.infected && msg_) --infected_subscribed_;
            n.subscribed = false;
            note_series();
        }
        n.present = false;

        auto& leave = new_transfer(Medium::infra_up, n.id, kController, cfg_.control_size);
        leave.control = true;
        leave.control_kind = ControlKind::leave;
        finish(leave, TransferStatus::completed);

        hooks_.on_control(*this, ControlMessage{ControlKind::leave, n.id, now_, 0, {}, {}});
        if (push_failed) hooks_.on_push_end(*this, n.id, TransferStatus::failed);
        for (auto j : to_free) freed(j);
    }

    // --- message lifetime --------------------------------------------------------

    void on_expire() {
        std::vector<NodeId> aborted_pushes;
        for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
            auto& n = nodes_[i];
            if (n.push) {
                finish(log_[*n.push], TransferStatus::aborted);
                n.push.reset();
                aborted_pushes.push_back(n.id);
            }
            if (n.adhoc) {
                auto& t = log_[*n.adhoc];
                if (t.status == TransferStatus::in_progress) finish(t, TransferStatus::aborted);
                n.adhoc.reset();
            }
        }
        const Time panic_start = msg_->expires - push_duration();
        for (const auto& n : nodes_) {
            if (!n.subscribed) continue;
            ++record_.subscribed_at_expiry;
            if (n.infected)
                ++record_.delivered_at_expiry;
            else if (n.subscribed_at > panic_start)
                ++record_.late_count;
            else
                ++record_.missed_count;
        }
        record_.delivery_ratio = record_.subscribed_at_expiry == 0
                                     ? 1.0
                                     : static_cast<double>(record_.delivered_at_expiry) /
                                           static_cast<double>(record_.subscribed_at_expiry);
        for (auto id : aborted_pushes) hooks_.on_push_end(*this, id, TransferStatus::aborted);
        hooks_.on_message_expired(*this, record_);
        report_.messages.push_back(record_);
        for (auto& n : nodes_) n.infected = false;
        msg_.reset();
        infected_subscribed_ = 0;
    }

    const ContactTrace& ct_;
    const MobilityTrace* mobility_;
    SimConfig cfg_;
    SimHooks& hooks_;

    std::vector<NodeState> nodes_;
    EventQueue queue_;
    Time now_{};
    std::optional<ContentMessage> msg_;
    MessageRecord record_;
    std::vector<Transfer> log_;
    RunReport report_;
    std::uint32_t subscribed_ = 0;
    std::uint32_t infected_subscribed_ = 0;
};

// Sum of bytes moved per medium over a transfer log; an accumulator that is
// independent of the simulator's running counters.
struct LoadAudit {
    std::uint64_t adhoc = 0;
    std::uint64_t infra_down = 0;
    std::uint64_t infra_up = 0;

    std::uint64_t infra() const noexcept { return infra_down + infra_up; }
};

inline LoadAudit audit_loads(std::span<const Transfer> log) {
    LoadAudit a;
    for (const auto& t : log) {
        switch (t.medium) {
            case Medium::adhoc: a.adhoc += t.bytes_moved; break;
            case Medium::infra_down: a.infra_down += t.bytes_moved; break;
            case Medium::infra_up: a.infra_up += t.bytes_moved; break;
        }
    }
    return a;
}

}  // namespace pnt
