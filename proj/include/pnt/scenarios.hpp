#pragma once

// Experiment drivers: periodic flooding, floating data, and the
// infrastructure-only reference, plus replications and the strategy sweep.

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "common.hpp"
#include "contacts.hpp"
#include "controller.hpp"
#include "engine.hpp"
#include "metrics.hpp"
#include "mobility.hpp"
#include "oracle.hpp"
#include "strategies.hpp"

namespace pnt {

enum class PeriodicMode : std::uint8_t { push_and_track, oracle, infra_only };

constexpr std::string_view name(PeriodicMode m) noexcept {
    switch (m) {
        case PeriodicMode::push_and_track: return "push-and-track";
        case PeriodicMode::oracle: return "oracle";
        case PeriodicMode::infra_only: return "infra-only";
    }
    return "?";
}

enum class FloatingMode : std::uint8_t { feedback, no_feedback, reference };

constexpr std::string_view name(FloatingMode m) noexcept {
    switch (m) {
        case FloatingMode::feedback: return "feedback";
        case FloatingMode::no_feedback: return "no-feedback";
        case FloatingMode::reference: return "reference";
    }
    return "?";
}

// Radio and timer parameters shared by all scenarios.
struct NetworkConfig {
    LinkSpec links;
    std::uint64_t control_size = 256;
    double report_interval_s = 60.0;

    void validate() const {
        links.validate();
        if (control_size == 0) throw ConfigError("control message size must be positive");
        if (!(report_interval_s > 0.0)) throw ConfigError("report interval must be positive");
    }
};

struct PeriodicConfig {
    double period_s = 60.0;
    std::uint64_t message_size = 1'000'000;
    WhenStrategy when = WhenStrategy::linear;
    WhomStrategy whom = WhomStrategy::random;
    PeriodicMode mode = PeriodicMode::push_and_track;
    unsigned replication = 0;
    double tick_interval_s = 20.0;
    double first_decision_s = 1.0;
    NetworkConfig network;

    // First message is shifted by a tenth of the period per replication.
    double phase_offset_s() const { return static_cast<double>(replication) * period_s / 10.0; }

    double push_duration_s() const {
        return to_seconds(transfer_duration(message_size, network.links.infra_down_rate));
    }

    void validate(bool has_mobility) const {
        network.validate();
        if (message_size == 0) throw ConfigError("message size must be positive");
        if (!(period_s > push_duration_s()))
            throw ConfigError("period " + detail::format_double(period_s) + " s does not exceed the push duration " +
                              detail::format_double(push_duration_s()) + " s");
        if (!(tick_interval_s > push_duration_s()))
            throw ConfigError("decision interval " + detail::format_double(tick_interval_s) +
                              " s does not exceed the push duration " + detail::format_double(push_duration_s()) + " s");
        if (!(first_decision_s >= 0.0) || !(first_decision_s < period_s))
            throw ConfigError("first decision must fall inside the message lifetime");
        if (mode == PeriodicMode::push_and_track && needs_positions(whom) && !has_mobility)
            throw ConfigError(std::string(name(whom)) + " needs a mobility trace with positions");
    }
};

struct FloatingConfig {
    double tolerance_s = 600.0;
    std::uint64_t message_size = 1'000'000;
    FloatingMode mode = FloatingMode::feedback;
    NetworkConfig network;

    void validate() const {
        network.validate();
        if (message_size == 0) throw ConfigError("message size must be positive");
        if (!(tolerance_s >= 0.0)) throw ConfigError("delay tolerance must be non-negative");
    }
};

// Optional observer called at each message expiry, before nodes drop the
// content.
using ExpiryProbe = std::function<void(const Simulator&, const MessageRecord&)>;

struct RunOutput {
    RunReport report;
    std::vector<Transfer> transfers;
};

namespace detail {

enum TimerTag : std::uint32_t { create_message = 0, panic_start = 1, decision = 2, deadline = 3 };

inline SimConfig sim_config(const NetworkConfig& n, bool adhoc, std::optional<WhomStrategy> whom) {
    SimConfig s;
    s.links = n.links;
    s.control_size = n.control_size;
    s.adhoc_enabled = adhoc;
    if (whom && needs_positions(*whom)) s.gps_report_interval = from_seconds(n.report_interval_s);
    if (whom && needs_neighbors(*whom)) s.neighbor_report_interval = from_seconds(n.report_interval_s);
    return s;
}

inline double trace_horizon(const ContactTrace& ct, const MobilityTrace* mob) {
    return mob ? mob->duration() : ct.duration();
}

inline Rect area_of(const ContactTrace& ct, const MobilityTrace* mob) {
    (void)ct;
    return mob ? mob->bounds() : Rect{0.0, 0.0, 1.0, 1.0};
}

class PeriodicDriver final : public SimHooks {
public:
    PeriodicDriver(const ContactTrace& ct, const MobilityTrace* mob, const PeriodicConfig& cfg, std::uint64_t seed,
                   ExpiryProbe probe)
        : ct_(ct), cfg_(cfg), rng_(seed), ctx_{&rng_, area_of(ct, mob)}, probe_(std::move(probe)) {
        ccfg_.when = cfg.when;
        ccfg_.whom = cfg.whom;
        ccfg_.tick_interval = from_seconds(cfg.tick_interval_s);
        ccfg_.first_decision = from_seconds(cfg.first_decision_s);
        count_ = static_cast<std::uint32_t>(std::floor(trace_horizon(ct, mob) / cfg.period_s + 1e-9));
    }

    std::uint32_t message_count() const noexcept { return count_; }
    std::uint64_t anomalies() const noexcept { return state_.anomalies; }

    void on_start(Simulator& sim) override {
        const Time offset = from_seconds(cfg_.phase_offset_s());
        const Time period = from_seconds(cfg_.period_s);
        for (std::uint32_t m = 0; m < count_; ++m) sim.schedule(offset + period * m, create_message, m);
    }

    void on_timer(Simulator& sim, std::uint32_t tag, std::uint32_t arg) override {
        switch (tag) {
            case create_message: start_message(sim, arg); break;
            case decision: decide(sim, arg); break;
            case panic_start: enter_panic(sim, arg); break;
            default: break;
        }
    }

    void on_control(Simulator& sim, const ControlMessage& m) override {
        handle_control(state_, m, sim.now());
        if (m.kind != ControlKind::enter || !sim.message()) return;
        const bool push_now = cfg_.mode == PeriodicMode::infra_only || in_panic_ ||
                              (cfg_.mode == PeriodicMode::oracle && oracle_waiting_.erase(m.node) > 0);
        if (push_now) push(sim, m.node, in_panic_ ? PushCause::panic : cause());
    }

    void on_push_end(Simulator&, NodeId n, TransferStatus status) override {
        if (status != TransferStatus::completed) state_.pending.erase(n);
    }

    void on_message_expired(Simulator& sim, MessageRecord& rec) override {
        in_panic_ = false;
        oracle_waiting_.clear();
        if (cfg_.mode == PeriodicMode::oracle) rec.dominating_set_size = dominating_size_;
        if (probe_) probe_(sim, rec);
    }

private:
    PushCause cause() const {
        switch (cfg_.mode) {
            case PeriodicMode::oracle: return PushCause::oracle;
            case PeriodicMode::infra_only: return PushCause::reference;
            default: return PushCause::scheduled;
        }
    }

    void push(Simulator& sim, NodeId n, PushCause c) {
        switch (sim.begin_infra_push(n, c)) {
            case PushResult::started:
            case PushResult::already_holds:
            case PushResult::already_pushing: state_.pending.insert(n); break;
            case PushResult::not_subscribed:
            case PushResult::no_message: state_.pending.erase(n); break;
        }
    }

    void start_message(Simulator& sim, std::uint32_t id) {
        ContentMessage msg;
        msg.id = id;
        msg.size = cfg_.message_size;
        msg.created = sim.now();
        msg.expires = sim.now() + from_seconds(cfg_.period_s);
        sim.create_message(msg);
        state_.begin_message(id);
        current_ = msg;
        in_panic_ = false;
        const Time panic_at = msg.expires - sim.push_duration();

        switch (cfg_.mode) {
            case PeriodicMode::infra_only:
                for (auto n : state_.candidates()) push(sim, n, PushCause::reference);
                return;
            case PeriodicMode::oracle: {
                const auto d = oracle_initial_pushes(ct_, to_seconds(msg.created), to_seconds(msg.expires));
                dominating_size_ = static_cast<std::uint32_t>(d.size());
                for (auto n : d) {
                    if (state_.subscribed.contains(n))
                        push(sim, n, PushCause::oracle);
                    else
                        oracle_waiting_.insert(n);
                }
                break;
            }
            case PeriodicMode::push_and_track: {
                const Time first = msg.created + ccfg_.first_decision;
                if (first < panic_at) sim.schedule(first, decision, id);
                break;
            }
        }
        sim.schedule(panic_at, panic_start, id);
    }

    void decide(Simulator& sim, std::uint32_t id) {
        if (!current_ || current_->id != id || !sim.message()) return;
        for (auto n : tick(state_, ccfg_, *current_, sim.now(), ctx_)) push(sim, n, PushCause::scheduled);
        const Time next = sim.now() + ccfg_.tick_interval;
        if (next < current_->expires - sim.push_duration()) sim.schedule(next, decision, id);
    }

    void enter_panic(Simulator& sim, std::uint32_t id) {
        if (!current_ || current_->id != id || !sim.message()) return;
        in_panic_ = true;
        oracle_waiting_.clear();
        for (auto n : panic(state_)) push(sim, n, PushCause::panic);
    }

    const ContactTrace& ct_;
    PeriodicConfig cfg_;
    ControllerConfig ccfg_;
    Rng rng_;
    SelectionContext ctx_;
    ExpiryProbe probe_;
    ControllerState state_;
    std::optional<ContentMessage> current_;
    bool in_panic_ = false;
    std::set<NodeId> oracle_waiting_;
    std::uint32_t dominating_size_ = 0;
    std::uint32_t count_ = 0;
};

class FloatingDriver final : public SimHooks {
public:
    explicit FloatingDriver(const FloatingConfig& cfg) : cfg_(cfg) {}

    const std::set<NodeId>& initial() const noexcept { return initial_; }
    std::uint64_t anomalies() const noexcept { return state_.anomalies; }

    void on_start(Simulator& sim) override {
        ContentMessage msg;
        msg.id = 0;
        msg.size = cfg_.message_size;
        msg.created = Time{0};
        msg.expires = kNever;
        sim.create_message(msg);
        state_.begin_message(0);
        for (const auto& p : sim.contacts().nodes()) {
            const Time enter = from_seconds(p.presence.enter);
            const Time leave = from_seconds(p.presence.leave);
            if (enter <= Time{0} && leave > Time{0}) {
                initial_.insert(p.id);
                sim.seed_infection(p.id);
            }
        }
    }

    void on_control(Simulator& sim, const ControlMessage& m) override {
        handle_control(state_, m, sim.now());
        if (m.kind != ControlKind::enter) return;
        if (initial_.contains(m.node)) {
            state_.acked.insert(m.node);
            return;
        }
        switch (cfg_.mode) {
            case FloatingMode::reference: push(sim, m.node); break;
            case FloatingMode::feedback:
                sim.schedule(std::max(m.generated + from_seconds(cfg_.tolerance_s), sim.now()), deadline,
                             raw(m.node));
                break;
            case FloatingMode::no_feedback: break;
        }
    }

    void on_timer(Simulator& sim, std::uint32_t tag, std::uint32_t arg) override {
        if (tag != deadline) return;
        const NodeId n = node_id(arg);
        if (state_.subscribed.contains(n) && !state_.acked.contains(n) && !state_.pending.contains(n))
            push(sim, n);
    }

    void on_push_end(Simulator&, NodeId n, TransferStatus status) override {
        if (status != TransferStatus::completed) state_.pending.erase(n);
    }

private:
    void push(Simulator& sim, NodeId n) {
        const auto c = cfg_.mode == FloatingMode::reference ? PushCause::reference : PushCause::deadline;
        switch (sim.begin_infra_push(n, c)) {
            case PushResult::started:
            case PushResult::already_holds:
            case PushResult::already_pushing: state_.pending.insert(n); break;
            default: break;
        }
    }

    FloatingConfig cfg_;
    ControllerState state_;
    std::set<NodeId> initial_;
};

inline void echo(RunReport& r, std::string key, std::string value) {
    r.config.emplace_back(std::move(key), std::move(value));
}

inline void echo_network(RunReport& r, const NetworkConfig& n) {
    echo(r, "adhoc_rate", std::to_string(n.links.adhoc_rate));
    echo(r, "infra_down_rate", std::to_string(n.links.infra_down_rate));
    echo(r, "infra_up_rate", std::to_string(n.links.infra_up_rate));
    echo(r, "control_size", std::to_string(n.control_size));
    echo(r, "report_interval_s", detail::format_double(n.report_interval_s));
}

}  // namespace detail

// One periodic run without a reference. Byte loads, per-message records and
// the infection series are filled; offload fields are left empty.
inline RunOutput simulate_periodic(const ContactTrace& ct, const MobilityTrace* mob, const PeriodicConfig& cfg,
                                   std::uint64_t seed, ExpiryProbe probe = {}) {
    cfg.validate(mob != nullptr);
    const bool pnt_mode = cfg.mode == PeriodicMode::push_and_track;
    detail::PeriodicDriver driver(ct, mob, cfg, seed, std::move(probe));
    Simulator sim(ct, mob,
                  detail::sim_config(cfg.network, cfg.mode != PeriodicMode::infra_only,
                                     pnt_mode ? std::optional(cfg.whom) : std::nullopt),
                  driver);
    sim.run();
    RunOutput out{sim.report(), {sim.transfers().begin(), sim.transfers().end()}};
    auto& r = out.report;
    r.scenario = "periodic";
    r.seed = seed;
    r.phase_offset_s = cfg.phase_offset_s();
    r.anomalies = driver.anomalies();
    detail::echo(r, "mode", std::string(name(cfg.mode)));
    if (pnt_mode) {
        detail::echo(r, "when", std::string(name(cfg.when)));
        detail::echo(r, "whom", std::string(name(cfg.whom)));
    }
    detail::echo(r, "period_s", detail::format_double(cfg.period_s));
    detail::echo(r, "message_size", std::to_string(cfg.message_size));
    detail::echo(r, "replication", std::to_string(cfg.replication));
    detail::echo(r, "tick_interval_s", detail::format_double(cfg.tick_interval_s));
    detail::echo_network(r, cfg.network);
    return out;
}

// Infrastructure-only counterpart of a periodic configuration.
inline PeriodicConfig reference_of(PeriodicConfig cfg) {
    cfg.mode = PeriodicMode::infra_only;
    return cfg;
}

inline RunReport run_reference(const ContactTrace& ct, const MobilityTrace* mob, const PeriodicConfig& cfg,
                               std::uint64_t seed) {
    auto r = simulate_periodic(ct, mob, reference_of(cfg), seed).report;
    attach_reference(r, r.infra_load);
    return r;
}

// Periodic run with its offload ratio against the infrastructure-only
// reference. A known reference load skips the second simulation.
inline RunReport run_periodic(const ContactTrace& ct, const MobilityTrace* mob, const PeriodicConfig& cfg,
                              std::uint64_t seed, std::optional<std::uint64_t> reference_load = std::nullopt) {
    auto r = simulate_periodic(ct, mob, cfg, seed).report;
    if (!reference_load)
        reference_load = cfg.mode == PeriodicMode::infra_only
                             ? r.infra_load
                             : simulate_periodic(ct, mob, reference_of(cfg), seed).report.infra_load;
    attach_reference(r, *reference_load);
    return r;
}

inline RunOutput simulate_floating(const ContactTrace& ct, const FloatingConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    detail::FloatingDriver driver(cfg);
    Simulator sim(ct, nullptr, detail::sim_config(cfg.network, cfg.mode != FloatingMode::reference, std::nullopt),
                  driver);
    sim.run();
    RunOutput out{sim.report(), {sim.transfers().begin(), sim.transfers().end()}};
    auto& r = out.report;
    r.scenario = "floating";
    r.seed = seed;
    r.anomalies = driver.anomalies();
    for (const auto& o : sim.outcomes()) {
        if (driver.initial().contains(o.id)) continue;
        FloatingNodeRecord f;
        f.node = raw(o.id);
        f.enter_s = to_seconds(o.enter);
        f.leave_s = to_seconds(o.leave);
        f.delivered = o.infected_at.has_value();
        if (o.infected_at) f.delay_s = to_seconds(*o.infected_at - o.enter);
        f.via = o.via;
        f.pushed = o.pushed;
        r.floating_nodes.push_back(f);
    }
    detail::echo(r, "mode", std::string(name(cfg.mode)));
    detail::echo(r, "tolerance_s", detail::format_double(cfg.tolerance_s));
    detail::echo(r, "message_size", std::to_string(cfg.message_size));
    detail::echo_network(r, cfg.network);
    return out;
}

inline RunReport run_floating(const ContactTrace& ct, const FloatingConfig& cfg, std::uint64_t seed) {
    auto r = simulate_floating(ct, cfg, seed).report;
    if (cfg.mode == FloatingMode::reference) {
        attach_reference(r, r.infra_load);
    } else {
        FloatingConfig ref = cfg;
        ref.mode = FloatingMode::reference;
        const auto load = simulate_floating(ct, ref, seed).report.infra_load;
        if (load > 0) attach_reference(r, load);
    }
    return r;
}

// --- replications and sweep -----------------------------------------------------

// Runs jobs [0, n) on up to `workers` threads. Results are written by index,
// so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    pool.clear();
    if (error) std::rethrow_exception(error);
}

inline std::vector<RunReport> run_replications(const ContactTrace& ct, const MobilityTrace* mob,
                                               const PeriodicConfig& cfg, std::uint64_t base_seed,
                                               unsigned replications, unsigned workers = 1) {
    cfg.validate(mob != nullptr);
    std::vector<RunReport> out(replications);
    parallel_for(replications, workers, [&](std::size_t r) {
        PeriodicConfig c = cfg;
        c.replication = static_cast<unsigned>(r);
        out[r] = run_periodic(ct, mob, c, derive_seed(base_seed, r));
    });
    return out;
}

struct SweepResult {
    // Indexed [whom row][when column] in matrix order; empty where the whom
    // strategy needs positions and none were supplied.
    std::vector<std::vector<std::optional<Aggregate>>> cells;
    Aggregate infra_only;
    Aggregate oracle;
    std::size_t families = 0;

    bool operator==(const SweepResult&) const = default;
};

inline SweepResult sweep(const ContactTrace& ct, const MobilityTrace* mob, const PeriodicConfig& base,
                         std::uint64_t base_seed, unsigned replications, unsigned workers = 1) {
    if (replications == 0) throw ConfigError("at least one replication is needed");
    PeriodicConfig probe = base;
    probe.mode = PeriodicMode::infra_only;
    probe.validate(mob != nullptr);

    // References first; every family of replication r shares them.
    std::vector<RunReport> refs(replications);
    parallel_for(replications, workers, [&](std::size_t r) {
        PeriodicConfig c = reference_of(base);
        c.replication = static_cast<unsigned>(r);
        refs[r] = run_reference(ct, mob, c, derive_seed(base_seed, r));
    });

    struct Family {
        PeriodicConfig cfg;
        std::optional<std::pair<std::size_t, std::size_t>> cell;
    };
    std::vector<Family> families;
    for (std::size_t i = 0; i < kWhomStrategies.size(); ++i)
        for (std::size_t j = 0; j < kWhenStrategies.size(); ++j) {
            if (needs_positions(kWhomStrategies[i]) && !mob) continue;
            PeriodicConfig c = base;
            c.mode = PeriodicMode::push_and_track;
            c.whom = kWhomStrategies[i];
            c.when = kWhenStrategies[j];
            families.push_back({c, std::pair{i, j}});
        }
    PeriodicConfig oracle_cfg = base;
    oracle_cfg.mode = PeriodicMode::oracle;
    families.push_back({oracle_cfg, std::nullopt});

    std::vector<RunReport> runs(families.size() * replications);
    parallel_for(runs.size(), workers, [&](std::size_t k) {
        const auto f = k / replications;
        const auto r = k % replications;
        PeriodicConfig c = families[f].cfg;
        c.replication = static_cast<unsigned>(r);
        runs[k] = run_periodic(ct, mob, c, derive_seed(base_seed, r), refs[r].infra_load);
    });

    SweepResult out;
    out.cells.assign(kWhomStrategies.size(), std::vector<std::optional<Aggregate>>(kWhenStrategies.size()));
    for (std::size_t f = 0; f < families.size(); ++f) {
        const std::span<const RunReport> slice(runs.data() + f * replications, replications);
        if (families[f].cell)
            out.cells[families[f].cell->first][families[f].cell->second] = aggregate(slice);
        else
            out.oracle = aggregate(slice);
    }
    out.infra_only = aggregate(std::span<const RunReport>(refs));
    // Every whom row counts, including cells left empty for lack of positions.
    out.families = kWhomStrategies.size() * kWhenStrategies.size() + 2;
    return out;
}

inline std::string sweep_matrix_csv(const SweepResult& s) {
    std::string out = "whom";
    for (auto w : kWhenStrategies) out += "," + std::string(name(w));
    out += "\n";
    for (std::size_t i = 0; i < kWhomStrategies.size(); ++i) {
        out += std::string(name(kWhomStrategies[i]));
        for (const auto& cell : s.cells[i]) out += "," + (cell ? detail::format_sig6(cell->mean_offload) : std::string("NA"));
        out += "\n";
    }
    return out;
}

}  // namespace pnt
