#pragma once

// Run reports: loads, offload ratio, per-message delivery records, the
// infection-ratio series and floating-data outcomes, plus their JSON and
// CSV serialisations.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "detail/csv.hpp"

namespace pnt {

struct MessageRecord {
    std::uint32_t id = 0;
    double created_s = 0.0;
    double expires_s = 0.0;
    std::uint32_t subscribed_at_expiry = 0;
    std::uint32_t delivered_at_expiry = 0;
    double delivery_ratio = 1.0;  // vacuously 1 when nobody is subscribed
    std::uint32_t late_count = 0;    // subscribed too late to be served by a push
    std::uint32_t missed_count = 0;  // uninfected at expiry although servable
    std::uint32_t pushes = 0;
    std::uint32_t panic_pushes = 0;
    std::uint64_t infra_bytes = 0;   // content bytes on the downlink
    std::uint64_t adhoc_bytes = 0;
    std::optional<std::uint32_t> dominating_set_size;

    bool operator==(const MessageRecord&) const = default;
};

struct SeriesPoint {
    std::uint32_t message = 0;
    double time_s = 0.0;
    std::uint32_t infected = 0;    // subscribed nodes holding the content
    std::uint32_t subscribed = 0;

    double ratio() const noexcept {
        return subscribed == 0 ? 0.0 : static_cast<double>(infected) / static_cast<double>(subscribed);
    }
    bool operator==(const SeriesPoint&) const = default;
};

enum class Via : std::uint8_t { none, adhoc, infra, seeded };

constexpr std::string_view name(Via v) noexcept {
    switch (v) {
        case Via::none: return "none";
        case Via::adhoc: return "adhoc";
        case Via::infra: return "infra";
        case Via::seeded: return "seeded";
    }
    return "?";
}

struct FloatingNodeRecord {
    std::uint32_t node = 0;
    double enter_s = 0.0;
    double leave_s = 0.0;
    bool delivered = false;
    std::optional<double> delay_s;
    Via via = Via::none;
    bool pushed = false;

    bool operator==(const FloatingNodeRecord&) const = default;
};

struct RunReport {
    std::vector<std::pair<std::string, std::string>> config;
    std::string scenario;
    double phase_offset_s = 0.0;
    std::uint64_t seed = 0;

    std::uint64_t infra_load = 0;          // content downlink + control uplink
    std::uint64_t infra_content_load = 0;
    std::uint64_t control_load = 0;
    std::uint64_t adhoc_load = 0;
    std::optional<std::uint64_t> reference_infra_load;
    std::optional<double> offload_ratio;
    std::uint64_t transfers = 0;
    std::uint64_t anomalies = 0;

    std::vector<MessageRecord> messages;
    std::vector<SeriesPoint> infection_series;
    std::vector<FloatingNodeRecord> floating_nodes;

    bool operator==(const RunReport&) const = default;
};

// 1 - L / L_ref; negative when the run used more infrastructure than the
// reference.
inline double offload_ratio(std::uint64_t load, std::uint64_t reference) {
    if (reference == 0) throw Error("reference infrastructure load is zero");
    return 1.0 - static_cast<double>(load) / static_cast<double>(reference);
}

inline void attach_reference(RunReport& r, std::uint64_t reference_load) {
    r.reference_infra_load = reference_load;
    r.offload_ratio = reference_load > 0 ? std::optional(offload_ratio(r.infra_load, reference_load))
                                         : std::nullopt;
}

// Series points of one message.
inline std::vector<SeriesPoint> infection_series(const RunReport& r, std::uint32_t message) {
    std::vector<SeriesPoint> out;
    for (const auto& p : r.infection_series)
        if (p.message == message) out.push_back(p);
    return out;
}

// Right-continuous step lookup: the value set by the last point at or
// before t.
inline std::optional<SeriesPoint> series_at(std::span<const SeriesPoint> s, double t) {
    std::optional<SeriesPoint> v;
    for (const auto& p : s) {
        if (p.time_s > t) break;
        v = p;
    }
    return v;
}

struct FloatingSummary {
    std::size_t entrants = 0;
    std::size_t delivered = 0;
    std::size_t pushed = 0;
    double delivery_ratio = 0.0;
    double mean_delay_s = 0.0;
};

inline FloatingSummary summarize_floating(const RunReport& r) {
    FloatingSummary s;
    double delay = 0.0;
    for (const auto& n : r.floating_nodes) {
        ++s.entrants;
        if (n.pushed) ++s.pushed;
        if (n.delivered) {
            ++s.delivered;
            delay += n.delay_s.value_or(0.0);
        }
    }
    if (s.entrants) s.delivery_ratio = static_cast<double>(s.delivered) / static_cast<double>(s.entrants);
    if (s.delivered) s.mean_delay_s = delay / static_cast<double>(s.delivered);
    return s;
}

struct Aggregate {
    std::size_t runs = 0;
    double mean_offload = 0.0;
    double min_offload = 0.0;
    double max_offload = 0.0;
    double mean_infra_load = 0.0;
    double mean_adhoc_load = 0.0;
    double mean_control_load = 0.0;
    bool operator==(const Aggregate&) const = default;
};

inline Aggregate aggregate(std::span<const RunReport> runs) {
    Aggregate a;
    bool first = true;
    for (const auto& r : runs) {
        ++a.runs;
        a.mean_infra_load += static_cast<double>(r.infra_load);
        a.mean_adhoc_load += static_cast<double>(r.adhoc_load);
        a.mean_control_load += static_cast<double>(r.control_load);
        const double o = r.offload_ratio.value_or(0.0);
        a.mean_offload += o;
        a.min_offload = first ? o : std::min(a.min_offload, o);
        a.max_offload = first ? o : std::max(a.max_offload, o);
        first = false;
    }
    if (a.runs) {
        const auto n = static_cast<double>(a.runs);
        a.mean_offload /= n;
        a.mean_infra_load /= n;
        a.mean_adhoc_load /= n;
        a.mean_control_load /= n;
    }
    return a;
}

// --- JSON -------------------------------------------------------------------

using Json = nlohmann::ordered_json;

template <typename T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> json_optional(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

inline Json to_json(const Aggregate& a) {
    Json j;
    j["runs"] = a.runs;
    j["mean_offload"] = a.mean_offload;
    j["min_offload"] = a.min_offload;
    j["max_offload"] = a.max_offload;
    j["mean_infra_load"] = a.mean_infra_load;
    j["mean_adhoc_load"] = a.mean_adhoc_load;
    j["mean_control_load"] = a.mean_control_load;
    return j;
}

inline Json to_json(const RunReport& r) {
    Json j;
    Json cfg = Json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    j["scenario"] = r.scenario;
    j["phase_offset_s"] = r.phase_offset_s;
    j["seed"] = r.seed;
    j["infra_load"] = r.infra_load;
    j["infra_content_load"] = r.infra_content_load;
    j["control_load"] = r.control_load;
    j["adhoc_load"] = r.adhoc_load;
    j["reference_infra_load"] = optional_json(r.reference_infra_load);
    j["offload_ratio"] = optional_json(r.offload_ratio);
    j["transfers"] = r.transfers;
    j["anomalies"] = r.anomalies;

    Json msgs = Json::array();
    for (const auto& m : r.messages) {
        Json x;
        x["id"] = m.id;
        x["created_s"] = m.created_s;
        x["expires_s"] = m.expires_s;
        x["subscribed_at_expiry"] = m.subscribed_at_expiry;
        x["delivered_at_expiry"] = m.delivered_at_expiry;
        x["delivery_ratio"] = m.delivery_ratio;
        x["late_count"] = m.late_count;
        x["missed_count"] = m.missed_count;
        x["pushes"] = m.pushes;
        x["panic_pushes"] = m.panic_pushes;
        x["infra_bytes"] = m.infra_bytes;
        x["adhoc_bytes"] = m.adhoc_bytes;
        x["dominating_set_size"] = optional_json(m.dominating_set_size);
        msgs.push_back(std::move(x));
    }
    j["messages"] = std::move(msgs);

    // Columnar to keep long series compact.
    Json series;
    Json ids = Json::array(), times = Json::array(), inf = Json::array(), sub = Json::array();
    for (const auto& p : r.infection_series) {
        ids.push_back(p.message);
        times.push_back(p.time_s);
        inf.push_back(p.infected);
        sub.push_back(p.subscribed);
    }
    series["message"] = std::move(ids);
    series["time_s"] = std::move(times);
    series["infected"] = std::move(inf);
    series["subscribed"] = std::move(sub);
    j["infection_series"] = std::move(series);

    Json fl = Json::array();
    for (const auto& n : r.floating_nodes) {
        Json x;
        x["node"] = n.node;
        x["enter_s"] = n.enter_s;
        x["leave_s"] = n.leave_s;
        x["delivered"] = n.delivered;
        x["delay_s"] = optional_json(n.delay_s);
        x["via"] = std::string(name(n.via));
        x["pushed"] = n.pushed;
        fl.push_back(std::move(x));
    }
    j["floating_nodes"] = std::move(fl);
    return j;
}

inline Via parse_via(const std::string& s) {
    for (auto v : {Via::none, Via::adhoc, Via::infra, Via::seeded})
        if (name(v) == s) return v;
    throw Error("unknown delivery route '" + s + "'");
}

inline RunReport report_from_json(const Json& j) {
    RunReport r;
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.scenario = j.at("scenario").get<std::string>();
    r.phase_offset_s = j.at("phase_offset_s").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.infra_load = j.at("infra_load").get<std::uint64_t>();
    r.infra_content_load = j.at("infra_content_load").get<std::uint64_t>();
    r.control_load = j.at("control_load").get<std::uint64_t>();
    r.adhoc_load = j.at("adhoc_load").get<std::uint64_t>();
    r.reference_infra_load = json_optional<std::uint64_t>(j.at("reference_infra_load"));
    r.offload_ratio = json_optional<double>(j.at("offload_ratio"));
    r.transfers = j.at("transfers").get<std::uint64_t>();
    r.anomalies = j.at("anomalies").get<std::uint64_t>();
    for (const auto& x : j.at("messages")) {
        MessageRecord m;
        m.id = x.at("id").get<std::uint32_t>();
        m.created_s = x.at("created_s").get<double>();
        m.expires_s = x.at("expires_s").get<double>();
        m.subscribed_at_expiry = x.at("subscribed_at_expiry").get<std::uint32_t>();
        m.delivered_at_expiry = x.at("delivered_at_expiry").get<std::uint32_t>();
        m.delivery_ratio = x.at("delivery_ratio").get<double>();
        m.late_count = x.at("late_count").get<std::uint32_t>();
        m.missed_count = x.at("missed_count").get<std::uint32_t>();
        m.pushes = x.at("pushes").get<std::uint32_t>();
        m.panic_pushes = x.at("panic_pushes").get<std::uint32_t>();
        m.infra_bytes = x.at("infra_bytes").get<std::uint64_t>();
        m.adhoc_bytes = x.at("adhoc_bytes").get<std::uint64_t>();
        m.dominating_set_size = json_optional<std::uint32_t>(x.at("dominating_set_size"));
        r.messages.push_back(m);
    }
    const auto& s = j.at("infection_series");
    const auto& ids = s.at("message");
    for (std::size_t i = 0; i < ids.size(); ++i)
        r.infection_series.push_back({ids[i].get<std::uint32_t>(), s.at("time_s")[i].get<double>(),
                                      s.at("infected")[i].get<std::uint32_t>(),
                                      s.at("subscribed")[i].get<std::uint32_t>()});
    for (const auto& x : j.at("floating_nodes")) {
        FloatingNodeRecord n;
        n.node = x.at("node").get<std::uint32_t>();
        n.enter_s = x.at("enter_s").get<double>();
        n.leave_s = x.at("leave_s").get<double>();
        n.delivered = x.at("delivered").get<bool>();
        n.delay_s = json_optional<double>(x.at("delay_s"));
        n.via = parse_via(x.at("via").get<std::string>());
        n.pushed = x.at("pushed").get<bool>();
        r.floating_nodes.push_back(n);
    }
    return r;
}

// --- export -------------------------------------------------------------------

enum class ExportFormat { json, csv_bundle };

inline std::size_t export_json(const RunReport& r, std::ostream& out) {
    const std::string text = to_json(r).dump(2) + "\n";
    out << text;
    if (!out) throw IoError("failed to write report");
    return text.size();
}

namespace detail {

inline std::size_t write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing " + path.string());
    return text.size();
}

}  // namespace detail

inline std::string messages_csv(const RunReport& r) {
    using detail::format_sig6;
    std::ostringstream o;
    o << "msg_id,created_s,expires_s,delivery_ratio,late_count,pushes,panic_pushes,infra_bytes,adhoc_bytes\n";
    for (const auto& m : r.messages)
        o << m.id << ',' << format_sig6(m.created_s) << ',' << format_sig6(m.expires_s) << ','
          << format_sig6(m.delivery_ratio) << ',' << m.late_count << ',' << m.pushes << ',' << m.panic_pushes
          << ',' << m.infra_bytes << ',' << m.adhoc_bytes << '\n';
    return o.str();
}

inline std::string series_csv(const RunReport& r) {
    using detail::format_sig6;
    std::ostringstream o;
    o << "msg_id,time_s,infected,subscribed,ratio\n";
    for (const auto& p : r.infection_series)
        o << p.message << ',' << format_sig6(p.time_s) << ',' << p.infected << ',' << p.subscribed << ','
          << format_sig6(p.ratio()) << '\n';
    return o.str();
}

inline std::string floating_csv(const RunReport& r) {
    using detail::format_sig6;
    std::ostringstream o;
    o << "node_id,enter_s,leave_s,delivered,delay_s,via,pushed\n";
    for (const auto& n : r.floating_nodes)
        o << n.node << ',' << format_sig6(n.enter_s) << ',' << format_sig6(n.leave_s) << ','
          << (n.delivered ? 1 : 0) << ',' << (n.delay_s ? format_sig6(*n.delay_s) : std::string()) << ','
          << name(n.via) << ',' << (n.pushed ? 1 : 0) << '\n';
    return o.str();
}

// JSON: writes `sink` as a file. CSV bundle: `sink` is a directory that
// receives messages.csv, infection_series.csv and floating_nodes.csv.
inline std::size_t export_report(const RunReport& r, const std::filesystem::path& sink, ExportFormat format) {
    if (format == ExportFormat::json) {
        std::ostringstream o;
        export_json(r, o);
        return detail::write_file(sink, o.str());
    }
    std::error_code ec;
    std::filesystem::create_directories(sink, ec);
    if (ec) throw IoError("cannot create " + sink.string() + ": " + ec.message());
    std::size_t n = 0;
    n += detail::write_file(sink / "messages.csv", messages_csv(r));
    n += detail::write_file(sink / "infection_series.csv", series_csv(r));
    n += detail::write_file(sink / "floating_nodes.csv", floating_csv(r));
    return n;
}

}  // namespace pnt
