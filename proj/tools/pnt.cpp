// pnt: trace generation, analysis and offloading experiments.
//
// Exit status: 0 on success, 2 on configuration or usage errors, 1 on
// input/output failures.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <pnt/pnt.hpp>

namespace fs = std::filesystem;

namespace {

struct InputOptions {
    std::string trace;
    std::string contacts;
    double range = 100.0;
    double step = 1.0;
    double participation = 1.0;
};

struct Inputs {
    std::unique_ptr<pnt::MobilityTrace> mobility;
    std::unique_ptr<pnt::ContactTrace> contacts;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw pnt::IoError("cannot read " + path);
    return f;
}

Inputs load_inputs(const InputOptions& o, std::uint64_t seed) {
    if (o.trace.empty() == o.contacts.empty())
        throw pnt::ConfigError("give exactly one of --trace (waypoints) or --contacts");
    pnt::check_fraction(o.participation);
    Inputs in;
    if (!o.trace.empty()) {
        auto f = open_input(o.trace);
        auto trace = pnt::load_trace(f);
        if (o.participation < 1.0) trace = pnt::subsample(trace, o.participation, seed);
        in.contacts = std::make_unique<pnt::ContactTrace>(pnt::derive_contacts(trace, o.range, o.step));
        in.mobility = std::make_unique<pnt::MobilityTrace>(std::move(trace));
    } else {
        auto f = open_input(o.contacts);
        auto ct = pnt::load_contacts(f, o.range, o.step);
        if (o.participation < 1.0) ct = pnt::subsample(ct, o.participation, seed);
        in.contacts = std::make_unique<pnt::ContactTrace>(std::move(ct));
    }
    return in;
}

void add_input_options(CLI::App& app, InputOptions& o) {
    app.add_option("--trace", o.trace, "Waypoint trace CSV (node_id,time_s,x_m,y_m)");
    app.add_option("--contacts", o.contacts, "Contact trace CSV (node_a,node_b,start_s,end_s)");
    app.add_option("--range", o.range, "Radio range in metres")->check(CLI::PositiveNumber);
    app.add_option("--step", o.step, "Position sampling step in seconds")->check(CLI::PositiveNumber);
    app.add_option("--participation", o.participation, "Fraction of nodes taking part")
        ->check(CLI::Range(0.0, 1.0));
}

void add_network_options(CLI::App& app, pnt::NetworkConfig& n) {
    app.add_option("--adhoc-rate", n.links.adhoc_rate, "Ad hoc rate, bytes/s");
    app.add_option("--down-rate", n.links.infra_down_rate, "Infrastructure downlink rate, bytes/s");
    app.add_option("--up-rate", n.links.infra_up_rate, "Infrastructure uplink rate, bytes/s");
    app.add_option("--control-size", n.control_size, "Control message size, bytes");
    app.add_option("--report-interval", n.report_interval_s, "Position/neighbour report period, s");
}

fs::path prepare_output(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw pnt::IoError("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw pnt::IoError("failed writing " + p.string());
}

pnt::Json stats_json(const pnt::DatasetStats& s, const pnt::ContactTrace& ct) {
    pnt::Json j;
    j["nodes"] = ct.nodes().size();
    j["contacts"] = ct.contacts().size();
    j["duration_s"] = ct.duration();
    j["samples"] = s.samples;
    j["avg_nodes"] = s.avg_nodes;
    j["avg_components"] = s.avg_components;
    j["avg_singletons"] = s.avg_singletons;
    j["avg_component_size"] = s.avg_component_size;
    j["avg_degree"] = s.avg_degree;
    pnt::Json ccdf = pnt::Json::array();
    for (const auto& p : s.contact_duration_ccdf) ccdf.push_back({p.seconds, p.fraction});
    j["contact_duration_ccdf"] = std::move(ccdf);
    pnt::Json first = pnt::Json::object();
    for (const auto& [n, t] : s.time_to_first_contact) first[pnt::to_string(n)] = t ? pnt::Json(*t) : pnt::Json();
    j["time_to_first_contact_s"] = std::move(first);
    return j;
}

pnt::PeriodicConfig periodic_config(const std::string& when, const std::string& whom) {
    pnt::PeriodicConfig c;
    if (whom == "oracle") {
        c.mode = pnt::PeriodicMode::oracle;
    } else if (whom == "infra-only") {
        c.mode = pnt::PeriodicMode::infra_only;
    } else {
        auto w = pnt::parse_whom(whom);
        if (!w) throw pnt::ConfigError("unknown whom-strategy '" + whom + "'");
        c.whom = *w;
    }
    auto t = pnt::parse_when(when);
    if (!t) throw pnt::ConfigError("unknown when-strategy '" + when + "'");
    c.when = *t;
    return c;
}

std::string default_output() {
    if (const char* env = std::getenv("PNT_OUTPUT_DIR"); env && *env) return env;
    return "pnt-out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Push-and-track offloading simulator"};
    app.require_subcommand(1);
    std::string out_dir = default_output();
    std::uint64_t seed = 1;
    app.add_option("--output,-o", out_dir, "Output directory (default: $PNT_OUTPUT_DIR or ./pnt-out)");
    app.add_option("--seed", seed, "Base random seed");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic waypoint trace");
    pnt::SyntheticConfig syn;
    std::string gen_file = "trace.csv";
    double side = 1500.0;
    gen->add_option("--file", gen_file, "File name inside the output directory");
    gen->add_option("--side", side, "Side of the square area, m")->check(CLI::PositiveNumber);
    gen->add_option("--arrival-rate", syn.arrival_rate, "Node arrivals per second");
    gen->add_option("--mean-transit", syn.mean_transit, "Mean time spent in the area, s");
    gen->add_option("--speed-min", syn.speed_min, "Minimum speed, m/s");
    gen->add_option("--speed-max", syn.speed_max, "Maximum speed, m/s");
    gen->add_option("--waypoints-min", syn.waypoints_min, "Minimum interior waypoints");
    gen->add_option("--waypoints-max", syn.waypoints_max, "Maximum interior waypoints");
    gen->add_option("--horizon", syn.horizon, "Trace length, s");
    gen->add_option("--warmup", syn.warmup, "Arrival warm-up before t=0, s");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Connectivity statistics of a trace");
    InputOptions ana_in;
    add_input_options(*ana, ana_in);
    std::string ana_whom;
    ana->add_option("--whom", ana_whom, "Check that a whom-strategy is usable with this input");

    // periodic
    auto* per = app.add_subcommand("periodic", "Periodic flooding runs");
    InputOptions per_in;
    add_input_options(*per, per_in);
    std::string when = "linear", whom = "random", format = "json";
    pnt::PeriodicConfig per_base;
    unsigned replications = 10;
    unsigned workers = 1;
    per->add_option("--when", when, "When-strategy");
    per->add_option("--whom", whom, "Whom-strategy, oracle, or infra-only");
    per->add_option("--period", per_base.period_s, "Message lifetime T, s");
    per->add_option("--size", per_base.message_size, "Content size, bytes");
    per->add_option("--tick", per_base.tick_interval_s, "Decision interval, s");
    per->add_option("--replications", replications, "Number of replications")->check(CLI::PositiveNumber);
    per->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    per->add_option("--format", format, "Per-run output: json or csv (JSON plus CSV bundle)")
        ->check(CLI::IsMember({"json", "csv"}));
    add_network_options(*per, per_base.network);

    // floating
    auto* flo = app.add_subcommand("floating", "Floating data runs");
    InputOptions flo_in;
    add_input_options(*flo, flo_in);
    pnt::FloatingConfig flo_cfg;
    std::string flo_mode = "feedback";
    unsigned flo_reps = 1;
    std::string flo_format = "json";
    flo->add_option("--tolerance", flo_cfg.tolerance_s, "User delay tolerance U, s");
    flo->add_option("--size", flo_cfg.message_size, "Content size, bytes");
    flo->add_option("--mode", flo_mode, "feedback, no-feedback or reference")
        ->check(CLI::IsMember({"feedback", "no-feedback", "reference"}));
    flo->add_option("--replications", flo_reps, "Number of replications")->check(CLI::PositiveNumber);
    flo->add_option("--format", flo_format, "Per-run output: json or csv")->check(CLI::IsMember({"json", "csv"}));
    add_network_options(*flo, flo_cfg.network);

    // sweep
    auto* swp = app.add_subcommand("sweep", "Full when/whom strategy grid with references");
    InputOptions swp_in;
    add_input_options(*swp, swp_in);
    pnt::PeriodicConfig swp_base;
    unsigned swp_reps = 10;
    unsigned swp_workers = 1;
    swp->add_option("--period", swp_base.period_s, "Message lifetime T, s");
    swp->add_option("--size", swp_base.message_size, "Content size, bytes");
    swp->add_option("--tick", swp_base.tick_interval_s, "Decision interval, s");
    swp->add_option("--replications", swp_reps, "Replications per cell")->check(CLI::PositiveNumber);
    swp->add_option("--workers", swp_workers, "Worker threads")->check(CLI::PositiveNumber);
    add_network_options(*swp, swp_base.network);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            syn.area = {0.0, 0.0, side, side};
            syn.validate();
            const auto trace = pnt::generate_synthetic(syn, seed);
            const auto dir = prepare_output(out_dir);
            std::ofstream f(dir / gen_file);
            pnt::write_trace(f, trace);
            if (!f) throw pnt::IoError("failed writing " + (dir / gen_file).string());
            std::cout << "wrote " << (dir / gen_file).string() << " (" << trace.node_count() << " nodes)\n";
        } else if (ana->parsed()) {
            if (!ana_whom.empty()) {
                auto w = pnt::parse_whom(ana_whom);
                if (!w) throw pnt::ConfigError("unknown whom-strategy '" + ana_whom + "'");
                if (pnt::needs_positions(*w) && ana_in.trace.empty())
                    throw pnt::ConfigError(ana_whom + " needs waypoint input (--trace)");
            }
            const auto in = load_inputs(ana_in, seed);
            const auto stats = pnt::dataset_stats(*in.contacts, ana_in.step);
            const auto dir = prepare_output(out_dir);
            const auto text = stats_json(stats, *in.contacts).dump(2) + "\n";
            write_text(dir / "stats.json", text);
            std::cout << "nodes " << in.contacts->nodes().size() << ", avg components " << stats.avg_components
                      << ", avg singletons " << stats.avg_singletons << ", avg degree " << stats.avg_degree
                      << "\nwrote " << (dir / "stats.json").string() << "\n";
        } else if (per->parsed()) {
            auto cfg = periodic_config(when, whom);
            cfg.period_s = per_base.period_s;
            cfg.message_size = per_base.message_size;
            cfg.tick_interval_s = per_base.tick_interval_s;
            cfg.network = per_base.network;
            if (cfg.mode == pnt::PeriodicMode::push_and_track && pnt::needs_positions(cfg.whom) &&
                per_in.trace.empty())
                throw pnt::ConfigError(whom + " needs waypoint input (--trace)");
            const auto in = load_inputs(per_in, seed);
            const auto runs = pnt::run_replications(*in.contacts, in.mobility.get(), cfg, seed, replications, workers);
            const auto dir = prepare_output(out_dir);
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const auto stem = "run_" + std::to_string(r);
                pnt::export_report(runs[r], dir / (stem + ".json"), pnt::ExportFormat::json);
                if (format == "csv") pnt::export_report(runs[r], dir / stem, pnt::ExportFormat::csv_bundle);
            }
            const auto agg = pnt::aggregate(runs);
            write_text(dir / "aggregate.json", pnt::to_json(agg).dump(2) + "\n");
            std::cout << runs.size() << " runs, mean offload ratio " << agg.mean_offload << "\n";
        } else if (flo->parsed()) {
            flo_cfg.mode = flo_mode == "feedback"      ? pnt::FloatingMode::feedback
                           : flo_mode == "no-feedback" ? pnt::FloatingMode::no_feedback
                                                       : pnt::FloatingMode::reference;
            const auto in = load_inputs(flo_in, seed);
            std::vector<pnt::RunReport> runs(flo_reps);
            pnt::parallel_for(flo_reps, 1, [&](std::size_t r) {
                runs[r] = pnt::run_floating(*in.contacts, flo_cfg, pnt::derive_seed(seed, r));
            });
            const auto dir = prepare_output(out_dir);
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const auto stem = "run_" + std::to_string(r);
                pnt::export_report(runs[r], dir / (stem + ".json"), pnt::ExportFormat::json);
                if (flo_format == "csv") pnt::export_report(runs[r], dir / stem, pnt::ExportFormat::csv_bundle);
            }
            const auto agg = pnt::aggregate(runs);
            const auto s = pnt::summarize_floating(runs.front());
            auto j = pnt::to_json(agg);
            j["delivery_ratio"] = s.delivery_ratio;
            j["mean_delay_s"] = s.mean_delay_s;
            write_text(dir / "aggregate.json", j.dump(2) + "\n");
            std::cout << "offload ratio " << agg.mean_offload << ", delivery ratio " << s.delivery_ratio
                      << ", mean delay " << s.mean_delay_s << " s\n";
        } else if (swp->parsed()) {
            const auto in = load_inputs(swp_in, seed);
            const auto res = pnt::sweep(*in.contacts, in.mobility.get(), swp_base, seed, swp_reps, swp_workers);
            const auto dir = prepare_output(out_dir);
            write_text(dir / "matrix.csv", pnt::sweep_matrix_csv(res));
            pnt::Json j;
            j["families"] = res.families;
            j["infra_only"] = pnt::to_json(res.infra_only);
            j["oracle"] = pnt::to_json(res.oracle);
            pnt::Json cells = pnt::Json::object();
            for (std::size_t i = 0; i < pnt::kWhomStrategies.size(); ++i) {
                pnt::Json row = pnt::Json::object();
                for (std::size_t k = 0; k < pnt::kWhenStrategies.size(); ++k) {
                    const auto& c = res.cells[i][k];
                    row[std::string(pnt::name(pnt::kWhenStrategies[k]))] = c ? pnt::to_json(*c) : pnt::Json();
                }
                cells[std::string(pnt::name(pnt::kWhomStrategies[i]))] = std::move(row);
            }
            j["cells"] = std::move(cells);
            write_text(dir / "sweep.json", j.dump(2) + "\n");
            std::cout << res.families << " run families, matrix in " << (dir / "matrix.csv").string() << "\n";
        }
    } catch (const pnt::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const pnt::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const pnt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
