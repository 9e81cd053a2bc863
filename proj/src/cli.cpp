#include "encounterlens/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>

#include "encounterlens/config.hpp"
#include "encounterlens/pipeline.hpp"

namespace encounterlens {

namespace {

using Stage = std::function<StageResult(const PipelineConfig&)>;

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::size_t> window_days;
    std::optional<std::size_t> window_bins;
    std::optional<std::string> bin;
    std::optional<long long> merge_gap;
    std::optional<double> knee_quantile;
    std::optional<double> top3_threshold;
    std::optional<unsigned long long> seed;
    std::optional<long long> epoch;
    std::vector<std::string> wlan;
    std::vector<std::string> bluetooth;
    std::vector<std::string> overrides;
};

void add_options(CLI::App& app, Options& o) {
    app.add_option("--config", o.config, "Config file (key = value lines)");
    app.add_option("--out", o.out, "Artifact directory");
    app.add_option("--window-days", o.window_days, "Window length in days");
    app.add_option("--window-bins", o.window_bins, "Window length in bins (power of 2)");
    app.add_option("--bin", o.bin, "Bin unit")->check(CLI::IsMember({"day", "hour"}));
    app.add_option("--merge-gap", o.merge_gap, "Bluetooth merge gap in seconds");
    app.add_option("--knee-quantile", o.knee_quantile, "Top share quantile flagged by the knee criterion");
    app.add_option("--top3-threshold", o.top3_threshold, "Top-3 share threshold");
    app.add_option("--seed", o.seed, "Synthetic generator seed");
    app.add_option("--epoch", o.epoch, "Window origin in epoch seconds");
    app.add_option("--wlan", o.wlan, "WLAN association CSV (repeatable)");
    app.add_option("--bluetooth", o.bluetooth, "Bluetooth sighting CSV (repeatable)");
    app.add_option("--set", o.overrides, "Override any config key: key=value (repeatable)");
}

PipelineConfig resolve(const Options& o) {
    PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ContractViolation("--set expects key=value, got '" + kv + "'");
        cfg.set(std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
    }
    if (o.out) cfg.out_dir = *o.out;
    if (o.window_days) {
        cfg.window_days = *o.window_days;
        cfg.window_bins.reset();
    }
    if (o.window_bins) {
        cfg.window_bins = *o.window_bins;
        cfg.window_days.reset();
    }
    if (o.bin) cfg.bin = parse_bin_unit(*o.bin);
    if (o.merge_gap) cfg.merge_gap = *o.merge_gap;
    if (o.knee_quantile) cfg.knee_quantile = *o.knee_quantile;
    if (o.top3_threshold) cfg.top3_threshold = *o.top3_threshold;
    if (o.seed) cfg.seed = *o.seed;
    if (o.epoch) cfg.epoch = *o.epoch;
    if (!o.wlan.empty() || !o.bluetooth.empty()) {
        cfg.wlan_inputs.assign(o.wlan.begin(), o.wlan.end());
        cfg.bluetooth_inputs.assign(o.bluetooth.begin(), o.bluetooth.end());
    }
    return cfg;
}

void report(const StageResult& r, double seconds, std::ostream& out, std::ostream& err) {
    for (const auto& w : r.warnings) err << "warning: " << r.stage << ": " << w << '\n';
    out << r.stage << ": " << r.summary << " (" << std::fixed << std::setprecision(2) << seconds << " s)\n";
    out.unsetf(std::ios::floatfield);
}

int run_stages(const std::vector<Stage>& stages, const Options& o, std::ostream& out, std::ostream& err) {
    const PipelineConfig cfg = resolve(o);
    cfg.validate();
    for (const auto& stage : stages) {
        const auto t0 = std::chrono::steady_clock::now();
        const StageResult r = stage(cfg);
        report(r, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), out, err);
    }
    return exit_code::ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Encounter trace analysis: encounters, time series, spectra, regular pairs, locations"};
    app.require_subcommand(1, 1);
    Options options;

    const std::pair<const char*, const char*> names[] = {
        {"ingest", "Parse and window raw WLAN / Bluetooth CSVs"},
        {"encounters", "Derive pairwise encounter events"},
        {"series", "Build per-pair and per-node time series"},
        {"spectrum", "ACF power spectra, rate cohorts and group averages"},
        {"regular", "Score spectral regularity and select regular pairs"},
        {"locations", "Location preference histograms and divergence"},
        {"synth", "Generate a synthetic trace with planted patterns"},
        {"pipeline", "Run every stage in order"},
    };
    for (const auto& [name, help] : names) add_options(*app.add_subcommand(name, help), options);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::failure;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::vector<Stage> stages;
    if (command == "ingest") stages = {run_ingest};
    else if (command == "encounters") stages = {run_encounters};
    else if (command == "series") stages = {run_series};
    else if (command == "spectrum") stages = {run_spectrum};
    else if (command == "regular") stages = {run_regular};
    else if (command == "locations") stages = {run_locations};
    else if (command == "synth") stages = {run_synth};

    try {
        if (command == "pipeline") {
            const PipelineConfig cfg = resolve(options);
            if (cfg.uses_synth()) stages.push_back(run_synth);
            for (const Stage& s : {Stage(run_ingest), Stage(run_encounters), Stage(run_series),
                                   Stage(run_spectrum), Stage(run_regular), Stage(run_locations)}) {
                stages.push_back(s);
            }
        }
        return run_stages(stages, options, out, err);
    } catch (const MissingInput& e) {
        err << "error: missing input: " << e.what() << '\n';
        return exit_code::missing_input;
    } catch (const SchemaError& e) {
        err << "error: schema mismatch: " << e.what() << '\n';
        return exit_code::schema_mismatch;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::failure;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace encounterlens
