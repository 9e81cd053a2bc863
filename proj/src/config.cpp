#include "encounterlens/config.hpp"

#include <istream>

#include "encounterlens/csv.hpp"

namespace encounterlens {

namespace {

ContractViolation bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    return ContractViolation("config key '" + std::string(key) + "': expected " + std::string(expected) +
                             ", got '" + std::string(value) + "'");
}

std::int64_t to_int(std::string_view key, std::string_view value) {
    if (const auto v = csv::parse_int(value)) return *v;
    throw bad_value(key, value, "an integer");
}

std::size_t to_count(std::string_view key, std::string_view value) {
    const auto v = to_int(key, value);
    if (v < 0) throw bad_value(key, value, "a non-negative integer");
    return static_cast<std::size_t>(v);
}

double to_double(std::string_view key, std::string_view value) {
    if (const auto v = csv::parse_double(value)) return *v;
    throw bad_value(key, value, "a number");
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw bad_value(key, value, "true or false");
}

std::vector<double> to_doubles(std::string_view key, std::string_view value) {
    std::vector<double> out;
    for (auto field : csv::split(value)) out.push_back(to_double(key, csv::trim(field)));
    return out;
}

CohortRange to_range(std::string_view key, std::string_view value) {
    const auto v = to_doubles(key, value);
    if (v.size() != 2 || !(v[0] < v[1])) throw bad_value(key, value, "'lower,upper' with lower < upper");
    return {v[0], v[1]};
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
    key = csv::trim(key);
    value = csv::trim(value);
    if (key == "wlan_input") wlan_inputs.emplace_back(std::string(value));
    else if (key == "bluetooth_input") bluetooth_inputs.emplace_back(std::string(value));
    else if (key == "out_dir") out_dir = std::string(value);
    else if (key == "epoch") epoch = to_int(key, value);
    else if (key == "utc_offset_s") utc_offset = to_int(key, value);
    else if (key == "window_days") window_days = to_count(key, value);
    else if (key == "window_bins") window_bins = to_count(key, value);
    else if (key == "bin") bin = parse_bin_unit(value);
    else if (key == "merge_gap") merge_gap = to_int(key, value);
    else if (key == "bucket_edges") bucket_edges = to_doubles(key, value);
    else if (key == "rare_cohort") rare_range = to_range(key, value);
    else if (key == "frequent_cohort") frequent_range = to_range(key, value);
    else if (key == "hourly_cohort") hourly_range = to_range(key, value);
    else if (key == "knee_quantile") knee_quantile = to_double(key, value);
    else if (key == "top3_threshold") top3_threshold = to_double(key, value);
    else if (key == "denominator_includes_c1") denominator_includes_c1 = to_bool(key, value);
    else if (key == "normalize_before_average") normalize_before_average = to_bool(key, value);
    else if (key == "metric") metric = parse_metric(value);
    else if (key == "location_weighting") {
        if (value == "events") location_weighting = LocationWeighting::events;
        else if (value == "duration") location_weighting = LocationWeighting::duration;
        else throw bad_value(key, value, "events or duration");
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(to_count(key, value));
    } else if (key == "synth_kind") {
        if (value == "wlan") synth_kind = SynthKind::wlan;
        else if (value == "bluetooth") synth_kind = SynthKind::bluetooth;
        else throw bad_value(key, value, "wlan or bluetooth");
    } else if (key == "synth_nodes") synth_nodes = to_count(key, value);
    else if (key == "synth_aps") synth_aps = to_count(key, value);
    else if (key == "synth_ap_popularity") synth_ap_popularity = parse_ap_popularity(value);
    else if (key == "synth_beacon_interval") synth_beacon_interval = to_int(key, value);
    else if (key == "synth_cohort") synth_cohorts.push_back(parse_cohort_spec(value));
    else throw ContractViolation("unknown config key '" + std::string(key) + "'");
}

std::size_t PipelineConfig::length_bins() const {
    if (window_bins) return *window_bins;
    if (window_days) return *window_days * (bin == BinUnit::hour ? 24 : 1);
    return 128;
}

SynthSpec PipelineConfig::synth_spec() const {
    SynthSpec spec;
    spec.n_nodes = synth_nodes;
    spec.n_aps = synth_aps;
    spec.window = TraceWindow{epoch.value_or(0), length_bins(), bin};
    spec.cohorts = synth_cohorts;
    spec.ap_popularity = synth_ap_popularity;
    spec.seed = seed;
    return spec;
}

void PipelineConfig::validate() const {
    if (window_days && window_bins) throw ContractViolation("set either window_days or window_bins, not both");
    const std::size_t T = length_bins();
    if (!is_power_of_two(T) || T < 2) {
        throw SchemaError("window length " + std::to_string(T) +
                          " bins is not a power of 2; the FFT needs a power-of-2 series length");
    }
    if (merge_gap <= 0) throw ContractViolation("merge_gap must be positive");
    if (!(knee_quantile > 0.0 && knee_quantile < 1.0)) throw ContractViolation("knee_quantile must lie in (0, 1)");
    if (!(top3_threshold > 0.0 && top3_threshold < 1.0)) {
        throw ContractViolation("top3_threshold must lie in (0, 1)");
    }
    if (is_binary(spectrum_metric()) && spectrum_metric() != encounter_metric(bin)) {
        throw ContractViolation("metric " + std::string(to_string(spectrum_metric())) + " does not match " +
                                std::string(to_string(bin)) + " bins");
    }
    if (synth_beacon_interval <= 0) throw ContractViolation("synth_beacon_interval must be positive");
    (void)bucket_by_rate({}, bucket_edges);
}

PipelineConfig parse_config(std::istream& in, std::string_view origin) {
    PipelineConfig config;
    csv::LineReader reader(in);
    while (auto raw = reader.next()) {
        auto line = *raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = csv::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = std::string(origin) + ":" + std::to_string(reader.line_number());
        if (eq == std::string_view::npos) throw ContractViolation(where + ": expected 'key = value'");
        try {
            config.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ContractViolation& e) {
            throw ContractViolation(where + ": " + e.what());
        }
    }
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    auto in = csv::open_input(path);
    PipelineConfig config = parse_config(in, path.string());
    // Input paths in a config file are relative to the file itself.
    const auto base = path.parent_path();
    for (auto* list : {&config.wlan_inputs, &config.bluetooth_inputs}) {
        for (auto& p : *list) {
            if (p.is_relative()) p = base / p;
        }
    }
    return config;
}

}  // namespace encounterlens
