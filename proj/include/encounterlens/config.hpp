#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "encounterlens/grouping.hpp"
#include "encounterlens/ingest.hpp"
#include "encounterlens/location.hpp"
#include "encounterlens/series.hpp"
#include "encounterlens/synth.hpp"

namespace encounterlens {

enum class SynthKind { wlan, bluetooth };

/**
 * Settings for every pipeline stage. Loaded from a flat `key = value` file
 * (`#` starts a comment, blank lines ignored); command-line flags are applied
 * afterwards through the same keys, so they override the file.
 *
 * Keys (repeatable ones marked *):
 *   wlan_input*, bluetooth_input*   raw CSV inputs (none: use the synth output)
 *   out_dir                         artifact directory
 *   epoch, utc_offset_s             window origin; default local midnight of the first record
 *   window_days | window_bins       window length (days scale with 24 for hour bins)
 *   bin                             day | hour
 *   merge_gap                       Bluetooth gap in seconds
 *   bucket_edges                    comma separated rate edges
 *   rare_cohort, frequent_cohort, hourly_cohort   "lower,upper"
 *   knee_quantile, top3_threshold
 *   denominator_includes_c1, normalize_before_average   true | false
 *   metric                          series metric fed to the spectrum stage
 *   location_weighting              events | duration
 *   seed, synth_kind (wlan | bluetooth), synth_nodes, synth_aps,
 *   synth_ap_popularity, synth_beacon_interval, synth_cohort*
 */
struct PipelineConfig {
    std::vector<std::filesystem::path> wlan_inputs;
    std::vector<std::filesystem::path> bluetooth_inputs;
    std::filesystem::path out_dir = "out";

    std::optional<Seconds> epoch;
    Seconds utc_offset = 0;
    std::optional<std::size_t> window_days;
    std::optional<std::size_t> window_bins;
    BinUnit bin = BinUnit::day;

    Seconds merge_gap = kDefaultMergeGap;
    std::vector<double> bucket_edges = default_bucket_edges();
    CohortRange rare_range = default_range(CohortLabel::rare);
    CohortRange frequent_range = default_range(CohortLabel::frequent);
    CohortRange hourly_range = default_range(CohortLabel::hourly);
    double knee_quantile = 0.20;
    double top3_threshold = 1.0 / 3.0;
    bool denominator_includes_c1 = true;
    bool normalize_before_average = true;
    std::optional<Metric> metric;
    LocationWeighting location_weighting = LocationWeighting::events;

    std::uint64_t seed = 1;
    SynthKind synth_kind = SynthKind::wlan;
    std::size_t synth_nodes = 100;
    std::size_t synth_aps = 50;
    ApPopularity synth_ap_popularity = UniformPopularity{};
    Seconds synth_beacon_interval = 60;
    std::vector<CohortSpec> synth_cohorts;

    /// Applies one setting. Unknown keys and malformed values throw ContractViolation.
    void set(std::string_view key, std::string_view value);

    /// Bins in the window: window_bins, else window_days scaled to the bin unit, else 128.
    [[nodiscard]] std::size_t length_bins() const;
    /// Metric fed to the spectrum stage; defaults to the binary encounter metric of the bin unit.
    [[nodiscard]] Metric spectrum_metric() const { return metric.value_or(encounter_metric(bin)); }
    [[nodiscard]] bool uses_synth() const { return wlan_inputs.empty() && bluetooth_inputs.empty(); }
    [[nodiscard]] SynthSpec synth_spec() const;

    /// Cross-field checks. The window length must be a power of two (SchemaError);
    /// other inconsistencies throw ContractViolation.
    void validate() const;
};

/// Parses config text; `origin` names the source in diagnostics.
[[nodiscard]] PipelineConfig parse_config(std::istream& in, std::string_view origin = "config");
/// Reads a config file (MissingInput when absent).
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace encounterlens
