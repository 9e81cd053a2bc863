#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "encounterlens/config.hpp"

namespace encounterlens {

// Artifact names inside PipelineConfig::out_dir.
namespace artifact {
inline constexpr std::string_view synth_associations = "synth_associations.csv";
inline constexpr std::string_view synth_sightings = "synth_sightings.csv";
inline constexpr std::string_view synth_labels = "synth_labels.csv";
inline constexpr std::string_view window = "window.txt";
inline constexpr std::string_view associations = "associations.csv";
inline constexpr std::string_view sightings = "sightings.csv";
inline constexpr std::string_view encounters = "encounters.csv";
inline constexpr std::string_view series = "series.csv";
inline constexpr std::string_view node_series = "node_series.csv";
inline constexpr std::string_view spectra = "spectra.csv";
inline constexpr std::string_view node_spectra = "node_spectra.csv";
inline constexpr std::string_view group_spectra = "group_spectra.csv";
inline constexpr std::string_view group_acf = "group_acf.csv";
inline constexpr std::string_view cohorts = "cohorts.csv";
inline constexpr std::string_view node_cohorts = "node_cohorts.csv";
inline constexpr std::string_view regularity = "regularity.csv";
inline constexpr std::string_view top_share_cdf = "top_share_cdf.csv";
inline constexpr std::string_view location_histogram = "location_histogram.csv";
inline constexpr std::string_view location_fractions = "location_fractions.csv";
inline constexpr std::string_view location_ordered = "location_ordered.csv";
inline constexpr std::string_view location_divergence = "location_divergence.csv";
}  // namespace artifact

struct StageResult {
    std::string stage;
    std::string summary;
    std::vector<std::string> warnings;
};

// Each stage reads the artifacts of the stages before it from out_dir and
// writes its own. Inputs that are absent throw MissingInput.

/// Raw CSVs (or the synth output when no inputs are configured) -> windowed,
/// sorted associations.csv / sightings.csv, one .rej file per input, window.txt.
StageResult run_ingest(const PipelineConfig& config);
/// associations.csv + sightings.csv -> encounters.csv
StageResult run_encounters(const PipelineConfig& config);
/// encounters.csv -> series.csv (encounter, frequency and duration rows), node_series.csv
StageResult run_series(const PipelineConfig& config);
/// series files -> spectra.csv, node_spectra.csv, group_spectra.csv, group_acf.csv,
/// cohorts.csv, node_cohorts.csv
StageResult run_spectrum(const PipelineConfig& config);
/// spectra.csv + cohorts.csv -> regularity.csv, top_share_cdf.csv. The knee is
/// taken within each rate bucket, the top-3 threshold over all pairs.
StageResult run_regular(const PipelineConfig& config);
/// encounters.csv + regularity.csv -> location_*.csv
StageResult run_locations(const PipelineConfig& config);
/// synth_* keys -> synth_associations.csv or synth_sightings.csv, synth_labels.csv
StageResult run_synth(const PipelineConfig& config);

/// Every stage in order (synth first when no inputs are configured).
std::vector<StageResult> run_pipeline(const PipelineConfig& config);

/// window.txt round trip.
void write_window(const std::filesystem::path& path, const TraceWindow& window);
[[nodiscard]] TraceWindow read_window(const std::filesystem::path& path);

}  // namespace encounterlens
