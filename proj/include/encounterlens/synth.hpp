#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "encounterlens/ingest.hpp"

namespace encounterlens {

/// Meet every `period_bins` bins, each occurrence shifted by a uniform integer in
/// [-jitter_bins, +jitter_bins] and kept with probability `participation`.
/// An occurrence covers `span_bins` consecutive bins. `phase` defaults to a
/// uniform draw in [0, period_bins).
struct Periodic {
    std::size_t period_bins = 7;
    std::size_t jitter_bins = 0;
    double participation = 1.0;
    std::size_t span_bins = 1;
    std::optional<std::size_t> phase;
};

/// `run_length` consecutive bins starting at a uniform offset, then never again.
struct Burst {
    std::size_t run_length = 1;
};

/// Independent Bernoulli(rate) per bin.
struct UniformPattern {
    double rate = 0.1;
};

/// `cycles` equal cycles over the window; a bin is on when it falls in the first
/// `duty` fraction of its cycle. Models a few long waves of activity.
struct Waves {
    std::size_t cycles = 2;
    double duty = 0.5;
};

using Pattern = std::variant<Periodic, Burst, UniformPattern, Waves>;

struct CohortSpec {
    std::size_t count = 0;
    Pattern pattern = Periodic{};
    /// All pairs share one randomly chosen node.
    bool hub = false;
    /// > 0: the cohort meets only at its own block of this many APs (uniform
    /// among them), outside the shared pool.
    std::size_t exclusive_aps = 0;
};

struct UniformPopularity {};
struct ZipfPopularity {
    double s = 1.0;
};
using ApPopularity = std::variant<UniformPopularity, ZipfPopularity>;

struct SynthSpec {
    std::size_t n_nodes = 100;
    std::size_t n_aps = 50;
    TraceWindow window{};
    std::vector<CohortSpec> cohorts;
    ApPopularity ap_popularity = UniformPopularity{};
    std::uint64_t seed = 1;

    /// Throws ContractViolation for an infeasible or malformed spec.
    void validate() const;
};

struct GroundTruth {
    NodePair pair;
    std::string pattern;  ///< periodic | burst | uniform | waves
    std::size_t period_bins = 0;
    std::size_t jitter = 0;
    std::size_t cohort = 0;
    std::string ap_id;

    bool operator==(const GroundTruth&) const = default;
};

struct SynthTrace {
    std::vector<AssociationRecord> associations;
    std::vector<GroundTruth> labels;
};

struct SynthSightings {
    std::vector<SightingRecord> sightings;
    std::vector<GroundTruth> labels;
};

/**
 * Association trace with planted encounter patterns. Every pair gets one home
 * AP drawn from the popularity law (or its cohort's exclusive block). In each
 * active bin both nodes are associated there so that they overlap for exactly
 * one hour centered in the bin (the whole hour for hour bins); the first node
 * arrives up to 10 minutes earlier, the second leaves up to 10 minutes later.
 * Deterministic for a given seed; records sorted by (start, device, ap, end).
 */
[[nodiscard]] SynthTrace generate(const SynthSpec& spec);

/// Same planted schedule realized as Bluetooth beacon sightings every
/// `beacon_interval` seconds across each co-location session.
[[nodiscard]] SynthSightings generate_sightings(const SynthSpec& spec, Seconds beacon_interval = 60);

/// "n0000".."n{N-1}", zero padded so lexicographic order matches numeric order.
[[nodiscard]] std::vector<std::string> synth_node_ids(std::size_t n_nodes);

/// Parses "50 periodic period=7 jitter=1 participation=1 span=1 phase=3 hub exclusive_aps=4".
[[nodiscard]] CohortSpec parse_cohort_spec(std::string_view text);
/// "uniform" | "zipf" | "zipf:<s>"
[[nodiscard]] ApPopularity parse_ap_popularity(std::string_view text);

inline constexpr std::string_view kLabelHeader = "node_i,node_j,pattern,period_bins,jitter";
void write_labels_csv(std::ostream& out, std::span<const GroundTruth> labels);
[[nodiscard]] std::vector<GroundTruth> read_labels_csv(std::istream& in);

}  // namespace encounterlens
