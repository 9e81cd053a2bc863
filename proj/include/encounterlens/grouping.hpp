#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace encounterlens {

/// Half-open rate interval [lower, upper); the top bucket also holds rate == upper == 1.
struct RateBucket {
    double lower = 0.0;
    double upper = 1.0;
    bool closed_top = false;
    std::vector<std::string> members;  ///< sorted ids

    [[nodiscard]] bool contains(double rate) const noexcept {
        return rate >= lower && (rate < upper || (closed_top && rate == upper));
    }
};

/// Decile edges 0.1, 0.2, ..., 0.9.
[[nodiscard]] std::vector<double> default_bucket_edges();

/**
 * Partitions ids by rate. `edges` must be strictly increasing inside [0, 1];
 * implicit boundaries at 0 and 1 are added when absent, so every rate in
 * [0, 1] lands in exactly one bucket. Rates outside [0, 1] and malformed edges
 * throw ContractViolation. Empty buckets are kept.
 */
[[nodiscard]] std::vector<RateBucket> bucket_by_rate(const std::map<std::string, double>& rates,
                                                     std::span<const double> edges);

struct CohortRange {
    double lower = 0.0;
    double upper = 0.0;
};

enum class CohortLabel { rare, frequent, hourly };

[[nodiscard]] std::string_view to_string(CohortLabel label) noexcept;
/// rare [0.1, 0.2), frequent [0.5, 0.6), hourly [0.2, 0.3).
[[nodiscard]] CohortRange default_range(CohortLabel label) noexcept;

struct Cohort {
    std::string label;
    CohortRange range;
    std::vector<std::string> members;
    std::optional<std::string> warning;  ///< set when the cohort is empty

    [[nodiscard]] bool empty() const noexcept { return members.empty(); }
};

/// Members of every bucket inside `range`. The range ends must coincide with
/// bucket boundaries (ContractViolation otherwise).
[[nodiscard]] Cohort cohort(std::span<const RateBucket> buckets, std::string label, CohortRange range);
[[nodiscard]] Cohort cohort(std::span<const RateBucket> buckets, CohortLabel label,
                            std::optional<CohortRange> override_range = std::nullopt);

/// id,rate,bucket_lower,bucket_upper -- one row per id, ordered by id.
void write_cohort_manifest(std::ostream& out, const std::map<std::string, double>& rates,
                           std::span<const RateBucket> buckets);
/// Reads the id -> rate map back from a manifest (SchemaError on malformed rows).
[[nodiscard]] std::map<std::string, double> read_cohort_manifest(std::istream& in);

}  // namespace encounterlens
