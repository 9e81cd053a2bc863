#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "encounterlens/encounter.hpp"

namespace encounterlens {

enum class LocationWeighting { events, duration };

struct LocationHistogram {
    std::string label;
    std::map<std::string, std::int64_t> counts;  ///< ap_id -> events (or seconds)
    std::int64_t total = 0;
};

using PairFilter = std::function<bool(const NodePair&)>;

/// Counts events per location for pairs accepted by `filter` (all pairs when empty).
[[nodiscard]] LocationHistogram location_histogram(std::span<const EncounterEvent> events, const PairFilter& filter,
                                                   std::string label = "overall",
                                                   LocationWeighting weighting = LocationWeighting::events);

struct PreferencePoint {
    std::size_t rank = 0;  ///< 1-based
    std::string ap_id;
    std::int64_t count = 0;
    double cum_fraction = 0.0;
};

/// Locations by descending count (ties by ap_id) with the running share of the total.
[[nodiscard]] std::vector<PreferencePoint> ordered_preference(const LocationHistogram& histogram);

/// Jensen-Shannon divergence (base 2, so within [0, 1]) between the normalized
/// histograms over the union of their locations. Either histogram being empty
/// leaves the divergence undefined: ContractViolation.
[[nodiscard]] double preference_divergence(const LocationHistogram& a, const LocationHistogram& b);

void write_histogram_csv(std::ostream& out, std::span<const LocationHistogram> histograms);
/// cohort,ap_id,fraction
void write_histogram_fraction_csv(std::ostream& out, std::span<const LocationHistogram> histograms);
/// cohort,rank,ap_id,count,cum_fraction
void write_ordered_csv(std::ostream& out, std::span<const LocationHistogram> histograms);

}  // namespace encounterlens
