#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "encounterlens/ids.hpp"
#include "encounterlens/ingest.hpp"

namespace encounterlens {

inline constexpr std::string_view kBluetoothLocation = "BT";
inline constexpr Seconds kDefaultMergeGap = 120;

/// A maximal co-location interval of one pair at one location.
struct EncounterEvent {
    NodePair pair;
    std::string location;
    Seconds start = 0;
    Seconds end = 0;

    [[nodiscard]] Seconds duration() const noexcept { return end - start; }
    bool operator==(const EncounterEvent&) const = default;
};

/// Interchange order: (pair, start, location, end).
void sort_events(std::vector<EncounterEvent>& events);

/**
 * Pairwise encounters from WLAN associations: two distinct devices associated
 * with the same AP over intervals that overlap by more than zero seconds.
 *
 * Records must be sorted by start (see sort_and_window); ContractViolation
 * otherwise. The sweep runs per AP, keeping only the associations still open
 * at the current start time, so the work is proportional to the number of
 * overlapping record pairs rather than all record pairs. Intersections of the
 * same pair at the same AP that overlap or touch are fused into maximal
 * intervals. Output is sorted with sort_events().
 */
[[nodiscard]] std::vector<EncounterEvent> wlan_encounters(std::span<const AssociationRecord> records);

/**
 * Pairwise encounters from Bluetooth sightings. Direction is ignored; sightings
 * of one pair whose consecutive gap is <= merge_gap form one event spanning the
 * first to the last sighting (an isolated sighting yields a zero-length event).
 * Location is kBluetoothLocation. merge_gap must be positive.
 */
[[nodiscard]] std::vector<EncounterEvent> bluetooth_encounters(std::span<const SightingRecord> records,
                                                               Seconds merge_gap = kDefaultMergeGap);

struct EncounterStats {
    std::size_t unique_nodes = 0;
    std::size_t encountered_pairs = 0;
    std::size_t total_events = 0;
    Seconds total_duration = 0;

    bool operator==(const EncounterStats&) const = default;
};

[[nodiscard]] EncounterStats encounter_stats(std::span<const EncounterEvent> events);

inline constexpr std::string_view kEncounterHeader = "node_i,node_j,location,start_epoch_s,end_epoch_s";

void write_encounters_csv(std::ostream& out, std::span<const EncounterEvent> events);
/// Strict reader for the interchange file; any malformed row throws SchemaError.
[[nodiscard]] std::vector<EncounterEvent> read_encounters_csv(std::istream& in);

}  // namespace encounterlens
