#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "encounterlens/ids.hpp"

namespace encounterlens {

/// One WLAN association interval: device `device_id` was associated with `ap_id` over [start, end).
struct AssociationRecord {
    std::string device_id;
    std::string ap_id;
    Seconds start = 0;
    Seconds end = 0;

    bool operator==(const AssociationRecord&) const = default;
};

/// One Bluetooth beacon acknowledgement: `observer_id` saw `observed_id` at `timestamp`.
struct SightingRecord {
    std::string observer_id;
    std::string observed_id;
    Seconds timestamp = 0;

    bool operator==(const SightingRecord&) const = default;
};

struct Rejection {
    std::size_t line_no = 0;
    std::string reason;

    bool operator==(const Rejection&) const = default;
};

template <typename Record>
struct ParseResult {
    std::vector<Record> records;
    std::vector<Rejection> rejections;
    /// Non-blank data rows seen; always records.size() + rejections.size().
    std::size_t rows = 0;
};

/**
 * Analysis window: `length_bins` bins of one `bin` unit each, starting at the
 * absolute instant `epoch` (seconds). The bin count must be a power of two so
 * that the spectral stage can run a radix-2 FFT.
 */
struct TraceWindow {
    Seconds epoch = 0;
    std::size_t length_bins = 128;
    BinUnit bin = BinUnit::day;

    /// Throws SchemaError unless length_bins is a power of two >= 2.
    void validate() const;

    [[nodiscard]] Seconds bin_length() const noexcept { return bin_seconds(bin); }
    [[nodiscard]] Seconds end() const noexcept {
        return epoch + static_cast<Seconds>(length_bins) * bin_length();
    }
    [[nodiscard]] bool operator==(const TraceWindow&) const = default;
};

inline constexpr std::string_view kWlanHeader = "device_id,ap_id,start_epoch_s,end_epoch_s";
inline constexpr std::string_view kBluetoothHeader = "observer_id,observed_id,timestamp_epoch_s";

/// Parses the WLAN CSV. A wrong header throws SchemaError; bad rows become rejections.
[[nodiscard]] ParseResult<AssociationRecord> parse_wlan(std::istream& in);
/// Parses the Bluetooth CSV. Self-sightings are rejected.
[[nodiscard]] ParseResult<SightingRecord> parse_bluetooth(std::istream& in);

void write_wlan_csv(std::ostream& out, std::span<const AssociationRecord> records);
void write_bluetooth_csv(std::ostream& out, std::span<const SightingRecord> records);
/// Sidecar format: one `line_no<TAB>reason` line per rejection.
void write_rejections(std::ostream& out, std::span<const Rejection> rejections);

/**
 * Clips every record to the window, drops records that do not overlap it with
 * positive length, and sorts by (start, device_id, ap_id, end). Idempotent.
 */
[[nodiscard]] std::vector<AssociationRecord> sort_and_window(std::vector<AssociationRecord> records,
                                                             const TraceWindow& window);
/// Keeps sightings with epoch <= timestamp < window end, sorted by (timestamp, observer, observed).
[[nodiscard]] std::vector<SightingRecord> sort_and_window(std::vector<SightingRecord> records,
                                                          const TraceWindow& window);

// Earliest timestamp truncated to local midnight, where local = UTC + utc_offset.
// Returns utc-midnight-of-0 for empty input.
[[nodiscard]] Seconds default_epoch(std::span<const AssociationRecord> records, Seconds utc_offset = 0);
[[nodiscard]] Seconds default_epoch(std::span<const SightingRecord> records, Seconds utc_offset = 0);

}  // namespace encounterlens
