#include "encounterlens/ingest.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include "encounterlens/csv.hpp"

namespace encounterlens {

namespace {

// Returns an empty string when the id is acceptable, else a rejection reason.
std::string check_id(const std::string& id, std::string_view column) {
    if (id.empty()) return "empty " + std::string(column);
    if (id.find('|') != std::string::npos) return std::string(column) + " contains '|'";
    return {};
}

Seconds floor_div(Seconds a, Seconds b) {
    Seconds q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Seconds midnight_of(Seconds t, Seconds utc_offset) {
    return floor_div(t + utc_offset, kSecondsPerDay) * kSecondsPerDay - utc_offset;
}

}  // namespace

void TraceWindow::validate() const {
    if (length_bins < 2 || !is_power_of_two(length_bins)) {
        throw SchemaError("window length must be a power of 2 bins (FFT requirement), got " +
                          std::to_string(length_bins));
    }
}

ParseResult<AssociationRecord> parse_wlan(std::istream& in) {
    csv::LineReader reader(in);
    csv::expect_header(reader, kWlanHeader, "WLAN CSV");

    ParseResult<AssociationRecord> result;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        ++result.rows;
        auto reject = [&](std::string reason) {
            result.rejections.push_back({reader.line_number(), std::move(reason)});
        };

        const auto fields = csv::split(*line);
        if (fields.size() != 4) {
            reject("expected 4 fields, got " + std::to_string(fields.size()));
            continue;
        }
        AssociationRecord rec;
        rec.device_id = canonical_node_id(fields[0]);
        rec.ap_id = std::string(csv::trim(fields[1]));
        if (auto why = check_id(rec.device_id, "device_id"); !why.empty()) {
            reject(std::move(why));
            continue;
        }
        if (auto why = check_id(rec.ap_id, "ap_id"); !why.empty()) {
            reject(std::move(why));
            continue;
        }
        const auto start = csv::parse_int(fields[2]);
        const auto end = csv::parse_int(fields[3]);
        if (!start || *start < 0) {
            reject("invalid start timestamp '" + std::string(csv::trim(fields[2])) + "'");
            continue;
        }
        if (!end) {
            reject("invalid end timestamp '" + std::string(csv::trim(fields[3])) + "'");
            continue;
        }
        if (*end <= *start) {
            reject("end <= start");
            continue;
        }
        rec.start = *start;
        rec.end = *end;
        result.records.push_back(std::move(rec));
    }
    return result;
}

ParseResult<SightingRecord> parse_bluetooth(std::istream& in) {
    csv::LineReader reader(in);
    csv::expect_header(reader, kBluetoothHeader, "Bluetooth CSV");

    ParseResult<SightingRecord> result;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        ++result.rows;
        auto reject = [&](std::string reason) {
            result.rejections.push_back({reader.line_number(), std::move(reason)});
        };

        const auto fields = csv::split(*line);
        if (fields.size() != 3) {
            reject("expected 3 fields, got " + std::to_string(fields.size()));
            continue;
        }
        SightingRecord rec;
        rec.observer_id = canonical_node_id(fields[0]);
        rec.observed_id = canonical_node_id(fields[1]);
        if (auto why = check_id(rec.observer_id, "observer_id"); !why.empty()) {
            reject(std::move(why));
            continue;
        }
        if (auto why = check_id(rec.observed_id, "observed_id"); !why.empty()) {
            reject(std::move(why));
            continue;
        }
        if (rec.observer_id == rec.observed_id) {
            reject("self-sighting");
            continue;
        }
        const auto ts = csv::parse_int(fields[2]);
        if (!ts || *ts < 0) {
            reject("invalid timestamp '" + std::string(csv::trim(fields[2])) + "'");
            continue;
        }
        rec.timestamp = *ts;
        result.records.push_back(std::move(rec));
    }
    return result;
}

void write_wlan_csv(std::ostream& out, std::span<const AssociationRecord> records) {
    out << kWlanHeader << '\n';
    for (const auto& r : records) {
        out << r.device_id << ',' << r.ap_id << ',' << r.start << ',' << r.end << '\n';
    }
}

void write_bluetooth_csv(std::ostream& out, std::span<const SightingRecord> records) {
    out << kBluetoothHeader << '\n';
    for (const auto& r : records) {
        out << r.observer_id << ',' << r.observed_id << ',' << r.timestamp << '\n';
    }
}

void write_rejections(std::ostream& out, std::span<const Rejection> rejections) {
    for (const auto& r : rejections) out << r.line_no << '\t' << r.reason << '\n';
}

std::vector<AssociationRecord> sort_and_window(std::vector<AssociationRecord> records,
                                               const TraceWindow& window) {
    window.validate();
    const Seconds lo = window.epoch;
    const Seconds hi = window.end();

    std::vector<AssociationRecord> kept;
    kept.reserve(records.size());
    for (auto& r : records) {
        const Seconds s = std::max(r.start, lo);
        const Seconds e = std::min(r.end, hi);
        if (e <= s) continue;
        r.start = s;
        r.end = e;
        kept.push_back(std::move(r));
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return std::tie(a.start, a.device_id, a.ap_id, a.end) <
               std::tie(b.start, b.device_id, b.ap_id, b.end);
    });
    return kept;
}

std::vector<SightingRecord> sort_and_window(std::vector<SightingRecord> records,
                                            const TraceWindow& window) {
    window.validate();
    std::erase_if(records, [&](const SightingRecord& r) {
        return r.timestamp < window.epoch || r.timestamp >= window.end();
    });
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.timestamp, a.observer_id, a.observed_id) <
               std::tie(b.timestamp, b.observer_id, b.observed_id);
    });
    return records;
}

Seconds default_epoch(std::span<const AssociationRecord> records, Seconds utc_offset) {
    if (records.empty()) return midnight_of(0, utc_offset);
    Seconds earliest = std::numeric_limits<Seconds>::max();
    for (const auto& r : records) earliest = std::min(earliest, r.start);
    return midnight_of(earliest, utc_offset);
}

Seconds default_epoch(std::span<const SightingRecord> records, Seconds utc_offset) {
    if (records.empty()) return midnight_of(0, utc_offset);
    Seconds earliest = std::numeric_limits<Seconds>::max();
    for (const auto& r : records) earliest = std::min(earliest, r.timestamp);
    return midnight_of(earliest, utc_offset);
}

}  // namespace encounterlens
