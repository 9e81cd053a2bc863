#include "encounterlens/encounter.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "encounterlens/csv.hpp"
#include "encounterlens/parallel.hpp"

namespace encounterlens {

namespace {

// Sorted unique table; the index of a string is its rank, so comparing
// indices compares the strings.
class Interner {
public:
    template <typename Range, typename Proj>
    Interner(const Range& range, Proj proj) {
        for (const auto& item : range) names_.push_back(proj(item));
        std::sort(names_.begin(), names_.end());
        names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
    }

    [[nodiscard]] std::size_t id(const std::string& name) const {
        return static_cast<std::size_t>(
            std::lower_bound(names_.begin(), names_.end(), name) - names_.begin());
    }
    [[nodiscard]] const std::string& name(std::size_t id) const { return names_[id]; }
    [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }

private:
    std::vector<std::string> names_;
};

struct RawOverlap {
    std::size_t lo;  // device rank, lo < hi
    std::size_t hi;
    Seconds start;
    Seconds end;
};

struct IndexedRecord {
    std::size_t device;
    Seconds start;
    Seconds end;
};

std::vector<RawOverlap> sweep_one_ap(const std::vector<IndexedRecord>& recs) {
    std::vector<RawOverlap> raw;
    std::vector<const IndexedRecord*> active;
    for (const auto& rec : recs) {
        std::erase_if(active, [&](const IndexedRecord* a) { return a->end <= rec.start; });
        for (const IndexedRecord* a : active) {
            if (a->device == rec.device) continue;
            const Seconds end = std::min(a->end, rec.end);
            if (end <= rec.start) continue;
            raw.push_back({std::min(a->device, rec.device), std::max(a->device, rec.device), rec.start, end});
        }
        active.push_back(&rec);
    }

    std::sort(raw.begin(), raw.end(), [](const RawOverlap& a, const RawOverlap& b) {
        return std::tie(a.lo, a.hi, a.start, a.end) < std::tie(b.lo, b.hi, b.start, b.end);
    });
    std::vector<RawOverlap> merged;
    for (const auto& r : raw) {
        if (!merged.empty()) {
            auto& last = merged.back();
            if (last.lo == r.lo && last.hi == r.hi && r.start <= last.end) {
                last.end = std::max(last.end, r.end);
                continue;
            }
        }
        merged.push_back(r);
    }
    return merged;
}

}  // namespace

void sort_events(std::vector<EncounterEvent>& events) {
    std::sort(events.begin(), events.end(), [](const EncounterEvent& a, const EncounterEvent& b) {
        return std::tie(a.pair, a.start, a.location, a.end) < std::tie(b.pair, b.start, b.location, b.end);
    });
}

std::vector<EncounterEvent> wlan_encounters(std::span<const AssociationRecord> records) {
    const bool sorted = std::is_sorted(records.begin(), records.end(),
                                       [](const auto& a, const auto& b) { return a.start < b.start; });
    if (!sorted) throw ContractViolation("wlan_encounters: records must be sorted by start");

    const Interner devices(records, [](const AssociationRecord& r) { return r.device_id; });
    const Interner aps(records, [](const AssociationRecord& r) { return r.ap_id; });

    std::vector<std::vector<IndexedRecord>> by_ap(aps.size());
    for (const auto& r : records) {
        by_ap[aps.id(r.ap_id)].push_back({devices.id(r.device_id), r.start, r.end});
    }

    std::vector<std::vector<RawOverlap>> per_ap(aps.size());
    parallel_for(aps.size(), [&](std::size_t ap) { per_ap[ap] = sweep_one_ap(by_ap[ap]); });

    std::vector<EncounterEvent> events;
    for (std::size_t ap = 0; ap < per_ap.size(); ++ap) {
        for (const auto& o : per_ap[ap]) {
            events.push_back({NodePair{devices.name(o.lo), devices.name(o.hi)}, aps.name(ap), o.start, o.end});
        }
    }
    sort_events(events);
    return events;
}

std::vector<EncounterEvent> bluetooth_encounters(std::span<const SightingRecord> records, Seconds merge_gap) {
    if (merge_gap <= 0) throw ContractViolation("bluetooth_encounters: merge_gap must be > 0");

    std::map<NodePair, std::vector<Seconds>> by_pair;
    for (const auto& s : records) {
        by_pair[make_pair_canonical(s.observer_id, s.observed_id)].push_back(s.timestamp);
    }

    std::vector<EncounterEvent> events;
    for (auto& [pair, times] : by_pair) {
        std::sort(times.begin(), times.end());
        Seconds first = times.front();
        Seconds last = times.front();
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (times[i] - last <= merge_gap) {
                last = times[i];
                continue;
            }
            events.push_back({pair, std::string(kBluetoothLocation), first, last});
            first = last = times[i];
        }
        events.push_back({pair, std::string(kBluetoothLocation), first, last});
    }
    sort_events(events);
    return events;
}

EncounterStats encounter_stats(std::span<const EncounterEvent> events) {
    std::set<std::string_view> nodes;
    std::set<std::pair<std::string_view, std::string_view>> pairs;
    EncounterStats stats;
    for (const auto& e : events) {
        nodes.insert(e.pair.first);
        nodes.insert(e.pair.second);
        pairs.emplace(e.pair.first, e.pair.second);
        stats.total_duration += e.duration();
    }
    stats.unique_nodes = nodes.size();
    stats.encountered_pairs = pairs.size();
    stats.total_events = events.size();
    return stats;
}

void write_encounters_csv(std::ostream& out, std::span<const EncounterEvent> events) {
    out << kEncounterHeader << '\n';
    for (const auto& e : events) {
        out << e.pair.first << ',' << e.pair.second << ',' << e.location << ',' << e.start << ',' << e.end
            << '\n';
    }
}

std::vector<EncounterEvent> read_encounters_csv(std::istream& in) {
    csv::LineReader reader(in);
    csv::expect_header(reader, kEncounterHeader, "encounter CSV");

    std::vector<EncounterEvent> events;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto bad = [&](const std::string& why) {
            return SchemaError("encounter CSV line " + std::to_string(reader.line_number()) + ": " + why);
        };
        const auto fields = csv::split(*line);
        if (fields.size() != 5) throw bad("expected 5 fields, got " + std::to_string(fields.size()));
        const auto start = csv::parse_int(fields[3]);
        const auto end = csv::parse_int(fields[4]);
        if (!start || !end || *end < *start) throw bad("invalid interval");
        std::string a(csv::trim(fields[0]));
        std::string b(csv::trim(fields[1]));
        if (a.empty() || b.empty() || a == b) throw bad("invalid node pair");
        events.push_back({make_pair_canonical(std::move(a), std::move(b)), std::string(csv::trim(fields[2])),
                          *start, *end});
    }
    return events;
}

}  // namespace encounterlens
