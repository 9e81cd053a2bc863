#pragma once

// Slow, obviously-correct reference implementations used only by the tests.
// They share no code with the library beyond the plain record/event structs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

#include "encounterlens/encounter.hpp"
#include "encounterlens/ingest.hpp"
#include "encounterlens/series.hpp"

namespace oracle {

using encounterlens::AssociationRecord;
using encounterlens::EncounterEvent;
using encounterlens::Metric;
using encounterlens::NodePair;
using encounterlens::Seconds;
using encounterlens::SightingRecord;
using encounterlens::TraceWindow;

inline NodePair ordered(const std::string& a, const std::string& b) {
    return a < b ? NodePair{a, b} : NodePair{b, a};
}

inline bool event_less(const EncounterEvent& a, const EncounterEvent& b) {
    return std::tie(a.pair, a.start, a.location, a.end) < std::tie(b.pair, b.start, b.location, b.end);
}

// Fuses intervals that overlap or touch, per (pair, location).
inline std::vector<EncounterEvent> fuse(std::map<std::pair<NodePair, std::string>, std::vector<std::pair<Seconds, Seconds>>> raw) {
    std::vector<EncounterEvent> out;
    for (auto& [key, intervals] : raw) {
        std::sort(intervals.begin(), intervals.end());
        std::vector<std::pair<Seconds, Seconds>> merged;
        for (const auto& iv : intervals) {
            if (!merged.empty() && iv.first <= merged.back().second) {
                merged.back().second = std::max(merged.back().second, iv.second);
            } else {
                merged.push_back(iv);
            }
        }
        for (const auto& [s, e] : merged) out.push_back({key.first, key.second, s, e});
    }
    std::sort(out.begin(), out.end(), event_less);
    return out;
}

/// Every record pair compared with every other: O(m^2) record pairs.
inline std::vector<EncounterEvent> brute_force_wlan(const std::vector<AssociationRecord>& records) {
    std::map<std::pair<NodePair, std::string>, std::vector<std::pair<Seconds, Seconds>>> raw;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t j = i + 1; j < records.size(); ++j) {
            const auto& a = records[i];
            const auto& b = records[j];
            if (a.ap_id != b.ap_id || a.device_id == b.device_id) continue;
            const Seconds s = std::max(a.start, b.start);
            const Seconds e = std::min(a.end, b.end);
            if (e > s) raw[{ordered(a.device_id, b.device_id), a.ap_id}].emplace_back(s, e);
        }
    }
    return fuse(std::move(raw));
}

/// Sightings clustered per unordered pair by consecutive gaps <= merge_gap.
inline std::vector<EncounterEvent> brute_force_bluetooth(const std::vector<SightingRecord>& records, Seconds merge_gap) {
    std::map<NodePair, std::vector<Seconds>> times;
    for (const auto& r : records) times[ordered(r.observer_id, r.observed_id)].push_back(r.timestamp);
    std::vector<EncounterEvent> out;
    for (auto& [pair, ts] : times) {
        std::sort(ts.begin(), ts.end());
        Seconds first = ts.front();
        Seconds last = ts.front();
        for (std::size_t i = 1; i <= ts.size(); ++i) {
            if (i == ts.size() || ts[i] - last > merge_gap) {
                out.push_back({pair, "BT", first, last});
                if (i < ts.size()) first = ts[i];
            }
            if (i < ts.size()) last = ts[i];
        }
    }
    std::sort(out.begin(), out.end(), event_less);
    return out;
}

/// Scans every second of every bin for one pair's events.
inline std::vector<double> scan_series(const std::vector<EncounterEvent>& pair_events, const TraceWindow& w,
                                       Metric metric) {
    std::vector<double> values(w.length_bins, 0.0);
    const Seconds len = w.bin_length();
    for (std::size_t b = 0; b < w.length_bins; ++b) {
        const Seconds lo = w.epoch + static_cast<Seconds>(b) * len;
        const Seconds hi = lo + len;
        long long covered = 0;
        for (Seconds t = lo; t < hi; ++t) {
            for (const auto& e : pair_events) {
                if (e.start <= t && t < e.end) {
                    ++covered;
                    break;
                }
            }
        }
        long long starts = 0;
        bool instant = false;
        for (const auto& e : pair_events) {
            if (lo <= e.start && e.start < hi) {
                ++starts;
                if (e.start == e.end) instant = true;
            }
        }
        switch (metric) {
            case Metric::daily_encounter:
            case Metric::hourly_encounter: values[b] = (covered > 0 || instant) ? 1.0 : 0.0; break;
            case Metric::frequency: values[b] = static_cast<double>(starts); break;
            case Metric::duration: values[b] = static_cast<double>(covered); break;
        }
    }
    return values;
}

/// Biased autocorrelation straight from the definition, in long double.
inline std::vector<double> direct_acf(const std::vector<double>& x) {
    const std::size_t T = x.size();
    long double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<long double>(T);
    long double denom = 0;
    for (double v : x) denom += (v - mean) * (v - mean);
    std::vector<double> r(T, 0.0);
    if (denom == 0) {
        r[0] = 1.0;
        return r;
    }
    for (std::size_t k = 0; k < T; ++k) {
        long double num = 0;
        for (std::size_t d = 0; d + k < T; ++d) num += (x[d] - mean) * (x[d + k] - mean);
        r[k] = static_cast<double>(num / denom);
    }
    return r;
}

/// |sum_{k>=1} r_k exp(-2 pi i k c / T)| in long double.
inline std::vector<double> direct_spectrum(const std::vector<double>& r) {
    const std::size_t T = r.size();
    std::vector<double> out(T, 0.0);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::size_t c = 0; c < T; ++c) {
        long double re = 0;
        long double im = 0;
        for (std::size_t k = 1; k < T; ++k) {
            const long double angle = two_pi * static_cast<long double>(k) * static_cast<long double>(c) /
                                      static_cast<long double>(T);
            re += r[k] * std::cos(angle);
            im -= r[k] * std::sin(angle);
        }
        out[c] = static_cast<double>(std::sqrt(re * re + im * im));
    }
    return out;
}

}  // namespace oracle
