#include "encounterlens/series.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "encounterlens/csv.hpp"
#include "encounterlens/parallel.hpp"

namespace encounterlens {

namespace {

struct Interval {
    Seconds start;
    Seconds end;
};

void check_in_window(const EncounterEvent& e, const TraceWindow& w) {
    const bool ok = e.start >= w.epoch && e.end >= e.start && e.start < w.end() && e.end <= w.end();
    if (!ok) {
        throw ContractViolation("event " + e.pair.key() + " [" + std::to_string(e.start) + ", " +
                                std::to_string(e.end) + ") lies outside the analysis window");
    }
}

std::size_t bin_of(Seconds t, const TraceWindow& w) {
    return static_cast<std::size_t>((t - w.epoch) / w.bin_length());
}

// Bins [first, last] touched by a half-open interval; a point touches its own bin.
std::pair<std::size_t, std::size_t> bins_touched(const Interval& iv, const TraceWindow& w) {
    const std::size_t first = bin_of(iv.start, w);
    const std::size_t last = iv.end > iv.start ? bin_of(iv.end - 1, w) : first;
    return {first, last};
}

std::vector<double> build_one(const std::vector<Interval>& intervals, const TraceWindow& w, Metric metric) {
    std::vector<double> values(w.length_bins, 0.0);
    const Seconds bin_len = w.bin_length();

    switch (metric) {
        case Metric::daily_encounter:
        case Metric::hourly_encounter:
            for (const auto& iv : intervals) {
                const auto [first, last] = bins_touched(iv, w);
                for (std::size_t b = first; b <= last; ++b) values[b] = 1.0;
            }
            break;
        case Metric::frequency:
            for (const auto& iv : intervals) values[bin_of(iv.start, w)] += 1.0;
            for (double v : values) {
                if (v >= static_cast<double>(bin_len)) {
                    throw ContractViolation("frequency exceeds one event per second of the bin");
                }
            }
            break;
        case Metric::duration: {
            std::vector<Interval> sorted = intervals;
            std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.start < b.start; });
            std::vector<Interval> merged;
            for (const auto& iv : sorted) {
                if (!merged.empty() && iv.start <= merged.back().end) {
                    merged.back().end = std::max(merged.back().end, iv.end);
                } else {
                    merged.push_back(iv);
                }
            }
            for (const auto& iv : merged) {
                if (iv.end == iv.start) continue;
                const auto [first, last] = bins_touched(iv, w);
                for (std::size_t b = first; b <= last; ++b) {
                    const Seconds lo = w.epoch + static_cast<Seconds>(b) * bin_len;
                    const Seconds overlap = std::min(iv.end, lo + bin_len) - std::max(iv.start, lo);
                    values[b] += static_cast<double>(overlap);
                }
            }
            break;
        }
    }
    return values;
}

template <typename Series, typename KeyWriter>
void write_wide(std::ostream& out, std::string_view header_prefix, std::span<const Series> rows,
                KeyWriter write_key) {
    const std::size_t T = rows.empty() ? 0 : rows.front().values.size();
    out << header_prefix;
    for (std::size_t d = 0; d < T; ++d) out << ",v" << d;
    out << '\n';
    for (const auto& s : rows) {
        if (s.values.size() != T) throw ContractViolation("series rows must share one length");
        write_key(out, s);
        out << ',' << to_string(s.metric);
        for (double v : s.values) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

// Parses "<key columns>,metric,v0..v{T-1}" rows; `key_cols` leading columns are returned raw.
template <typename Fn>
void read_wide(std::istream& in, std::string_view header_prefix, std::size_t key_cols, std::string_view what,
               Fn on_row) {
    csv::LineReader reader(in);
    const auto header = reader.next();
    if (!header) throw SchemaError(std::string(what) + ": missing header row");
    const auto head_fields = csv::split(*header);
    const auto prefix_fields = csv::split(header_prefix);
    if (head_fields.size() < prefix_fields.size() ||
        !std::equal(prefix_fields.begin(), prefix_fields.end(), head_fields.begin())) {
        throw SchemaError(std::string(what) + ": header must start with '" + std::string(header_prefix) + "'");
    }
    const std::size_t T = head_fields.size() - prefix_fields.size();
    for (std::size_t d = 0; d < T; ++d) {
        if (head_fields[prefix_fields.size() + d] != "v" + std::to_string(d)) {
            throw SchemaError(std::string(what) + ": value columns must be v0..v{T-1}");
        }
    }

    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto fields = csv::split(*line);
        const auto bad = [&](const std::string& why) {
            return SchemaError(std::string(what) + " line " + std::to_string(reader.line_number()) + ": " + why);
        };
        if (fields.size() != head_fields.size()) throw bad("row width differs from header");
        std::vector<std::string> keys;
        for (std::size_t i = 0; i < key_cols; ++i) keys.emplace_back(csv::trim(fields[i]));
        Metric metric{};
        try {
            metric = parse_metric(csv::trim(fields[key_cols]));
        } catch (const ContractViolation& e) {
            throw bad(e.what());
        }
        std::vector<double> values(T);
        for (std::size_t d = 0; d < T; ++d) {
            const auto v = csv::parse_double(fields[key_cols + 1 + d]);
            if (!v) throw bad("non-numeric value");
            values[d] = *v;
        }
        on_row(std::move(keys), metric, std::move(values));
    }
}

}  // namespace

std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::daily_encounter: return "daily_encounter";
        case Metric::hourly_encounter: return "hourly_encounter";
        case Metric::frequency: return "frequency";
        case Metric::duration: return "duration";
    }
    return "unknown";
}

Metric parse_metric(std::string_view text) {
    for (Metric m : {Metric::daily_encounter, Metric::hourly_encounter, Metric::frequency, Metric::duration}) {
        if (to_string(m) == text) return m;
    }
    throw ContractViolation("unknown metric '" + std::string(text) + "'");
}

std::map<NodePair, PairSeries> build_pair_series(std::span<const EncounterEvent> events, const TraceWindow& window,
                                                 Metric metric) {
    window.validate();
    if (is_binary(metric) && metric != encounter_metric(window.bin)) {
        throw ContractViolation(std::string(to_string(metric)) + " needs " +
                                (metric == Metric::daily_encounter ? "day" : "hour") + " bins");
    }

    std::map<NodePair, std::vector<Interval>> by_pair;
    for (const auto& e : events) {
        check_in_window(e, window);
        by_pair[e.pair].push_back({e.start, e.end});
    }

    std::vector<const NodePair*> keys;
    keys.reserve(by_pair.size());
    for (const auto& [pair, _] : by_pair) keys.push_back(&pair);
    std::vector<std::vector<double>> built(keys.size());
    parallel_for(keys.size(), [&](std::size_t i) { built[i] = build_one(by_pair.at(*keys[i]), window, metric); });

    std::map<NodePair, PairSeries> out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        out.emplace(*keys[i], PairSeries{*keys[i], metric, std::move(built[i])});
    }
    return out;
}

std::map<std::string, NodeSeries> build_node_series(std::span<const EncounterEvent> events,
                                                    const TraceWindow& window,
                                                    std::span<const std::string> universe) {
    window.validate();
    const Metric metric = encounter_metric(window.bin);
    std::map<std::string, NodeSeries> out;
    auto slot = [&](const std::string& node) -> std::vector<double>& {
        auto [it, inserted] = out.try_emplace(node);
        if (inserted) it->second = NodeSeries{node, metric, std::vector<double>(window.length_bins, 0.0)};
        return it->second.values;
    };
    for (const auto& node : universe) slot(node);
    for (const auto& e : events) {
        check_in_window(e, window);
        const auto [first, last] = bins_touched({e.start, e.end}, window);
        for (const std::string* node : {&e.pair.first, &e.pair.second}) {
            auto& values = slot(*node);
            for (std::size_t b = first; b <= last; ++b) values[b] = 1.0;
        }
    }
    return out;
}

double daily_rate(std::span<const double> values, Metric metric) {
    if (!is_binary(metric)) {
        throw ContractViolation("daily_rate needs a binary encounter series, got " + std::string(to_string(metric)));
    }
    if (values.empty()) throw ContractViolation("daily_rate of an empty series");
    std::size_t ones = 0;
    for (double v : values) {
        if (v == 1.0) {
            ++ones;
        } else if (v != 0.0) {
            throw ContractViolation("daily_rate: series is not binary");
        }
    }
    return static_cast<double>(ones) / static_cast<double>(values.size());
}

double daily_rate(const PairSeries& series) { return daily_rate(series.values, series.metric); }
double daily_rate(const NodeSeries& series) { return daily_rate(series.values, series.metric); }

void write_series_csv(std::ostream& out, std::span<const PairSeries> series) {
    write_wide(out, "node_i,node_j,metric", series, [](std::ostream& o, const PairSeries& s) {
        o << s.pair.first << ',' << s.pair.second;
    });
}

std::vector<PairSeries> read_series_csv(std::istream& in) {
    std::vector<PairSeries> rows;
    read_wide(in, "node_i,node_j,metric", 2, "series CSV",
              [&](std::vector<std::string> keys, Metric m, std::vector<double> values) {
                  if (keys[0].empty() || keys[1].empty() || keys[0] == keys[1]) {
                      throw SchemaError("series CSV: invalid node pair");
                  }
                  rows.push_back({make_pair_canonical(std::move(keys[0]), std::move(keys[1])), m, std::move(values)});
              });
    return rows;
}

void write_node_series_csv(std::ostream& out, std::span<const NodeSeries> series) {
    write_wide(out, "node,metric", series, [](std::ostream& o, const NodeSeries& s) { o << s.node; });
}

std::vector<NodeSeries> read_node_series_csv(std::istream& in) {
    std::vector<NodeSeries> rows;
    read_wide(in, "node,metric", 1, "node series CSV",
              [&](std::vector<std::string> keys, Metric m, std::vector<double> values) {
                  rows.push_back({std::move(keys[0]), m, std::move(values)});
              });
    return rows;
}

}  // namespace encounterlens
