#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "encounterlens/encounter.hpp"
#include "encounterlens/ingest.hpp"

namespace encounterlens {

/// The per-pair time-series metrics. Bins follow the window's unit.
enum class Metric {
    daily_encounter,   ///< 1 iff any event intersects the day (day bins only)
    hourly_encounter,  ///< same, hour bins only
    frequency,         ///< number of events starting in the bin
    duration,          ///< co-located seconds inside the bin
};

[[nodiscard]] std::string_view to_string(Metric m) noexcept;
[[nodiscard]] Metric parse_metric(std::string_view text);
[[nodiscard]] constexpr bool is_binary(Metric m) noexcept {
    return m == Metric::daily_encounter || m == Metric::hourly_encounter;
}
/// daily_encounter for day bins, hourly_encounter for hour bins.
[[nodiscard]] constexpr Metric encounter_metric(BinUnit unit) noexcept {
    return unit == BinUnit::day ? Metric::daily_encounter : Metric::hourly_encounter;
}

struct PairSeries {
    NodePair pair;
    Metric metric = Metric::daily_encounter;
    std::vector<double> values;
};

/// Binary per-node indicator: bin d is 1 iff the node had any encounter in it.
struct NodeSeries {
    std::string node;
    Metric metric = Metric::daily_encounter;
    std::vector<double> values;
};

/**
 * One series per encountered pair for `metric` over `window`.
 *
 * Events are half-open [start, end); a zero-length event counts in the bin of
 * its start. Frequency credits the start bin only, so its bins sum to the
 * pair's event count. Duration is the length of the union of the pair's event
 * intervals inside each bin, so simultaneous events at two APs are not double
 * counted and a bin never exceeds its own length.
 *
 * Throws ContractViolation when an event lies outside the window or the
 * binary metric does not match the window's bin unit.
 */
[[nodiscard]] std::map<NodePair, PairSeries> build_pair_series(std::span<const EncounterEvent> events,
                                                               const TraceWindow& window, Metric metric);

/// OR of the binary pair series over every pair containing the node. Nodes in
/// `universe` without events get an all-zero series.
[[nodiscard]] std::map<std::string, NodeSeries> build_node_series(std::span<const EncounterEvent> events,
                                                                  const TraceWindow& window,
                                                                  std::span<const std::string> universe = {});

/// Fraction of bins equal to 1. ContractViolation for non-binary metrics or values.
[[nodiscard]] double daily_rate(std::span<const double> values, Metric metric);
[[nodiscard]] double daily_rate(const PairSeries& series);
[[nodiscard]] double daily_rate(const NodeSeries& series);

void write_series_csv(std::ostream& out, std::span<const PairSeries> series);
/// Reads the wide series file. Rows must share one length; SchemaError otherwise.
[[nodiscard]] std::vector<PairSeries> read_series_csv(std::istream& in);

void write_node_series_csv(std::ostream& out, std::span<const NodeSeries> series);
[[nodiscard]] std::vector<NodeSeries> read_node_series_csv(std::istream& in);

}  // namespace encounterlens
