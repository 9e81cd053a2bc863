#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "encounterlens/ids.hpp"
#include "encounterlens/spectral.hpp"

namespace encounterlens {

struct RegularityOptions {
    /// Whether component 1 (the burst component) counts in the share denominator.
    /// Component 0 never does.
    bool denominator_includes_c1 = true;
};

/**
 * Spectral concentration of one pair. Candidates for the top components are
 * 2 <= c <= T/2: c = 1 is a single wave over the window (a burst, not a
 * rhythm) and c > T/2 mirror the lower half for a real series.
 */
struct RegularityReport {
    NodePair pair;
    double rate = 0.0;
    std::size_t top_component = 0;
    double top_share = 0.0;   ///< |y_top| / sum_{c=1}^{T-1} |y_c|
    double top3_share = 0.0;  ///< three largest candidates over the same denominator
    bool is_regular_knee = false;
    bool is_regular_top3 = false;
};

/// Scores a non-degenerate spectrum with T >= 4 (ContractViolation otherwise).
[[nodiscard]] RegularityReport score_regularity(const PowerSpectrum& spectrum, NodePair pair, double rate,
                                                RegularityOptions options = {});

struct CdfPoint {
    double share = 0.0;
    double fraction = 0.0;
};

struct EmpiricalCdf {
    std::vector<CdfPoint> points;  ///< ascending share; tied shares collapse into one step
    std::optional<std::string> warning;
};

[[nodiscard]] EmpiricalCdf top_frequency_cdf(std::span<const RegularityReport> reports);

struct Selection {
    std::vector<NodePair> pairs;
    std::optional<std::string> warning;
};

/**
 * Flags the ceil(quantile * n) pairs with the largest top_share (at least one),
 * ties broken by pair id. quantile must lie in (0, 1). A cohort smaller than
 * 1/quantile still selects its maximum but carries a warning.
 */
Selection knee_select(std::span<RegularityReport> reports, double quantile = 0.20);

/// Flags pairs with top3_share > threshold; threshold must lie in (0, 1).
Selection top3_select(std::span<RegularityReport> reports, double threshold = 1.0 / 3.0);

inline constexpr std::string_view kRegularityHeader =
    "node_i,node_j,rate,top_component,top_share,top3_share,knee_flag,top3_flag";

void write_regularity_csv(std::ostream& out, std::span<const RegularityReport> reports);
[[nodiscard]] std::vector<RegularityReport> read_regularity_csv(std::istream& in);

/// cohort,top_share,cum_fraction
void write_cdf_csv(std::ostream& out, std::span<const std::pair<std::string, EmpiricalCdf>> cdfs);

}  // namespace encounterlens
