#include "encounterlens/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "encounterlens/csv.hpp"
#include "encounterlens/ids.hpp"

namespace encounterlens {

namespace {

constexpr double kEdgeTolerance = 1e-12;

bool near(double a, double b) { return std::fabs(a - b) <= kEdgeTolerance; }

std::string range_text(CohortRange r) {
    return "[" + csv::format_double(r.lower) + ", " + csv::format_double(r.upper) + ")";
}

}  // namespace

std::vector<double> default_bucket_edges() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::vector<RateBucket> bucket_by_rate(const std::map<std::string, double>& rates, std::span<const double> edges) {
    std::vector<double> bounds{0.0};
    for (double e : edges) {
        if (!(e >= 0.0 && e <= 1.0)) throw ContractViolation("bucket edges must lie in [0, 1]");
        if (e <= bounds.back() && !(bounds.size() == 1 && e == 0.0)) {
            throw ContractViolation("bucket edges must be strictly increasing");
        }
        if (e > bounds.back()) bounds.push_back(e);
    }
    if (bounds.back() < 1.0) bounds.push_back(1.0);

    std::vector<RateBucket> buckets;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        buckets.push_back(RateBucket{bounds[i], bounds[i + 1], i + 2 == bounds.size(), {}});
    }

    for (const auto& [id, rate] : rates) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw ContractViolation("rate of '" + id + "' outside [0, 1]: " + csv::format_double(rate));
        }
        auto it = std::find_if(buckets.begin(), buckets.end(), [&](const RateBucket& b) { return b.contains(rate); });
        it->members.push_back(id);  // std::map iteration keeps members sorted
    }
    return buckets;
}

std::string_view to_string(CohortLabel label) noexcept {
    switch (label) {
        case CohortLabel::rare: return "rare";
        case CohortLabel::frequent: return "frequent";
        case CohortLabel::hourly: return "hourly";
    }
    return "unknown";
}

CohortRange default_range(CohortLabel label) noexcept {
    switch (label) {
        case CohortLabel::rare: return {0.1, 0.2};
        case CohortLabel::frequent: return {0.5, 0.6};
        case CohortLabel::hourly: return {0.2, 0.3};
    }
    return {};
}

Cohort cohort(std::span<const RateBucket> buckets, std::string label, CohortRange range) {
    if (!(range.lower < range.upper)) throw ContractViolation("cohort range " + range_text(range) + " is empty");
    const bool lower_aligned =
        std::any_of(buckets.begin(), buckets.end(), [&](const RateBucket& b) { return near(b.lower, range.lower); });
    const bool upper_aligned =
        std::any_of(buckets.begin(), buckets.end(), [&](const RateBucket& b) { return near(b.upper, range.upper); });
    if (!lower_aligned || !upper_aligned) {
        throw ContractViolation("cohort range " + range_text(range) + " does not align with bucket edges");
    }

    Cohort out{std::move(label), range, {}, std::nullopt};
    for (const auto& b : buckets) {
        if (b.lower >= range.lower - kEdgeTolerance && b.upper <= range.upper + kEdgeTolerance) {
            out.members.insert(out.members.end(), b.members.begin(), b.members.end());
        }
    }
    std::sort(out.members.begin(), out.members.end());
    if (out.members.empty()) {
        out.warning = "cohort '" + out.label + "' " + range_text(range) + " has no members";
    }
    return out;
}

Cohort cohort(std::span<const RateBucket> buckets, CohortLabel label, std::optional<CohortRange> override_range) {
    return cohort(buckets, std::string(to_string(label)), override_range.value_or(default_range(label)));
}

void write_cohort_manifest(std::ostream& out, const std::map<std::string, double>& rates,
                           std::span<const RateBucket> buckets) {
    out << "id,rate,bucket_lower,bucket_upper\n";
    for (const auto& [id, rate] : rates) {
        const auto it =
            std::find_if(buckets.begin(), buckets.end(), [&](const RateBucket& b) { return b.contains(rate); });
        if (it == buckets.end()) throw ContractViolation("no bucket holds rate of '" + id + "'");
        out << id << ',' << csv::format_double(rate) << ',' << csv::format_double(it->lower) << ','
            << csv::format_double(it->upper) << '\n';
    }
}

std::map<std::string, double> read_cohort_manifest(std::istream& in) {
    csv::LineReader reader(in);
    csv::expect_header(reader, "id,rate,bucket_lower,bucket_upper", "cohort manifest");
    std::map<std::string, double> rates;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto f = csv::split(*line);
        const auto rate = f.size() == 4 ? csv::parse_double(f[1]) : std::nullopt;
        if (!rate) throw SchemaError("cohort manifest line " + std::to_string(reader.line_number()) + ": malformed row");
        rates[std::string(csv::trim(f[0]))] = *rate;
    }
    return rates;
}

}  // namespace encounterlens
