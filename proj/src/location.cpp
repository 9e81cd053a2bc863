#include "encounterlens/location.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "encounterlens/csv.hpp"

namespace encounterlens {

LocationHistogram location_histogram(std::span<const EncounterEvent> events, const PairFilter& filter,
                                     std::string label, LocationWeighting weighting) {
    LocationHistogram h;
    h.label = std::move(label);
    for (const auto& e : events) {
        if (filter && !filter(e.pair)) continue;
        const std::int64_t w = weighting == LocationWeighting::events ? 1 : e.duration();
        h.counts[e.location] += w;
        h.total += w;
    }
    return h;
}

std::vector<PreferencePoint> ordered_preference(const LocationHistogram& histogram) {
    std::vector<PreferencePoint> points;
    for (const auto& [ap, count] : histogram.counts) points.push_back({0, ap, count, 0.0});
    std::stable_sort(points.begin(), points.end(),
                     [](const PreferencePoint& a, const PreferencePoint& b) { return a.count > b.count; });
    std::int64_t running = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        running += points[i].count;
        points[i].rank = i + 1;
        points[i].cum_fraction =
            histogram.total > 0 ? static_cast<double>(running) / static_cast<double>(histogram.total) : 0.0;
    }
    if (!points.empty() && histogram.total > 0) points.back().cum_fraction = 1.0;
    return points;
}

double preference_divergence(const LocationHistogram& a, const LocationHistogram& b) {
    if (a.total <= 0 || b.total <= 0) {
        throw ContractViolation("preference_divergence is undefined for an empty histogram ('" +
                                (a.total <= 0 ? a.label : b.label) + "')");
    }
    std::set<std::string> universe;
    for (const auto& [ap, _] : a.counts) universe.insert(ap);
    for (const auto& [ap, _] : b.counts) universe.insert(ap);

    auto prob = [](const LocationHistogram& h, const std::string& ap) {
        const auto it = h.counts.find(ap);
        return it == h.counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(h.total);
    };
    auto term = [](double p, double m) { return p > 0.0 ? p * std::log2(p / m) : 0.0; };

    double jsd = 0.0;
    for (const auto& ap : universe) {
        const double p = prob(a, ap);
        const double q = prob(b, ap);
        const double m = 0.5 * (p + q);
        jsd += 0.5 * term(p, m) + 0.5 * term(q, m);
    }
    return std::clamp(jsd, 0.0, 1.0);
}

void write_histogram_csv(std::ostream& out, std::span<const LocationHistogram> histograms) {
    out << "cohort,ap_id,count\n";
    for (const auto& h : histograms) {
        for (const auto& [ap, count] : h.counts) out << h.label << ',' << ap << ',' << count << '\n';
    }
}

void write_histogram_fraction_csv(std::ostream& out, std::span<const LocationHistogram> histograms) {
    out << "cohort,ap_id,fraction\n";
    for (const auto& h : histograms) {
        for (const auto& [ap, count] : h.counts) {
            out << h.label << ',' << ap << ','
                << csv::format_double(static_cast<double>(count) / static_cast<double>(h.total)) << '\n';
        }
    }
}

void write_ordered_csv(std::ostream& out, std::span<const LocationHistogram> histograms) {
    out << "cohort,rank,ap_id,count,cum_fraction\n";
    for (const auto& h : histograms) {
        for (const auto& p : ordered_preference(h)) {
            out << h.label << ',' << p.rank << ',' << p.ap_id << ',' << p.count << ','
                << csv::format_double(p.cum_fraction) << '\n';
        }
    }
}

}  // namespace encounterlens
