#include "encounterlens/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>

#include "encounterlens/csv.hpp"

namespace encounterlens {

RegularityReport score_regularity(const PowerSpectrum& spectrum, NodePair pair, double rate,
                                  RegularityOptions options) {
    const std::size_t T = spectrum.size();
    if (T < 4) throw ContractViolation("regularity scoring needs T >= 4");
    if (spectrum.degenerate) throw ContractViolation("regularity scoring of a degenerate spectrum");

    const PowerSpectrum norm = normalize_spectrum(spectrum);
    if (norm.degenerate) throw ContractViolation("regularity scoring of an all-zero spectrum");
    const auto& y = norm.magnitudes;

    double denom = 0.0;
    for (std::size_t c = options.denominator_includes_c1 ? 1 : 2; c < T; ++c) denom += y[c];

    std::vector<double> candidates(y.begin() + 2, y.begin() + static_cast<std::ptrdiff_t>(T / 2) + 1);
    const std::size_t top = argmax_component(y, 2, T / 2);
    const std::size_t k = std::min<std::size_t>(3, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                      std::greater<>());
    const double top3 = std::accumulate(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), 0.0);

    RegularityReport r;
    r.pair = std::move(pair);
    r.rate = rate;
    r.top_component = top;
    r.top_share = denom > 0.0 ? y[top] / denom : 0.0;
    r.top3_share = denom > 0.0 ? top3 / denom : 0.0;
    return r;
}

EmpiricalCdf top_frequency_cdf(std::span<const RegularityReport> reports) {
    EmpiricalCdf cdf;
    if (reports.empty()) {
        cdf.warning = "empty cohort: no top-frequency CDF";
        return cdf;
    }
    std::vector<double> shares;
    shares.reserve(reports.size());
    for (const auto& r : reports) shares.push_back(r.top_share);
    std::sort(shares.begin(), shares.end());
    const double n = static_cast<double>(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) {
        if (i + 1 < shares.size() && shares[i + 1] == shares[i]) continue;
        cdf.points.push_back({shares[i], static_cast<double>(i + 1) / n});
    }
    return cdf;
}

Selection knee_select(std::span<RegularityReport> reports, double quantile) {
    if (!(quantile > 0.0 && quantile < 1.0)) throw ContractViolation("knee quantile must lie in (0, 1)");
    Selection sel;
    for (auto& r : reports) r.is_regular_knee = false;
    if (reports.empty()) {
        sel.warning = "empty cohort: nothing to select";
        return sel;
    }

    const double n = static_cast<double>(reports.size());
    const auto wanted = static_cast<std::size_t>(std::ceil(quantile * n - 1e-9));
    const std::size_t count = std::clamp<std::size_t>(wanted, 1, reports.size());
    if (n < 1.0 / quantile) {
        sel.warning = "cohort of " + std::to_string(reports.size()) + " pairs is smaller than 1/quantile; " +
                      "selecting the top " + std::to_string(count);
    }

    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (reports[a].top_share != reports[b].top_share) return reports[a].top_share > reports[b].top_share;
        return reports[a].pair < reports[b].pair;
    });
    for (std::size_t i = 0; i < count; ++i) {
        reports[order[i]].is_regular_knee = true;
        sel.pairs.push_back(reports[order[i]].pair);
    }
    std::sort(sel.pairs.begin(), sel.pairs.end());
    return sel;
}

Selection top3_select(std::span<RegularityReport> reports, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ContractViolation("top3 threshold must lie in (0, 1)");
    Selection sel;
    for (auto& r : reports) {
        r.is_regular_top3 = r.top3_share > threshold;
        if (r.is_regular_top3) sel.pairs.push_back(r.pair);
    }
    std::sort(sel.pairs.begin(), sel.pairs.end());
    return sel;
}

void write_regularity_csv(std::ostream& out, std::span<const RegularityReport> reports) {
    out << kRegularityHeader << '\n';
    for (const auto& r : reports) {
        out << r.pair.first << ',' << r.pair.second << ',' << csv::format_double(r.rate) << ',' << r.top_component
            << ',' << csv::format_double(r.top_share) << ',' << csv::format_double(r.top3_share) << ','
            << (r.is_regular_knee ? 1 : 0) << ',' << (r.is_regular_top3 ? 1 : 0) << '\n';
    }
}

std::vector<RegularityReport> read_regularity_csv(std::istream& in) {
    csv::LineReader reader(in);
    csv::expect_header(reader, kRegularityHeader, "regularity CSV");
    std::vector<RegularityReport> out;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto f = csv::split(*line);
        const auto bad = [&](const std::string& why) {
            return SchemaError("regularity CSV line " + std::to_string(reader.line_number()) + ": " + why);
        };
        if (f.size() != 8) throw bad("expected 8 fields");
        const auto rate = csv::parse_double(f[2]);
        const auto top = csv::parse_int(f[3]);
        const auto share = csv::parse_double(f[4]);
        const auto share3 = csv::parse_double(f[5]);
        const auto knee = csv::parse_int(f[6]);
        const auto top3 = csv::parse_int(f[7]);
        if (!rate || !top || !share || !share3 || !knee || !top3) throw bad("non-numeric field");
        RegularityReport r;
        r.pair = make_pair_canonical(std::string(csv::trim(f[0])), std::string(csv::trim(f[1])));
        r.rate = *rate;
        r.top_component = static_cast<std::size_t>(*top);
        r.top_share = *share;
        r.top3_share = *share3;
        r.is_regular_knee = *knee != 0;
        r.is_regular_top3 = *top3 != 0;
        out.push_back(std::move(r));
    }
    return out;
}

void write_cdf_csv(std::ostream& out, std::span<const std::pair<std::string, EmpiricalCdf>> cdfs) {
    out << "cohort,top_share,cum_fraction\n";
    for (const auto& [label, cdf] : cdfs) {
        for (const auto& p : cdf.points) {
            out << label << ',' << csv::format_double(p.share) << ',' << csv::format_double(p.fraction) << '\n';
        }
    }
}

}  // namespace encounterlens
