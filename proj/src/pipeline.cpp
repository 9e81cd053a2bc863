#include "encounterlens/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "encounterlens/csv.hpp"
#include "encounterlens/encounter.hpp"
#include "encounterlens/grouping.hpp"
#include "encounterlens/ingest.hpp"
#include "encounterlens/location.hpp"
#include "encounterlens/parallel.hpp"
#include "encounterlens/regularity.hpp"
#include "encounterlens/series.hpp"
#include "encounterlens/spectral.hpp"
#include "encounterlens/synth.hpp"

namespace encounterlens {

namespace fs = std::filesystem;

namespace {

fs::path in_out(const PipelineConfig& cfg, std::string_view name) { return cfg.out_dir / fs::path(name); }

std::string window_text(const TraceWindow& w) {
    return std::to_string(w.length_bins) + " " + std::string(to_string(w.bin)) + " bins from " +
           std::to_string(w.epoch);
}

// window.txt is authoritative downstream of ingest; a config that asks for a
// different window means the artifacts are stale.
TraceWindow load_window(const PipelineConfig& cfg) {
    const TraceWindow w = read_window(in_out(cfg, artifact::window));
    if (w.bin != cfg.bin || w.length_bins != cfg.length_bins() || (cfg.epoch && *cfg.epoch != w.epoch)) {
        throw SchemaError("window.txt (" + window_text(w) + ") disagrees with the configured window (" +
                          std::to_string(cfg.length_bins()) + " " + std::string(to_string(cfg.bin)) +
                          " bins); rerun ingest");
    }
    return w;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
    auto out = csv::open_output(path);
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string fixed(double v, int digits = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

std::string range_label(double lo, double hi) { return csv::format_double(lo) + "-" + csv::format_double(hi); }

struct SpectrumSet {
    std::vector<std::string> ids;
    std::vector<AcfSeries> acfs;
    std::vector<PowerSpectrum> raw;
    std::vector<PowerSpectrum> normalized;
    std::size_t degenerate = 0;
};

SpectrumSet analyze(const std::vector<std::pair<std::string, const std::vector<double>*>>& rows, BinUnit sampling) {
    SpectrumSet set;
    const std::size_t n = rows.size();
    set.ids.resize(n);
    set.acfs.resize(n);
    set.raw.resize(n);
    set.normalized.resize(n);
    parallel_for(n, [&](std::size_t i) {
        set.ids[i] = rows[i].first;
        set.acfs[i] = acf(*rows[i].second, rows[i].first);
        set.raw[i] = power_spectrum(set.acfs[i], sampling);
        set.normalized[i] = normalize_spectrum(set.raw[i]);
    });
    set.degenerate = static_cast<std::size_t>(
        std::count_if(set.raw.begin(), set.raw.end(), [](const PowerSpectrum& s) { return s.degenerate; }));
    return set;
}

struct GroupOutputs {
    std::vector<GroupSpectrum> spectra;
    std::vector<GroupAcf> acfs;
};

void add_group(GroupOutputs& out, const SpectrumSet& set, const std::vector<std::string>& members,
               const std::string& label, bool normalized) {
    std::map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < set.ids.size(); ++i) index.emplace(set.ids[i], i);
    std::vector<PowerSpectrum> spectra;
    std::vector<AcfSeries> acfs;
    for (const auto& id : members) {
        const auto it = index.find(id);
        if (it == index.end()) continue;
        spectra.push_back(normalized ? set.normalized[it->second] : set.raw[it->second]);
        acfs.push_back(set.acfs[it->second]);
    }
    out.spectra.push_back(group_average_spectrum(spectra, label));
    out.acfs.push_back(group_average_acf(acfs, label));
}

std::string group_peak(const GroupSpectrum& g) {
    if (g.empty() || g.mean_magnitudes.size() < 4) return g.label + " empty";
    const std::size_t T = g.mean_magnitudes.size();
    return g.label + " n=" + std::to_string(g.n_pairs) +
           " argmax c=" + std::to_string(argmax_component(g.mean_magnitudes, 2, T / 2));
}

std::map<std::string, double> binary_rates(std::span<const std::pair<std::string, const std::vector<double>*>> rows,
                                           Metric metric) {
    std::map<std::string, double> rates;
    for (const auto& [id, values] : rows) rates[id] = daily_rate(*values, metric);
    return rates;
}

}  // namespace

void write_window(const fs::path& path, const TraceWindow& window) {
    write_file(path, [&](std::ostream& out) {
        out << "epoch=" << window.epoch << '\n'
            << "length_bins=" << window.length_bins << '\n'
            << "bin=" << to_string(window.bin) << '\n';
    });
}

TraceWindow read_window(const fs::path& path) {
    auto in = csv::open_input(path);
    TraceWindow w;
    bool seen[3] = {false, false, false};
    csv::LineReader reader(in);
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto eq = line->find('=');
        if (eq == std::string_view::npos) throw SchemaError(path.string() + ": expected key=value");
        const auto key = csv::trim(line->substr(0, eq));
        const auto value = csv::trim(line->substr(eq + 1));
        const auto number = csv::parse_int(value);
        if (key == "epoch" && number) {
            w.epoch = *number;
            seen[0] = true;
        } else if (key == "length_bins" && number && *number > 0) {
            w.length_bins = static_cast<std::size_t>(*number);
            seen[1] = true;
        } else if (key == "bin") {
            if (value != "day" && value != "hour") throw SchemaError(path.string() + ": bad bin unit");
            w.bin = parse_bin_unit(value);
            seen[2] = true;
        } else {
            throw SchemaError(path.string() + ": unexpected line '" + std::string(*line) + "'");
        }
    }
    if (!(seen[0] && seen[1] && seen[2])) throw SchemaError(path.string() + ": incomplete window description");
    w.validate();
    return w;
}

StageResult run_ingest(const PipelineConfig& cfg) {
    cfg.validate();
    StageResult result{"ingest", {}, {}};

    std::vector<fs::path> wlan = cfg.wlan_inputs;
    std::vector<fs::path> bluetooth = cfg.bluetooth_inputs;
    if (cfg.uses_synth()) {
        if (cfg.synth_kind == SynthKind::wlan) wlan.push_back(in_out(cfg, artifact::synth_associations));
        else bluetooth.push_back(in_out(cfg, artifact::synth_sightings));
    }

    std::size_t rows = 0;
    std::size_t rejected = 0;
    auto note_rejections = [&](const fs::path& input, std::span<const Rejection> rejections) {
        rejected += rejections.size();
        write_file(cfg.out_dir / (input.stem().string() + ".rej"),
                   [&](std::ostream& out) { write_rejections(out, rejections); });
        if (!rejections.empty()) {
            result.warnings.push_back(std::to_string(rejections.size()) + " rows of " + input.string() +
                                      " rejected; see " + input.stem().string() + ".rej");
        }
    };

    std::vector<AssociationRecord> associations;
    for (const auto& path : wlan) {
        auto in = csv::open_input(path);
        auto parsed = parse_wlan(in);
        rows += parsed.rows;
        note_rejections(path, parsed.rejections);
        std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(associations));
    }
    std::vector<SightingRecord> sightings;
    for (const auto& path : bluetooth) {
        auto in = csv::open_input(path);
        auto parsed = parse_bluetooth(in);
        rows += parsed.rows;
        note_rejections(path, parsed.rejections);
        std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(sightings));
    }

    Seconds epoch = 0;
    if (cfg.epoch) {
        epoch = *cfg.epoch;
    } else if (!cfg.uses_synth()) {
        std::vector<Seconds> candidates;
        if (!associations.empty()) candidates.push_back(default_epoch(associations, cfg.utc_offset));
        if (!sightings.empty()) candidates.push_back(default_epoch(sightings, cfg.utc_offset));
        if (!candidates.empty()) epoch = *std::min_element(candidates.begin(), candidates.end());
    }
    const TraceWindow window{epoch, cfg.length_bins(), cfg.bin};
    window.validate();

    associations = sort_and_window(std::move(associations), window);
    sightings = sort_and_window(std::move(sightings), window);

    const auto assoc_path = in_out(cfg, artifact::associations);
    const auto sight_path = in_out(cfg, artifact::sightings);
    if (!wlan.empty()) {
        write_file(assoc_path, [&](std::ostream& out) { write_wlan_csv(out, associations); });
    } else {
        fs::remove(assoc_path);
    }
    if (!bluetooth.empty()) {
        write_file(sight_path, [&](std::ostream& out) { write_bluetooth_csv(out, sightings); });
    } else {
        fs::remove(sight_path);
    }
    write_window(in_out(cfg, artifact::window), window);

    result.summary = std::to_string(rows) + " rows, " + std::to_string(rejected) + " rejected, " +
                     std::to_string(associations.size()) + " associations, " + std::to_string(sightings.size()) +
                     " sightings in window of " + window_text(window);
    return result;
}

StageResult run_encounters(const PipelineConfig& cfg) {
    cfg.validate();
    const TraceWindow window = load_window(cfg);
    const auto assoc_path = in_out(cfg, artifact::associations);
    const auto sight_path = in_out(cfg, artifact::sightings);
    if (!fs::exists(assoc_path) && !fs::exists(sight_path)) {
        throw MissingInput("neither " + assoc_path.string() + " nor " + sight_path.string() +
                           " exists; run ingest first");
    }

    std::vector<EncounterEvent> events;
    if (fs::exists(assoc_path)) {
        auto in = csv::open_input(assoc_path);
        auto parsed = parse_wlan(in);
        if (!parsed.rejections.empty()) {
            throw SchemaError(assoc_path.string() + " line " + std::to_string(parsed.rejections.front().line_no) +
                              ": " + parsed.rejections.front().reason);
        }
        const auto records = sort_and_window(std::move(parsed.records), window);
        events = wlan_encounters(records);
    }
    if (fs::exists(sight_path)) {
        auto in = csv::open_input(sight_path);
        auto parsed = parse_bluetooth(in);
        if (!parsed.rejections.empty()) {
            throw SchemaError(sight_path.string() + " line " + std::to_string(parsed.rejections.front().line_no) +
                              ": " + parsed.rejections.front().reason);
        }
        const auto records = sort_and_window(std::move(parsed.records), window);
        auto bt = bluetooth_encounters(records, cfg.merge_gap);
        std::move(bt.begin(), bt.end(), std::back_inserter(events));
    }
    sort_events(events);
    write_file(in_out(cfg, artifact::encounters), [&](std::ostream& out) { write_encounters_csv(out, events); });

    const auto stats = encounter_stats(events);
    return {"encounters",
            std::to_string(stats.total_events) + " events, " + std::to_string(stats.encountered_pairs) + " pairs, " +
                std::to_string(stats.unique_nodes) + " nodes, " + std::to_string(stats.total_duration) +
                " s co-located",
            {}};
}

StageResult run_series(const PipelineConfig& cfg) {
    cfg.validate();
    const TraceWindow window = load_window(cfg);
    auto in = csv::open_input(in_out(cfg, artifact::encounters));
    const auto events = read_encounters_csv(in);

    std::vector<PairSeries> all;
    std::size_t pairs = 0;
    for (const Metric m : {encounter_metric(window.bin), Metric::frequency, Metric::duration}) {
        auto series = build_pair_series(events, window, m);
        pairs = series.size();
        for (auto& [_, s] : series) all.push_back(std::move(s));
    }
    write_file(in_out(cfg, artifact::series), [&](std::ostream& out) { write_series_csv(out, all); });

    const auto nodes = build_node_series(events, window);
    std::vector<NodeSeries> node_rows;
    for (const auto& [_, s] : nodes) node_rows.push_back(s);
    write_file(in_out(cfg, artifact::node_series), [&](std::ostream& out) { write_node_series_csv(out, node_rows); });

    return {"series",
            std::to_string(pairs) + " pairs x 3 metrics, " + std::to_string(node_rows.size()) + " nodes, " +
                std::to_string(window.length_bins) + " bins",
            {}};
}

StageResult run_spectrum(const PipelineConfig& cfg) {
    cfg.validate();
    StageResult result{"spectrum", {}, {}};
    const TraceWindow window = load_window(cfg);

    auto in = csv::open_input(in_out(cfg, artifact::series));
    const auto series = read_series_csv(in);
    auto node_in = csv::open_input(in_out(cfg, artifact::node_series));
    const auto node_series = read_node_series_csv(node_in);

    auto check_length = [&](std::size_t T, const std::string& what) {
        if (!is_power_of_two(T) || T < 2) {
            throw SchemaError(what + " has length T = " + std::to_string(T) +
                              ", not a power of 2; the FFT needs a power-of-2 series length");
        }
        if (T != window.length_bins) {
            throw SchemaError(what + " has length " + std::to_string(T) + " but the window has " +
                              std::to_string(window.length_bins) + " bins");
        }
    };
    if (!series.empty()) check_length(series.front().values.size(), "series.csv");
    if (!node_series.empty()) check_length(node_series.front().values.size(), "node_series.csv");

    const Metric binary = encounter_metric(window.bin);
    const Metric chosen = cfg.spectrum_metric();
    std::vector<std::pair<std::string, const std::vector<double>*>> binary_rows;
    std::vector<std::pair<std::string, const std::vector<double>*>> chosen_rows;
    for (const auto& s : series) {
        if (s.metric == binary) binary_rows.emplace_back(s.pair.key(), &s.values);
        if (s.metric == chosen) chosen_rows.emplace_back(s.pair.key(), &s.values);
    }
    std::vector<std::pair<std::string, const std::vector<double>*>> node_rows;
    for (const auto& s : node_series) node_rows.emplace_back(s.node, &s.values);

    const auto pair_rates = binary_rates(binary_rows, binary);
    const auto node_rates = binary_rates(node_rows, binary);
    const SpectrumSet pairs = analyze(chosen_rows, window.bin);
    const SpectrumSet nodes = analyze(node_rows, window.bin);

    const auto pair_buckets = bucket_by_rate(pair_rates, cfg.bucket_edges);
    const auto node_buckets = bucket_by_rate(node_rates, cfg.bucket_edges);

    GroupOutputs groups;
    const std::pair<CohortLabel, CohortRange> cohort_ranges[] = {{CohortLabel::rare, cfg.rare_range},
                                                                 {CohortLabel::frequent, cfg.frequent_range},
                                                                 {CohortLabel::hourly, cfg.hourly_range}};
    std::vector<std::string> peaks;
    for (const auto& [label, range] : cohort_ranges) {
        const std::string name(to_string(label));
        const Cohort c = cohort(pair_buckets, name, range);
        if (c.warning) result.warnings.push_back(*c.warning);
        add_group(groups, pairs, c.members, name, cfg.normalize_before_average);
        peaks.push_back(group_peak(groups.spectra.back()));
    }
    add_group(groups, pairs, pairs.ids, "all", cfg.normalize_before_average);
    for (const auto& [label, range] : cohort_ranges) {
        const std::string name = "node_" + std::string(to_string(label));
        const Cohort c = cohort(node_buckets, name, range);
        if (c.warning) result.warnings.push_back(*c.warning);
        add_group(groups, nodes, c.members, name, cfg.normalize_before_average);
    }
    add_group(groups, nodes, nodes.ids, "node_all", cfg.normalize_before_average);

    write_file(in_out(cfg, artifact::spectra),
               [&](std::ostream& out) { write_spectra_csv(out, pairs.raw, pairs.normalized); });
    write_file(in_out(cfg, artifact::node_spectra),
               [&](std::ostream& out) { write_spectra_csv(out, nodes.raw, nodes.normalized); });
    write_file(in_out(cfg, artifact::group_spectra),
               [&](std::ostream& out) { write_group_spectra_csv(out, groups.spectra); });
    write_file(in_out(cfg, artifact::group_acf), [&](std::ostream& out) { write_group_acf_csv(out, groups.acfs); });
    write_file(in_out(cfg, artifact::cohorts),
               [&](std::ostream& out) { write_cohort_manifest(out, pair_rates, pair_buckets); });
    write_file(in_out(cfg, artifact::node_cohorts),
               [&](std::ostream& out) { write_cohort_manifest(out, node_rates, node_buckets); });

    result.summary = std::to_string(pairs.ids.size()) + " pair spectra (" + std::to_string(pairs.degenerate) +
                     " constant), " + std::to_string(nodes.ids.size()) + " node spectra, metric " +
                     std::string(to_string(chosen)) + "; ";
    for (std::size_t i = 0; i < peaks.size(); ++i) result.summary += (i ? ", " : "") + peaks[i];
    return result;
}

StageResult run_regular(const PipelineConfig& cfg) {
    cfg.validate();
    StageResult result{"regular", {}, {}};
    const TraceWindow window = load_window(cfg);

    auto spec_in = csv::open_input(in_out(cfg, artifact::spectra));
    const auto spectra = read_spectra_csv(spec_in, window.bin);
    auto cohort_in = csv::open_input(in_out(cfg, artifact::cohorts));
    const auto rates = read_cohort_manifest(cohort_in);

    std::vector<RegularityReport> reports;
    std::size_t skipped = 0;
    for (const auto& s : spectra) {
        const double energy = std::accumulate(s.magnitudes.begin() + 1, s.magnitudes.end(), 0.0);
        if (energy <= 0.0) {
            ++skipped;
            continue;
        }
        const auto rate = rates.find(s.id);
        if (rate == rates.end()) throw SchemaError("cohorts.csv has no rate for '" + s.id + "'");
        reports.push_back(score_regularity(s, parse_pair_key(s.id), rate->second, {cfg.denominator_includes_c1}));
    }

    std::map<std::string, double> report_rates;
    for (const auto& r : reports) report_rates[r.pair.key()] = r.rate;
    const auto buckets = bucket_by_rate(report_rates, cfg.bucket_edges);
    auto bucket_of = [&](double rate) {
        return static_cast<std::size_t>(std::find_if(buckets.begin(), buckets.end(),
                                                     [&](const RateBucket& b) { return b.contains(rate); }) -
                                        buckets.begin());
    };
    std::stable_sort(reports.begin(), reports.end(), [&](const auto& a, const auto& b) {
        const auto ba = bucket_of(a.rate);
        const auto bb = bucket_of(b.rate);
        return ba != bb ? ba < bb : a.pair < b.pair;
    });

    std::vector<std::pair<std::string, EmpiricalCdf>> cdfs;
    std::size_t knee = 0;
    for (auto first = reports.begin(); first != reports.end();) {
        const std::size_t b = bucket_of(first->rate);
        const auto last = std::find_if(first, reports.end(), [&](const auto& r) { return bucket_of(r.rate) != b; });
        std::span<RegularityReport> slice(first, last);
        const std::string label = range_label(buckets[b].lower, buckets[b].upper);
        const auto sel = knee_select(slice, cfg.knee_quantile);
        knee += sel.pairs.size();
        if (sel.warning) result.warnings.push_back("bucket " + label + ": " + *sel.warning);
        cdfs.emplace_back(label, top_frequency_cdf(slice));
        first = last;
    }
    const auto top3 = top3_select(reports, cfg.top3_threshold);
    cdfs.emplace_back("all", top_frequency_cdf(reports));
    if (reports.empty()) result.warnings.push_back("no pair has a non-constant series; nothing to score");

    std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.pair < b.pair; });
    write_file(in_out(cfg, artifact::regularity), [&](std::ostream& out) { write_regularity_csv(out, reports); });
    write_file(in_out(cfg, artifact::top_share_cdf), [&](std::ostream& out) { write_cdf_csv(out, cdfs); });

    result.summary = std::to_string(reports.size()) + " pairs scored (" + std::to_string(skipped) +
                     " constant skipped), " + std::to_string(knee) + " knee-regular, " +
                     std::to_string(top3.pairs.size()) + " top3-regular";
    return result;
}

StageResult run_locations(const PipelineConfig& cfg) {
    cfg.validate();
    StageResult result{"locations", {}, {}};
    auto ev_in = csv::open_input(in_out(cfg, artifact::encounters));
    const auto events = read_encounters_csv(ev_in);
    auto reg_in = csv::open_input(in_out(cfg, artifact::regularity));
    const auto reports = read_regularity_csv(reg_in);

    std::set<NodePair> knee_pairs;
    std::set<NodePair> top3_pairs;
    for (const auto& r : reports) {
        if (r.is_regular_knee) knee_pairs.insert(r.pair);
        if (r.is_regular_top3) top3_pairs.insert(r.pair);
    }

    std::vector<LocationHistogram> histograms;
    histograms.push_back(location_histogram(events, {}, "overall", cfg.location_weighting));
    histograms.push_back(location_histogram(
        events, [&](const NodePair& p) { return knee_pairs.count(p) > 0; }, "regular_knee", cfg.location_weighting));
    histograms.push_back(location_histogram(
        events, [&](const NodePair& p) { return top3_pairs.count(p) > 0; }, "regular_top3", cfg.location_weighting));

    write_file(in_out(cfg, artifact::location_histogram),
               [&](std::ostream& out) { write_histogram_csv(out, histograms); });
    write_file(in_out(cfg, artifact::location_fractions),
               [&](std::ostream& out) { write_histogram_fraction_csv(out, histograms); });
    write_file(in_out(cfg, artifact::location_ordered), [&](std::ostream& out) { write_ordered_csv(out, histograms); });

    const auto& overall = histograms.front();
    std::vector<std::string> jsd_notes;
    write_file(in_out(cfg, artifact::location_divergence), [&](std::ostream& out) {
        out << "cohort,reference,jsd\n";
        for (std::size_t i = 1; i < histograms.size(); ++i) {
            const auto& h = histograms[i];
            if (h.total <= 0 || overall.total <= 0) {
                result.warnings.push_back("empty cohort '" + h.label + "': no location divergence");
                continue;
            }
            const double jsd = preference_divergence(h, overall);
            out << h.label << ',' << overall.label << ',' << csv::format_double(jsd) << '\n';
            jsd_notes.push_back(h.label + " " + fixed(jsd));
        }
    });

    std::string skew = "no events";
    if (overall.total > 0) {
        const auto ordered = ordered_preference(overall);
        const auto top = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * ordered.size())));
        skew = "top 10% of locations carry " + fixed(100.0 * ordered[top - 1].cum_fraction, 1) + "% of events";
    }
    result.summary = std::to_string(overall.counts.size()) + " locations, " + skew;
    if (!jsd_notes.empty()) {
        result.summary += "; divergence vs overall:";
        for (const auto& n : jsd_notes) result.summary += " " + n;
    }
    return result;
}

StageResult run_synth(const PipelineConfig& cfg) {
    cfg.validate();
    if (cfg.synth_cohorts.empty()) throw ContractViolation("synth needs at least one synth_cohort entry");
    const SynthSpec spec = cfg.synth_spec();
    std::vector<GroundTruth> labels;
    std::size_t records = 0;
    if (cfg.synth_kind == SynthKind::wlan) {
        auto trace = generate(spec);
        records = trace.associations.size();
        labels = std::move(trace.labels);
        write_file(in_out(cfg, artifact::synth_associations),
                   [&](std::ostream& out) { write_wlan_csv(out, trace.associations); });
    } else {
        auto trace = generate_sightings(spec, cfg.synth_beacon_interval);
        records = trace.sightings.size();
        labels = std::move(trace.labels);
        write_file(in_out(cfg, artifact::synth_sightings),
                   [&](std::ostream& out) { write_bluetooth_csv(out, trace.sightings); });
    }
    write_file(in_out(cfg, artifact::synth_labels), [&](std::ostream& out) { write_labels_csv(out, labels); });
    return {"synth",
            std::to_string(labels.size()) + " planted pairs, " + std::to_string(records) +
                (cfg.synth_kind == SynthKind::wlan ? " association records" : " sightings") + ", seed " +
                std::to_string(cfg.seed),
            {}};
}

std::vector<StageResult> run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    std::vector<StageResult> results;
    if (cfg.uses_synth()) results.push_back(run_synth(cfg));
    for (auto stage : {run_ingest, run_encounters, run_series, run_spectrum, run_regular, run_locations}) {
        results.push_back(stage(cfg));
    }
    return results;
}

}  // namespace encounterlens
