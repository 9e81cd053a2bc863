#include <doctest.h>

#include <set>
#include <sstream>

#include "encounterlens/encounter.hpp"
#include "encounterlens/series.hpp"
#include "encounterlens/spectral.hpp"
#include "encounterlens/synth.hpp"

using namespace encounterlens;

namespace {

SynthSpec base_spec(std::vector<CohortSpec> cohorts, std::size_t nodes = 40, std::uint64_t seed = 9) {
    SynthSpec s;
    s.n_nodes = nodes;
    s.n_aps = 20;
    s.window = TraceWindow{0, 128, BinUnit::day};
    s.cohorts = std::move(cohorts);
    s.seed = seed;
    return s;
}

CohortSpec periodic(std::size_t count, std::size_t period, std::size_t jitter = 0) {
    return CohortSpec{count, Periodic{period, jitter, 1.0, 1, std::nullopt}, false, 0};
}

std::vector<EncounterEvent> encounters_of(const SynthTrace& t, const TraceWindow& w) {
    return wlan_encounters(sort_and_window(t.associations, w));
}

}  // namespace

TEST_SUITE("synth") {
    TEST_CASE("same seed, same trace; different seed, different trace") {
        const auto spec = base_spec({periodic(10, 7, 1), CohortSpec{10, UniformPattern{0.2}, false, 0}});
        const auto a = generate(spec);
        const auto b = generate(spec);
        CHECK(a.associations == b.associations);
        CHECK(a.labels == b.labels);
        auto other = spec;
        other.seed = 10;
        CHECK_FALSE(generate(other).associations == a.associations);
    }

    TEST_CASE("infeasible specs are rejected") {
        CHECK_THROWS_AS((void)generate(base_spec({periodic(4, 7)}, 3)), ContractViolation);
        CHECK_THROWS_AS((void)generate(base_spec({periodic(1, 1)})), ContractViolation);
        CHECK_THROWS_AS((void)generate(base_spec({CohortSpec{1, Burst{200}, false, 0}})), ContractViolation);
        CHECK_THROWS_AS((void)generate(base_spec({CohortSpec{1, UniformPattern{1.5}, false, 0}})), ContractViolation);
        auto hub = base_spec({CohortSpec{5, Periodic{}, true, 0}}, 4);
        CHECK_THROWS_AS((void)generate(hub), ContractViolation);
        auto no_aps = base_spec({periodic(1, 7)});
        no_aps.n_aps = 0;
        CHECK_THROWS_AS((void)generate(no_aps), ContractViolation);
    }

    TEST_CASE("the full pair capacity can be used") {
        const auto trace = generate(base_spec({periodic(6, 7), CohortSpec{4, UniformPattern{0.1}, false, 0}}, 5));
        CHECK(trace.labels.size() == 10);
        std::set<NodePair> pairs;
        for (const auto& l : trace.labels) pairs.insert(l.pair);
        CHECK(pairs.size() == 10);
    }

    TEST_CASE("generated records satisfy the ingest contract") {
        const auto spec = base_spec({periodic(5, 7, 1), CohortSpec{5, Burst{10}, false, 0}});
        const auto trace = generate(spec);
        std::ostringstream out;
        write_wlan_csv(out, trace.associations);
        std::istringstream in(out.str());
        const auto parsed = parse_wlan(in);
        CHECK(parsed.rejections.empty());
        CHECK(parsed.records == trace.associations);
        for (const auto& r : trace.associations) CHECK(r.end > r.start);
    }

    TEST_CASE("a weekly pair meets once a week for one hour at its home AP") {
        auto spec = base_spec({periodic(1, 7)}, 2);
        spec.cohorts[0].pattern = Periodic{7, 0, 1.0, 1, 3};
        const auto trace = generate(spec);
        const auto events = encounters_of(trace, spec.window);
        REQUIRE(events.size() == 18);
        for (std::size_t i = 0; i < events.size(); ++i) {
            const Seconds day = static_cast<Seconds>(3 + 7 * i) * kSecondsPerDay;
            CHECK(events[i].start == day + 11 * kSecondsPerHour + 1800);
            CHECK(events[i].duration() == kSecondsPerHour);
            CHECK(events[i].location == trace.labels[0].ap_id);
        }
        const auto series = build_pair_series(events, spec.window, Metric::daily_encounter);
        CHECK(daily_rate(series.begin()->second) == 18.0 / 128);
    }

    TEST_CASE("labels describe the planted patterns") {
        const auto spec = base_spec({periodic(3, 7, 1), CohortSpec{2, Burst{5}, false, 0},
                                     CohortSpec{2, UniformPattern{0.3}, false, 0},
                                     CohortSpec{2, Waves{2, 0.5}, false, 0}});
        const auto labels = generate(spec).labels;
        REQUIRE(labels.size() == 9);
        std::map<std::string, int> patterns;
        for (const auto& l : labels) {
            ++patterns[l.pattern];
            if (l.pattern == "periodic") {
                CHECK(l.period_bins == 7);
                CHECK(l.jitter == 1);
            }
            if (l.pattern == "waves") CHECK(l.period_bins == 64);
            if (l.pattern == "burst") CHECK(l.period_bins == 0);
        }
        CHECK(patterns == std::map<std::string, int>{{"burst", 2}, {"periodic", 3}, {"uniform", 2}, {"waves", 2}});
        CHECK(std::is_sorted(labels.begin(), labels.end(),
                             [](const auto& a, const auto& b) { return a.pair < b.pair; }));
    }

    TEST_CASE("a burst occupies one contiguous run") {
        for (std::size_t run : {1u, 9u, 40u}) {
            const auto spec = base_spec({CohortSpec{1, Burst{run}, false, 0}}, 2, 100 + run);
            const auto events = encounters_of(generate(spec), spec.window);
            const auto series = build_pair_series(events, spec.window, Metric::daily_encounter).begin()->second.values;
            std::size_t first = 0;
            while (series[first] == 0.0) ++first;
            for (std::size_t d = 0; d < series.size(); ++d) {
                CHECK(series[d] == ((d >= first && d < first + run) ? 1.0 : 0.0));
            }
        }
    }

    TEST_CASE("hub cohorts share one node") {
        const auto labels = generate(base_spec({CohortSpec{5, Periodic{}, true, 0}})).labels;
        std::map<std::string, int> degree;
        for (const auto& l : labels) {
            ++degree[l.pair.first];
            ++degree[l.pair.second];
        }
        const auto hub = std::max_element(degree.begin(), degree.end(),
                                          [](const auto& a, const auto& b) { return a.second < b.second; });
        CHECK(hub->second == 5);
    }

    TEST_CASE("exclusive APs are not shared with other cohorts") {
        const auto labels =
            generate(base_spec({CohortSpec{10, UniformPattern{0.1}, false, 0}, CohortSpec{10, Periodic{}, false, 3}}))
                .labels;
        std::set<std::string> shared;
        std::set<std::string> exclusive;
        for (const auto& l : labels) (l.cohort == 0 ? shared : exclusive).insert(l.ap_id);
        CHECK(exclusive.size() <= 3);
        for (const auto& ap : exclusive) CHECK(shared.count(ap) == 0);
        for (const auto& ap : exclusive) CHECK(ap >= "ap0020");
    }

    TEST_CASE("zipf popularity favours the first AP") {
        auto spec = base_spec({CohortSpec{300, UniformPattern{0.1}, false, 0}});
        spec.ap_popularity = ZipfPopularity{1.0};
        std::map<std::string, int> homes;
        for (const auto& l : generate(spec).labels) ++homes[l.ap_id];
        CHECK(homes["ap0000"] > homes["ap0001"]);
        CHECK(homes["ap0000"] > 40);
    }

    TEST_CASE("daily sessions over an hourly window peak near 24 hours") {
        SynthSpec spec;
        spec.n_nodes = 20;
        spec.n_aps = 5;
        spec.window = TraceWindow{0, 256, BinUnit::hour};
        spec.cohorts = {CohortSpec{10, Periodic{24, 0, 1.0, 6, std::nullopt}, false, 0}};
        spec.seed = 3;
        const auto trace = generate_sightings(spec);
        const auto events = bluetooth_encounters(sort_and_window(trace.sightings, spec.window));
        const auto series = build_pair_series(events, spec.window, Metric::hourly_encounter);
        REQUIRE(series.size() == 10);
        std::vector<PowerSpectrum> spectra;
        for (const auto& [_, s] : series) spectra.push_back(normalize_spectrum(power_spectrum(acf(s.values))));
        const auto g = group_average_spectrum(spectra);
        const auto peak = argmax_component(g.mean_magnitudes, 2, 128);
        CHECK((peak == 10 || peak == 11));
    }

    TEST_CASE("sightings follow a 60 second beacon") {
        auto spec = base_spec({periodic(1, 7)}, 2);
        spec.window = TraceWindow{0, 16, BinUnit::day};
        const auto trace = generate_sightings(spec);
        REQUIRE_FALSE(trace.sightings.empty());
        CHECK(trace.sightings.size() % 60 == 0);
        CHECK(trace.sightings[1].timestamp - trace.sightings[0].timestamp == 60);
        CHECK_THROWS_AS((void)generate_sightings(spec, 0), ContractViolation);
    }

    TEST_CASE("cohort spec parsing") {
        const auto c = parse_cohort_spec("50 periodic period=7 jitter=1 participation=0.9 span=2 phase=3 hub");
        CHECK(c.count == 50);
        CHECK(c.hub);
        const auto& p = std::get<Periodic>(c.pattern);
        CHECK(p.period_bins == 7);
        CHECK(p.jitter_bins == 1);
        CHECK(p.participation == 0.9);
        CHECK(p.span_bins == 2);
        CHECK(p.phase == 3u);

        CHECK(std::get<Burst>(parse_cohort_spec("5 burst run=12").pattern).run_length == 12);
        CHECK(std::get<UniformPattern>(parse_cohort_spec("5 uniform rate=0.2").pattern).rate == 0.2);
        const auto w = std::get<Waves>(parse_cohort_spec("5 waves cycles=2 duty=0.55 exclusive_aps=4").pattern);
        CHECK(w.cycles == 2);
        CHECK(parse_cohort_spec("5 waves exclusive_aps=4").exclusive_aps == 4);

        CHECK_THROWS_AS((void)parse_cohort_spec("5"), ContractViolation);
        CHECK_THROWS_AS((void)parse_cohort_spec("x periodic"), ContractViolation);
        CHECK_THROWS_AS((void)parse_cohort_spec("5 sine"), ContractViolation);
        CHECK_THROWS_AS((void)parse_cohort_spec("5 periodic colour=red"), ContractViolation);
    }

    TEST_CASE("ap popularity parsing") {
        CHECK(std::holds_alternative<UniformPopularity>(parse_ap_popularity("uniform")));
        CHECK(std::get<ZipfPopularity>(parse_ap_popularity("zipf")).s == 1.0);
        CHECK(std::get<ZipfPopularity>(parse_ap_popularity("zipf:1.5")).s == 1.5);
        CHECK_THROWS_AS((void)parse_ap_popularity("pareto"), ContractViolation);
    }

    TEST_CASE("labels CSV round trip") {
        const auto labels = generate(base_spec({periodic(3, 7, 1)})).labels;
        std::ostringstream out;
        write_labels_csv(out, labels);
        std::istringstream in(out.str());
        const auto back = read_labels_csv(in);
        REQUIRE(back.size() == labels.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].pair == labels[i].pair);
            CHECK(back[i].pattern == "periodic");
            CHECK(back[i].period_bins == 7);
        }
    }

    TEST_CASE("node ids sort numerically") {
        const auto ids = synth_node_ids(12000);
        CHECK(ids.front() == "n00000");
        CHECK(std::is_sorted(ids.begin(), ids.end()));
        CHECK(synth_node_ids(3) == std::vector<std::string>{"n0000", "n0001", "n0002"});
    }
}
