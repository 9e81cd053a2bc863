#include "encounterlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <tuple>

#include "encounterlens/csv.hpp"

namespace encounterlens {

namespace {

constexpr Seconds kOverlap = kSecondsPerHour;
constexpr Seconds kMaxSlack = 600;

using Engine = std::mt19937_64;

Engine stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return Engine(seq);
}

std::string padded(std::string_view prefix, std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return std::string(prefix) + digits;
}

std::size_t digits_for(std::size_t n) { return std::max<std::size_t>(4, std::to_string(n).size()); }

struct PlannedPair {
    std::size_t a;
    std::size_t b;
    std::size_t cohort;
    std::size_t ap;
    std::vector<std::size_t> bins;  // sorted, unique
};

std::vector<std::size_t> schedule(const Pattern& pattern, std::size_t T, Engine& rng) {
    std::vector<std::size_t> bins;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Periodic>) {
                const auto period = static_cast<long long>(p.period_bins);
                const auto jitter = static_cast<long long>(p.jitter_bins);
                const long long phase = p.phase ? static_cast<long long>(*p.phase % p.period_bins)
                                                : std::uniform_int_distribution<long long>(0, period - 1)(rng);
                std::uniform_int_distribution<long long> shift(-jitter, jitter);
                std::bernoulli_distribution attend(p.participation);
                for (long long base = phase - period; base - jitter < static_cast<long long>(T); base += period) {
                    const long long at = base + (jitter > 0 ? shift(rng) : 0);
                    const bool present = attend(rng);
                    if (!present) continue;
                    for (std::size_t s = 0; s < p.span_bins; ++s) {
                        const long long b = at + static_cast<long long>(s);
                        if (b >= 0 && b < static_cast<long long>(T)) bins.push_back(static_cast<std::size_t>(b));
                    }
                }
            } else if constexpr (std::is_same_v<P, Burst>) {
                const std::size_t start = std::uniform_int_distribution<std::size_t>(0, T - p.run_length)(rng);
                for (std::size_t b = start; b < start + p.run_length; ++b) bins.push_back(b);
            } else if constexpr (std::is_same_v<P, UniformPattern>) {
                std::bernoulli_distribution on(p.rate);
                for (std::size_t b = 0; b < T; ++b) {
                    if (on(rng)) bins.push_back(b);
                }
            } else {
                const double cycle = static_cast<double>(T) / static_cast<double>(p.cycles);
                for (std::size_t b = 0; b < T; ++b) {
                    if (std::fmod(static_cast<double>(b), cycle) < p.duty * cycle) bins.push_back(b);
                }
            }
        },
        pattern);
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
    return bins;
}

std::string pattern_name(const Pattern& p) {
    switch (p.index()) {
        case 0: return "periodic";
        case 1: return "burst";
        case 2: return "uniform";
        default: return "waves";
    }
}

std::size_t label_period(const Pattern& p, std::size_t T) {
    if (const auto* per = std::get_if<Periodic>(&p)) return per->period_bins;
    if (const auto* w = std::get_if<Waves>(&p)) return T / w->cycles;
    return 0;
}

std::size_t label_jitter(const Pattern& p) {
    if (const auto* per = std::get_if<Periodic>(&p)) return per->jitter_bins;
    return 0;
}

struct Plan {
    std::vector<std::string> nodes;
    std::vector<std::string> aps;
    std::vector<PlannedPair> pairs;
};

Plan make_plan(const SynthSpec& spec) {
    spec.validate();
    Plan plan;
    plan.nodes = synth_node_ids(spec.n_nodes);

    std::size_t total_aps = spec.n_aps;
    std::vector<std::size_t> exclusive_base(spec.cohorts.size(), 0);
    for (std::size_t c = 0; c < spec.cohorts.size(); ++c) {
        exclusive_base[c] = total_aps;
        total_aps += spec.cohorts[c].exclusive_aps;
    }
    for (std::size_t i = 0; i < total_aps; ++i) plan.aps.push_back(padded("ap", i, digits_for(total_aps)));

    std::vector<double> weights(spec.n_aps, 1.0);
    if (const auto* z = std::get_if<ZipfPopularity>(&spec.ap_popularity)) {
        for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), z->s);
    }

    std::set<std::pair<std::size_t, std::size_t>> used;
    const std::size_t n = spec.n_nodes;
    for (std::size_t c = 0; c < spec.cohorts.size(); ++c) {
        const auto& cohort = spec.cohorts[c];
        Engine rng = stream(spec.seed, c, 0);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);

        std::vector<std::pair<std::size_t, std::size_t>> chosen;
        auto take = [&](std::size_t a, std::size_t b) {
            const auto key = std::minmax(a, b);
            if (a == b || used.count(key)) return false;
            used.insert(key);
            chosen.push_back(key);
            return true;
        };
        auto free_pairs = [&](std::optional<std::size_t> through) {
            std::vector<std::pair<std::size_t, std::size_t>> out;
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = a + 1; b < n; ++b) {
                    if (through && a != *through && b != *through) continue;
                    if (!used.count({a, b})) out.emplace_back(a, b);
                }
            }
            return out;
        };
        auto fill_from = [&](std::vector<std::pair<std::size_t, std::size_t>> pool) {
            std::shuffle(pool.begin(), pool.end(), rng);
            for (const auto& [a, b] : pool) {
                if (chosen.size() == cohort.count) break;
                take(a, b);
            }
        };

        const std::optional<std::size_t> hub = cohort.hub ? std::optional(pick(rng)) : std::nullopt;
        std::size_t attempts = 0;
        while (chosen.size() < cohort.count && attempts < 50 * cohort.count + 100) {
            ++attempts;
            const std::size_t a = hub ? *hub : pick(rng);
            take(a, pick(rng));
        }
        if (chosen.size() < cohort.count) fill_from(free_pairs(hub));
        if (chosen.size() < cohort.count) {
            throw ContractViolation("infeasible spec: cohort " + std::to_string(c) + " needs " +
                                    std::to_string(cohort.count) + " pairs but only " +
                                    std::to_string(chosen.size()) + " are free");
        }

        std::discrete_distribution<std::size_t> shared_ap(weights.begin(), weights.end());
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            Engine pair_rng = stream(spec.seed, c, i + 1);
            const std::size_t ap =
                cohort.exclusive_aps > 0
                    ? exclusive_base[c] +
                          std::uniform_int_distribution<std::size_t>(0, cohort.exclusive_aps - 1)(pair_rng)
                    : shared_ap(pair_rng);
            plan.pairs.push_back({chosen[i].first, chosen[i].second, c, ap,
                                  schedule(cohort.pattern, spec.window.length_bins, pair_rng)});
        }
    }
    return plan;
}

std::vector<GroundTruth> labels_of(const SynthSpec& spec, const Plan& plan) {
    std::vector<GroundTruth> labels;
    for (const auto& p : plan.pairs) {
        const auto& pattern = spec.cohorts[p.cohort].pattern;
        labels.push_back({make_pair_canonical(plan.nodes[p.a], plan.nodes[p.b]), pattern_name(pattern),
                          label_period(pattern, spec.window.length_bins), label_jitter(pattern), p.cohort,
                          plan.aps[p.ap]});
    }
    std::sort(labels.begin(), labels.end(), [](const auto& x, const auto& y) { return x.pair < y.pair; });
    return labels;
}

// The one-hour overlap of bin b: centered in day bins, the whole bin for hour bins.
std::pair<Seconds, Seconds> overlap_of(const TraceWindow& w, std::size_t b) {
    const Seconds lo = w.epoch + static_cast<Seconds>(b) * w.bin_length();
    const Seconds span = std::min(kOverlap, w.bin_length());
    const Seconds start = lo + (w.bin_length() - span) / 2;
    return {start, start + span};
}

}  // namespace

void SynthSpec::validate() const {
    window.validate();
    const std::size_t T = window.length_bins;
    if (n_nodes < 2) throw ContractViolation("synth needs at least 2 nodes");
    const std::size_t capacity = n_nodes * (n_nodes - 1) / 2;
    std::size_t requested = 0;
    bool uses_shared_pool = false;
    for (const auto& c : cohorts) {
        requested += c.count;
        if (c.hub && c.count > n_nodes - 1) {
            throw ContractViolation("infeasible spec: a hub cohort holds at most n_nodes - 1 pairs");
        }
        if (c.exclusive_aps == 0) uses_shared_pool = true;
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, Periodic>) {
                    if (p.period_bins < 2) throw ContractViolation("periodic pattern needs period_bins >= 2");
                    if (!(p.participation >= 0.0 && p.participation <= 1.0)) {
                        throw ContractViolation("participation must lie in [0, 1]");
                    }
                    if (p.span_bins < 1) throw ContractViolation("span must be >= 1");
                } else if constexpr (std::is_same_v<P, Burst>) {
                    if (p.run_length < 1 || p.run_length > T) {
                        throw ContractViolation("burst run_length must lie in [1, T]");
                    }
                } else if constexpr (std::is_same_v<P, UniformPattern>) {
                    if (!(p.rate >= 0.0 && p.rate <= 1.0)) throw ContractViolation("uniform rate must lie in [0, 1]");
                } else {
                    if (p.cycles < 1 || p.cycles > T) throw ContractViolation("waves cycles must lie in [1, T]");
                    if (!(p.duty > 0.0 && p.duty <= 1.0)) throw ContractViolation("waves duty must lie in (0, 1]");
                }
            },
            c.pattern);
    }
    if (requested > capacity) {
        throw ContractViolation("infeasible spec: " + std::to_string(requested) + " pairs requested, capacity " +
                                std::to_string(capacity));
    }
    if (uses_shared_pool && n_aps == 0) throw ContractViolation("synth needs at least one shared AP");
    if (const auto* z = std::get_if<ZipfPopularity>(&ap_popularity); z && !(z->s >= 0.0)) {
        throw ContractViolation("zipf exponent must be >= 0");
    }
}

std::vector<std::string> synth_node_ids(std::size_t n_nodes) {
    std::vector<std::string> ids;
    ids.reserve(n_nodes);
    const std::size_t width = digits_for(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) ids.push_back(padded("n", i, width));
    return ids;
}

SynthTrace generate(const SynthSpec& spec) {
    const Plan plan = make_plan(spec);
    SynthTrace out;
    out.labels = labels_of(spec, plan);

    for (std::size_t i = 0; i < plan.pairs.size(); ++i) {
        const auto& p = plan.pairs[i];
        Engine slack_rng = stream(spec.seed ^ 0x5eedULL, p.cohort, i + 1);
        std::uniform_int_distribution<Seconds> slack(0, kMaxSlack);
        for (std::size_t b : p.bins) {
            const auto [lo, hi] = overlap_of(spec.window, b);
            const Seconds lead = slack(slack_rng);
            const Seconds tail = slack(slack_rng);
            out.associations.push_back({plan.nodes[p.a], plan.aps[p.ap], lo - lead, hi});
            out.associations.push_back({plan.nodes[p.b], plan.aps[p.ap], lo, hi + tail});
        }
    }
    std::sort(out.associations.begin(), out.associations.end(), [](const auto& a, const auto& b) {
        return std::tie(a.start, a.device_id, a.ap_id, a.end) < std::tie(b.start, b.device_id, b.ap_id, b.end);
    });
    return out;
}

SynthSightings generate_sightings(const SynthSpec& spec, Seconds beacon_interval) {
    if (beacon_interval <= 0) throw ContractViolation("beacon interval must be positive");
    const Plan plan = make_plan(spec);
    SynthSightings out;
    out.labels = labels_of(spec, plan);

    for (const auto& p : plan.pairs) {
        // Touching overlaps (consecutive hour bins) form one continuous session.
        std::vector<std::pair<Seconds, Seconds>> sessions;
        for (std::size_t b : p.bins) {
            const auto ov = overlap_of(spec.window, b);
            if (!sessions.empty() && sessions.back().second == ov.first) {
                sessions.back().second = ov.second;
            } else {
                sessions.push_back(ov);
            }
        }
        for (const auto& [lo, hi] : sessions) {
            bool forward = true;
            for (Seconds t = lo; t < hi; t += beacon_interval, forward = !forward) {
                const auto& observer = forward ? plan.nodes[p.a] : plan.nodes[p.b];
                const auto& observed = forward ? plan.nodes[p.b] : plan.nodes[p.a];
                out.sightings.push_back({observer, observed, t});
            }
        }
    }
    std::sort(out.sightings.begin(), out.sightings.end(), [](const auto& a, const auto& b) {
        return std::tie(a.timestamp, a.observer_id, a.observed_id) <
               std::tie(b.timestamp, b.observer_id, b.observed_id);
    });
    return out;
}

CohortSpec parse_cohort_spec(std::string_view text) {
    const auto bad = [&](const std::string& why) {
        return ContractViolation("cohort spec '" + std::string(text) + "': " + why);
    };
    std::vector<std::string_view> tokens;
    for (auto tok : csv::split(csv::trim(text), ' ')) {
        if (!csv::trim(tok).empty()) tokens.push_back(csv::trim(tok));
    }
    if (tokens.size() < 2) throw bad("expected '<count> <pattern> [key=value ...]'");

    CohortSpec spec;
    const auto count = csv::parse_int(tokens[0]);
    if (!count || *count < 0) throw bad("count must be a non-negative integer");
    spec.count = static_cast<std::size_t>(*count);

    const std::string_view kind = tokens[1];
    Periodic periodic;
    Burst burst;
    UniformPattern uniform;
    Waves waves;

    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const auto tok = tokens[i];
        if (tok == "hub") {
            spec.hub = true;
            continue;
        }
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw bad("token '" + std::string(tok) + "' is not key=value");
        const auto key = tok.substr(0, eq);
        const auto value = tok.substr(eq + 1);
        const auto as_size = [&]() {
            const auto v = csv::parse_int(value);
            if (!v || *v < 0) throw bad("'" + std::string(key) + "' needs a non-negative integer");
            return static_cast<std::size_t>(*v);
        };
        const auto as_double = [&]() {
            const auto v = csv::parse_double(value);
            if (!v) throw bad("'" + std::string(key) + "' needs a number");
            return *v;
        };
        if (key == "exclusive_aps") spec.exclusive_aps = as_size();
        else if (key == "period") periodic.period_bins = as_size();
        else if (key == "jitter") periodic.jitter_bins = as_size();
        else if (key == "participation") periodic.participation = as_double();
        else if (key == "span") periodic.span_bins = as_size();
        else if (key == "phase") periodic.phase = as_size();
        else if (key == "run") burst.run_length = as_size();
        else if (key == "rate") uniform.rate = as_double();
        else if (key == "cycles") waves.cycles = as_size();
        else if (key == "duty") waves.duty = as_double();
        else throw bad("unknown key '" + std::string(key) + "'");
    }

    if (kind == "periodic") spec.pattern = periodic;
    else if (kind == "burst") spec.pattern = burst;
    else if (kind == "uniform") spec.pattern = uniform;
    else if (kind == "waves") spec.pattern = waves;
    else throw bad("unknown pattern '" + std::string(kind) + "'");
    return spec;
}

ApPopularity parse_ap_popularity(std::string_view text) {
    text = csv::trim(text);
    if (text == "uniform") return UniformPopularity{};
    if (text == "zipf") return ZipfPopularity{};
    if (text.starts_with("zipf:")) {
        if (const auto s = csv::parse_double(text.substr(5))) return ZipfPopularity{*s};
    }
    throw ContractViolation("ap popularity must be 'uniform', 'zipf' or 'zipf:<s>', got '" + std::string(text) + "'");
}

void write_labels_csv(std::ostream& out, std::span<const GroundTruth> labels) {
    out << kLabelHeader << '\n';
    for (const auto& l : labels) {
        out << l.pair.first << ',' << l.pair.second << ',' << l.pattern << ',' << l.period_bins << ',' << l.jitter
            << '\n';
    }
}

std::vector<GroundTruth> read_labels_csv(std::istream& in) {
    csv::LineReader reader(in);
    csv::expect_header(reader, kLabelHeader, "labels CSV");
    std::vector<GroundTruth> out;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto f = csv::split(*line);
        if (f.size() != 5) throw SchemaError("labels CSV line " + std::to_string(reader.line_number()) + ": expected 5 fields");
        const auto period = csv::parse_int(f[3]);
        const auto jitter = csv::parse_int(f[4]);
        if (!period || !jitter) throw SchemaError("labels CSV line " + std::to_string(reader.line_number()) + ": non-numeric field");
        GroundTruth g;
        g.pair = make_pair_canonical(std::string(csv::trim(f[0])), std::string(csv::trim(f[1])));
        g.pattern = std::string(csv::trim(f[2]));
        g.period_bins = static_cast<std::size_t>(*period);
        g.jitter = static_cast<std::size_t>(*jitter);
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace encounterlens
