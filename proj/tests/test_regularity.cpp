#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "encounterlens/regularity.hpp"
#include "encounterlens/spectral.hpp"

using namespace encounterlens;

namespace {

PowerSpectrum spectrum_of(std::vector<double> mags) { return PowerSpectrum{"s", std::move(mags), BinUnit::day, false}; }

RegularityReport report(const std::string& b, double share) {
    RegularityReport r;
    r.pair = make_pair_canonical("a", b);
    r.top_share = share;
    r.top3_share = share;
    return r;
}

PowerSpectrum series_spectrum(const std::vector<double>& x) { return power_spectrum(acf(x)); }

}  // namespace

TEST_SUITE("regularity") {
    TEST_CASE("harmonics of period 8 are flagged") {
        std::vector<double> m(128, 0.0);
        for (std::size_t c : {16u, 32u, 48u, 80u, 96u, 112u}) m[c] = 1.0;
        const auto r = score_regularity(spectrum_of(m), {"a", "b"}, 0.1);
        CHECK(r.top_component == 16);
        // The denominator spans c = 1..T-1, mirrors included, so a symmetric
        // spectrum concentrated on three components scores one half.
        CHECK(r.top3_share == doctest::Approx(0.5));
        std::vector<RegularityReport> one{r};
        CHECK(top3_select(one).pairs.size() == 1);
        CHECK(one[0].is_regular_top3);
    }

    TEST_CASE("a flat spectrum is not flagged") {
        std::vector<double> m(128, 1.0);
        const auto r = score_regularity(spectrum_of(m), {"a", "b"}, 0.1);
        CHECK(r.top3_share == doctest::Approx(3.0 / 127.0));
        CHECK(r.top_share == doctest::Approx(1.0 / 127.0));
        CHECK(r.top_component == 2);
        std::vector<RegularityReport> one{r};
        CHECK(top3_select(one).pairs.empty());
    }

    TEST_CASE("component 1 is never a candidate") {
        std::vector<double> m(16, 0.1);
        m[1] = m[15] = 10.0;
        m[5] = m[11] = 1.0;
        const auto r = score_regularity(spectrum_of(m), {"a", "b"}, 0.1);
        CHECK(r.top_component == 5);

        RegularityOptions no_c1;
        no_c1.denominator_includes_c1 = false;
        const auto r2 = score_regularity(spectrum_of(m), {"a", "b"}, 0.1, no_c1);
        CHECK(r2.top_share > r.top_share);
        const double denom = 0.1 * 11 + 1.0 * 2 + 10.0;  // c = 2..15
        CHECK(r2.top_share == doctest::Approx(1.0 / denom));
    }

    TEST_CASE("shares are ordered and bounded") {
        std::mt19937_64 rng(51);
        std::bernoulli_distribution b(0.2);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(128);
            for (auto& v : x) v = b(rng) ? 1.0 : 0.0;
            const auto s = series_spectrum(x);
            if (s.degenerate) continue;
            const auto r = score_regularity(s, {"a", "b"}, 0.2);
            CHECK(0.0 <= r.top_share);
            CHECK(r.top_share <= r.top3_share);
            CHECK(r.top3_share <= 1.0);
            CHECK(r.top_component >= 2);
            CHECK(r.top_component <= 64);
        }
    }

    TEST_CASE("scores are scale free") {
        std::mt19937_64 rng(52);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> m(64);
        for (auto& v : m) v = u(rng);
        auto scaled = m;
        for (auto& v : scaled) v *= 37.5;
        const auto a = score_regularity(spectrum_of(m), {"a", "b"}, 0.1);
        const auto b = score_regularity(spectrum_of(scaled), {"a", "b"}, 0.1);
        CHECK(a.top_component == b.top_component);
        CHECK(a.top_share == doctest::Approx(b.top_share).epsilon(1e-12));
        CHECK(a.top3_share == doctest::Approx(b.top3_share).epsilon(1e-12));
    }

    TEST_CASE("scoring preconditions") {
        CHECK_THROWS_AS((void)score_regularity(spectrum_of({0, 1}), {"a", "b"}, 0.1), ContractViolation);
        PowerSpectrum deg = spectrum_of({0, 0, 0, 0});
        deg.degenerate = true;
        CHECK_THROWS_AS((void)score_regularity(deg, {"a", "b"}, 0.1), ContractViolation);
        CHECK_THROWS_AS((void)score_regularity(spectrum_of({5, 0, 0, 0}), {"a", "b"}, 0.1), ContractViolation);
    }

    TEST_CASE("a burst spreads its non-burst energy thinly") {
        for (std::size_t run : {3u, 7u, 15u}) {
            std::vector<double> x(128, 0.0);
            for (std::size_t d = 40; d < 40 + run; ++d) x[d] = 1.0;
            const auto r = score_regularity(series_spectrum(x), {"a", "b"}, 0.1);
            CHECK(r.top3_share < 1.0 / 3.0);
        }
    }

    TEST_CASE("CDF steps") {
        std::vector<RegularityReport> one{report("b", 0.3)};
        const auto c1 = top_frequency_cdf(one);
        REQUIRE(c1.points.size() == 1);
        CHECK(c1.points[0].share == 0.3);
        CHECK(c1.points[0].fraction == 1.0);

        std::vector<RegularityReport> two{report("c", 0.4), report("b", 0.2)};
        const auto c2 = top_frequency_cdf(two);
        REQUIRE(c2.points.size() == 2);
        CHECK(c2.points[0].share == 0.2);
        CHECK(c2.points[0].fraction == 0.5);
        CHECK(c2.points[1].share == 0.4);
        CHECK(c2.points[1].fraction == 1.0);

        std::vector<RegularityReport> tied{report("b", 0.2), report("c", 0.2), report("d", 0.5)};
        const auto c3 = top_frequency_cdf(tied);
        REQUIRE(c3.points.size() == 2);
        CHECK(c3.points[0].fraction == doctest::Approx(2.0 / 3.0));

        const auto empty = top_frequency_cdf({});
        CHECK(empty.points.empty());
        CHECK(empty.warning.has_value());
    }

    TEST_CASE("knee selects ceil(q n) pairs with ties broken by id") {
        std::vector<RegularityReport> reports;
        for (int i = 0; i < 10; ++i) reports.push_back(report("p" + std::to_string(i), i < 5 ? 0.1 : 0.05));
        const auto sel = knee_select(reports, 0.2);
        REQUIRE(sel.pairs.size() == 2);
        CHECK(sel.pairs[0].second == "p0");
        CHECK(sel.pairs[1].second == "p1");
        CHECK_FALSE(sel.warning.has_value());
        CHECK(reports[0].is_regular_knee);
        CHECK_FALSE(reports[2].is_regular_knee);

        for (std::size_t n : {1u, 3u, 7u, 11u, 50u}) {
            std::vector<RegularityReport> rs;
            for (std::size_t i = 0; i < n; ++i) rs.push_back(report("q" + std::to_string(i), 0.01 * double(i)));
            CHECK(knee_select(rs, 0.2).pairs.size() == std::max<std::size_t>(1, std::size_t(std::ceil(0.2 * n))));
        }
    }

    TEST_CASE("a small cohort still selects its maximum, with a warning") {
        std::vector<RegularityReport> reports{report("b", 0.1), report("c", 0.3)};
        const auto sel = knee_select(reports, 0.2);
        REQUIRE(sel.pairs.size() == 1);
        CHECK(sel.pairs[0].second == "c");
        CHECK(sel.warning.has_value());
        CHECK(knee_select({}, 0.2).warning.has_value());
    }

    TEST_CASE("selection parameters are validated") {
        std::vector<RegularityReport> reports{report("b", 0.1)};
        CHECK_THROWS_AS((void)knee_select(reports, 0.0), ContractViolation);
        CHECK_THROWS_AS((void)knee_select(reports, 1.0), ContractViolation);
        CHECK_THROWS_AS((void)top3_select(reports, 0.0), ContractViolation);
        CHECK_THROWS_AS((void)top3_select(reports, 1.0), ContractViolation);
    }

    TEST_CASE("raising the top-3 threshold never adds pairs") {
        std::mt19937_64 rng(53);
        std::uniform_real_distribution<double> u(0.0, 0.6);
        std::vector<RegularityReport> reports;
        for (int i = 0; i < 100; ++i) {
            auto r = report("p" + std::to_string(i), 0.0);
            r.top3_share = u(rng);
            reports.push_back(r);
        }
        std::size_t previous = reports.size();
        for (double t = 0.05; t < 0.95; t += 0.05) {
            const auto n = top3_select(reports, t).pairs.size();
            CHECK(n <= previous);
            previous = n;
        }
    }

    TEST_CASE("report CSV round trip") {
        RegularityReport r;
        r.pair = {"a", "b"};
        r.rate = 0.140625;
        r.top_component = 18;
        r.top_share = 0.0625;
        r.top3_share = 0.125;
        r.is_regular_knee = true;
        std::ostringstream out;
        write_regularity_csv(out, std::vector<RegularityReport>{r});
        CHECK(out.str() == std::string(kRegularityHeader) + "\na,b,0.140625,18,0.0625,0.125,1,0\n");
        std::istringstream in(out.str());
        const auto back = read_regularity_csv(in);
        REQUIRE(back.size() == 1);
        CHECK(back[0].pair == r.pair);
        CHECK(back[0].top_component == 18);
        CHECK(back[0].is_regular_knee);
        CHECK_FALSE(back[0].is_regular_top3);
    }

    TEST_CASE("CDF CSV layout") {
        std::vector<std::pair<std::string, EmpiricalCdf>> cdfs{{"all", EmpiricalCdf{{{0.25, 0.5}, {0.5, 1.0}}, {}}}};
        std::ostringstream out;
        write_cdf_csv(out, cdfs);
        CHECK(out.str() == "cohort,top_share,cum_fraction\nall,0.25,0.5\nall,0.5,1\n");
    }
}
