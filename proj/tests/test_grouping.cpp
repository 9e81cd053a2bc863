#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "encounterlens/grouping.hpp"
#include "encounterlens/ids.hpp"

using namespace encounterlens;

namespace {

const RateBucket& bucket_holding(const std::vector<RateBucket>& buckets, const std::string& id) {
    for (const auto& b : buckets) {
        if (std::find(b.members.begin(), b.members.end(), id) != b.members.end()) return b;
    }
    throw std::logic_error("id not bucketed: " + id);
}

}  // namespace

TEST_SUITE("grouping") {
    TEST_CASE("rate 0.15 lands in [0.1, 0.2)") {
        const std::vector<double> edges{0.1, 0.2, 0.5, 0.6};
        const auto buckets = bucket_by_rate({{"p", 0.15}}, edges);
        const auto& b = bucket_holding(buckets, "p");
        CHECK(b.lower == 0.1);
        CHECK(b.upper == 0.2);
    }

    TEST_CASE("implicit bottom and closed top buckets") {
        const auto buckets = bucket_by_rate({{"zero", 0.0}, {"one", 1.0}, {"edge", 0.2}}, default_bucket_edges());
        CHECK(buckets.size() == 10);
        CHECK(bucket_holding(buckets, "zero").lower == 0.0);
        CHECK(bucket_holding(buckets, "zero").upper == 0.1);
        CHECK(bucket_holding(buckets, "one").lower == 0.9);
        CHECK(bucket_holding(buckets, "one").closed_top);
        CHECK(bucket_holding(buckets, "edge").lower == 0.2);
    }

    TEST_CASE("bad rates and edges are contract violations") {
        CHECK_THROWS_AS((void)bucket_by_rate({{"p", 1.5}}, default_bucket_edges()), ContractViolation);
        CHECK_THROWS_AS((void)bucket_by_rate({{"p", -0.1}}, default_bucket_edges()), ContractViolation);
        const std::vector<double> unsorted{0.5, 0.2};
        CHECK_THROWS_AS((void)bucket_by_rate({}, unsorted), ContractViolation);
        const std::vector<double> outside{0.5, 1.5};
        CHECK_THROWS_AS((void)bucket_by_rate({}, outside), ContractViolation);
    }

    TEST_CASE("1000 random rates form a partition") {
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::map<std::string, double> rates;
        for (int i = 0; i < 1000; ++i) rates["id" + std::to_string(i)] = u(rng);
        rates["id0"] = 1.0;
        const auto buckets = bucket_by_rate(rates, default_bucket_edges());
        std::size_t total = 0;
        std::set<std::string> seen;
        for (const auto& b : buckets) {
            total += b.members.size();
            for (const auto& id : b.members) {
                CHECK(b.contains(rates.at(id)));
                CHECK(seen.insert(id).second);
            }
        }
        CHECK(total == 1000);
    }

    TEST_CASE("bucketing ignores insertion order") {
        std::map<std::string, double> a{{"x", 0.3}, {"y", 0.35}, {"z", 0.7}};
        std::map<std::string, double> b;
        b["z"] = 0.7;
        b["y"] = 0.35;
        b["x"] = 0.3;
        const auto ba = bucket_by_rate(a, default_bucket_edges());
        const auto bb = bucket_by_rate(b, default_bucket_edges());
        for (std::size_t i = 0; i < ba.size(); ++i) CHECK(ba[i].members == bb[i].members);
    }

    TEST_CASE("cohorts follow the default ranges") {
        const std::map<std::string, double> rates{{"weekly", 18.0 / 128}, {"alt", 0.5}, {"hour", 0.25}, {"x", 0.05}};
        const auto buckets = bucket_by_rate(rates, default_bucket_edges());
        CHECK(cohort(buckets, CohortLabel::rare).members == std::vector<std::string>{"weekly"});
        CHECK(cohort(buckets, CohortLabel::frequent).members == std::vector<std::string>{"alt"});
        CHECK(cohort(buckets, CohortLabel::hourly).members == std::vector<std::string>{"hour"});
        CHECK(cohort(buckets, CohortLabel::rare, CohortRange{0.0, 0.1}).members == std::vector<std::string>{"x"});
    }

    TEST_CASE("cohort ranges may span buckets") {
        const std::map<std::string, double> rates{{"a", 0.15}, {"b", 0.25}, {"c", 0.35}};
        const auto buckets = bucket_by_rate(rates, default_bucket_edges());
        CHECK(cohort(buckets, "wide", CohortRange{0.1, 0.3}).members == std::vector<std::string>{"a", "b"});
    }

    TEST_CASE("an empty cohort carries a warning") {
        const auto buckets = bucket_by_rate({{"a", 0.01}, {"b", 0.05}}, default_bucket_edges());
        const auto c = cohort(buckets, CohortLabel::rare);
        CHECK(c.empty());
        REQUIRE(c.warning.has_value());
        CHECK(c.warning->find("rare") != std::string::npos);
    }

    TEST_CASE("misaligned cohort ranges are rejected") {
        const auto buckets = bucket_by_rate({}, default_bucket_edges());
        CHECK_THROWS_AS((void)cohort(buckets, "odd", CohortRange{0.15, 0.2}), ContractViolation);
        CHECK_THROWS_AS((void)cohort(buckets, "empty", CohortRange{0.2, 0.2}), ContractViolation);
    }

    TEST_CASE("manifest round trip") {
        const std::map<std::string, double> rates{{"a|b", 0.125}, {"a|c", 0.5}};
        const auto buckets = bucket_by_rate(rates, default_bucket_edges());
        std::ostringstream out;
        write_cohort_manifest(out, rates, buckets);
        CHECK(out.str() == "id,rate,bucket_lower,bucket_upper\na|b,0.125,0.1,0.2\na|c,0.5,0.5,0.6\n");
        std::istringstream in(out.str());
        CHECK(read_cohort_manifest(in) == rates);
        std::istringstream bad("id,rate,bucket_lower,bucket_upper\na|b,x,0,1\n");
        CHECK_THROWS_AS((void)read_cohort_manifest(bad), SchemaError);
    }
}
