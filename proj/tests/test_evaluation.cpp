#include <doctest.h>

#include <sstream>

#include "world.hpp"
#include "vulnrank/evaluation.hpp"

using namespace vulnrank;

namespace {

RankedList list_of(std::vector<std::pair<std::string, double>> scored, Policy policy = Policy::AptThreat)
{
    std::vector<ScoredCve> items;
    for (auto& [id, score] : scored) {
        items.push_back({id, score, score, ""});
    }
    return rank_scored("X", policy, {2021, 47}, std::move(items));
}

std::string report_text(const EvaluationReport& r)
{
    std::ostringstream out;
    write_ndcg_by_k_csv(out, r);
    write_weekly_ndcg_csv(out, r);
    write_cost_csv(out, r);
    write_savings_csv(out, r);
    write_ttest_csv(out, r, "ndcg");
    write_ttest_csv(out, r, "cost");
    return out.str();
}

EvaluationReport odu_report(int max_k = 100)
{
    const auto& w = testing::odu_world();
    const auto org = *OrgContext::from_graph(w.graph(), "ODU");
    const auto cohorts = generate_candidates(w.graph(), org, w.config.date_range);
    EvaluationReport report;
    EvaluationOptions options;
    options.max_k = max_k;
    evaluate_org(w.graph(), org, cohorts, w.config.policy, options, report);
    return report;
}

}  // namespace

TEST_CASE("dcg")
{
    const std::vector<int> three{3};
    CHECK(dcg_at_k(three, 1) == 7.0);
    const std::vector<int> three_two{3, 2};
    CHECK(dcg_at_k(three_two, 2) == doctest::Approx(8.89278926).epsilon(1e-9));
    CHECK(dcg_at_k(three_two, 2) == 7.0 + 3.0 / std::log2(3.0));
    const std::vector<int> zeros{0, 0, 0};
    CHECK(dcg_at_k(zeros, 1) == 0.0);
    CHECK(dcg_at_k(zeros, 10) == 0.0);
    CHECK(dcg_at_k(three_two, 100) == dcg_at_k(three_two, 2));
    CHECK_THROWS_AS(dcg_at_k(three, 0), EvaluationError);
}

TEST_CASE("ndcg")
{
    const std::vector<int> ideal{6, 2, 1};
    CHECK(ndcg_from_gains(ideal, 3).ndcg == 1.0);
    const std::vector<int> reversed{1, 2, 6};
    // Independent evaluation: (1 + 3/log2 3 + 63/2) / (63 + 3/log2 3 + 1/2).
    CHECK(ndcg_from_gains(reversed, 3).ndcg == doctest::Approx(0.5259416160334413).epsilon(1e-15));
    const std::vector<int> zeros{0, 0};
    CHECK(ndcg_from_gains(zeros, 2).ndcg == 1.0);
    CHECK(ndcg_from_gains({}, 5).ndcg == 1.0);
}

TEST_CASE("ndcg matches a brute-force normalizer")
{
    testing::Gen gen(42);
    for (int i = 0; i < 500; ++i) {
        auto gains = gen.gains(6, 6);
        const int k = gen.integer(1, 8);
        REQUIRE(ndcg_from_gains(gains, k).ndcg == doctest::Approx(testing::brute_force_ndcg(gains, k)).epsilon(1e-12));
        std::sort(gains.rbegin(), gains.rend());
        REQUIRE(ndcg_from_gains(gains, k).ndcg == 1.0);
    }
}

TEST_CASE("ndcg stays in [0,1] and swapping an adjacent inversion never hurts")
{
    testing::Gen gen(8);
    for (int i = 0; i < 2000; ++i) {
        auto gains = gen.gains(30, 6);
        const int k = gen.integer(1, 35);
        const double before = ndcg_from_gains(gains, k).ndcg;
        REQUIRE(before >= 0.0);
        REQUIRE(before <= 1.0 + 1e-12);
        for (std::size_t j = 0; j + 1 < gains.size(); ++j) {
            if (gains[j] < gains[j + 1]) {
                std::swap(gains[j], gains[j + 1]);
                REQUIRE(ndcg_from_gains(gains, k).ndcg >= before - 1e-12);
                break;
            }
        }
    }
}

TEST_CASE("ndcg from ranked lists uses ideal scores as gains")
{
    const auto ideal = list_of({{"CVE-1", 6}, {"CVE-2", 2}, {"CVE-3", 1}}, Policy::Ideal);
    const auto policy = list_of({{"CVE-3", 9}, {"CVE-2", 5}, {"CVE-1", 1}});
    CHECK(ndcg_at_k(policy, ideal, 3).ndcg == doctest::Approx(0.5259416160334413).epsilon(1e-15));
    CHECK(ndcg_at_k(ideal, ideal, 3).ndcg == 1.0);
    const auto other = list_of({{"CVE-9", 1}, {"CVE-2", 5}, {"CVE-1", 1}});
    CHECK_THROWS_AS(ndcg_at_k(other, ideal, 3), EvaluationError);
    const auto shorter = list_of({{"CVE-1", 1}});
    CHECK_THROWS_AS(ndcg_at_k(shorter, ideal, 3), EvaluationError);
}

TEST_CASE("weekly average")
{
    const std::vector<double> ones{1.0, 1.0};
    CHECK(weekly_average_ndcg(ones) == 1.0);
    const std::vector<double> mixed{0.8, 1.0};
    CHECK(weekly_average_ndcg(mixed) == doctest::Approx(0.9).epsilon(1e-15));
    const std::vector<double> ten{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    CHECK(std::abs(weekly_average_ndcg(ten) - 0.55) < 1e-12);
    CHECK_THROWS_AS(weekly_average_ndcg(std::vector<double>{}), EvaluationError);
}

TEST_CASE("severity bands and units")
{
    const CostModel m;
    CHECK(severity_band(6.1) == Severity::Medium);
    CHECK(m.units(severity_band(6.1)) == 1.0);
    CHECK(severity_band(9.8) == Severity::Critical);
    CHECK(m.units(severity_band(9.8)) == 3.0);
    CHECK(severity_band(0.0) == Severity::None);
    CHECK(m.units(Severity::None) == 0.0);
    CHECK(severity_band(0.1) == Severity::Low);
    CHECK(severity_band(3.9) == Severity::Low);
    CHECK(severity_band(4.0) == Severity::Medium);
    CHECK(severity_band(6.9) == Severity::Medium);
    CHECK(severity_band(7.0) == Severity::High);
    CHECK(severity_band(8.9) == Severity::High);
    CHECK(severity_band(9.0) == Severity::Critical);
    CHECK(severity_band(10.0) == Severity::Critical);
    CHECK_THROWS_AS(severity_band(10.1), EvaluationError);
    CHECK_THROWS_AS(severity_band(-0.1), EvaluationError);
}

TEST_CASE("patch cost")
{
    std::vector<std::pair<std::string, double>> twenty;
    for (int i = 0; i < 20; ++i) {
        twenty.emplace_back("CVE-2021-" + std::to_string(100 + i), 8.8);
    }
    CHECK(patch_cost(list_of(twenty, Policy::CvssBase), 20) == 30.0);
    CHECK(patch_cost(list_of(twenty, Policy::CvssBase), 5) == 7.5);

    // 9.8 + 9.6 + 6.1 + 4.3 + 3.1 + 0.0 -> 3 + 3 + 1 + 1 + 0.25 + 0
    const auto mixed = list_of({{"A", 9.8}, {"B", 9.6}, {"C", 6.1}, {"D", 4.3}, {"E", 3.1}, {"F", 0.0}},
                               Policy::CvssBase);
    CHECK(patch_cost(mixed, 20) == 8.25);
    CHECK(patch_cost(mixed, 2) == 6.0);

    auto missing = mixed;
    missing.items[0].cvss_base.reset();
    CHECK(patch_cost(missing, 20) == 5.25);
}

TEST_CASE("annualized cost")
{
    const std::vector<WeeklyCost> weeks{{{2021, 1}, 30.0}, {{2021, 2}, 30.0}, {{2020, 53}, 7.0}};
    CHECK(annualized_cost(weeks, 2021) == 60.0);
    CHECK(annualized_cost(weeks, 2020) == 7.0);
    CHECK(annualized_cost(weeks, 2019) == 0.0);
}

TEST_CASE("evaluation report on the shipped fixture")
{
    const auto report = odu_report();
    REQUIRE(report.weeks.size() == 1);
    CHECK(report.weeks[0].cohort_size == 39);
    CHECK(report.ndcg_by_k.size() == default_judgements().size() * 100);
    for (const auto& row : report.ndcg_by_k) {
        REQUIRE(row.n_observations == 1);
        REQUIRE(row.mean_ndcg >= 0.0);
        REQUIRE(row.mean_ndcg <= 1.0 + 1e-12);
    }
    CHECK(report.weeks[0].ndcg.at("ideal")[19] == 1.0);
    CHECK(report.weeks[0].cost.at("cvss_base") == 36.0);
    CHECK(report.weeks[0].cost.at("apt_threat") == 30.5);
    CHECK(report.ttests.empty());
    CHECK_FALSE(report.warnings.empty());

    const auto short_report = odu_report(10);
    CHECK(short_report.ndcg_by_k.size() == default_judgements().size() * 10);
}

TEST_CASE("evaluation without cohorts is empty but writable")
{
    const auto& w = testing::odu_world();
    const auto org = *OrgContext::from_graph(w.graph(), "ODU");
    EvaluationReport report;
    evaluate_org(w.graph(), org, {}, w.config.policy, {}, report);
    CHECK(report.weeks.empty());
    CHECK(report.ndcg_by_k.empty());
    const auto text = report_text(report);
    CHECK(text.find("org,policy,year,k,mean_ndcg,n_observations\n") == 0);
}

TEST_CASE("evaluation output is deterministic")
{
    CHECK(report_text(odu_report()) == report_text(odu_report()));
}
