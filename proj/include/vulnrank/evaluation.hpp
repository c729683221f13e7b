#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vulnrank/date.hpp"
#include "vulnrank/kgraph.hpp"
#include "vulnrank/ranking.hpp"
#include "vulnrank/stats.hpp"

namespace vulnrank {

class EvaluationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// sum_{i=1}^{min(k,n)} (2^g_i - 1) / log2(i + 1). Throws for k < 1.
double dcg_at_k(std::span<const int> gains, int k);

struct NdcgResult {
    int k{0};
    double dcg{0.0};
    double idcg{0.0};
    double ndcg{1.0};
};

// `gains` in presentation order; the ideal ordering is the same gains sorted
// descending. An all-zero or empty list scores 1.0.
NdcgResult ndcg_from_gains(std::span<const int> gains, int k);

// Gains are the ideal list's scores looked up by CVE-ID along the policy
// order. Throws when the two lists cover different CVEs.
NdcgResult ndcg_at_k(const RankedList& policy_list, const RankedList& ideal_list, int k);

// Throws on empty input.
double weekly_average_ndcg(std::span<const double> weekly);

enum class Severity { None, Low, Medium, High, Critical };
std::string_view to_string(Severity s);

struct CostModel {
    double low{0.25};
    double medium{1.0};
    double high{1.5};
    double critical{3.0};

    double units(Severity s) const;
};

// CVSS v3 qualitative bands; 0.0 is None. Throws outside [0,10].
Severity severity_band(double cvss);

// Units for the top min(k, n) items; a missing base score costs nothing.
double patch_cost(const RankedList& list, int k, const CostModel& model = {});

struct WeeklyCost {
    IsoWeek week;
    double cost{0.0};
};

// Sum of the weekly costs whose ISO year is `year`.
double annualized_cost(std::span<const WeeklyCost> weekly, int year);

// Policies evaluated per week. Each threat policy is judged against the ideal
// built from the same bit layout; the CVSS baseline is judged against both.
struct Judgement {
    std::string label;
    Policy policy;
    IdealMode ideal;
};
std::vector<Judgement> default_judgements();

struct WeekResult {
    std::string org;
    IsoWeek week;
    std::size_t cohort_size{0};
    // label -> nDCG@K for K = 1..max_k
    std::map<std::string, std::vector<double>> ndcg;
    // policy name -> top-k patch cost
    std::map<std::string, double> cost;
};

struct NdcgCurveRow {
    std::string org;
    std::string policy;
    int year{0};
    int k{0};
    double mean_ndcg{0.0};
    std::size_t n_observations{0};
};

struct CostRow {
    std::string org;
    std::string policy;
    int year{0};
    double cost_units{0.0};
};

struct SavingsRow {
    std::string org;
    int year{0};
    std::string policy;
    double baseline_units{0.0};
    double policy_units{0.0};
    double savings_units{0.0};
    std::optional<double> savings_pct;
};

struct TTestRow {
    std::string org;
    std::string metric;
    std::string policy_a;
    std::string policy_b;
    TTestResult result;
};

struct EvaluationReport {
    std::vector<WeekResult> weeks;
    std::vector<NdcgCurveRow> ndcg_by_k;
    std::vector<CostRow> cost;
    std::vector<SavingsRow> savings;
    std::vector<TTestRow> ttests;
    std::vector<std::string> warnings;
    // Cutoff used for the weekly table, costs and t-tests.
    int k{20};
};

struct EvaluationOptions {
    int k{20};
    int max_k{100};
    CostModel cost_model{};
};

WeekResult evaluate_week(const PropertyGraph& graph, const OrgContext& org, const WeeklyCohort& cohort,
                         const PolicyConfig& config, const EvaluationOptions& options);

// Evaluates every cohort and appends the per-org rows to `report`.
void evaluate_org(const PropertyGraph& graph, const OrgContext& org, std::span<const WeeklyCohort> cohorts,
                  const PolicyConfig& config, const EvaluationOptions& options, EvaluationReport& report);

// org,policy,year,k,mean_ndcg,n_observations
void write_ndcg_by_k_csv(std::ostream& out, const EvaluationReport& report);
// org,policy,year,cost_units
void write_cost_csv(std::ostream& out, const EvaluationReport& report);
// org,year,policy,baseline_units,policy_units,savings_units,savings_pct
void write_savings_csv(std::ostream& out, const EvaluationReport& report);
// org,policy_a,policy_b,n,t,df,p_one,p_two  (metric selects ndcg or cost rows)
void write_ttest_csv(std::ostream& out, const EvaluationReport& report, std::string_view metric);
// org,iso_week,cohort_size,<label>... with nDCG at the report cutoff
void write_weekly_ndcg_csv(std::ostream& out, const EvaluationReport& report);

}  // namespace vulnrank
