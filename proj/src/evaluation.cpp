#include "vulnrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "vulnrank/csv.hpp"

namespace vulnrank {

namespace {

const std::vector<std::string> kCostPolicies{"cvss_base", "apt_threat", "general_threat", "ideal"};

struct PairSpec {
    std::string a;
    std::string b;
};

// Threat policy first so that a positive t favours it.
const std::vector<PairSpec> kNdcgPairs{{"apt_threat", "cvss_base"}, {"general_threat", "cvss_base@general"}};
// Baseline first so that a positive t means the baseline costs more.
const std::vector<PairSpec> kCostPairs{{"cvss_base", "apt_threat"}, {"cvss_base", "general_threat"}};

std::string fmt(double v) { return csv::format_number(v); }

}  // namespace

double dcg_at_k(std::span<const int> gains, int k)
{
    if (k < 1) {
        throw EvaluationError("dcg_at_k: k must be >= 1, got " + std::to_string(k));
    }
    const auto n = std::min(gains.size(), static_cast<std::size_t>(k));
    double dcg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gains[i] < 0) {
            throw EvaluationError("dcg_at_k: negative gain");
        }
        dcg += (std::exp2(gains[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg;
}

NdcgResult ndcg_from_gains(std::span<const int> gains, int k)
{
    std::vector<int> ideal(gains.begin(), gains.end());
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    NdcgResult r{k, dcg_at_k(gains, k), dcg_at_k(ideal, k), 1.0};
    if (r.idcg > 0.0) {
        r.ndcg = r.dcg / r.idcg;
    }
    return r;
}

NdcgResult ndcg_at_k(const RankedList& policy_list, const RankedList& ideal_list, int k)
{
    if (policy_list.items.size() != ideal_list.items.size()) {
        throw EvaluationError("ndcg_at_k: lists cover different cohorts");
    }
    std::unordered_map<std::string_view, int> relevance;
    for (const auto& item : ideal_list.items) {
        relevance.emplace(item.cve_id, static_cast<int>(std::lround(item.score)));
    }
    std::vector<int> gains;
    gains.reserve(policy_list.items.size());
    for (const auto& item : policy_list.items) {
        auto it = relevance.find(item.cve_id);
        if (it == relevance.end()) {
            throw EvaluationError("ndcg_at_k: " + item.cve_id + " missing from the ideal list");
        }
        gains.push_back(it->second);
    }
    return ndcg_from_gains(gains, k);
}

double weekly_average_ndcg(std::span<const double> weekly)
{
    if (weekly.empty()) {
        throw EvaluationError("weekly_average_ndcg: no weekly results");
    }
    return mean(weekly);
}

std::string_view to_string(Severity s)
{
    switch (s) {
    case Severity::None:
        return "None";
    case Severity::Low:
        return "Low";
    case Severity::Medium:
        return "Medium";
    case Severity::High:
        return "High";
    case Severity::Critical:
        return "Critical";
    }
    return "None";
}

double CostModel::units(Severity s) const
{
    switch (s) {
    case Severity::None:
        return 0.0;
    case Severity::Low:
        return low;
    case Severity::Medium:
        return medium;
    case Severity::High:
        return high;
    case Severity::Critical:
        return critical;
    }
    return 0.0;
}

Severity severity_band(double cvss)
{
    if (!(cvss >= 0.0 && cvss <= 10.0)) {
        throw EvaluationError("severity_band: CVSS score out of [0,10]");
    }
    // Scores carry one decimal; compare in tenths to dodge binary fractions.
    const auto tenths = std::lround(cvss * 10.0);
    if (tenths == 0) {
        return Severity::None;
    }
    if (tenths < 40) {
        return Severity::Low;
    }
    if (tenths < 70) {
        return Severity::Medium;
    }
    if (tenths < 90) {
        return Severity::High;
    }
    return Severity::Critical;
}

double patch_cost(const RankedList& list, int k, const CostModel& model)
{
    if (k < 1) {
        throw EvaluationError("patch_cost: k must be >= 1");
    }
    const auto n = std::min(list.items.size(), static_cast<std::size_t>(k));
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto& cvss = list.items[i].cvss_base) {
            cost += model.units(severity_band(*cvss));
        }
    }
    return cost;
}

double annualized_cost(std::span<const WeeklyCost> weekly, int year)
{
    double total = 0.0;
    for (const auto& w : weekly) {
        if (w.week.year == year) {
            total += w.cost;
        }
    }
    return total;
}

std::vector<Judgement> default_judgements()
{
    return {
        {"cvss_base", Policy::CvssBase, IdealMode::Apt},
        {"apt_threat", Policy::AptThreat, IdealMode::Apt},
        {"cvss_base@general", Policy::CvssBase, IdealMode::General},
        {"general_threat", Policy::GeneralThreat, IdealMode::General},
        {"ideal", Policy::Ideal, IdealMode::Apt},
    };
}

WeekResult evaluate_week(const PropertyGraph& graph, const OrgContext& org, const WeeklyCohort& cohort,
                         const PolicyConfig& config, const EvaluationOptions& options)
{
    std::vector<FeatureRecord> features;
    features.reserve(cohort.cve_ids.size());
    for (const auto& id : cohort.cve_ids) {
        features.push_back(extract_features(graph, org, id, config));
    }
    auto ranked = [&](Policy policy, IdealMode mode) {
        auto cfg = config;
        cfg.ideal_mode = mode;
        std::vector<ScoredCve> scored;
        for (const auto& f : features) {
            scored.push_back(score_cve(f, policy, cfg));
        }
        return rank_scored(cohort.org_id, policy, cohort.week, std::move(scored));
    };
    const RankedList ideal_apt = ranked(Policy::Ideal, IdealMode::Apt);
    const RankedList ideal_general = ranked(Policy::Ideal, IdealMode::General);
    const std::map<std::string, RankedList> lists{
        {"cvss_base", ranked(Policy::CvssBase, config.ideal_mode)},
        {"apt_threat", ranked(Policy::AptThreat, config.ideal_mode)},
        {"general_threat", ranked(Policy::GeneralThreat, config.ideal_mode)},
    };

    WeekResult week{cohort.org_id, cohort.week, cohort.cve_ids.size(), {}, {}};
    for (const auto& j : default_judgements()) {
        const auto& ideal = j.ideal == IdealMode::Apt ? ideal_apt : ideal_general;
        const auto& list = j.policy == Policy::Ideal ? ideal : lists.at(std::string(to_string(j.policy)));
        auto& curve = week.ndcg[j.label];
        for (int k = 1; k <= options.max_k; ++k) {
            curve.push_back(ndcg_at_k(list, ideal, k).ndcg);
        }
    }
    for (const auto& [name, list] : lists) {
        week.cost[name] = patch_cost(list, options.k, options.cost_model);
    }
    week.cost["ideal"] =
        patch_cost(config.ideal_mode == IdealMode::Apt ? ideal_apt : ideal_general, options.k, options.cost_model);
    return week;
}

void evaluate_org(const PropertyGraph& graph, const OrgContext& org, std::span<const WeeklyCohort> cohorts,
                  const PolicyConfig& config, const EvaluationOptions& options, EvaluationReport& report)
{
    report.k = options.k;
    std::vector<WeekResult> weeks;
    for (const auto& cohort : cohorts) {
        weeks.push_back(evaluate_week(graph, org, cohort, config, options));
    }
    std::set<int> years;
    for (const auto& w : weeks) {
        years.insert(w.week.year);
    }
    const auto judgements = default_judgements();
    for (int year : years) {
        std::vector<const WeekResult*> in_year;
        for (const auto& w : weeks) {
            if (w.week.year == year) {
                in_year.push_back(&w);
            }
        }
        for (const auto& j : judgements) {
            for (int k = 1; k <= options.max_k; ++k) {
                std::vector<double> values;
                for (const auto* w : in_year) {
                    values.push_back(w->ndcg.at(j.label)[static_cast<std::size_t>(k - 1)]);
                }
                report.ndcg_by_k.push_back({org.org_id, j.label, year, k, mean(values), values.size()});
            }
        }
        std::map<std::string, double> totals;
        for (const auto& name : kCostPolicies) {
            std::vector<WeeklyCost> costs;
            for (const auto* w : in_year) {
                costs.push_back({w->week, w->cost.at(name)});
            }
            totals[name] = annualized_cost(costs, year);
            report.cost.push_back({org.org_id, name, year, totals[name]});
        }
        const double baseline = totals.at("cvss_base");
        for (const auto& name : kCostPolicies) {
            if (name == "cvss_base") {
                continue;
            }
            SavingsRow row{org.org_id, year, name, baseline, totals.at(name), baseline - totals.at(name), {}};
            if (baseline > 0.0) {
                row.savings_pct = 100.0 * row.savings_units / baseline;
            }
            report.savings.push_back(row);
        }
    }

    const auto cutoff = static_cast<std::size_t>(std::min(options.k, options.max_k) - 1);
    auto run_pairs = [&](const std::vector<PairSpec>& pairs, const std::string& metric, auto value) {
        for (const auto& p : pairs) {
            std::vector<double> a;
            std::vector<double> b;
            for (const auto& w : weeks) {
                a.push_back(value(w, p.a));
                b.push_back(value(w, p.b));
            }
            try {
                report.ttests.push_back({org.org_id, metric, p.a, p.b, paired_t_test(a, b)});
            } catch (const StatsError& e) {
                report.warnings.push_back(org.org_id + " " + metric + " " + p.a + " vs " + p.b + ": " + e.what());
            }
        }
    };
    run_pairs(kNdcgPairs, "ndcg", [&](const WeekResult& w, const std::string& label) {
        return w.ndcg.at(label)[cutoff];
    });
    run_pairs(kCostPairs, "cost", [](const WeekResult& w, const std::string& name) { return w.cost.at(name); });

    report.weeks.insert(report.weeks.end(), std::make_move_iterator(weeks.begin()),
                        std::make_move_iterator(weeks.end()));
}

void write_ndcg_by_k_csv(std::ostream& out, const EvaluationReport& report)
{
    out << "org,policy,year,k,mean_ndcg,n_observations\n";
    for (const auto& r : report.ndcg_by_k) {
        out << csv::join({r.org, r.policy, std::to_string(r.year), std::to_string(r.k), fmt(r.mean_ndcg),
                          std::to_string(r.n_observations)})
            << '\n';
    }
}

void write_cost_csv(std::ostream& out, const EvaluationReport& report)
{
    out << "org,policy,year,cost_units\n";
    for (const auto& r : report.cost) {
        out << csv::join({r.org, r.policy, std::to_string(r.year), fmt(r.cost_units)}) << '\n';
    }
}

void write_savings_csv(std::ostream& out, const EvaluationReport& report)
{
    out << "org,year,policy,baseline_units,policy_units,savings_units,savings_pct\n";
    for (const auto& r : report.savings) {
        out << csv::join({r.org, std::to_string(r.year), r.policy, fmt(r.baseline_units), fmt(r.policy_units),
                          fmt(r.savings_units), r.savings_pct ? fmt(*r.savings_pct) : ""})
            << '\n';
    }
}

void write_ttest_csv(std::ostream& out, const EvaluationReport& report, std::string_view metric)
{
    out << "org,policy_a,policy_b,n,t,df,p_one,p_two\n";
    for (const auto& r : report.ttests) {
        if (r.metric != metric) {
            continue;
        }
        out << csv::join({r.org, r.policy_a, r.policy_b, std::to_string(r.result.n), fmt(r.result.t),
                          fmt(r.result.df), fmt(r.result.p_one_sided), fmt(r.result.p_two_sided)})
            << '\n';
    }
}

void write_weekly_ndcg_csv(std::ostream& out, const EvaluationReport& report)
{
    const auto judgements = default_judgements();
    std::vector<std::string> header{"org", "iso_week", "cohort_size"};
    for (const auto& j : judgements) {
        header.push_back(j.label);
    }
    out << csv::join(header) << '\n';
    for (const auto& w : report.weeks) {
        std::vector<std::string> row{w.org, w.week.to_string(), std::to_string(w.cohort_size)};
        for (const auto& j : judgements) {
            const auto& curve = w.ndcg.at(j.label);
            row.push_back(fmt(curve[std::min(curve.size(), static_cast<std::size_t>(report.k)) - 1]));
        }
        out << csv::join(row) << '\n';
    }
}

}  // namespace vulnrank
