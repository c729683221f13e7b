#pragma once

#include "support.hpp"

#include "vulnrank/enrich.hpp"
#include "vulnrank/profiles.hpp"
#include "vulnrank/ranking.hpp"
#include "vulnrank/records.hpp"

namespace testing {

// Identifiers come from small pools so that cross-references sometimes hit
// an existing record and sometimes dangle.
class RecordGen {
public:
    explicit RecordGen(std::uint64_t seed) : g_{seed} {}

    Gen& gen() { return g_; }

    std::string cve_id() { return "CVE-2021-" + std::to_string(g_.integer(10000, 10000 + pool_)); }
    std::string cwe_id() { return "CWE-" + std::to_string(g_.integer(1, pool_ / 4 + 1)); }
    std::string capec_id() { return "CAPEC-" + std::to_string(g_.integer(1, pool_ / 4 + 1)); }
    std::string technique_id() { return "T" + std::to_string(g_.integer(1000, 1000 + pool_ / 4)); }
    std::string tactic_id() { return "TA" + pad(g_.integer(1, 14)); }
    std::string group_id() { return "G" + pad(g_.integer(1, pool_ / 8 + 1)); }
    std::string cpe_id()
    {
        return "cpe:2.3:a:" + g_.pick(vendors_) + ":" + g_.pick(products_) + ":" + std::to_string(g_.integer(1, 5)) +
               ":*:*:*:*:*:*:*";
    }
    std::string url() { return "https://example.org/advisory/" + std::to_string(g_.integer(1, pool_ / 4 + 1)); }

    std::string text()
    {
        static const std::vector<std::string> words{"alpha", "beta",   "gamma", "comma, inside", "quote \"q\"",
                                                    "tab\there", "naïve", "line\nbreak", "\\slash"};
        std::string s;
        for (int i = g_.integer(0, 6); i > 0; --i) {
            s += g_.pick(words) + " ";
        }
        return s;
    }

    vulnrank::Date date() { return vulnrank::Date::from_days(g_.integer(17000, 19500)); }

    template <typename F>
    auto many(int lo, int hi, F f)
    {
        std::vector<decltype(f())> v;
        for (int i = g_.integer(lo, hi); i > 0; --i) {
            v.push_back(f());
        }
        return v;
    }

    vulnrank::CveRecord cve()
    {
        vulnrank::CveRecord r;
        r.cve_id = cve_id();
        r.description = text();
        r.published = date();
        r.modified = r.published.plus_days(g_.integer(0, 400));
        if (g_.chance(0.85)) {
            r.cvss_base = g_.integer(0, 100) / 10.0;
        }
        if (g_.chance(0.8)) {
            r.attack_vector = static_cast<vulnrank::AttackVector>(g_.integer(0, 3));
        }
        r.cwe_ids = many(0, 3, [&] { return cwe_id(); });
        r.affected_cpes = many(0, 3, [&] { return cpe_id(); });
        r.reference_urls = many(0, 2, [&] { return url(); });
        return r;
    }

    vulnrank::CpeEntry cpe()
    {
        vulnrank::CpeEntry e;
        e.cpe_id = cpe_id();
        const auto parts = split(e.cpe_id);
        e.vendor = parts[3];
        e.product = parts[4];
        e.deprecated = g_.chance(0.1);
        e.language_tag = g_.chance(0.9) ? "en-US" : "ja-JP";
        return e;
    }

    vulnrank::CweEntry cwe()
    {
        vulnrank::CweEntry e;
        e.cwe_id = cwe_id();
        e.name = text();
        e.technical_impacts = many(0, 3, [&] { return static_cast<vulnrank::TechnicalImpact>(g_.integer(0, 7)); });
        e.related_capecs = many(0, 3, [&] { return capec_id(); });
        return e;
    }

    vulnrank::CapecEntry capec()
    {
        vulnrank::CapecEntry e;
        e.capec_id = capec_id();
        e.name = text();
        e.skill_level = static_cast<vulnrank::SkillLevel>(g_.integer(0, 3));
        e.related_techniques = many(0, 3, [&] { return technique_id(); });
        return e;
    }

    vulnrank::AttackTechnique technique()
    {
        return {technique_id(), text(), many(1, 2, [&] { return tactic_id(); })};
    }

    vulnrank::AttackTactic tactic() { return {tactic_id(), text()}; }

    vulnrank::AttackGroupRaw group()
    {
        return {group_id(), text(), text(), date(), many(0, 4, [&] { return technique_id(); })};
    }

    vulnrank::EpssScore epss() { return {cve_id(), g_.integer(0, 1000) / 1000.0, g_.integer(0, 1000) / 1000.0}; }

    vulnrank::KevEntry kev()
    {
        vulnrank::KevEntry e;
        e.cve_id = cve_id();
        e.vendor_project = text();
        e.product = text();
        e.vulnerability_name = text();
        e.date_added = date();
        e.short_description = text();
        e.required_action = text();
        e.due_date = e.date_added.plus_days(g_.integer(0, 30));
        return e;
    }

    vulnrank::ExploitRef exploit()
    {
        return {g_.integer(1, 60000), many(1, 2, [&] { return cve_id(); })};
    }

    vulnrank::NvdReference reference() { return {url(), text(), many(0, 2, [&] { return text(); })}; }

    // `n` records spread over every kind. Deduplicated (primary keys unique
    // per kind) unless `dedup` is false.
    vulnrank::Snapshot snapshot(int n, bool dedup = true)
    {
        pool_ = std::max(8, n / 3);
        vulnrank::Snapshot s;
        for (int i = 0; i < n; ++i) {
            switch (g_.integer(0, 10)) {
            case 0: s.cves.push_back(cve()); break;
            case 1: s.cpes.push_back(cpe()); break;
            case 2: s.cwes.push_back(cwe()); break;
            case 3: s.capecs.push_back(capec()); break;
            case 4: s.techniques.push_back(technique()); break;
            case 5: s.tactics.push_back(tactic()); break;
            case 6: s.groups.push_back(group()); break;
            case 7: s.epss.push_back(epss()); break;
            case 8: s.kev.push_back(kev()); break;
            case 9: s.exploits.push_back(exploit()); break;
            default: s.references.push_back(reference()); break;
            }
        }
        if (dedup) {
            s.deduplicate();
        }
        return s;
    }

    // Attributions over the vocabulary used by the shipped data.
    vulnrank::GroupAttribution attribution(const std::vector<std::string>& countries,
                                           const std::vector<std::string>& sectors)
    {
        vulnrank::GroupAttribution a;
        a.group_id = group_id();
        a.origin_countries = many(0, 2, [&] { return g_.pick(countries); });
        a.origin_year = g_.integer(1990, 2021);
        a.targeted_countries = many(0, 3, [&] { return g_.pick(countries); });
        a.targeted_sectors = many(0, 3, [&] { return g_.pick(sectors); });
        return a;
    }

    vulnrank::OrganizationProfile profile(const std::vector<std::string>& countries,
                                          const std::vector<std::string>& sectors)
    {
        vulnrank::OrganizationProfile p;
        p.org_id = "ORG" + std::to_string(g_.integer(1, 5));
        p.name = text();
        p.sector = g_.pick(sectors);
        p.sector_scope = {p.sector};
        p.country = g_.pick(countries);
        for (int i = g_.integer(0, 5); i > 0; --i) {
            vulnrank::SoftwareItem item;
            item.vendor = g_.pick(vendors_);
            item.product = g_.pick(products_);
            item.resolved_cpes = many(0, 3, [&] { return cpe_id(); });
            p.software.push_back(item);
        }
        return p;
    }

    // Feature records over a small world so that every bit is hit often.
    vulnrank::FeatureRecord feature_record()
    {
        static const std::vector<std::string> countries{"United States", "China", "Russia", "Iran", "Japan"};
        static const std::vector<std::string> sectors{"Education", "Government Facilities", "Energy"};
        vulnrank::FeatureRecord f;
        f.cve_id = cve_id();
        if (g_.chance(0.9)) {
            f.cvss_base = g_.integer(0, 100) / 10.0;
        }
        if (g_.chance(0.9)) {
            f.attack_vector = static_cast<vulnrank::AttackVector>(g_.integer(0, 3));
        }
        f.capecs = many(0, 3, [&] {
            return vulnrank::CapecFacts{capec_id(), static_cast<vulnrank::SkillLevel>(g_.integer(0, 3)),
                                        g_.chance(0.5)};
        });
        f.groups = many(0, 3, [&] {
            return vulnrank::GroupFacts{group_id(), many(0, 2, [&] { return g_.pick(sectors); }),
                                        many(0, 2, [&] { return g_.pick(countries); }),
                                        many(0, 2, [&] { return g_.pick(countries); })};
        });
        f.technical_impacts =
            many(0, 3, [&] { return static_cast<vulnrank::TechnicalImpact>(g_.integer(0, 7)); });
        f.risk_appetite = g_.integer(0, 100);
        if (g_.chance(0.9)) {
            f.epss_probability = g_.real(0.0, 1.0);
            f.epss_percentile = g_.real(0.0, 1.0);
        }
        f.in_kev = g_.chance(0.2);
        f.in_exploitdb = g_.chance(0.2);
        f.affects_org = g_.chance(0.8);
        f.org_id = "ORG";
        f.sector = g_.pick(sectors);
        f.sector_scope = {f.sector};
        if (f.sector == "Education") {
            f.sector_scope.push_back("Government Facilities");
        }
        f.org_country = g_.pick(countries);
        return f;
    }

    vulnrank::PolicyConfig policy_config()
    {
        static const std::vector<std::string> origins{"China", "Russia", "Iran", "Japan"};
        vulnrank::PolicyConfig c;
        c.origin_countries.clear();
        for (const auto& o : origins) {
            if (g_.chance(0.5)) {
                c.origin_countries.insert(o);
            }
        }
        c.skill_level = g_.chance(0.5) ? vulnrank::AdversarySkill::High : vulnrank::AdversarySkill::Low;
        c.epss_threshold = g_.real(0.0, 1.0);
        c.risk_appetite = g_.integer(0, 100);
        c.ideal_mode = g_.chance(0.5) ? vulnrank::IdealMode::Apt : vulnrank::IdealMode::General;
        return c;
    }

private:
    static std::string pad(int n)
    {
        auto s = std::to_string(n);
        return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
    }

    static std::vector<std::string> split(const std::string& cpe)
    {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : cpe) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        return parts;
    }

    Gen g_;
    int pool_{30};
    std::vector<std::string> vendors_{"google", "zoom", "microsoft", "mozilla"};
    std::vector<std::string> products_{"chrome", "meetings", "office", "firefox"};
};

}  // namespace testing
