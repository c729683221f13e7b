#!/usr/bin/env python3
"""Independent reference computation for the synthetic corpus.

Reads the raw corpus files plus groups_truth.json (group facts as stated in the
descriptions) and recomputes weekly cohorts, policy scores, nDCG@K, top-K patch
cost and paired t-tests without touching the C++ code. Prints JSON.
"""

import csv
import datetime as dt
import json
import math
import pathlib
import re
import sys

from scipy import stats

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data"
CORPUS = ROOT / "synthetic"
K = 20
EPSS_THRESHOLD = 0.876
RISK_APPETITE = 100
ORIGINS = {"China", "Russia", "Iran"}
SKILL = "High"
FAILURE = {"ExecuteUnauthorizedCode", "GainPrivileges", "ModifyData", "BypassProtection"}


def token(s):
    return re.sub(r"[^a-z0-9]", "", s.lower())


def load():
    recs = {"cve": {}, "cpe": [], "cwe": {}, "capec": {}, "exploit": []}
    for line in open(CORPUS / "records.jsonl"):
        r = json.loads(line)
        kind = r["kind"]
        if kind == "cve":
            recs["cve"][r["cve_id"]] = r
        elif kind == "cpe":
            recs["cpe"].append(r)
        elif kind == "cwe":
            recs["cwe"][r["cwe_id"]] = r
        elif kind == "capec":
            recs["capec"][r["capec_id"]] = r
        elif kind == "exploit":
            recs["exploit"].append(r)
    epss = {}
    with open(CORPUS / "epss.csv") as f:
        rows = [l for l in f if not l.startswith("#")]
    for row in csv.DictReader(rows):
        epss[row["cve"]] = (float(row["epss"]), float(row["percentile"]))
    with open(CORPUS / "kev.csv") as f:
        kev = {row["cveID"] for row in csv.DictReader(f)}
    edb = {c for e in recs["exploit"] for c in e["cve_ids"]}
    groups = json.load(open(CORPUS / "groups_truth.json"))
    profile = json.load(open(CORPUS / "syn_edu_profile.json"))
    return recs, epss, kev, edb, groups, profile


def sector_scope(sector):
    parents = {}
    for line in open(ROOT / "vocab" / "sectors.tsv"):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        parents[parts[0]] = parts[1] if len(parts) > 1 else None
    scope = [sector]
    while parents.get(scope[-1]):
        scope.append(parents[scope[-1]])
    return scope


def severity_units(score):
    if score == 0:
        return 0.0
    if score < 4.0:
        return 0.25
    if score < 7.0:
        return 1.0
    if score < 9.0:
        return 1.5
    return 3.0


def dcg(gains, k):
    return sum((2 ** g - 1) / math.log2(i + 2) for i, g in enumerate(gains[:k]))


def ndcg(gains, k):
    ideal = dcg(sorted(gains, reverse=True), k)
    return 1.0 if ideal == 0 else dcg(gains, k) / ideal


def main():
    recs, epss, kev, edb, groups, profile = load()
    org_cpes = set()
    for item in profile["software"]:
        key = (token(item["vendor"]), token(item["product"]))
        for c in recs["cpe"]:
            if not c["deprecated"] and (token(c["vendor"]), token(c["product"])) == key:
                org_cpes.add(c["cpe_id"])
    scope = sector_scope(profile["sector"])
    country = profile["country"]

    weeks = {}
    lo, hi = dt.date(2021, 1, 4), dt.date(2022, 1, 2)
    for cve in recs["cve"].values():
        modified = dt.date.fromisoformat(cve["modified"])
        if lo <= modified <= hi and org_cpes & set(cve["affected_cpes"]):
            y, w, _ = modified.isocalendar()
            weeks.setdefault((y, w), []).append(cve["cve_id"])

    def facts(cve_id):
        cve = recs["cve"][cve_id]
        capecs = [recs["capec"][c] for w in cve["cwe_ids"] for c in recs["cwe"][w]["related_capecs"]]
        techniques = {t for c in capecs for t in c["related_techniques"]}
        used_by = [g for g in groups if techniques & set(g["techniques"])]
        in_sector = [g for g in used_by if set(g["sectors"]) & set(scope)]
        impacts = {i for w in cve["cwe_ids"] for i in recs["cwe"][w]["technical_impacts"]}
        prob, pct = epss.get(cve_id, (None, 0.0))
        net = cve["attack_vector"] == "NETWORK"
        epss_bit = prob is not None and prob >= EPSS_THRESHOLD and pct * 100 >= 100 - RISK_APPETITE
        exploit_bit = cve_id in kev or cve_id in edb
        apt = [net, bool(in_sector), any(country in g["targets"] for g in in_sector),
               any(set(g["origin"]) & ORIGINS for g in in_sector), epss_bit, True]
        general = [net, any(c["skill_level"] == SKILL for c in capecs),
                   any(c["skill_level"] == SKILL and c["related_techniques"] for c in capecs),
                   bool(impacts & FAILURE), epss_bit, True]
        return cve["cvss_base"], apt, general, exploit_bit

    def order(items):
        return [c for _, c in sorted((-s, c) for c, s in items.items())]

    series = {name: [] for name in ("cvss_base", "apt_threat", "cvss_base@general", "general_threat")}
    cost = {name: 0.0 for name in ("cvss_base", "apt_threat", "general_threat", "ideal")}
    cohort_sizes = []
    for key in sorted(weeks):
        ids = weeks[key]
        cohort_sizes.append(len(ids))
        f = {c: facts(c) for c in ids}
        rel = lambda bits: max(1, sum(bits))
        p1 = {c: v[0] for c, v in f.items()}
        p2 = {c: rel(v[1]) for c, v in f.items()}
        p3 = {c: rel(v[2]) for c, v in f.items()}
        ideal_apt = {c: rel(v[1][:4] + [v[3]] + v[1][5:]) for c, v in f.items()}
        ideal_gen = {c: rel(v[2][:4] + [v[3]] + v[2][5:]) for c, v in f.items()}
        o1, o2, o3, oi = order(p1), order(p2), order(p3), order(ideal_apt)
        series["cvss_base"].append(ndcg([ideal_apt[c] for c in o1], K))
        series["apt_threat"].append(ndcg([ideal_apt[c] for c in o2], K))
        series["cvss_base@general"].append(ndcg([ideal_gen[c] for c in o1], K))
        series["general_threat"].append(ndcg([ideal_gen[c] for c in o3], K))
        for name, o in (("cvss_base", o1), ("apt_threat", o2), ("general_threat", o3), ("ideal", oi)):
            cost[name] += sum(severity_units(p1[c]) for c in o[:K])

    def ttest(a, b):
        r = stats.ttest_rel(a, b)
        p_one = stats.ttest_rel(a, b, alternative="greater").pvalue
        return {"t": float(r.statistic), "p_two": float(r.pvalue), "p_one": float(p_one), "n": len(a)}

    out = {
        "weeks": len(weeks),
        "candidates": sum(cohort_sizes),
        "min_cohort": min(cohort_sizes),
        "max_cohort": max(cohort_sizes),
        "mean_ndcg": {k: sum(v) / len(v) for k, v in series.items()},
        "ttest_apt_vs_cvss": ttest(series["apt_threat"], series["cvss_base"]),
        "ttest_general_vs_cvss": ttest(series["general_threat"], series["cvss_base@general"]),
        "cost": cost,
    }
    json.dump(out, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
