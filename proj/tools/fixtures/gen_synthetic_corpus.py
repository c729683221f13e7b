#!/usr/bin/env python3
"""Writes the 52-week synthetic corpus under data/synthetic.

Three CVE populations per week:
  exploited     NETWORK, weakness chained to a group that targets the org,
                mostly high EPSS, KEV or Exploit-DB entry, mostly Medium CVSS
  threat-linked same chains, rarely high EPSS, no exploit evidence, mixed CVSS
  noise         weaknesses with no chain to a sector group, mostly High/Critical CVSS

groups_truth.json records what each group description states, for the oracle.
"""

import csv
import datetime as dt
import json
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parents[2] / "data" / "synthetic"
SEED = 20211123

TACTICS = [("TA0001", "Initial Access"), ("TA0002", "Execution"), ("TA0004", "Privilege Escalation"),
           ("TA0008", "Lateral Movement")]
TECHNIQUES = [
    ("T1190", "Exploit Public-Facing Application", ["TA0001"]),
    ("T1203", "Exploitation for Client Execution", ["TA0002"]),
    ("T1068", "Exploitation for Privilege Escalation", ["TA0004"]),
    ("T1210", "Exploitation of Remote Services", ["TA0008"]),
    ("T1059.007", "JavaScript", ["TA0002"]),
    ("T1566.001", "Spearphishing Attachment", ["TA0001"]),
]
CAPECS = [
    ("CAPEC-66", "SQL Injection", "Low", ["T1190"]),
    ("CAPEC-100", "Overflow Buffers", "High", ["T1203"]),
    ("CAPEC-233", "Privilege Escalation", "Medium", ["T1068"]),
    ("CAPEC-63", "Cross-Site Scripting (XSS)", "Low", ["T1059.007"]),
    ("CAPEC-115", "Authentication Bypass", "Medium", ["T1210"]),
    ("CAPEC-17", "Using Malicious Files", "High", []),
]
CWES = [
    # chained to sector groups
    ("CWE-89", "SQL Injection", ["ReadData", "ModifyData", "BypassProtection"], ["CAPEC-66"]),
    ("CWE-787", "Out-of-bounds Write", ["ModifyData", "ExecuteUnauthorizedCode"], ["CAPEC-100"]),
    ("CWE-269", "Improper Privilege Management", ["GainPrivileges"], ["CAPEC-233"]),
    # chained only to groups outside the org's sectors
    ("CWE-79", "Cross-site Scripting", ["ExecuteUnauthorizedCode", "ReadData"], ["CAPEC-63"]),
    ("CWE-287", "Improper Authentication", ["BypassProtection", "GainPrivileges"], ["CAPEC-115"]),
    # no chain
    ("CWE-434", "Unrestricted Upload of File with Dangerous Type", ["ExecuteUnauthorizedCode"], ["CAPEC-17"]),
    ("CWE-200", "Exposure of Sensitive Information", ["ReadData"], []),
    ("CWE-400", "Uncontrolled Resource Consumption", ["DenyServiceResourceConsumption"], []),
]
THREAT_CWES = ["CWE-89", "CWE-787", "CWE-269"]
NOISE_CWES = ["CWE-79", "CWE-287", "CWE-434", "CWE-200", "CWE-400"]

GROUPS = [
    {"group_id": "G0100", "name": "Ivory Lantern", "created": "2018-03-01", "techniques": ["T1190", "T1203"],
     "origin": ["China"], "year": 2010, "targets": ["United States", "Canada"], "sectors": ["Education"],
     "description": "Ivory Lantern is a Chinese threat group that has been active since at least 2010. "
                    "The group has targeted universities in the United States and Canada."},
    {"group_id": "G0101", "name": "Granite Owl", "created": "2019-06-12", "techniques": ["T1068", "T1203"],
     "origin": ["Russia"], "year": 2013, "targets": ["United States"], "sectors": ["Government Facilities"],
     "description": "Granite Owl is a Russian espionage group that has been operating since at least 2013. "
                    "Granite Owl has targeted government agencies in the United States."},
    {"group_id": "G0102", "name": "Copper Tide", "created": "2020-02-20", "techniques": ["T1059.007", "T1210"],
     "origin": ["North Korea"], "year": 2016, "targets": ["South Korea", "United States"],
     "sectors": ["Financial Services"],
     "description": "Copper Tide is a North Korean state-sponsored threat group that has been active since at "
                    "least 2016. The group has targeted banks in South Korea and the United States."},
    {"group_id": "G0103", "name": "Saffron Kite", "created": "2020-09-09", "techniques": ["T1210", "T1566.001"],
     "origin": ["Iran"], "year": 2017, "targets": ["Israel"], "sectors": ["Energy"],
     "description": "Saffron Kite is an Iranian group first observed in 2017. "
                    "It has targeted energy companies in Israel."},
]

PRODUCTS = [
    ("microsoft", "windows_10"), ("microsoft", "office"), ("microsoft", "exchange_server"), ("google", "chrome"),
    ("mozilla", "firefox"), ("adobe", "acrobat_reader_dc"), ("oracle", "jdk"), ("apache", "tomcat"),
    ("zoom", "meetings"), ("cisco", "anyconnect_secure_mobility_client"), ("vmware", "horizon_client"),
    ("citrix", "workspace"), ("blackboard", "blackboard_learn"), ("python", "python"), ("git-scm", "git"),
    ("wireshark", "wireshark"), ("videolan", "vlc_media_player"), ("7-zip", "7-zip"), ("putty", "putty"),
    ("mathworks", "matlab"), ("ibm", "spss_statistics"), ("esri", "arcgis_pro"), ("autodesk", "autocad"),
    ("slack", "slack"), ("dropbox", "dropbox"), ("webex", "webex_meetings"), ("docker", "desktop"),
    ("jetbrains", "pycharm"),
]
# Installed elsewhere but not at the org.
OTHER_PRODUCTS = [("apache", "http_server"), ("sap", "netweaver"), ("fortinet", "fortios")]


def cpe(vendor, product):
    return f"cpe:2.3:a:{vendor}:{product}:*:*:*:*:*:*:*:*"


def cvss(rng, band):
    lo, hi = {"L": (1.0, 3.9), "M": (4.0, 6.9), "H": (7.0, 8.9), "C": (9.0, 10.0)}[band]
    return round(rng.uniform(lo, hi), 1)


def pick(rng, weights):
    return rng.choices(list(weights), weights=list(weights.values()))[0]


def main():
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    lines = []
    for vendor, product in PRODUCTS + OTHER_PRODUCTS:
        lines.append({"kind": "cpe", "cpe_id": cpe(vendor, product), "vendor": vendor, "product": product,
                      "deprecated": False, "language_tag": "en-US"})
    for tactic, name in TACTICS:
        lines.append({"kind": "tactic", "tactic_id": tactic, "name": name})
    for tid, name, tactics in TECHNIQUES:
        lines.append({"kind": "technique", "technique_id": tid, "name": name, "tactic_ids": tactics})
    for cid, name, skill, techniques in CAPECS:
        lines.append({"kind": "capec", "capec_id": cid, "name": name, "skill_level": skill,
                      "related_techniques": techniques})
    for wid, name, impacts, capecs in CWES:
        lines.append({"kind": "cwe", "cwe_id": wid, "name": name, "technical_impacts": impacts,
                      "related_capecs": capecs})
    for g in GROUPS:
        lines.append({"kind": "group", "group_id": g["group_id"], "name": g["name"], "description": g["description"],
                      "created": g["created"], "technique_ids": g["techniques"]})

    epss_rows, kev_rows, exploits = [], [], []
    monday = dt.date(2021, 1, 4)  # 2021-W01
    serial = 10000
    for week in range(52):
        n = rng.randint(25, 60)
        for _ in range(n):
            serial += 1
            cve_id = f"CVE-2021-{serial}"
            cls = pick(rng, {"exploited": 12, "threat": 18, "noise": 70})
            if cls == "exploited":
                band = pick(rng, {"M": 70, "H": 15, "L": 10, "C": 5})
                vector = "NETWORK"
                cwes = [rng.choice(THREAT_CWES)]
                high_epss = rng.random() < 0.85
                evidence = pick(rng, {"kev": 60, "edb": 25, "both": 15})
            elif cls == "threat":
                band = pick(rng, {"M": 35, "H": 40, "C": 15, "L": 10})
                vector = pick(rng, {"NETWORK": 60, "LOCAL": 35, "ADJACENT": 5})
                cwes = [rng.choice(THREAT_CWES)]
                high_epss = rng.random() < 0.05
                evidence = None
            else:
                band = pick(rng, {"H": 45, "C": 30, "M": 20, "L": 5})
                vector = pick(rng, {"NETWORK": 55, "LOCAL": 40, "PHYSICAL": 5})
                cwes = [rng.choice(NOISE_CWES)]
                high_epss = rng.random() < 0.04
                evidence = pick(rng, {None: 96, "edb": 4})
            score = cvss(rng, band)
            products = [rng.choice(PRODUCTS)]
            if rng.random() < 0.1:
                products.append(rng.choice(OTHER_PRODUCTS))
            modified = monday + dt.timedelta(days=7 * week + rng.randint(0, 6))
            published = modified - dt.timedelta(days=rng.randint(0, 30))
            lines.append({"kind": "cve", "cve_id": cve_id, "description": f"Synthetic {cls} record.",
                          "published": published.isoformat(), "modified": modified.isoformat(),
                          "cvss_base": score, "attack_vector": vector, "cwe_ids": cwes,
                          "affected_cpes": sorted({cpe(*p) for p in products}), "reference_urls": []})
            if high_epss:
                prob = round(rng.uniform(0.876, 0.975), 5)
                pct = round(rng.uniform(0.95, 1.0), 5)
            else:
                prob = round(rng.uniform(0.0005, 0.6), 5)
                pct = round(rng.uniform(0.01, 0.95), 5)
            epss_rows.append((cve_id, prob, pct))
            if evidence in ("kev", "both"):
                added = modified - dt.timedelta(days=rng.randint(0, 20))
                kev_rows.append((cve_id, "Vendor", "Product", f"{cve_id} vulnerability", added.isoformat(),
                                 "Synthetic catalog entry.", "Apply updates per vendor instructions.",
                                 (added + dt.timedelta(days=14)).isoformat(), "Unknown"))
            if evidence in ("edb", "both"):
                exploits.append({"kind": "exploit", "exploitdb_id": 40000 + serial, "cve_ids": [cve_id]})
    lines.extend(exploits)

    with open(OUT / "records.jsonl", "w") as f:
        for line in lines:
            f.write(json.dumps(line) + "\n")
    with open(OUT / "epss.csv", "w", newline="") as f:
        f.write("#model_version:synthetic\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["cve", "epss", "percentile"])
        w.writerows(epss_rows)
    with open(OUT / "kev.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["cveID", "vendorProject", "product", "vulnerabilityName", "dateAdded", "shortDescription",
                    "requiredAction", "dueDate", "knownRansomwareCampaignUse"])
        w.writerows(kev_rows)

    profile = {"org_id": "SYN-EDU", "name": "Synthetic State University", "sector": "Education",
               "country": "United States",
               "software": [{"vendor": v, "product": p} for v, p in PRODUCTS]}
    with open(OUT / "syn_edu_profile.json", "w") as f:
        json.dump(profile, f, indent=2)
        f.write("\n")
    truth = [{k: g[k] for k in ("group_id", "techniques", "origin", "year", "targets", "sectors")} for g in GROUPS]
    with open(OUT / "groups_truth.json", "w") as f:
        json.dump(truth, f, indent=2)
        f.write("\n")
    config = {
        "snapshots": ["records.jsonl"],
        "epss_csv": ["epss.csv"],
        "kev_csv": ["kev.csv"],
        "vocabulary": {"countries": "../vocab/countries.txt", "sectors": "../vocab/sectors.tsv"},
        "lexicon": {"countries": "../lexicon/countries.tsv", "sectors": "../lexicon/sectors.tsv"},
        "profiles": ["syn_edu_profile.json"],
        "policy": {"origin_countries": ["China", "Russia", "Iran"], "skill_level": "High",
                   "epss_threshold": 0.876, "risk_appetite": 100, "k": 20, "ideal_mode": "apt"},
        "date_range": {"from": "2021-01-04", "to": "2022-01-02"},
        "snapshot_year": 2021,
        "output_dir": "out",
    }
    with open(OUT / "project.json", "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")
    print(f"wrote {OUT}: {serial - 10000} CVEs")


if __name__ == "__main__":
    main()
