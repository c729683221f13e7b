#!/usr/bin/env python3
"""Writes the ODU week-of-2021-11-23 fixture under data/fixtures/odu_2021w47.

The twenty case-study rows are real CVEs with their NVD base scores. The
nineteen other candidates are placeholders whose scores and vectors put the
twenty rows at fixed CVSS ranks (checked at the end of main).
"""

import csv
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "data" / "fixtures" / "odu_2021w47"

CHROME = "cpe:2.3:a:google:chrome:*:*:*:*:*:*:*:*"
CHROME_96 = "cpe:2.3:a:google:chrome:96.0.4664.45:*:*:*:*:*:*:*"
ZOOM = "cpe:2.3:a:zoom:meetings:*:*:*:*:*:*:*:*"

# (cve, cvss, vector, cwe, cpes, epss, percentile)
CASE_ROWS = [
    ("CVE-2021-37966", 4.3, "NETWORK", ["CWE-1021"], [CHROME], 0.912, 0.991),
    ("CVE-2021-37999", 6.1, "NETWORK", ["CWE-79"], [CHROME], 0.884, 0.967),
    ("CVE-2021-38000", 6.1, "NETWORK", ["CWE-79"], [CHROME, CHROME_96], 0.876, 0.94),
    ("CVE-2021-30542", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.012, 0.41),
    ("CVE-2021-30543", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.012, 0.41),
    ("CVE-2021-30626", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.009, 0.35),
    ("CVE-2021-30627", 8.8, "NETWORK", ["CWE-843"], [CHROME], 0.011, 0.39),
    ("CVE-2021-30628", 8.8, "NETWORK", ["CWE-787"], [CHROME], 0.010, 0.37),
    ("CVE-2021-30629", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.010, 0.37),
    ("CVE-2021-30630", 4.3, "NETWORK", ["CWE-200"], [CHROME], 0.004, 0.12),
    ("CVE-2021-30632", 8.8, "NETWORK", ["CWE-787"], [CHROME], 0.512, 0.977),
    ("CVE-2021-30633", 9.6, "NETWORK", ["CWE-787"], [CHROME], 0.407, 0.972),
    ("CVE-2021-34423", 9.8, "NETWORK", ["CWE-120"], [ZOOM], 0.028, 0.63),
    ("CVE-2021-34424", 7.5, "NETWORK", ["CWE-200"], [ZOOM], 0.019, 0.55),
    ("CVE-2021-37956", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.008, 0.31),
    ("CVE-2021-37957", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.008, 0.31),
    ("CVE-2021-37958", 5.4, "NETWORK", ["CWE-200"], [CHROME], 0.006, 0.22),
    ("CVE-2021-37959", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.008, 0.31),
    ("CVE-2021-37961", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.008, 0.31),
    ("CVE-2021-37962", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.008, 0.31),
]

WIN10 = "cpe:2.3:o:microsoft:windows_10:-:*:*:*:*:*:*:*"
OFFICE = "cpe:2.3:a:microsoft:office:2019:*:*:*:*:*:*:*"
ACROBAT = "cpe:2.3:a:adobe:acrobat_reader_dc:*:*:*:*:continuous:*:*:*"
FIREFOX = "cpe:2.3:a:mozilla:firefox:*:*:*:*:*:*:*:*"
JAVA = "cpe:2.3:a:oracle:jdk:11.0.12:*:*:*:*:*:*:*"
VSCODE = "cpe:2.3:a:microsoft:visual_studio_code:*:*:*:*:*:*:*:*"

PLACEHOLDERS = [
    ("CVE-2021-43530", 9.3, "LOCAL", ["CWE-787"], [WIN10], 0.003, 0.08),
    ("CVE-2021-42030", 9.1, "LOCAL", ["CWE-416"], [ACROBAT], 0.004, 0.11),
    ("CVE-2021-38001", 8.8, "NETWORK", ["CWE-843"], [CHROME], 0.021, 0.58),
    ("CVE-2021-38003", 8.8, "NETWORK", ["CWE-416"], [CHROME], 0.018, 0.54),
    ("CVE-2021-40470", 8.6, "LOCAL", ["CWE-416"], [WIN10], 0.005, 0.15),
    ("CVE-2021-41780", 8.1, "NETWORK", ["CWE-416"], [FIREFOX], 0.031, 0.66),
    ("CVE-2021-42330", 8.1, "NETWORK", ["CWE-200"], [FIREFOX], 0.006, 0.21),
    ("CVE-2021-40460", 7.8, "LOCAL", ["CWE-416"], [OFFICE], 0.007, 0.27),
    ("CVE-2021-41385", 7.8, "LOCAL", ["CWE-787"], [WIN10], 0.004, 0.11),
    ("CVE-2021-42295", 7.8, "LOCAL", ["CWE-416"], [OFFICE], 0.004, 0.11),
    ("CVE-2021-43890", 7.7, "LOCAL", ["CWE-200"], [WIN10], 0.002, 0.05),
    ("CVE-2021-42580", 7.1, "NETWORK", ["CWE-200"], [JAVA], 0.003, 0.09),
    ("CVE-2021-37964", 4.3, "NETWORK", ["CWE-200"], [CHROME], 0.005, 0.17),
    ("CVE-2021-37965", 4.3, "NETWORK", ["CWE-200"], [CHROME], 0.005, 0.17),
    ("CVE-2021-38005", 4.3, "NETWORK", ["CWE-200"], [CHROME], 0.005, 0.17),
    ("CVE-2021-41195", 3.7, "NETWORK", ["CWE-200"], [JAVA], 0.002, 0.04),
    ("CVE-2021-43620", 3.3, "LOCAL", ["CWE-200"], [VSCODE], 0.001, 0.02),
    ("CVE-2021-42555", 2.8, "LOCAL", ["CWE-200"], [OFFICE], 0.001, 0.02),
    ("CVE-2021-43815", 2.5, "LOCAL", ["CWE-200"], [ACROBAT], 0.001, 0.02),
]

# CVEs outside the week-47 cohort, each excluded for a different reason.
APACHE = "cpe:2.3:a:apache:http_server:2.4.51:*:*:*:*:*:*:*"
NON_CANDIDATES = [
    # modified the week before
    ("CVE-2021-30541", 7.5, "NETWORK", ["CWE-416"], [CHROME], "2021-11-15"),
    # affects software the organization does not run
    ("CVE-2021-41773", 7.5, "NETWORK", ["CWE-20"], [APACHE], "2021-11-24"),
    # modified in week 47 and again in week 48; the update file carries the later record
    ("CVE-2021-37960", 8.8, "NETWORK", ["CWE-416"], [CHROME], "2021-11-24"),
]

CPES = [
    (CHROME, "google", "chrome", False, "en-US"),
    (CHROME_96, "google", "chrome", False, "en-US"),
    ("cpe:2.3:a:google:chrome:95.0.4638.69:*:*:*:*:*:*:*", "google", "chrome", True, "en-US"),
    (ZOOM, "zoom", "meetings", False, "en-US"),
    (WIN10, "microsoft", "windows_10", False, "en-US"),
    (OFFICE, "microsoft", "office", False, "en-US"),
    ("cpe:2.3:a:microsoft:office:2019:*:*:*:*:*:ja:*", "microsoft", "office", False, "ja-JP"),
    (ACROBAT, "adobe", "acrobat_reader_dc", False, "en_US"),
    (FIREFOX, "mozilla", "firefox", False, "en-US"),
    (JAVA, "oracle", "jdk", False, "en-US"),
    (VSCODE, "microsoft", "visual_studio_code", False, "en-US"),
    (APACHE, "apache", "http_server", False, "en-US"),
]

# Further resolvable products (one dictionary entry each) to reach 47.
EXTRA_RESOLVED = [
    ("7-zip", "7-zip"), ("videolan", "vlc_media_player"), ("python", "python"), ("git-scm", "git"),
    ("putty", "putty"), ("wireshark", "wireshark"), ("notepad-plus-plus", "notepad\\+\\+"),
    ("libreoffice", "libreoffice"), ("gimp", "gimp"), ("inkscape", "inkscape"), ("r-project", "r"),
    ("rstudio", "rstudio"), ("mathworks", "matlab"), ("ibm", "spss_statistics"), ("sas", "sas"),
    ("esri", "arcgis_pro"), ("autodesk", "autocad"), ("blackboard", "blackboard_learn"),
    ("citrix", "workspace"), ("vmware", "horizon_client"), ("cisco", "anyconnect_secure_mobility_client"),
    ("microsoft", "teams"), ("microsoft", "onedrive"), ("microsoft", "edge_chromium"), ("apple", "itunes"),
    ("dropbox", "dropbox"), ("slack", "slack"), ("webex", "webex_meetings"), ("filezilla-project", "filezilla_client"),
    ("winscp", "winscp"), ("tableau", "tableau_desktop"), ("docker", "desktop"), ("anaconda", "anaconda3"),
    ("jetbrains", "pycharm"), ("eclipse", "eclipse_ide"), ("apache", "netbeans"),
]

UNRESOLVED = [
    ("odu", "banner_self_service"), ("odu", "midas_portal"), ("odu", "leo_online"), ("odu", "monarch_print"),
    ("odu", "lab_scheduler"), ("local", "kiosk_shell"), ("local", "imaging_agent"), ("campus", "door_access_client"),
    ("campus", "parking_portal"), ("research", "hpc_job_submitter"), ("research", "wahab_cluster_tools"),
    ("library", "illiad_client"), ("library", "ezproxy_helper"), ("athletics", "ticket_kiosk"),
    ("registrar", "degree_audit_viewer"), ("finance", "journal_upload_tool"), ("hr", "timesheet_client"),
    ("it", "asset_inventory_agent"), ("it", "patch_reporter"), ("it", "vpn_profile_installer"),
    ("facilities", "work_order_client"), ("housing", "room_selection_app"),
]

CWES = [
    ("CWE-79", "Improper Neutralization of Input During Web Page Generation",
     ["ExecuteUnauthorizedCode", "BypassProtection", "ReadData"], ["CAPEC-63", "CAPEC-591"]),
    ("CWE-1021", "Improper Restriction of Rendered UI Layers or Frames", ["BypassProtection"], ["CAPEC-103"]),
    ("CWE-416", "Use After Free", ["ModifyData", "DenyServiceUnreliableExecution", "ExecuteUnauthorizedCode"], []),
    ("CWE-787", "Out-of-bounds Write", ["ModifyData", "ExecuteUnauthorizedCode", "DenyServiceUnreliableExecution"],
     ["CAPEC-100"]),
    ("CWE-843", "Access of Resource Using Incompatible Type", ["ReadData", "ModifyData", "ExecuteUnauthorizedCode"], []),
    ("CWE-200", "Exposure of Sensitive Information to an Unauthorized Actor", ["ReadData"], []),
    ("CWE-120", "Buffer Copy without Checking Size of Input", ["ModifyData", "ExecuteUnauthorizedCode"], ["CAPEC-100"]),
    ("CWE-20", "Improper Input Validation", ["DenyServiceResourceConsumption", "ReadData", "ModifyData"], ["CAPEC-10"]),
]

CAPECS = [
    ("CAPEC-63", "Cross-Site Scripting (XSS)", "Low", ["T1059.007"]),
    ("CAPEC-591", "Reflected XSS", "Low", ["T1059.007"]),
    ("CAPEC-103", "Clickjacking", "High", ["T1185"]),
    ("CAPEC-100", "Overflow Buffers", "High", ["T1203"]),
    ("CAPEC-10", "Buffer Overflow via Environment Variables", "High", ["T1068"]),
]

TACTICS = [("TA0001", "Initial Access"), ("TA0002", "Execution"), ("TA0004", "Privilege Escalation"),
           ("TA0009", "Collection")]

TECHNIQUES = [
    ("T1059.007", "JavaScript", ["TA0002"]),
    ("T1185", "Browser Session Hijacking", ["TA0009"]),
    ("T1203", "Exploitation for Client Execution", ["TA0002"]),
    ("T1068", "Exploitation for Privilege Escalation", ["TA0004"]),
    ("T1190", "Exploit Public-Facing Application", ["TA0001"]),
    ("T1566", "Phishing", ["TA0001"]),
]

GROUPS = [
    ("G0045", "menuPass",
     "menuPass is a threat group that has been active since at least 2006. Individual members are known to have "
     "acted in association with the Chinese Ministry of State Security. The group has targeted universities and "
     "government agencies in the United States and Japan.",
     "2017-05-31", ["T1059.007", "T1185", "T1190"]),
    ("G0007", "APT28",
     "APT28 is a threat group that has been attributed to Russian military intelligence. The group has been active "
     "since at least 2004. APT28 has targeted government and military organizations in Georgia and Ukraine.",
     "2017-05-31", ["T1068", "T1190", "T1566"]),
    ("G0032", "Lazarus Group",
     "Lazarus Group is a North Korean state-sponsored threat group that has been active since at least 2009. "
     "The group has targeted banks and financial institutions in South Korea and the United States.",
     "2017-05-31", ["T1203", "T1566"]),
    ("G0059", "Magic Hound",
     "Magic Hound is an Iranian-sponsored threat group operating since at least 2014. The group has targeted "
     "energy companies in Saudi Arabia and Israel.",
     "2018-01-16", ["T1566"]),
]

KEV = [
    ("CVE-2021-38000", "Google", "Chromium", "Google Chromium Insufficient Input Validation Vulnerability",
     "2021-11-03", "Insufficient validation of untrusted input in Intents in Google Chrome on Android allows a "
     "remote attacker to arbitrarily browse to a malicious URL via a crafted HTML page.",
     "Apply updates per vendor instructions.", "2021-11-17", "Known"),
    ("CVE-2021-30632", "Google", "Chromium V8", "Google Chromium V8 Out-of-Bounds Write Vulnerability",
     "2021-11-03", "Out-of-bounds write in V8 allows a remote attacker to potentially exploit heap corruption via "
     "a crafted HTML page.", "Apply updates per vendor instructions.", "2021-11-17", "Known"),
    ("CVE-2021-30633", "Google", "Chromium Indexed DB API", "Google Chromium Indexed DB API Use-After-Free "
     "Vulnerability", "2021-11-03", "Use after free in Indexed DB API allows a remote attacker who had "
     "compromised the renderer process to potentially perform a sandbox escape via a crafted HTML page.",
     "Apply updates per vendor instructions.", "2021-11-17", "Known"),
]

MODIFIED = ["2021-11-22", "2021-11-23", "2021-11-24", "2021-11-26"]


def cve_line(cve, cvss, vector, cwes, cpes, modified, published="2021-10-08"):
    return {
        "kind": "cve", "cve_id": cve,
        "description": f"Fixture record for {cve}.",
        "published": published, "modified": modified, "cvss_base": cvss, "attack_vector": vector,
        "cwe_ids": cwes, "affected_cpes": cpes,
        "reference_urls": ["https://chromereleases.googleblog.com/"] if CHROME in cpes else [],
    }


def cpe_id(vendor, product):
    return f"cpe:2.3:a:{vendor}:{product}:*:*:*:*:*:*:*:*"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    lines = []
    for cpe, vendor, product, deprecated, lang in CPES:
        lines.append({"kind": "cpe", "cpe_id": cpe, "vendor": vendor, "product": product,
                      "deprecated": deprecated, "language_tag": lang})
    for vendor, product in EXTRA_RESOLVED:
        lines.append({"kind": "cpe", "cpe_id": cpe_id(vendor, product), "vendor": vendor,
                      "product": product.replace("\\", ""), "deprecated": False, "language_tag": "en-US"})
    for cwe, name, impacts, capecs in CWES:
        lines.append({"kind": "cwe", "cwe_id": cwe, "name": name, "technical_impacts": impacts,
                      "related_capecs": capecs})
    for capec, name, skill, techniques in CAPECS:
        lines.append({"kind": "capec", "capec_id": capec, "name": name, "skill_level": skill,
                      "related_techniques": techniques})
    for tactic, name in TACTICS:
        lines.append({"kind": "tactic", "tactic_id": tactic, "name": name})
    for technique, name, tactics in TECHNIQUES:
        lines.append({"kind": "technique", "technique_id": technique, "name": name, "tactic_ids": tactics})
    for group, name, description, created, techniques in GROUPS:
        lines.append({"kind": "group", "group_id": group, "name": name, "description": description,
                      "created": created, "technique_ids": techniques})
    rows = CASE_ROWS + PLACEHOLDERS
    for i, (cve, cvss, vector, cwes, cpes, _, _) in enumerate(rows):
        lines.append(cve_line(cve, cvss, vector, cwes, cpes, MODIFIED[i % len(MODIFIED)]))
    for cve, cvss, vector, cwes, cpes, modified in NON_CANDIDATES:
        lines.append(cve_line(cve, cvss, vector, cwes, cpes, modified))
    lines.append({"kind": "exploit", "exploitdb_id": 50383, "cve_ids": ["CVE-2021-41780"]})
    lines.append({"kind": "reference", "url": "https://chromereleases.googleblog.com/", "source": "Chrome Releases",
                  "tags": ["Release Notes", "Vendor Advisory"]})
    with open(OUT / "records.jsonl", "w") as f:
        for line in lines:
            f.write(json.dumps(line) + "\n")

    with open(OUT / "records_update.jsonl", "w") as f:
        f.write(json.dumps(cve_line("CVE-2021-37960", 8.8, "NETWORK", ["CWE-416"], [CHROME], "2021-11-30")) + "\n")

    with open(OUT / "epss.csv", "w", newline="") as f:
        f.write("#model_version:v2021.04.14,score_date:2021-11-23T00:00:00+0000\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["cve", "epss", "percentile"])
        for cve, *_, epss, pct in rows:
            w.writerow([cve, f"{epss}", f"{pct}"])

    with open(OUT / "kev.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["cveID", "vendorProject", "product", "vulnerabilityName", "dateAdded", "shortDescription",
                    "requiredAction", "dueDate", "knownRansomwareCampaignUse"])
        for row in KEV:
            w.writerow(row)

    software = [
        {"vendor": "Google", "product": "Chrome"},
        {"vendor": "Zoom", "product": "Meetings"},
        {"vendor": "Microsoft", "product": "Windows 10"},
        {"vendor": "Microsoft", "product": "Office", "version": "2019"},
        {"vendor": "Adobe", "product": "Acrobat Reader DC"},
        {"vendor": "Mozilla", "product": "Firefox"},
        {"vendor": "Oracle", "product": "JDK", "version": "11.0.12"},
        {"vendor": "Microsoft", "product": "Visual Studio Code"},
        {"vendor": "Microsoft", "product": "Visual Studio Code", "version": "1.62.3"},
        {"vendor": "Google", "product": "Chrome", "version": "96.0.4664.45"},
        {"vendor": "Google", "product": "Chrome", "version": "97.0.4692.71"},
    ]
    software += [{"vendor": v, "product": p.replace("\\", "")} for v, p in EXTRA_RESOLVED]
    software += [{"vendor": v, "product": p} for v, p in UNRESOLVED]
    profile = {"org_id": "ODU", "name": "Old Dominion University", "sector": "Education",
               "country": "United States", "software": software}
    with open(OUT / "odu_profile.json", "w") as f:
        json.dump(profile, f, indent=2)
        f.write("\n")

    config = {
        "snapshots": ["records.jsonl", "records_update.jsonl"],
        "epss_csv": ["epss.csv"],
        "kev_csv": ["kev.csv"],
        "vocabulary": {"countries": "../../vocab/countries.txt", "sectors": "../../vocab/sectors.tsv"},
        "lexicon": {"countries": "../../lexicon/countries.tsv", "sectors": "../../lexicon/sectors.tsv"},
        "profiles": ["odu_profile.json"],
        "policy": {"origin_countries": ["China", "Russia", "Iran"], "skill_level": "High",
                   "epss_threshold": 0.876, "risk_appetite": 100, "k": 20, "ideal_mode": "apt"},
        "date_range": {"from": "2021-11-22", "to": "2021-11-28"},
        "snapshot_year": 2021,
        "output_dir": "out",
    }
    with open(OUT / "project.json", "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")

    # Self-check: CVSS ranks of the case-study rows.
    order = sorted(rows, key=lambda r: (-r[1], r[0]))
    p1 = {r[0]: i + 1 for i, r in enumerate(order)}
    expected = {"CVE-2021-37966": 34, "CVE-2021-37999": 28, "CVE-2021-38000": 29, "CVE-2021-30542": 5,
                "CVE-2021-30543": 6, "CVE-2021-30626": 7, "CVE-2021-30627": 8, "CVE-2021-30628": 9,
                "CVE-2021-30629": 10, "CVE-2021-30630": 31, "CVE-2021-30632": 11, "CVE-2021-30633": 2,
                "CVE-2021-34423": 1, "CVE-2021-34424": 26, "CVE-2021-37956": 12, "CVE-2021-37957": 13,
                "CVE-2021-37958": 30, "CVE-2021-37959": 14, "CVE-2021-37961": 15, "CVE-2021-37962": 16}
    bad = {c: (p1[c], r) for c, r in expected.items() if p1[c] != r}
    assert not bad, bad
    assert len(rows) == 39
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
