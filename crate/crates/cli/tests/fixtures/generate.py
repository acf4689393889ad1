#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the synthetic fixtures in this directory.

Run from anywhere: python3 generate.py. Output is deterministic.
"""

import ast
import csv
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

LAYERS = [
    "retrieval_quality", "mention_type", "mention_quality", "found_url", "link_quality",
    "license_spdx_or_name", "license_category", "is_preprint", "is_software_paper",
]
HEADER = ["mention_id", "software_raw", "context", "pub_id", "pub_year", "pub_urls"] + LAYERS + [
    "confidence", "notes", "annotator_id",
]

SOFTWARE = [
    "SPSS", "GraphPad Prism", "R", "MATLAB", "ImageJ", "Stata", "SAS", "Python", "Bioconductor",
    "BLAST", "MEGA", "PyMOL", "FlowJo", "Excel", "STAR", "Cytoscape", "Fiji", "QIIME", "SigmaPlot",
    "EndNote", "NVivo", "lme4", "Seurat", "Trimmomatic", "GATK", "Mplus", "REDCap", "Origin",
    "Prism", "Geneious", "HISAT2", "DESeq2", "ggplot2", "scikit-learn", "TensorFlow", "PLINK",
]
LICENSE_NAMES = {
    "CLOSED": ["Proprietary", "Commercial EULA"],
    "ACADEMIC": ["Academic use only", "Non-commercial licence"],
    "PERMISSIVE": ["MIT", "BSD-3-Clause", "Apache-2.0", "Artistic-2.0"],
    "COPYLEFT": ["GPL-3.0-or-later", "GPL-2.0-only", "LGPL-2.1-or-later"],
    "UNKNOWN": ["unknown"],
    "UNKNOWN_SAAS": ["web service, no licence"],
}
QUALITY_FOR = {"PUB": "SC", "PRO": "SC", "URL": "SC", "MAN": "SP", "INS": "SN", "NAM": "SN", "NOT": "SN"}


def row(prefix, i, rng, year, annotator="A1", **layers):
    sw = rng.choice(SOFTWARE)
    mention_type = layers.get("mention_type", "")
    found = f"https://example.org/{sw.lower().replace(' ', '-')}" if mention_type in ("URL", "PRO") else ""
    rec = {
        "mention_id": f"{prefix}-{i:03d}",
        "software_raw": sw,
        "context": f"Data were analysed with {sw} as described in the methods.",
        "pub_id": f"10.5555/{prefix}.{i:04d}",
        "pub_year": str(year) if year else "",
        "pub_urls": f"https://doi.org/10.5555/{prefix}.{i:04d}",
        "found_url": found,
        "confidence": str(rng.choice([3, 4, 4, 5, 5])),
        "notes": "",
        "annotator_id": annotator,
        "is_preprint": "N",
        "is_software_paper": "N",
    }
    if mention_type:
        rec["mention_quality"] = QUALITY_FOR[mention_type]
    rec.update(layers)
    if rec.get("mention_quality") == "NA":
        for k in ("found_url", "is_preprint", "is_software_paper"):
            rec[k] = ""
    return rec


def write(name, title, rows):
    with open(HERE / name, "w", newline="", encoding="utf-8") as f:
        f.write(f"# {title}\r\n")
        w = csv.DictWriter(f, HEADER, restval="", lineterminator="\r\n")
        w.writeheader()
        w.writerows(rows)


def expand(counts):
    out = []
    for code, n in counts:
        out += [code] * n
    return out


def annotated_sample(prefix, rng, recent_types, older_types, n_na, n_na_recent, n_wrong, links=None):
    """Typed records from 2016 on, typed records before 2016, then NA records."""
    plan = [(t, rng.randint(2016, 2021)) for t in recent_types]
    plan += [(t, rng.randint(2005, 2015)) for t in older_types]
    plan += [("", rng.randint(2016, 2021)) for _ in range(n_na_recent)]
    plan += [("", rng.randint(2005, 2015)) for _ in range(n_na - n_na_recent)]
    rng.shuffle(plan)
    wrong = set(rng.sample(range(len(plan)), n_wrong))
    link_codes = list(links or [])
    rng.shuffle(link_codes)
    rows = []
    for i, (ty, year) in enumerate(plan, start=1):
        layers = {"retrieval_quality": "N" if i - 1 in wrong else "Y"}
        if ty:
            layers["mention_type"] = ty
            if link_codes:
                layers["link_quality"] = link_codes.pop()
        else:
            layers["mention_quality"] = "NA"
        rows.append(row(prefix, i, rng, year, **layers))
    assert not link_codes
    return rows


def main():
    rng = random.Random(20230601)

    csm = annotated_sample(
        "csm", rng,
        recent_types=expand([("PUB", 20), ("PRO", 4), ("URL", 11), ("MAN", 0), ("INS", 11), ("NAM", 20)]),
        older_types=expand([("PUB", 4), ("PRO", 1), ("URL", 2), ("INS", 3), ("NAM", 5)]),
        n_na=69, n_na_recent=46, n_wrong=29,
    )
    write("csm-annotated.csv", "synthetic CSM annotated sample", csm)

    czi = annotated_sample(
        "czi", rng,
        recent_types=expand([("PUB", 19), ("PRO", 3), ("URL", 4), ("MAN", 1), ("INS", 4), ("NAM", 32)]),
        older_types=expand([("PUB", 3), ("PRO", 1), ("URL", 1), ("INS", 3), ("NAM", 7)]),
        n_na=22, n_na_recent=0, n_wrong=7,
        links=expand([("CORRECT", 19), ("WRONG", 36), ("MULTIPLE_CONFLICT", 7), ("NONE", 16)]),
    )
    write("czi-annotated.csv", "synthetic CZI annotated sample", czi)

    cells = {
        "CLOSED": [("PUB", 3), ("PRO", 1), ("INS", 23), ("URL", 6), ("NAM", 24)],
        "ACADEMIC": [("PUB", 4), ("PRO", 0), ("INS", 1), ("URL", 2), ("NAM", 4)],
        "PERMISSIVE": [("PUB", 16), ("PRO", 2), ("INS", 0), ("URL", 4), ("NAM", 12)],
        "COPYLEFT": [("PUB", 17), ("PRO", 3), ("INS", 1), ("URL", 2), ("NAM", 9)],
        "UNKNOWN": [("PUB", 10), ("PRO", 4), ("INS", 0), ("URL", 5), ("NAM", 10)],
    }
    plan = []
    for cat, counts in cells.items():
        for k, ty in enumerate(expand(counts)):
            c = cat
            if cat == "UNKNOWN" and k % 3 == 2:
                c = "UNKNOWN_SAAS"
            plan.append((ty, c, None))
    # Rows the license table must leave out.
    plan += [("", "", "NA")] * 3 + [("NAM", "CLOSED", "UN"), ("PUB", "PERMISSIVE", "UN"), ("NAM", "", None)]
    rng.shuffle(plan)
    lic = []
    for i, (ty, cat, mq) in enumerate(plan, start=1):
        layers = {"retrieval_quality": "Y"}
        if ty:
            layers["mention_type"] = ty
        if mq:
            layers["mention_quality"] = mq
        if cat:
            layers["license_category"] = cat
            layers["license_spdx_or_name"] = rng.choice(LICENSE_NAMES[cat])
        lic.append(row("lic", i, rng, rng.randint(2010, 2021), **layers))
    write("licenses-annotated.csv", "synthetic license-annotated mentions", lic)

    explode(rng)

    # Six records small enough to tally by hand.
    hand = [("INS", "CLOSED"), ("INS", "CLOSED"), ("PUB", "COPYLEFT"), ("NAM", "UNKNOWN_SAAS"),
            ("URL", "PERMISSIVE"), ("PRO", "ACADEMIC")]
    rng = random.Random(6)
    six = []
    for i, (ty, cat) in enumerate(hand, start=1):
        six.append(row("hand", i, rng, 2018, retrieval_quality="Y", mention_type=ty, license_category=cat,
                       license_spdx_or_name=LICENSE_NAMES[cat][0]))
    write("licenses-hand.csv", "six hand-tallied license records", six)


def explode(rng):
    """50 publication rows with list-valued mention cells, some malformed."""
    header = ["cord_uid", "doi", "title", "source_x", "license", "publish_time", "journal", "url", "software"]
    rows = []
    malformed = {7: "['SPSS', 'R'", 19: "SPSS, R", 33: "['Stata', 'R']]", 44: "['unterminated]"}
    for i in range(50):
        if i in malformed:
            sw = malformed[i]
        elif i % 10 == 4:
            sw = "[]"
        elif i % 10 == 9:
            sw = ""
        else:
            names = rng.sample(SOFTWARE, rng.randint(1, 6))
            if i % 7 == 0:
                names.append("  ")
            if i % 5 == 1:
                names[0] = f'"{names[0]}"'
                sw = "[" + ", ".join(n if n.startswith('"') else repr(n) for n in names) + "]"
            else:
                sw = repr(names)
        rows.append([
            f"uid{i:04d}", f"10.5555/pub.{i:04d}", f"Publication {i}", "PMC", "cc-by",
            f"{rng.randint(2003, 2021)}-0{rng.randint(1, 9)}-1{rng.randint(0, 9)}", "Journal",
            f"https://example.org/pub/{i}", sw,
        ])
    with open(HERE / "csm-explode.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    # Independent tally with Python's literal parser.
    emitted, rejected, accepted = 0, [], 0
    for i, r in enumerate(rows):
        cell = r[-1]
        if not cell.strip():
            accepted += 1
            continue
        try:
            items = ast.literal_eval(cell)
            assert isinstance(items, list)
        except (ValueError, SyntaxError, AssertionError):
            rejected.append(i)
            continue
        accepted += 1
        emitted += sum(1 for s in items if str(s).strip())
    expected = {"rows_read": len(rows), "rows_accepted": accepted, "rows_rejected": len(rejected),
                "rejected_rows": rejected, "mentions_emitted": emitted}
    (HERE / "csm-explode.expected.json").write_text(json.dumps(expected, indent=2) + "\n")


if __name__ == "__main__":
    main()
