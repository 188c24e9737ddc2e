"""
Experiments from the command line
=================================

An experiment is one JSON config.  The ``experiment`` subcommand writes a
canonical report (byte-identical for a given config and seed list, whatever
the thread count) and ``export-series`` flattens its decay series to CSV.
"""

import csv
import json
import tempfile
from pathlib import Path

from orthreflect.cli import main

work = Path(tempfile.mkdtemp())
config = {
    "kind": "irrelevance",
    "process": {"kind": "brownian", "mu": [-0.5, -0.5, -0.5]},
    "routing": {"n": 3, "entries": [0, 0.3, 0.2, 0.1, 0, 0.3, 0.2, 0.2, 0]},
    "initials": [[1, 1, 1], [4, 0, 0]],
    "grid": {"horizon": 200, "step": 0.05},
    "seeds": {"base": 0, "count": 8},
}
(work / "cfg.json").write_text(json.dumps(config))

main(["experiment", str(work / "cfg.json"), "--out", str(work / "report.json"), "--threads", "2"])
first = (work / "report.json").read_bytes()
main(["experiment", str(work / "cfg.json"), "--out", str(work / "again.json"), "--threads", "1", "--quiet"])
print("same bytes with 1 and 2 threads:", first == (work / "again.json").read_bytes())

for row in json.loads(first)["aggregate"]:
    print("a =", row["a"], "median terminal sup|D| =", row["median_terminal_sup"])

main(["export-series", str(work / "report.json"), "--out", str(work / "series.csv"), "--quiet"])
with open(work / "series.csv") as f:
    rows = list(csv.DictReader(f))
print(len(rows), "rows; last:", rows[-1])
