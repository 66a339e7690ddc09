# The whole pipeline in one call
#
# `uqc reproduce` generates the three data sets, trains all three models
# (best of three restarts), runs exact and sampler inference and writes a
# summary table. The same thing is available from Python.

import csv
import sys
import tempfile
from pathlib import Path

from uqc import cli

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="uqc_"))
code = cli.main(["reproduce", "--out", str(out)])
print("exit code", code)

with open(out / "summary.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        print(f"{row['problem']:12s} layers {row['layers']:>2s}  test {float(row['test_accuracy']):.3f}"
              f"  ideal {float(row['ideal_accuracy']):.3f}  sampler {float(row['sampler_accuracy']):.3f}"
              f"  measurements {row['sampler_measurements']}")

print("files:", sorted(p.relative_to(out).as_posix() for p in out.rglob("*") if p.is_file()))
