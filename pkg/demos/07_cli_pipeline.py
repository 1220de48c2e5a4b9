"""
The command-line pipeline, end to end
=====================================

Every capability is also reachable without writing Python: `check` the
structural conditions, `verify` the operator identities, `solve` and dump
snapshots + energy/residual tables, measure `smoothing`, and fold all the
artifacts into one `report`.  All outputs are byte-deterministic; the only
volatile file is the run_meta.json sidecar.  This demo drives the CLI
in-process via its main() entry point.
"""

import json
import pathlib
import tempfile

from ultraparabolic.cli import main

out = pathlib.Path(tempfile.mkdtemp(prefix="upf-demo-"))
spec = "kolmogorov2d"

# ----------------------------------------------------------------------
# run the full pipeline; each stage writes <spec>.<stage>.json artifacts
for argv in (
    ["check", "--spec", spec, "--out", str(out)],
    ["verify", "--spec", spec, "--out", str(out), "--dmax", "2", "--seed", "7"],
    ["solve", "--spec", spec, "--out", str(out), "--grid", "32", "--tgrid", "5"],
    ["smoothing", "--spec", spec, "--out", str(out),
     "--grid", "64", "--tgrid", "9", "--dmax", "6"],
    ["report", "--spec", spec, "--out", str(out)],
):
    code = main(argv)
    print(f"$ upf {' '.join(argv[:1] + argv[1:3])} ... -> exit {code}")
    assert code == 0

# ----------------------------------------------------------------------
# the report folds every stage's verdict into one document
report = json.loads((out / f"{spec}.report.json").read_text())
print(f"report components: {sorted(report['components'])}")
print(f"verdicts: {report['verdicts']}")
print(f"headline: {json.dumps(report['headline'], indent=2)}")

# ----------------------------------------------------------------------
# failure modes map to distinct exit codes: 2 = a checked condition fails,
# 3 = the numerical guard refuses, 4 = bad input
bad = out / "flat.json"
bad.write_text(json.dumps({
    "name": "flat", "n": 2, "m0": 1, "B": [["0", "0"], ["0", "0"]],
    "delta": "3/2", "Lambda": 2.0, "T": 0.5, "s": 1.0,
    "a": {"kind": "constant", "value": 1.0},
    "b": [{"kind": "constant", "value": 0.0}],
    "b0": {"kind": "constant", "value": 0.0},
    "g": {"kind": "constant", "value": 0.0},
    "u0": {"kind": "gaussian", "width": 0.5},
    "grid": {"N": 16, "L": 2.0},
}))
print(f"degenerate drift fails check with exit "
      f"{main(['check', '--spec', str(bad), '--out', str(out)])}")
print(f"oversized explicit step refused with exit "
      f"{main(['solve', '--spec', 'brownian-inertia', '--out', str(out), '--dt', '0.5'])}")
print(f"missing spec file is an input error: exit "
      f"{main(['check', '--spec', str(out / 'nope.json'), '--out', str(out)])}")

print(f"artifacts written under {out}:")
for p in sorted(out.iterdir()):
    print(f"  {p.name}")
