"""A short training run end to end: train, evaluate on the held-out year, report.

Uses the narrow desk-scale network and only a few updates so it finishes in
a couple of minutes on one core; the acceptance runs use 2000 episodes.
"""
import sys
import tempfile
from pathlib import Path

from wsnrl.harness import desk_hyper, metrics_from_outputs, report, run_case

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 16
out = Path(tempfile.mkdtemp(prefix="wsnrl_demo_"))
hyper = desk_hyper(feature_size=4)

dirs = []
for case in (1, 2):
    dirs += run_case(case, episodes, [0], out, hyper=hyper)

for d in dirs:
    m = metrics_from_outputs(d / "eval")
    curve = (d / "learning_curve.csv").read_text().splitlines()
    print(f"{d.name}: {len(curve) - 1} updates, active ratio {m.active_ratio:.3f}, std D_T {m.std_DT:.4f} %")

report(dirs, out / "report")
print((out / "report" / "report.md").read_text())
print("outputs in", out)
