"""Run a harness experiment, write its CSV, and render a figure.

Harness output is byte-deterministic: same config, same bytes, regardless of
thread count or wall time (timing lives in a separate manifest sidecar). The
plots package consumes only the CSV, fits a power law on log-log axes, and
records the slope in a JSON sidecar next to the image.

Requires the companion plots package (pip install -e plots/).
"""

import json
import tempfile
from pathlib import Path

from critfpp.harness import ExperimentConfig, run_experiment

out = Path(tempfile.mkdtemp(prefix="critfpp-demo-"))
csv_path = out / "scaling.csv"

cfg = ExperimentConfig(
    experiment="scaling-NR",
    radii=(8, 16, 32),
    samples=300,
    seed=21,
    pi3_samples=2000,
    construction_samples=2,
    out=str(csv_path),
)
rows, digest = run_experiment(cfg)  # also writes the CSV and its manifest
print(f"wrote {csv_path} (sha256 {digest[:16]}...)")
for row in rows:
    print(f"  R={row.R:2d}  E[N_R]={row.mean_NR:7.2f}  ratio={row.ratio:.3f}")

try:
    from plots import FigureSpec, render
except ImportError:
    print("plots package not installed; skipping the figure")
    raise SystemExit(0)

spec = FigureSpec(
    input=str(csv_path),
    x="R",
    y="mean_NR",
    output=str(out / "scaling.png"),
    scale="loglog",
    fit="power-law",
)
sidecar = render(spec)
print(f"figure: {spec.output}")
print(f"fitted slope {sidecar['slope']:.3f} (conjectured 4/3 = 1.333)")
print(json.dumps(sidecar["slope_ci95"]))
