"""Render a harness CSV column pair as a figure, optionally with a fitted
power law.

The fit is ordinary least squares on log-transformed data. When the CSV
carries a standard-error column for the y variable, points are weighted by
the inverse of their log-scale standard error. Every render writes the image
plus a sidecar JSON next to it with the fitted slope and its 95% confidence
interval, so downstream checks never have to parse pixels.
"""

import csv
import json
import os
from dataclasses import asdict, dataclass

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SCALES = ("loglog", "semilog", "linear")
FITS = ("none", "power-law")


@dataclass(frozen=True)
class FigureSpec:
    input: str
    x: str
    y: str
    output: str
    scale: str = "loglog"
    fit: str = "none"

    def __post_init__(self):
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}, got {self.scale!r}")
        if self.fit not in FITS:
            raise ValueError(f"fit must be one of {FITS}, got {self.fit!r}")

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            blob = json.load(f)
        known = {"input", "x", "y", "output", "scale", "fit"}
        extra = set(blob) - known
        if extra:
            raise ValueError(f"unknown figure spec keys: {sorted(extra)}")
        return cls(**blob)


def _read_columns(spec):
    with open(spec.input, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in (spec.x, spec.y):
            if col not in header:
                raise ValueError(f"column {col!r} not in {spec.input} ({header})")
        rows = list(reader)
    if not rows:
        raise ValueError(f"no data rows in {spec.input}")
    x = np.array([float(r[spec.x]) for r in rows])
    y = np.array([float(r[spec.y]) for r in rows])
    err_col = _stderr_column(spec.y, header)
    err = np.array([float(r[err_col]) for r in rows]) if err_col else None
    return x, y, err


def _stderr_column(y_col, header):
    """Harness CSVs name errors 'stderr_<suffix>' after 'mean_<suffix>'."""
    suffix = y_col[5:] if y_col.startswith("mean_") else y_col
    for cand in (f"stderr_{suffix}", f"stderr_{y_col}", "stderr"):
        if cand in header and cand != y_col:
            return cand
    return None


def fit_power_law(x, y, err=None):
    """Least-squares slope of log y against log x.

    Returns (slope, intercept, slope_stderr). err, if given, holds linear-scale
    standard errors of y; points are weighted by 1/(err/y), the delta-method
    log-scale error.
    """
    keep = (x > 0) & (y > 0)
    x, y = x[keep], y[keep]
    if err is not None:
        err = err[keep]
    if len(x) < 2:
        raise ValueError(f"insufficient points for a power-law fit ({len(x)})")
    lx, ly = np.log(x), np.log(y)
    if err is not None and np.all(err > 0):
        w = y / err  # 1/sigma in log space
        (slope, intercept), cov = np.polyfit(lx, ly, 1, w=w, cov="unscaled")
        return slope, intercept, float(np.sqrt(cov[0, 0]))
    if len(x) == 2:
        slope = (ly[1] - ly[0]) / (lx[1] - lx[0])
        return slope, ly[0] - slope * lx[0], 0.0
    (slope, intercept), cov = np.polyfit(lx, ly, 1, cov=True)
    return slope, intercept, float(np.sqrt(cov[0, 0]))


def render(spec):
    """Write the figure and its sidecar JSON; return the sidecar dict."""
    x, y, err = _read_columns(spec)
    order = np.argsort(x)
    x, y = x[order], y[order]
    if err is not None:
        err = err[order]

    fig, ax = plt.subplots(figsize=(6, 4.5))
    if err is not None:
        ax.errorbar(x, y, yerr=err, fmt="o", ms=4, capsize=3, label="data")
    else:
        ax.plot(x, y, "o", ms=4, label="data")

    sidecar = {
        "input": spec.input,
        "x": spec.x,
        "y": spec.y,
        "scale": spec.scale,
        "fit": spec.fit,
        "n_points": int(len(x)),
    }
    if spec.fit == "power-law":
        slope, intercept, se = fit_power_law(x, y, err)
        xs = np.linspace(x.min(), x.max(), 128)
        ax.plot(xs, np.exp(intercept) * xs**slope, "-", label=f"slope {slope:.3f}")
        sidecar.update(
            slope=slope,
            intercept=intercept,
            slope_stderr=se,
            slope_ci95=[slope - 1.96 * se, slope + 1.96 * se],
        )

    if spec.scale == "loglog":
        ax.set_xscale("log")
        ax.set_yscale("log")
    elif spec.scale == "semilog":
        ax.set_yscale("log")
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.legend()
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(spec.output)), exist_ok=True)
    fig.savefig(spec.output)
    plt.close(fig)

    sidecar_path = os.path.splitext(spec.output)[0] + ".json"
    with open(sidecar_path, "w") as f:
        json.dump({"spec": asdict(spec), **sidecar}, f, indent=2)
        f.write("\n")
    return sidecar
