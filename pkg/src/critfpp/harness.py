"""Experiment orchestration: scaling studies, tail tables, arm and
correlation-length tables, verification suites, and deterministic CSV/JSON
reporting.

Every experiment is driven by one ExperimentConfig; per-sample seeds derive
from (config.seed, cell label), so an identical config reproduces identical
CSV bytes regardless of thread count. Wall time and other nondeterministic
facts live in the JSON run manifest, never in the CSV.
"""

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arms import ArmQuery, edge_rooted_3arm, estimate_pi
from .construction import consistency_check, construct, verify
from .environment import Environment, WeightDistribution, mix_seed
from .lattice import Vertex
from .nearcritical import correlation_length_hat, p_R_hat
from .shortest_path import GridWindow, fast_boundary_TN, grid_geodesic

EXPERIMENTS = (
    "scaling-NR",
    "point-to-point-tail",
    "general-weights-NR",
    "arm-table",
    "corrlen-table",
    "verify-suite",
)


@dataclass
class ExperimentConfig:
    experiment: str
    radii: list
    samples: int
    seed: int
    distribution: str = "bernoulli"
    out: str = None
    construction_samples: int = 20
    pi3_samples: int = None
    lambdas: list = None
    epsilon: float = 0.02
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        radii = list(self.radii)
        if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be nonempty and strictly increasing")
        self.radii = radii
        if self.pi3_samples is None:
            self.pi3_samples = self.samples
        if self.lambdas is None:
            self.lambdas = [0.25 * k for k in range(1, 17)]

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            return cls(**json.load(f))


@dataclass(frozen=True)
class ScalingRow:
    R: int
    mean_NR: float
    stderr_NR: float
    mean_NR_construction: float
    construction_samples: int
    pi3_hat: float
    stderr_pi3: float
    ratio: float
    samples: int
    seed: int


def _mean_stderr(xs):
    xs = np.asarray(xs, dtype=float)
    m = float(xs.mean())
    s = float(xs.std(ddof=1) / math.sqrt(len(xs))) if len(xs) > 1 else 0.0
    return m, s


def _ring(r):
    pts = set()
    for k in range(-r, r + 1):
        pts |= {Vertex(k, r), Vertex(k, -r), Vertex(r, k), Vertex(-r, k)}
    return sorted(pts, key=lambda v: (v.x, v.y))


def _map_cells(fn, cells, threads):
    """Deterministic parallel map: results ordered by cell index no matter
    how the workers interleave."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, cells))
    return [fn(c) for c in cells]


def run_scaling_NR(config):
    """Hop counts of geodesics from 0 to the boundary of the box of radius R,
    against the R^2 * pi3(R) normalizer.

    mean_NR is the exact minimal hop count over all geodesics, the quantity
    the normalizer is meant to track; mean_NR_construction averages the hop
    count of the distinguished geodesic over a smaller subsample, since each
    construction costs seconds."""
    dist = WeightDistribution.parse(config.distribution)
    if dist.kind != "bernoulli":
        raise ValueError("scaling-NR is a Bernoulli experiment")
    rows = []
    for R in config.radii:
        Ns = _map_cells(
            lambda i: fast_boundary_TN(Environment(mix_seed(config.seed, i)), R)[1],
            range(config.samples),
            config.threads,
        )
        m, s = _mean_stderr(Ns)
        B = _ring(R)
        cs = min(config.construction_samples, config.samples)
        cons_N = [
            construct(Environment(mix_seed(config.seed, i)), [Vertex(0, 0)], B).gamma.hops
            for i in range(cs)
        ]
        pi3 = estimate_pi(
            edge_rooted_3arm(R), config.pi3_samples, mix_seed(config.seed, 3 * R + 1)
        )
        rows.append(
            ScalingRow(
                R=R,
                mean_NR=m,
                stderr_NR=s,
                mean_NR_construction=float(np.mean(cons_N)),
                construction_samples=cs,
                pi3_hat=pi3.p_hat,
                stderr_pi3=pi3.stderr,
                ratio=m / (R * R * pi3.p_hat),
                samples=config.samples,
                seed=config.seed,
            )
        )
    return rows


def _ptp_N(env, d):
    """Minimal hop count among geodesics between 0 and (d, 0)."""
    w = GridWindow(env, -d, -3 * d // 2 - 2, 3 * d + 1, 3 * d + 5)
    res = grid_geodesic(w, [Vertex(0, 0)], [Vertex(d, 0)])
    return res[1]


def run_ptp_tail(config):
    """Survival table of N(0, (d,0)) / (d^2 * pi3(d)) over the lambda grid,
    one block of rows per distance d = each configured radius."""
    dist = WeightDistribution.parse(config.distribution)
    if dist.kind != "bernoulli":
        raise ValueError("point-to-point-tail is a Bernoulli experiment")
    rows = []
    for d in config.radii:
        Ns = _map_cells(
            lambda i: _ptp_N(Environment(mix_seed(config.seed, i), dist), d),
            range(config.samples),
            config.threads,
        )
        pi3 = estimate_pi(
            edge_rooted_3arm(d), config.pi3_samples, mix_seed(config.seed, 3 * d + 1)
        )
        norm = d * d * pi3.p_hat
        vals = np.asarray(Ns, dtype=float) / norm
        for lam in config.lambdas:
            surv = float((vals >= lam).mean())
            rows.append(
                {
                    "d": d,
                    "lambda": lam,
                    "survival": surv,
                    "pi3_hat": pi3.p_hat,
                    "samples": config.samples,
                    "seed": config.seed,
                }
            )
    return rows


def tail_slope(rows):
    """Least-squares slope of log survival against log lambda over the rows
    with positive survival and lambda; a power-law tail makes it negative."""
    xs, ys = [], []
    for r in rows:
        if r["survival"] > 0 and r["lambda"] > 0:
            xs.append(math.log(r["lambda"]))
            ys.append(math.log(r["survival"]))
    if len(xs) < 2:
        return float("nan")
    return float(np.polyfit(xs, ys, 1)[0])


def run_general_weights(config, epsilons=(0.0, 0.1)):
    """Distinguished-geodesic hop counts for general critical weights,
    normalized by R^(2+eps) * pi3(R); reports mean and upper quantiles."""
    dist = WeightDistribution.parse(config.distribution)
    rows = []
    for R in config.radii:
        B = _ring(R)
        Ns = _map_cells(
            lambda i: construct(
                Environment(mix_seed(config.seed, i), dist), [Vertex(0, 0)], B
            ).gamma.hops,
            range(config.samples),
            config.threads,
        )
        pi3 = estimate_pi(
            edge_rooted_3arm(R), config.pi3_samples, mix_seed(config.seed, 3 * R + 1)
        )
        arr = np.asarray(Ns, dtype=float)
        for eps in epsilons:
            norm = R ** (2.0 + eps) * pi3.p_hat
            rows.append(
                {
                    "R": R,
                    "epsilon": eps,
                    "mean_ratio": float(arr.mean() / norm),
                    "q90_ratio": float(np.quantile(arr, 0.9) / norm),
                    "max_ratio": float(arr.max() / norm),
                    "pi3_hat": pi3.p_hat,
                    "samples": config.samples,
                    "seed": config.seed,
                }
            )
    return rows


def run_arm_table(config):
    """pi-hat table for the standard polychromatic queries at each radius."""
    queries = {
        "pi1": lambda b: ArmQuery(Vertex(0, 0), 1, b, 1, 0),
        "pi3-edge": edge_rooted_3arm,
        "pi4": lambda b: ArmQuery(Vertex(0, 0), 1, b, 2, 2),
        "pi5": lambda b: ArmQuery(Vertex(0, 0), 1, b, 3, 2),
    }
    rows = []
    for name, mk in sorted(queries.items()):
        for b in config.radii:
            q = mk(b)
            r = estimate_pi(q, config.samples, mix_seed(config.seed, b))
            rows.append(
                {
                    "query": name,
                    "a": q.a,
                    "b": b,
                    "open_arms": q.open_count,
                    "closed_arms": q.closed_count,
                    "defects": q.defect_budget,
                    "p_hat": r.p_hat,
                    "stderr": r.stderr,
                    "samples": r.samples,
                    "seed": r.seed,
                }
            )
    return rows


def run_corrlen_table(config, ps=(0.55, 0.6, 0.65, 0.75)):
    """L-hat over a p grid plus p_R-hat over the configured radii."""
    rows = []
    for p in ps:
        L = correlation_length_hat(p, config.epsilon, config.samples, config.seed)
        rows.append({"quantity": "L_hat", "param": p, "value": float(L)})
    for R in config.radii:
        pr = p_R_hat(R, config.epsilon, config.samples, config.seed)
        rows.append({"quantity": "p_R_hat", "param": R, "value": pr})
    for r in rows:
        r.update({"epsilon": config.epsilon, "samples": config.samples, "seed": config.seed})
    return rows


def run_verify_suite(config):
    """Full construction verifier over many seeds at the largest radius, plus
    cross-radius consistency when two radii are configured."""
    R = config.radii[-1]
    B = _ring(R)
    rows = []
    for i in range(config.samples):
        env = Environment(mix_seed(config.seed, i))
        c = construct(env, [Vertex(0, 0)], B)
        rep = verify(env, c)
        items = {k: v for k, v in rep.items() if k != "diagnostics"}
        rows.append(
            {
                "sample": i,
                "R": R,
                "all_pass": all(items.values()),
                "failed_items": ";".join(sorted(k for k, v in items.items() if not v)),
                "L": c.L,
                "P": c.P,
                "seed": config.seed,
            }
        )
    if len(config.radii) >= 2:
        r1, r2 = config.radii[-2], config.radii[-1]
        for i in range(min(config.samples, 50)):
            env = Environment(mix_seed(config.seed, i))
            ok, _c1, _c2 = consistency_check(env, [Vertex(0, 0)], r1, r2)
            rows.append(
                {
                    "sample": i,
                    "R": f"{r1}/{r2}",
                    "all_pass": ok,
                    "failed_items": "" if ok else "viii",
                    "L": "",
                    "P": "",
                    "seed": config.seed,
                }
            )
    return rows


def pi3_sum_ratio(pi3_by_radius, L):
    """Ratio of sum_{i=1..L} L * pi3(i) to L^2 * pi3(L), interpolating the
    estimate table geometrically between measured radii."""
    radii = sorted(pi3_by_radius)

    def p(i):
        if i <= radii[0]:
            return pi3_by_radius[radii[0]]
        if i >= radii[-1]:
            return pi3_by_radius[radii[-1]]
        for a, b in zip(radii, radii[1:]):
            if a <= i <= b:
                t = (math.log(i) - math.log(a)) / (math.log(b) - math.log(a))
                return math.exp(
                    (1 - t) * math.log(pi3_by_radius[a]) + t * math.log(pi3_by_radius[b])
                )
        raise AssertionError

    left = sum(L * p(i) for i in range(1, L + 1))
    return left / (L * L * p(L))


# -- reporting ------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows, path):
    """Deterministic CSV: header from the first row's fields, float values in
    repr form, newline-terminated lines."""
    if not rows:
        raise ValueError("no rows to write")
    first = rows[0]
    if hasattr(first, "__dataclass_fields__"):
        cols = list(first.__dataclass_fields__)
        get = lambda r, c: getattr(r, c)
    else:
        cols = list(first)
        get = lambda r, c: r[c]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_fmt(get(r, c)) for c in cols))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    with open(path, "wb") as f:
        f.write(data)
    return hashlib.sha256(data).hexdigest()


def write_manifest(config, csv_path, csv_sha256, wall_seconds, extra=None):
    manifest = {
        "config": {k: getattr(config, k) for k in config.__dataclass_fields__},
        "csv": csv_path,
        "csv_sha256": csv_sha256,
        "wall_seconds": wall_seconds,
    }
    if extra:
        manifest["extra"] = extra
    path = str(csv_path) + ".manifest.json"
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return path


_RUNNERS = {
    "scaling-NR": run_scaling_NR,
    "point-to-point-tail": run_ptp_tail,
    "general-weights-NR": run_general_weights,
    "arm-table": run_arm_table,
    "corrlen-table": run_corrlen_table,
    "verify-suite": run_verify_suite,
}


def run_experiment(config):
    """Dispatch on config.experiment; writes CSV + manifest when config.out
    is set. Returns (rows, csv_sha256 or None)."""
    t0 = time.time()
    rows = _RUNNERS[config.experiment](config)
    digest = None
    if config.out:
        extra = None
        if config.experiment == "point-to-point-tail":
            extra = {"tail_slope": tail_slope(rows)}
        digest = write_csv(rows, config.out)
        write_manifest(config, config.out, digest, time.time() - t0, extra)
    return rows, digest
