"""End-to-end acceptance checks, one test per shipped guarantee.

Each test states its tolerance inline. The expensive ones (arm-exponent
ratios, the 200-seed verifier sweep, the scaling table) are sized to finish
inside their stated wall-clock budgets on one core; sample counts are the
minimums the guarantees call for.
"""

import csv
import json
import random
from contextlib import redirect_stdout
from io import StringIO

import pytest

from oracles import brute_geodesic_TN, brute_join, brute_meet

from critfpp.arms import ArmQuery, edge_rooted_3arm, estimate_pi
from critfpp.circuits import join, meet
from critfpp.cli import main
from critfpp.construction import construct, consistency_check, verify
from critfpp.environment import Environment
from critfpp.harness import ExperimentConfig, run_scaling_NR, write_csv
from critfpp.lattice import Box, Vertex
from critfpp.nearcritical import (
    CrossingQuery,
    correlation_length_hat,
    kesten_product,
    p_R_hat,
    sigma_hat,
)
from critfpp.shortest_path import passage_time

ORIGIN = [Vertex(0, 0)]


def ring(r):
    return Box(r).boundary()


# -- 1: geodesics against exhaustive enumeration --------------------------------


def test_01_geodesic_exact_on_small_box():
    # (T, N) must match hop-indexed exhaustive relaxation, 100 seeds, exact
    box = Box(4)
    B = box.boundary()
    for seed in range(100):
        env = Environment(seed)
        T, path, N = passage_time(env, ORIGIN, B)
        bT, bN = brute_geodesic_TN(env, ORIGIN, B, box)
        assert T == bT and N == bN, seed


# -- 2, 3: crossing probabilities with exact targets ----------------------------


def test_02_crossing_estimates_match_exact_values():
    # exact enumeration gives 3/4 for the unit square and 1/2 for 2 x 1
    for (n, m), exact in (((1, 1), 0.75), ((2, 1), 0.5)):
        r = sigma_hat(CrossingQuery(n, m, 0.5), 100000, 2)
        assert abs(r.p_hat - exact) <= 3 * r.stderr, (n, m, r)


def test_03_self_duality_of_wide_rectangles():
    # left-right crossing of (n+1) x n is exactly 1/2 at p = 1/2
    for n in (4, 8, 16):
        r = sigma_hat(CrossingQuery(n + 1, n, 0.5), 10000, 3)
        assert abs(r.p_hat - 0.5) <= 3 * r.stderr, (n, r)


# -- 4: five-arm decay ratio -----------------------------------------------------


def test_04_five_arm_ratio_tracks_inverse_square():
    # pi_5(1, 2R) / pi_5(1, R) should sit near (1/2)^2, within [0.12, 0.45]
    p = {}
    for b in (8, 16, 32):
        q = ArmQuery(Vertex(0, 0), 1, b, 3, 2)
        p[b] = estimate_pi(q, 100000, seed=11).p_hat
    for R in (8, 16):
        ratio = p[2 * R] / p[R]
        assert 0.12 <= ratio <= 0.45, (R, ratio, p)


# -- 5: quasi-multiplicativity of three-arm probabilities ------------------------


def test_05_three_arm_quasi_multiplicativity():
    samples = 20000
    est = {}
    for a, b in ((1, 16), (1, 64), (16, 64)):
        r = estimate_pi(ArmQuery(Vertex(0, 0), a, b, 2, 1), samples, seed=13)
        est[(a, b)] = r
    short, full, outer = est[(1, 16)], est[(1, 64)], est[(16, 64)]
    rel = sum(r.stderr / r.p_hat for r in (short, full, outer))
    prod = short.p_hat * outer.p_hat
    assert full.p_hat <= prod * (1 + 3 * rel), est
    assert prod <= 10.0 * full.p_hat * (1 + 3 * rel), est


# -- 6: hop-count scaling ratio stability ----------------------------------------


def test_06_hop_count_ratio_is_stable_across_radii():
    cfg = ExperimentConfig(
        experiment="scaling-NR",
        radii=(16, 32, 64),
        samples=2000,
        seed=7,
        pi3_samples=10000,
        construction_samples=2,
    )
    rows = run_scaling_NR(cfg)
    ratios = [row.ratio for row in rows]
    assert max(ratios) / min(ratios) <= 3.0, rows


# -- 7: full verifier sweep plus cross-radius consistency ------------------------


def test_07_construction_verifies_on_200_environments():
    B = ring(32)
    for seed in range(200):
        env = Environment(seed)
        cons = construct(env, ORIGIN, B)
        report = verify(env, cons)
        assert report["ok"], (seed, report)
    for seed in range(50):
        ok, _, _ = consistency_check(Environment(seed), ORIGIN, 16, 32)
        assert ok, seed


# -- 8: circuit algebra against brute force --------------------------------------


def _random_blob(rng, n_cells, start):
    from critfpp.circuits import trace_boundaries
    from critfpp.lattice import DUAL

    blob = {start}
    while len(blob) < n_cells:
        c = rng.choice(sorted(blob))
        dx, dy = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        nb = Vertex(c.x + dx, c.y + dy, DUAL)
        if -3 <= nb.x <= 2 and -3 <= nb.y <= 2:
            blob.add(nb)
    return trace_boundaries(blob)[0]


def test_08_join_and_meet_match_brute_force():
    from critfpp.lattice import DUAL

    rng = random.Random(2024)
    joins = meets = 0
    around0 = {Vertex(x, y, DUAL) for x in (-1, 0) for y in (-1, 0)}
    S = [Vertex(0, 0)]
    while joins < 50 or meets < 50:
        c1 = _random_blob(rng, rng.randint(1, 9), Vertex(0, 0, DUAL))
        c2 = _random_blob(rng, rng.randint(1, 9), Vertex(-1, -1, DUAL))
        if c1 != c2 and (c1.cells & c2.cells) and joins < 50:
            joins += 1
            assert join(c1, c2) == brute_join(c1, c2)
        if around0 <= c1.cells and around0 <= c2.cells and meets < 50:
            meets += 1
            assert meet(S, [c1, c2]) == brute_meet(S, c1, c2)


# -- 9: passage time counts separating closed circuits ---------------------------


def test_09_passage_time_equals_closed_circuit_count():
    B = ring(16)
    for seed in range(50):
        env = Environment(seed)
        cons = construct(env, ORIGIN, B)
        T = passage_time(env, ORIGIN, B).T
        closed = sum(
            1
            for circ in cons.C_sequence
            if all(not env.is_open(e) for e in circ.edges)
        )
        assert closed == int(round(T)), seed


# -- 10: near-critical monotonicity under shared environments --------------------


def test_10_near_critical_monotonicity():
    ps = [0.5, 0.55, 0.6, 0.65, 0.7, 0.8, 0.9]
    sig = [sigma_hat(CrossingQuery(8, 8, p), 3000, 5).p_hat for p in ps]
    assert all(a <= b for a, b in zip(sig, sig[1:])), sig

    Ls = [correlation_length_hat(p, samples=2000, seed=0) for p in (0.55, 0.6, 0.65, 0.75)]
    assert all(a >= b for a, b in zip(Ls, Ls[1:])), Ls

    pRs = [p_R_hat(R, samples=2000, seed=0) for R in (1, 2, 4, 8)]
    assert all(a >= b for a, b in zip(pRs, pRs[1:])), pRs

    prods = [kesten_product(p, samples=2000, seed=0).product for p in (0.55, 0.6, 0.65)]
    assert max(prods) / min(prods) <= 5.0, prods


# -- 11: CLI determinism ----------------------------------------------------------


def _run_cli(argv):
    out = StringIO()
    with redirect_stdout(out):
        code = main(argv)
    return code, out.getvalue()


def test_11_cli_repeat_runs_are_byte_identical(tmp_path):
    for argv in (
        ["sample", "--seed", "9", "--R", "4"],
        ["geodesic", "--seed", "9", "--R", "8"],
        ["circuits", "--seed", "9", "--R", "6"],
        ["corrlen", "--seed", "0", "--p", "0.75", "--samples", "500"],
    ):
        first = _run_cli(argv)
        second = _run_cli(argv)
        assert first == second and first[0] == 0, argv

    # thread count is an execution detail, not part of the output
    outs = []
    for threads, name in ((1, "a.csv"), (4, "b.csv")):
        path = str(tmp_path / name)
        code, _ = _run_cli(
            ["arms", "--seed", "3", "--query", "3arm-edge", "--b", "8",
             "--samples", "2000", "--threads", str(threads), "--out", path]
        )
        assert code == 0
        outs.append(open(path, "rb").read())
    assert outs[0] == outs[1]


# -- 12: figure pipeline (secondary) ----------------------------------------------


def test_12_plot_pipeline_recovers_slopes(tmp_path):
    plots = pytest.importorskip("plots")

    synth = tmp_path / "synth.csv"
    with open(synth, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["R", "mean_NR"])
        for x in (2, 4, 8, 16, 32, 64):
            w.writerow([x, x ** (4 / 3)])
    spec = plots.FigureSpec(str(synth), "R", "mean_NR", str(tmp_path / "synth.png"), fit="power-law")
    assert abs(plots.render(spec)["slope"] - 4 / 3) <= 0.01

    cfg = ExperimentConfig(
        experiment="scaling-NR",
        radii=(8, 16, 32),
        samples=400,
        seed=21,
        pi3_samples=2000,
        construction_samples=2,
    )
    real = tmp_path / "scaling.csv"
    write_csv(run_scaling_NR(cfg), str(real))
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(
        json.dumps(
            {
                "input": str(real),
                "x": "R",
                "y": "mean_NR",
                "output": str(tmp_path / "scaling.png"),
                "scale": "loglog",
                "fit": "power-law",
            }
        )
    )
    from plots.cli import main as plots_main

    assert plots_main(["render", str(spec_path)]) == 0
    sidecar = json.loads((tmp_path / "scaling.json").read_text())
    assert 1.1 <= sidecar["slope"] <= 1.6, sidecar
