"""Command-line front end. One --seed reproduces a whole run: sub-seeds are
derived by hashing (seed, purpose label), stdout and output files are
byte-identical across repeated identical invocations, and --threads never
changes results.

Exit codes: 0 success, 1 usage error, 2 invariant violation (a failed
verifier item or a construction assertion)."""

import argparse
import json
import sys

from .arms import ArmQuery, edge_rooted_3arm, estimate_pi
from .construction import ConstructionError, circuit_sequence, construct, verify
from .environment import Environment, WeightDistribution
from .harness import ExperimentConfig, run_experiment, tail_slope, write_csv
from .lattice import Vertex
from .nearcritical import correlation_length_hat, kesten_product, p_R_hat
from .shortest_path import passage_time


def _ring(r):
    pts = set()
    for k in range(-r, r + 1):
        pts |= {Vertex(k, r), Vertex(k, -r), Vertex(r, k), Vertex(-r, k)}
    return sorted(pts, key=lambda v: (v.x, v.y))


def _env(args):
    return Environment(args.seed, WeightDistribution.parse(args.dist))


def _echo(args, **extra):
    # threads is an execution detail: results must not depend on it, so it
    # stays out of the echoed config to keep repeated runs byte-identical
    cfg = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "threads")
    }
    cfg.update(extra)
    print("config:", json.dumps(cfg, sort_keys=True, default=str))


def _cmd_sample(args):
    env = _env(args)
    _echo(args)
    n = 2 * args.R + 1
    grid = env.open_grid(-args.R, -args.R, n, n)
    frac = float(grid.mean())
    print(f"open fraction in B_{args.R}: {frac!r}")
    if args.json:
        with open(args.json, "w") as f:
            json.dump(
                {"seed": args.seed, "R": args.R, "open": grid.astype(int).tolist()},
                f,
                sort_keys=True,
            )
    return 0


def _cmd_geodesic(args):
    env = _env(args)
    _echo(args)
    res = passage_time(env, [Vertex(0, 0)], _ring(args.R))
    out = {"T": res.T, "N": res.N, "path": [[v.x, v.y] for v in res.path.vertices]}
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_circuits(args):
    env = _env(args)
    _echo(args)
    circs, L, P = circuit_sequence(env, [Vertex(0, 0)], _ring(args.R))
    print(f"L={L} P={P}")
    if args.dump_circuits:
        with open(args.dump_circuits, "w") as f:
            json.dump([c.to_json() for c in circs], f, sort_keys=True)
    return 0


def _cmd_construct(args):
    env = _env(args)
    _echo(args)
    try:
        c = construct(env, [Vertex(0, 0)], _ring(args.R))
    except ConstructionError as ex:
        print(f"construction failed: {ex}", file=sys.stderr)
        return 2
    rep = verify(env, c)
    items = {k: v for k, v in rep.items() if k != "diagnostics"}
    print(f"L={c.L} P={c.P} hops={c.gamma.hops} T={c.gamma.passage_time!r}")
    print("verify:", json.dumps(items, sort_keys=True))
    if args.dump_construction:
        blob = c.to_json()
        blob["verify"] = items
        with open(args.dump_construction, "w") as f:
            json.dump(blob, f, sort_keys=True)
    return 0 if all(items.values()) else 2


def _cmd_verify(args):
    return _cmd_construct(args)


_QUERIES = {
    "1arm": lambda a, b: ArmQuery(Vertex(0, 0), a, b, 1, 0),
    "3arm-edge": lambda a, b: edge_rooted_3arm(b),
    "4arm": lambda a, b: ArmQuery(Vertex(0, 0), a, b, 2, 2),
    "5arm": lambda a, b: ArmQuery(Vertex(0, 0), a, b, 3, 2),
}


def _cmd_arms(args):
    _echo(args)
    q = _QUERIES[args.query](args.a, args.b)
    r = estimate_pi(q, args.samples, args.seed, threads=args.threads)
    row = r.csv_row(args.query, q)
    header = "query,a,b,open_arms,closed_arms,defects,samples,p_hat,stderr,seed"
    print(header)
    print(",".join(str(v) for v in row))
    if args.out:
        with open(args.out, "wb") as f:
            f.write(
                (header + "\n" + ",".join(str(v) for v in row) + "\n").encode("utf-8")
            )
    return 0


def _cmd_corrlen(args):
    _echo(args)
    if args.pr is not None:
        v = p_R_hat(args.pr, args.eps, args.samples, args.seed)
        print(f"p_R_hat({args.pr}) = {v!r}")
    else:
        L = correlation_length_hat(args.p, args.eps, args.samples, args.seed)
        print(f"L_hat({args.p}) = {L}")
        if args.kesten:
            k = kesten_product(args.p, args.samples, args.seed, args.eps)
            print(f"kesten_product = {k.product!r} +- {k.stderr!r}")
    return 0


def _cmd_scaling(args):
    _echo(args)
    cfg = ExperimentConfig(
        experiment=args.experiment,
        radii=[int(r) for r in args.radii.split(",")],
        samples=args.samples,
        seed=args.seed,
        distribution=args.dist,
        out=args.out,
        construction_samples=args.construction_samples,
        pi3_samples=args.pi3_samples or args.samples,
        threads=args.threads,
    )
    rows, digest = run_experiment(cfg)
    if not args.out:
        digest = write_csv(rows, "/dev/stdout")
    print(f"rows={len(rows)} sha256={digest}")
    if cfg.experiment == "point-to-point-tail":
        print(f"tail_slope={tail_slope(rows)!r}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="critfpp",
        description="Critical first-passage percolation toolkit: sampling, "
        "geodesics, circuits, the distinguished-geodesic construction, arm "
        "probabilities, correlation length, and scaling experiments.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, R=True):
        sp.add_argument("--seed", type=int, required=True, help="master seed")
        sp.add_argument(
            "--dist",
            default="bernoulli",
            help="weight distribution, 'kind' or 'kind:alpha=..,h=..'",
        )
        if R:
            sp.add_argument("--R", type=int, default=16, help="box radius")

    sp = sub.add_parser("sample", help="sample an environment window")
    common(sp)
    sp.add_argument("--json", help="write the open/closed grid to this JSON file")
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("geodesic", help="passage time and geodesic to dB_R")
    common(sp)
    sp.set_defaults(func=_cmd_geodesic)

    sp = sub.add_parser("circuits", help="alternating circuit sequence around 0")
    common(sp)
    sp.add_argument("--dump-circuits", help="write the circuits to this JSON file")
    sp.set_defaults(func=_cmd_circuits)

    for name, hlp in (
        ("construct", "build and verify the distinguished geodesic"),
        ("verify", "alias of construct; exit 2 unless every item passes"),
    ):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--dump-construction", help="write construction JSON here")
        sp.add_argument("--json", dest="dump_construction_alias", help=argparse.SUPPRESS)
        sp.set_defaults(func=_cmd_construct)

    sp = sub.add_parser("arms", help="Monte Carlo arm probability")
    common(sp, R=False)
    sp.add_argument("--query", choices=sorted(_QUERIES), required=True)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="CSV output path")
    sp.set_defaults(func=_cmd_arms)

    sp = sub.add_parser("corrlen", help="correlation length / p_R / Kesten product")
    common(sp, R=False)
    sp.add_argument("--p", type=float, default=0.6)
    sp.add_argument("--pr", type=int, help="estimate p_R for this R instead")
    sp.add_argument("--eps", type=float, default=0.02)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--kesten", action="store_true")
    sp.set_defaults(func=_cmd_corrlen)

    sp = sub.add_parser("scaling", help="run a harness experiment")
    common(sp, R=False)
    sp.add_argument(
        "--experiment",
        default="scaling-NR",
        choices=(
            "scaling-NR",
            "point-to-point-tail",
            "general-weights-NR",
            "arm-table",
            "corrlen-table",
            "verify-suite",
        ),
    )
    sp.add_argument("--radii", default="16,32,64")
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--pi3-samples", type=int, dest="pi3_samples")
    sp.add_argument("--construction-samples", type=int, default=20)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="CSV output path")
    sp.set_defaults(func=_cmd_scaling)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        # argparse uses 2 for usage errors and 0 for --help; we use 1 and 0
        return 0 if ex.code == 0 else 1
    if getattr(args, "dump_construction_alias", None) and not args.dump_construction:
        args.dump_construction = args.dump_construction_alias
    try:
        return args.func(args)
    except ConstructionError as ex:
        print(f"invariant violation: {ex}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
