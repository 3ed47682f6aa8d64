"""Command line entry point: rotation | realize | fish | analyze | probe.

Exit codes: 0 success, 2 invalid input, 3 a resource cap was hit,
4 a certificate failed.
"""
import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

from . import analysis, realization
from .errors import BudgetError, CertificateFailure, DegenerateBody, RotsetsError
from .geometry import body_from_json
from .potential import potential_from_json
from .rotation import rotation_polytope
from .shift import DEFAULT_CYCLE_BUDGET
from .svg import body_svg, overlay_svg

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_CERTIFICATE = 0, 2, 3, 4


@dataclass
class RunConfig:
    exact: bool = True
    rank_cap: int = None
    cycle_budget: int = DEFAULT_CYCLE_BUDGET
    max_period: int = realization.DEFAULT_MAX_PERIOD
    seed: int = 0
    out: str = "."
    emit: set = field(default_factory=lambda: {"json", "csv", "svg"})


class InvalidInput(Exception):
    pass


def _num(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else c.numerator
    return float(c)


def _point_key(v):
    return "(" + ",".join(str(_num(c)) for c in v) + ")"


def _write(cfg, name, text):
    """Write atomically into the output directory."""
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    fd, tmp = tempfile.mkstemp(dir=cfg.out, prefix=f".{name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def _write_json(cfg, name, obj):
    return _write(cfg, name, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def _load_potential(path, cfg):
    obj = _load_json(path)
    try:
        return potential_from_json(obj, exact=cfg.exact, rank_cap=cfg.rank_cap)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidInput(f"malformed potential file {path}: {exc}") from exc


def _load_body(path, cfg):
    obj = _load_json(path)
    try:
        return body_from_json(obj, exact=cfg.exact)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed body file {path}: {exc}") from exc


def polytope_json(R):
    out = R.to_json()
    out["witnesses"] = {_point_key(v): str(c) for v, c in R.witnesses.items()}
    return out


# -- commands -----------------------------------------------------------------

def cmd_rotation(potential_file, cfg):
    F = _load_potential(potential_file, cfg)
    R = rotation_polytope(F)
    if "json" in cfg.emit:
        _write_json(cfg, "polytope.json", polytope_json(R))
    if "svg" in cfg.emit and R.dim == 2:
        _write(cfg, "polytope.svg", body_svg(R))
    print(json.dumps(polytope_json(R)))
    return EXIT_OK


def cmd_realize(potential_file, body_file, tol, cfg):
    if tol is None or tol <= 0:
        raise InvalidInput("--tol must be positive")
    F = _load_potential(potential_file, cfg).to_exact()
    K = _load_body(body_file, cfg)
    if not K.exact:
        K = body_from_json(K.to_json(), exact=True)
    limits = realization.Limits(rank_cap=cfg.rank_cap, max_period=cfg.max_period)
    G, trace = realization.realize(F, K, Fraction(tol).limit_denominator(10 ** 12), limits)
    lines = trace.certificate()
    cert = {
        "constants": {
            "pin_factor": str(realization.PIN_FACTOR),
            "kappa": str(realization.KAPPA),
            "C": realization.C_BOUND,
            "openness_factor": realization.OPENNESS_FACTOR,
        },
        "tol": tol,
        "eps0": float(trace.eps0_sq) ** 0.5,
        "iterations": trace.iterations,
        "checks": [{"name": n, "holds": bool(ok), "detail": d} for n, ok, d in lines],
        "all_hold": all(ok for _, ok, _ in lines),
    }
    if "json" in cfg.emit:
        _write_json(cfg, "potential.json", G.to_json())
        _write_json(cfg, "certificate.json", cert)
    if "csv" in cfg.emit:
        _write(cfg, "trace.csv", trace.to_csv())
    if "svg" in cfg.emit and K.dim == 2:
        snaps = [list(rotation_polytope(F).vertices)] + [r.rotation_vertices for r in trace.records]
        _write(cfg, "realize.svg", overlay_svg(K, snaps))
    for name, ok, detail in lines:
        print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}".rstrip())
    return EXIT_OK if cert["all_hold"] else EXIT_CERTIFICATE


def cmd_fish(max_period, depth, cfg, threshold=0.3):
    if max_period < 1 or depth < 1:
        raise InvalidInput("max_period and depth must be positive")
    hull, report = analysis.fish(max_period, depth, threshold, budget=cfg.cycle_budget)
    if "json" in cfg.emit:
        _write_json(cfg, "fish.json", {**polytope_json(hull), "report": report.to_json()})
    if "csv" in cfg.emit:
        _write(cfg, "fish_angles.csv", _angles_csv(report))
    if "svg" in cfg.emit:
        _write(cfg, "fish.svg", body_svg(hull, report.corners))
    print(f"{len(hull.vertices)} vertices, {len(report.corners)} corners above {threshold}")
    return EXIT_OK


def _angles_csv(report):
    rows = ["x,y,exterior_angle"]
    for v, a in zip(report.body.vertices, report.exterior_angles):
        rows.append(f"{float(v[0])!r},{float(v[1])!r},{a!r}")
    return "\n".join(rows) + "\n"


def cmd_analyze(body_file, threshold, cfg):
    K = _load_body(body_file, cfg)
    try:
        report = analysis.detect_corners(K, threshold)
    except DegenerateBody as exc:
        report = exc.report
    if "json" in cfg.emit:
        _write_json(cfg, "report.json", report.to_json())
    if "csv" in cfg.emit:
        _write(cfg, "angles.csv", _angles_csv(report))
    if "svg" in cfg.emit and K.dim == 2:
        _write(cfg, "body.svg", body_svg(K, report.corners))
    print(f"{len(report.corners)} corners")
    return EXIT_OK


def cmd_probe(samples, ranks, cfg):
    rep = analysis.genericity_probe(samples, ranks, cfg.seed)
    if "json" in cfg.emit:
        _write_json(cfg, "probe.json", rep)
    if "csv" in cfg.emit:
        rows = ["rank,sample,vertices,max_angle"]
        for r, d in rep["ranks"].items():
            for i, (n, a) in enumerate(zip(d["vertex_counts"], d["max_angles"])):
                rows.append(f"{r},{i},{n},{a!r}")
        _write(cfg, "probe.csv", "\n".join(rows) + "\n")
    for r, d in rep["ranks"].items():
        print(f"rank {r}: median vertices {d['median_vertices']}, "
              f"median max angle {d['median_max_angle']:.4f}")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def _ranks(text):
    if "-" in text:
        a, b = text.split("-")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=None,
                      help="rational arithmetic (default except for fish)")
    mode.add_argument("--float", dest="exact", action="store_false", help="float tables")
    common.add_argument("--rank-cap", type=int, help="largest potential rank allowed")
    common.add_argument("--max-period", type=int, default=realization.DEFAULT_MAX_PERIOD,
                        help="longest periodic orbit searched during realization")
    common.add_argument("--cycle-budget", type=int, default=DEFAULT_CYCLE_BUDGET,
                        help="maximum number of enumerated cycles")
    common.add_argument("--seed", type=int, default=0, help="seed for probe sampling")
    common.add_argument("--emit", default="json,csv,svg", help="comma list of output kinds")
    common.add_argument("--out", default=".", help="output directory")

    p = argparse.ArgumentParser(prog="rotsets", description="Exact rotation sets and their realization.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("rotation", parents=[common], help="rotation polytope of a potential")
    s.add_argument("potential")
    s = sub.add_parser("realize", parents=[common], help="realize a body as a rotation set")
    s.add_argument("potential")
    s.add_argument("body")
    s.add_argument("--tol", type=float, required=True)
    s = sub.add_parser("fish", parents=[common], help="hull of periodic circle averages")
    s.add_argument("max_period", type=int)
    s.add_argument("depth", type=int, nargs="?", default=16)
    s.add_argument("--threshold", type=float, default=0.3)
    s = sub.add_parser("analyze", parents=[common], help="corner report of a body")
    s.add_argument("body")
    s.add_argument("--threshold", type=float, default=0.2)
    s = sub.add_parser("probe", parents=[common], help="vertex statistics of random potentials")
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--ranks", type=_ranks, default=list(range(1, 7)))
    return p


def _config(args):
    exact = args.exact if args.exact is not None else args.command != "fish"
    emit = {e.strip() for e in args.emit.split(",") if e.strip()}
    return RunConfig(exact=exact, rank_cap=args.rank_cap, cycle_budget=args.cycle_budget,
                     max_period=args.max_period, seed=args.seed, out=args.out, emit=emit)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    cfg = _config(args)
    try:
        if args.command == "rotation":
            return cmd_rotation(args.potential, cfg)
        if args.command == "realize":
            return cmd_realize(args.potential, args.body, args.tol, cfg)
        if args.command == "fish":
            return cmd_fish(args.max_period, args.depth, cfg, args.threshold)
        if args.command == "analyze":
            return cmd_analyze(args.body, args.threshold, cfg)
        return cmd_probe(args.samples, args.ranks, cfg)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CertificateFailure as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except (InvalidInput, RotsetsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
