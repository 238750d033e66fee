"""Command-line front end: parse IFS documents, run analyses, emit reports,
curves and point clouds."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import geometry, pressure
from .classify import classify
from .errors import (
    AffThermoError,
    BudgetExceeded,
    InconclusiveBracket,
    ParseError,
    PreconditionError,
)
from .ifs import AffineIFS
from .mat2 import Direction
from .symbolic import SubshiftKind

KINDS = {
    "full": SubshiftKind.FULL,
    "sigma": SubshiftKind.SIGMA,
    "invertible": SubshiftKind.INVERTIBLE,
}

FMT = "%.12g"


def _number(value, where: str) -> float:
    """Numeric document entry: a JSON number or an exact rational "p/q"."""
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad rational {value!r}: {exc}") from exc
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ParseError(f"{where}: matrices must be finite-valued")
        return float(value)
    raise ParseError(f"{where}: expected number or rational string, got {value!r}")


def load_document(path: str) -> AffineIFS:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: malformed document at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or "maps" not in doc or not doc["maps"]:
        raise ParseError(f"{path}: document needs a non-empty 'maps' list")
    matrices = []
    translations = []
    for k, entry in enumerate(doc["maps"]):
        where = f"{path}: maps[{k}]"
        try:
            rows = entry["matrix"]
            matrices.append(
                [[_number(rows[0][0], where), _number(rows[0][1], where)],
                 [_number(rows[1][0], where), _number(rows[1][1], where)]]
            )
            tr = entry.get("translation", [0, 0])
            translations.append([_number(tr[0], where), _number(tr[1], where)])
        except (KeyError, IndexError, TypeError) as exc:
            raise ParseError(f"{where}: bad map entry: {exc}") from exc
    options = doc.get("options", {})
    rank_tol = float(options.get("rankTolerance", 1e-10))
    return AffineIFS.from_matrices(
        matrices, translations, name=str(doc.get("name", "")), rank_tol=rank_tol
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _parse_scale(token: str) -> float:
    return float(Fraction(token))


def _cmd_analyze(args) -> int:
    ifs = load_document(args.document)
    _emit(classify(ifs).to_report(), args.out)
    return 0


def _cmd_pressure_curve(args) -> int:
    ifs = load_document(args.document)
    kind = KINDS[args.kind]
    rows = ["s,lower,upper,depth,certificate,kind"]
    for s in np.linspace(args.s_from, args.s_to, args.steps):
        est = pressure.pressure_estimate(ifs, kind, float(s), args.depth)
        rows.append(
            ",".join(
                [FMT % s, FMT % est.lower, FMT % est.upper, str(est.depth),
                 est.certificate, est.kind.value]
            )
        )
    _emit("\n".join(rows), args.out)
    return 0


def _cmd_affdim(args) -> int:
    ifs = load_document(args.document)
    lo, hi = pressure.affinity_dimension(ifs, KINDS[args.kind], tol=args.tol)
    _emit(
        "\n".join(
            ["kind: " + args.kind, "lower: " + FMT % lo, "upper: " + FMT % hi,
             "width: " + FMT % (hi - lo)]
        ),
        args.out,
    )
    return 0


def _cmd_gap(args) -> int:
    ifs = load_document(args.document)
    result = pressure.pressure_gap(ifs, args.s, max_depth=args.max_depth)
    lines = [f"status: {result.status}", "s: " + FMT % result.s]
    if result.lower_full is not None:
        lines.append("lower_full: " + FMT % result.lower_full)
        lines.append("upper_invertible: " + FMT % result.upper_invertible)
        lines.append(f"depth: {result.depth}")
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_render(args) -> int:
    ifs = load_document(args.document)
    cloud = geometry.attractor_cloud(ifs, KINDS[args.kind], args.epsilon)
    if args.binary:
        geometry.write_cloud_binary(cloud, args.out)
    else:
        geometry.write_cloud_csv(cloud, args.out)
    print(f"wrote {len(cloud)} points at resolution {FMT % cloud.resolution}")
    return 0


def _cmd_boxdim(args) -> int:
    ifs = load_document(args.document)
    cloud = geometry.attractor_cloud(ifs, KINDS[args.kind], args.epsilon)
    scales = [_parse_scale(tok) for tok in args.scales.split(",")]
    est = geometry.box_dimension(cloud, scales, seed=args.seed)
    lines = ["slope: " + FMT % est.slope, "stderr: " + FMT % est.stderr]
    lines += [
        "scale,count"
    ] + [FMT % s + "," + FMT % c for s, c in zip(est.scales, est.counts)]
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_project(args) -> int:
    ifs = load_document(args.document)
    cloud = geometry.attractor_cloud(ifs, KINDS[args.kind], args.epsilon)
    proj = geometry.project_cloud(cloud, Direction(args.angle))
    geometry.write_cloud_csv(proj, args.out)
    print(f"wrote {len(proj)} projected coordinates")
    return 0


def _cmd_experiment(args) -> int:
    ifs = load_document(args.document)
    report = geometry.theorem_experiment(
        ifs, f"part{args.part}", seed=args.seed, epsilon=args.epsilon
    )
    _emit(report.to_report(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affthermo",
        description="Thermodynamic and geometric analysis of planar affine "
        "iterated function systems with possibly singular linear parts.",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker cap")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("document", help="IFS document (JSON)")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.set_defaults(fn=fn)
        return p

    add("analyze", _cmd_analyze, help="classification report")

    p = add("pressure-curve", _cmd_pressure_curve, help="pressure bounds CSV")
    p.add_argument("--kind", choices=KINDS, default="full")
    p.add_argument("--s-from", type=float, default=0.0)
    p.add_argument("--s-to", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--depth", type=int, default=8)

    p = add("affdim", _cmd_affdim, help="affinity dimension bracket")
    p.add_argument("--kind", choices=KINDS, default="full")
    p.add_argument("--tol", type=float, default=1e-3)

    p = add("gap", _cmd_gap, help="certify the invertible pressure gap")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--max-depth", type=int, default=14)

    p = add("render", _cmd_render, help="attractor point cloud")
    p.add_argument("--kind", choices=KINDS, default="full")
    p.add_argument("--epsilon", type=float, default=1.0 / 128)
    p.add_argument("--binary", action="store_true")

    p = add("boxdim", _cmd_boxdim, help="box-counting dimension")
    p.add_argument("--kind", choices=KINDS, default="full")
    p.add_argument("--epsilon", type=float, default=1.0 / 256)
    p.add_argument("--scales", default="1/8,1/16,1/32,1/64")
    p.add_argument("--seed", type=int, default=0)

    p = add("project", _cmd_project, help="project a cloud onto a direction")
    p.add_argument("--kind", choices=KINDS, default="full")
    p.add_argument("--epsilon", type=float, default=1.0 / 128)
    p.add_argument("--angle", type=float, required=True)

    p = add("experiment", _cmd_experiment, help="desk-scale dimension experiments")
    p.add_argument("--part", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1.0 / 128)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (BudgetExceeded, InconclusiveBracket) as exc:
        print(f"budget exhausted [{exc.module}]: {exc}", file=sys.stderr)
        if isinstance(exc, InconclusiveBracket):
            lo, hi = exc.bracket
            print("best_bracket: " + FMT % lo + "," + FMT % hi, file=sys.stderr)
        return 3
    except (ParseError, PreconditionError, ValueError) as exc:
        module = getattr(exc, "module", "input")
        print(f"precondition violated [{module}]: {exc}", file=sys.stderr)
        return 2
    except AffThermoError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
