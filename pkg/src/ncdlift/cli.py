"""Command-line surface: construct, lift, verify, slice, plot.

Exit codes: 0 success / verification pass, 1 verification failure, 2 invalid
input, 3 internal error.  NCDLIFT_SEED sets the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .arrangement import NcdBudget
from .construct import ConstructionInput, build
from .errors import ConstructionError, InputError
from .lift import lift
from .plotting import plot_arrangement
from .serialize import (
    arrangement_from_json,
    arrangement_to_json,
    canonical_dumps,
    dump_json,
    load_json,
    manifold_from_json,
    manifold_to_json,
)
from .verify import VerifyConfig, classify_slice, run_suite

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3


def _default_seed() -> int:
    value = os.environ.get("NCDLIFT_SEED", "42")
    try:
        return int(value)
    except ValueError:
        return 42


def _parse_fraction_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(",") if part.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational list {text!r}: {exc}") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise InputError(f"cannot parse integer list {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncdlift",
        description="Construct quadric-bounded domains, lift them to manifolds, verify the properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build an arrangement from t values and labels")
    c.add_argument("--t", required=True, help="comma-separated increasing rationals, e.g. 0,1,2")
    c.add_argument("--labels", required=True, help="comma-separated 0/1 labels, length l-1")
    c.add_argument("--variant", required=True, choices=["mt2", "mt3"])
    c.add_argument("--strip-halfwidth", default="1", help="half-width of the bounding strip")
    c.add_argument("--hole-shrink", default="1/4", help="hole minor-axis shrink factor in (0,1)")
    c.add_argument("--out", help="output arrangement JSON path (default: stdout)")

    lf = sub.add_parser("lift", help="lift an arrangement to manifold equations")
    lf.add_argument("--in", dest="infile", required=True)
    lf.add_argument("--m", type=int, required=True, help="manifold dimension (>= n + l)")
    lf.add_argument("--out", help="output manifold JSON path (default: stdout)")
    lf.add_argument("--equations-out", help="plain newline-separated polynomial list")

    v = sub.add_parser("verify", help="run the verification suite on a lifted manifold")
    v.add_argument("--in", dest="infile", required=True)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--samples", type=int, default=2000)
    v.add_argument("--grid-step", type=float, default=0.02)
    v.add_argument("--window", default=None, help="sampling window half-width (rational)")
    v.add_argument("--out", help="output report JSON path (default: stdout)")

    s = sub.add_parser("slice", help="classify one slice x1 = t of an arrangement")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("plot", help="render an SVG picture of an arrangement")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--plane", default="1,2", help="two coordinate indices, e.g. 1,2")
    p.add_argument("--grid-step", type=float, default=0.05)
    p.add_argument("--viewport", default=None, help="umin,umax,vmin,vmax")
    p.add_argument("--out", required=True)
    return parser


def _cmd_construct(args) -> int:
    t = _parse_fraction_list(args.t)
    labels = _parse_int_list(args.labels)
    inp = ConstructionInput(
        t=t,
        labels=labels,
        variant=args.variant,
        R=Fraction(args.strip_halfwidth),
        hole_shrink=Fraction(args.hole_shrink),
    )
    arr = build(inp)
    payload = canonical_dumps(arrangement_to_json(arr))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        out = sys.stdout
    else:
        sys.stdout.write(payload)
        out = sys.stderr
    out.write(f"arrangement: n={arr.n}, {arr.l} primitives, provenance {arr.provenance}\n")
    out.write(f"{'idx':>3}  {'kind':<16} polynomial\n")
    for j, prim in enumerate(arr.primitives):
        out.write(f"{j:>3}  {prim.kind:<16} {prim.f.to_text()}\n")
    return EXIT_OK


def _cmd_lift(args) -> int:
    arr = arrangement_from_json(load_json(args.infile), args.infile)
    lifted = lift(arr, args.m)
    payload = canonical_dumps(manifold_to_json(lifted))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    if args.equations_out:
        with open(args.equations_out, "w", encoding="utf-8") as fh:
            for eq in lifted.equations:
                fh.write(eq.to_text() + "\n")
    sys.stderr.write(
        f"lift: m={lifted.m}, blocks {list(lifted.block_sizes)}, "
        f"ambient dimension {lifted.ambient_dim}, {len(lifted.equations)} equations\n"
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    lifted = manifold_from_json(load_json(args.infile), args.infile)
    seed = args.seed if args.seed is not None else _default_seed()
    window = None if args.window is None else Fraction(args.window)
    config = VerifyConfig(
        samples=args.samples,
        seed=seed,
        window=window,
        ncd_budget=NcdBudget(grid_step=args.grid_step, window=window),
    )
    report = run_suite(lifted, config)
    payload = canonical_dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    verdict = report["global_verdict"]
    sys.stderr.write(f"verification: {verdict}\n")
    for check in report["checks"]:
        sys.stderr.write(f"  {check['id']}: {'pass' if check.get('passed') else 'FAIL'}\n")
    return EXIT_OK if verdict == "pass" else EXIT_VERIFICATION_FAILED


def _cmd_slice(args) -> int:
    arr = arrangement_from_json(load_json(args.infile), args.infile)
    seed = args.seed if args.seed is not None else _default_seed()
    t = Fraction(args.t)
    sc = classify_slice(arr, t, seed=seed)
    if sc.boundedness == "unbounded":
        pt = sc.witness.get("escape_point", [])
        coords = ", ".join(f"{v:g}" for v in pt)
        print(f"unbounded; escape witness ({coords})")
    elif sc.boundedness == "bounded":
        print(
            f"bounded; enclosing radius {sc.witness.get('enclosing_radius', 0.0):g}; "
            f"components {sc.component_count}"
        )
    else:
        print("empty")
    return EXIT_OK


def _cmd_plot(args) -> int:
    arr = arrangement_from_json(load_json(args.infile), args.infile)
    plane = _parse_int_list(args.plane)
    if len(plane) != 2:
        raise InputError(f"--plane needs exactly two indices, got {args.plane!r}")
    viewport = None
    if args.viewport:
        vals = [float(Fraction(v)) for v in args.viewport.split(",")]
        if len(vals) != 4:
            raise InputError("--viewport needs umin,umax,vmin,vmax")
        viewport = tuple(vals)
    svg = plot_arrangement(arr, (plane[0], plane[1]), args.grid_step, viewport)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    sys.stderr.write(f"wrote {args.out}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "construct": _cmd_construct,
        "lift": _cmd_lift,
        "verify": _cmd_verify,
        "slice": _cmd_slice,
        "plot": _cmd_plot,
    }
    try:
        return handlers[args.command](args)
    except (InputError, ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID_INPUT
    except ConstructionError as exc:
        sys.stderr.write(f"construction error: {exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
