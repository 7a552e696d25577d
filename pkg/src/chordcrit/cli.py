"""Command-line front end: ``chordcrit <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
Every run emits a manifest (command, parameters, version, timestamp, grid
size, outputs) next to ``--out``, at ``--manifest``, or on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .chordfun import ChordSpec, chord_norm, circle_chord_norm
from .critical import critical_profile, dichotomy_failures, verify_positivity
from .curvegeom import TWO_PI, ModelFormatError, load_model, reconstruct
from .search import (
    SearchAborted,
    SearchConfig,
    StadiumParam,
    perturbation_ascent,
    stadium_a_grid,
    stadium_critical_p,
    stadium_excess,
)
from .variation import spectrum


STADIUM_GRID = 4096


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)


def _write_text(text: str, out) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _chord_spec(p, u, L) -> ChordSpec:
    try:
        spec = ChordSpec(p, u)
        spec.check(L)
    except ValueError as exc:
        raise UsageError(f"{exc} (admissible: p > 0, 0 < u <= L/2 = {L / 2!r})") from exc
    return spec


def cmd_eval(args) -> int:
    try:
        model = load_model(args.curve)
    except OSError as exc:
        raise UsageError(f"cannot read curve file: {exc}") from exc
    L = model.L
    spec = _chord_spec(args.p, args.u, L)
    curve = reconstruct(model, args.grid, u_max=spec.u)
    c = chord_norm(curve, spec)
    circ = circle_chord_norm(L, spec)
    _write_text(_dump({"c": c, "circle": circ, "excess": c - circ, "u": spec.u, "p": spec.p}) + "\n", args.out)
    return 0


def cmd_spectrum(args) -> int:
    try:
        spec = spectrum(args.u, args.p, args.n_max, exact=args.exact)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    buf = io.StringIO()
    spec.to_csv(buf)
    _write_text(buf.getvalue(), args.out)
    return 0


def cmd_critical_sweep(args) -> int:
    if args.u_points < 2:
        raise UsageError("--u-points must be >= 2")
    prof = critical_profile(args.u_points, args.L, exact=args.exact)
    buf = io.StringIO()
    prof.to_csv(buf)
    try:
        _write_text(buf.getvalue(), args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    return 0


def run_verify(n_max: int, u_points: int, dichotomy_points: int = 20, delta: float = 0.05,
               inject_sign_flip: bool = False) -> tuple:
    """Positivity report plus dichotomy check; returns ``(report_dict, ok)``."""
    rep = verify_positivity(n_max, u_points)
    us = math.pi * np.arange(1, dichotomy_points + 1) / dichotomy_points
    dich = dichotomy_failures(us, delta, max(n_max, 2))
    if inject_sign_flip:
        # test hook: pretend the mode-3 factor came out positive below p_c
        dich.append((3, float(us[0]), float("nan")))
    out = rep.to_dict()
    out["dichotomy_failures"] = [list(t) for t in dich]
    out["dichotomy_u_points"] = dichotomy_points
    out["delta"] = delta
    ok = rep.ok and not dich
    out["ok"] = ok
    return out, ok


def cmd_verify(args) -> int:
    if args.n_max < 3:
        raise UsageError("--n-max must be >= 3")
    if args.u_points < 100:
        raise UsageError("--u-points must be >= 100")
    out, ok = run_verify(args.n_max, args.u_points, args.dichotomy_points, args.delta,
                         args.inject_sign_flip)
    _write_text(_dump(out) + "\n", args.out)
    return 0 if ok else 1


def cmd_stadium(args) -> int:
    L = args.L
    a_grid = np.asarray(args.a, dtype=float) if args.a else stadium_a_grid(L, args.a_count)
    if args.critical:
        try:
            pc = stadium_critical_p(args.u, a_grid, args.p_lo, args.p_hi, args.tol, args.grid, L)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _write_text(_dump({"p_crossover": pc, "u": args.u, "tol": args.tol}) + "\n", args.out)
        return 0
    buf = io.StringIO()
    buf.write("a,p,u,excess\n")
    for p in args.p:
        spec = _chord_spec(p, args.u, L)
        for a in a_grid:
            ex = stadium_excess(StadiumParam(float(a), L), spec, args.grid)
            buf.write(f"{a:.17g},{p:.17g},{args.u:.17g},{ex:.17g}\n")
    _write_text(buf.getvalue(), args.out)
    return 0


def cmd_search(args) -> int:
    params = {}
    if args.config:
        try:
            with open(args.config) as fh:
                params = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    for key in ("p", "u", "seed", "L"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.grid_given:
        params["N"] = args.grid
    params.setdefault("L", TWO_PI)
    known = {f.name for f in dataclasses.fields(SearchConfig)}
    unknown = set(params) - known
    if unknown:
        raise UsageError(f"unknown search config fields: {sorted(unknown)}")
    for key in ("init_a", "init_b", "free"):
        if params.get(key) is not None:
            params[key] = tuple(tuple(x) if isinstance(x, list) else x for x in params[key])
    try:
        cfg = SearchConfig(**params)
        _chord_spec(cfg.p, cfg.u, cfg.L)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid search config: {exc}") from exc
    try:
        res = perturbation_ascent(cfg)
    except SearchAborted as exc:
        _write_text(_dump({"error": str(exc), "trace": exc.trace}) + "\n", args.out)
        return 1
    _write_text(_dump(res.to_dict()) + "\n", args.out)
    return 0


def _manifest(args, argv) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest", "grid_given")}
    return {
        "command": args.command,
        "argv": list(argv),
        "parameters": params,
        "tool": "chordcrit",
        "version": __version__,
        "timestamp": _dt.datetime.now(tz=_dt.timezone.utc).isoformat(),
        "N": getattr(args, "grid", None),
        "outputs": [args.out] if getattr(args, "out", None) else ["<stdout>"],
    }


def _emit_manifest(args, argv) -> None:
    doc = _dump(_manifest(args, argv)) + "\n"
    path = args.manifest or (args.out + ".manifest.json" if getattr(args, "out", None) else None)
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(doc)
    else:
        sys.stderr.write(doc)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json or stderr)")
    common.add_argument("--L", type=float, default=TWO_PI, help="curve length (default 2 pi)")
    common.add_argument("--grid", "-N", type=int, default=2048, help="quadrature grid size (default 2048; stadium 4096)")

    parser = argparse.ArgumentParser(prog="chordcrit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="chord norm of a curve file")
    p.add_argument("curve", help="curve model JSON")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spectrum", parents=[common], help="mode factors T(n,u,p) as CSV")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--exact", action="store_true", help="use the second-difference-consistent factor")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("critical-sweep", parents=[common], help="p_c(u) over (0, L/2] as CSV")
    p.add_argument("--u-points", type=int, default=100)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_critical_sweep)

    p = sub.add_parser("verify", parents=[common], help="positivity and dichotomy checks (JSON)")
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--u-points", type=int, default=500)
    p.add_argument("--dichotomy-points", type=int, default=20)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stadium", parents=[common], help="stadium excess scan or crossover")
    p.add_argument("--p", type=float, nargs="+", default=[3.5])
    p.add_argument("--u", type=float, default=math.pi)
    p.add_argument("--a", type=float, nargs="+", help="straight-side lengths (default: geometric grid)")
    p.add_argument("--a-count", type=int, default=40)
    p.add_argument("--critical", action="store_true", help="bisect for the crossover exponent")
    p.add_argument("--p-lo", type=float, default=2.5)
    p.add_argument("--p-hi", type=float, default=4.0)
    p.add_argument("--tol", type=float, default=0.02)
    p.set_defaults(func=cmd_stadium)

    p = sub.add_parser("search", parents=[common], help="projected gradient ascent (JSON)")
    p.add_argument("--config", help="JSON file with SearchConfig fields")
    p.add_argument("--p", type=float)
    p.add_argument("--u", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.grid_given = any(a in ("--grid", "-N") or a.startswith("--grid=") for a in argv)
    if not args.grid_given:
        if args.command == "search":
            args.grid = None
        elif args.command == "stadium":
            args.grid = STADIUM_GRID
    try:
        code = args.func(args)
    except (UsageError, ModelFormatError) as exc:
        print(f"chordcrit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit_manifest(args, argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
