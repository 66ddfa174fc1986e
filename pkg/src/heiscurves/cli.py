"""Command-line front end: ``heiscurves <subcommand> ...``.

Exit codes
----------
0   success
1   curves are not congruent (``congruence``)
2   curve is degenerate; a reduction is suggested (``analyze``)
64  malformed input file or bad command line
65  data error: curve not horizontally regular, inputs incompatible, or nothing to reduce
66  input file missing
70  numerical failure (conditioning, resolution, step size, inconsistency)
73  output file cannot be written
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ._rank import DEFAULT_RANK_TOL
from .classify import curve_order, reduce_degenerate
from .curve import SampledCurve, arclength_reparametrize
from .exceptions import (DegeneracyError, FormatError, HeisenbergError, NotRegularError)
from .formats import (dumps, profile_to_csv, read_curve, read_profile, report_to_json,
                      symmetry_to_dict, write_curve, write_symmetry)
from .frames import InvariantProfile, invariants_along
from .geodesics import GeodesicSpec, geodesic_curve
from .synth import congruence_report, synthesize_curve

EXIT_OK = 0
EXIT_NOT_CONGRUENT = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66
EXIT_NUMERICAL = 70
EXIT_CANTCREAT = 73


class _OutputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    tol_rank: float = DEFAULT_RANK_TOL
    tol_congruence: float = 1e-6
    step: float = 1e-3
    samples: int = 1001

    def __post_init__(self):
        if self.tol_rank <= 0 or self.tol_congruence <= 0:
            raise ValueError("tolerances must be positive")
        if self.samples < 9:
            raise ValueError("samples must be at least 9")
        if self.step <= 0:
            raise ValueError("step must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _OutputError(str(exc)) from exc


def _write(fn, obj, path) -> None:
    try:
        fn(obj, path)
    except OSError as exc:
        raise _OutputError(str(exc)) from exc


def _config(args) -> RunConfig:
    return RunConfig(args.tol_rank, args.tol_congruence, args.step, args.samples)


def _arclength(c: SampledCurve, cfg: RunConfig) -> SampledCurve:
    return c if c.is_arclength else arclength_reparametrize(c, cfg.samples)


def cmd_analyze(args) -> int:
    cfg = _config(args)
    c = _arclength(read_curve(args.input), cfg)
    report = curve_order(c, cfg.tol_rank)
    profile = invariants_along(c, report.order, cfg.tol_rank)
    _emit(profile_to_csv(profile), args.out_profile)
    if args.out_report is None:
        sys.stderr.write(report_to_json(report))
    else:
        _emit(report_to_json(report), args.out_report)
    if report.order < c.n:
        sys.stderr.write(f"curve has order {report.order} < {c.n}; run `reduce` to move it into H_{report.order}\n")
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _config(args)
    c = _arclength(read_curve(args.input), cfg)
    _emit(report_to_json(curve_order(c, cfg.tol_rank)), None)
    return EXIT_OK


def cmd_reduce(args) -> int:
    cfg = _config(args)
    c = read_curve(args.input)
    report = curve_order(c, cfg.tol_rank)
    if report.order == c.n:
        sys.stderr.write(f"curve already has top order {c.n}; nothing to reduce\n")
        return EXIT_DATA
    red = reduce_degenerate(c, cfg.tol_rank, report.order)
    _write(write_curve, red.curve if args.keep_ambient else red.reduced, args.out)
    if args.out_symmetry is not None:
        _write(write_symmetry, red.symmetry, args.out_symmetry)
    sys.stderr.write(f"reduced into H_{red.order}; residual {red.residual:.3e}\n")
    return EXIT_OK


def _resample(profile: InvariantProfile, step: float) -> InvariantProfile:
    s0, s1 = profile.s_grid[0], profile.s_grid[-1]
    count = int(round((s1 - s0) / step)) + 1
    s = np.linspace(s0, s1, count)
    table = CubicSpline(profile.s_grid, np.vstack([profile.kappas, profile.tau]), axis=1)(s)
    return InvariantProfile(s, table[:-1], table[-1])


def cmd_synthesize(args) -> int:
    cfg = _config(args)
    profile = read_profile(args.profile, args.n)
    if args.resample:
        profile = _resample(profile, cfg.step)
    if not np.allclose(np.diff(profile.s_grid), profile.step, rtol=1e-9, atol=0.0):
        raise FormatError("profile grid is not uniform; pass --resample")
    _write(write_curve, synthesize_curve(profile), args.out)
    return EXIT_OK


def cmd_congruence(args) -> int:
    cfg = _config(args)
    a = _arclength(read_curve(args.a), cfg)
    b = _arclength(read_curve(args.b), cfg)
    rep = congruence_report(a, b, cfg.tol_congruence, cfg.tol_rank)
    if rep.orders[0] != rep.orders[1]:
        sys.stdout.write(f"not congruent: orders differ ({rep.orders[0]} vs {rep.orders[1]})\n")
        return EXIT_NOT_CONGRUENT
    if not rep.congruent:
        k = rep.orders[0]
        names = [f"kappa_{j}" for j in range(1, k + 1)] + ["tau"]
        lines = ["not congruent: sup-norm invariant differences", "invariant,sup_difference"]
        lines += [f"{name},{d:.17g}" for name, d in zip(names, rep.differences)]
        sys.stdout.write("\n".join(lines) + "\n")
        return EXIT_NOT_CONGRUENT
    out = symmetry_to_dict(rep.symmetry)
    out["alignment_residual"] = rep.alignment_residual
    _emit(dumps(out), args.out_symmetry)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    cfg = _config(args)
    n = args.n
    zeros = [0.0] * n
    try:
        spec = GeodesicSpec(n, args.lam, args.A, args.B, args.x0 or zeros, args.y0 or zeros, args.t0)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    s = np.linspace(args.s_min, args.s_max, cfg.samples)
    _write(write_curve, geodesic_curve(spec, s), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=DEFAULT_RANK_TOL, help="relative singular-value threshold")
    common.add_argument("--tol-congruence", type=float, default=1e-6, help="sup-norm tolerance on invariants")
    common.add_argument("--step", type=float, default=1e-3, help="arc-length step used by --resample")
    common.add_argument("--samples", type=int, default=1001, help="samples for reparametrization / geodesics")

    parser = _Parser(prog="heiscurves", description="Invariants of horizontally regular curves in H_n.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="order, p-curvatures and contact normality")
    p.add_argument("--input", required=True)
    p.add_argument("--out-profile", help="invariant CSV (stdout if omitted)")
    p.add_argument("--out-report", help="order report JSON (stderr if omitted)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", parents=[common], help="print the order report")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", parents=[common], help="move a degenerate curve into H_k")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-symmetry")
    p.add_argument("--keep-ambient", action="store_true", help="write the moved curve in H_n instead of H_k")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("synthesize", parents=[common], help="curve from an invariant CSV")
    p.add_argument("--profile", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--resample", action="store_true", help="resample the profile to --step first")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("congruence", parents=[common], help="decide whether two curves differ by a rigid motion")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out-symmetry", help="symmetry JSON (stdout if omitted)")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("geodesic", parents=[common], help="sample a closed-form horizontal geodesic")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--A", type=_floats, required=True)
    p.add_argument("--B", type=_floats, required=True)
    p.add_argument("--x0", type=_floats)
    p.add_argument("--y0", type=_floats)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--s-min", type=float, default=0.0)
    p.add_argument("--s-max", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_geodesic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOINPUT
    except FormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NotRegularError, DegeneracyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    except _OutputError as exc:
        sys.stderr.write(f"error: cannot write output: {exc}\n")
        return EXIT_CANTCREAT
    except HeisenbergError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOINPUT


if __name__ == "__main__":
    sys.exit(main())
