"""Command-line front end.

Exit codes: 0 when everything requested succeeded and passed, 1 when a
certification found violations (or a ``check`` did not hold), 2 on usage or
domain errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from . import __version__
from .certify import (
    DEFAULT_NU_GRID,
    DELTA,
    CertReport,
    certify_family,
    certify_identities,
    merge_reports,
    render_report,
    scan_conjecture,
    uniform_grid,
)
from .core import (
    Enclosure,
    SeriesConfig,
    as_order,
    deficit_J,
    deriv_Inorm,
    deriv_Jnorm,
    eval_Inorm,
    eval_Inorm_scaled,
    eval_Jnorm,
    excess_I,
)
from .errors import CancellationError, DomainError, NoSignChange, ToleranceNotReached
from .formats import fmt_float, to_csv, to_json
from .ratios import Family, as_family, aux_L, check_point, ratio_F, ratio_G, ratio_H, ratio_Phi, sharp_constants, turan_J
from .zeros import zeros

OUTPUT_DIR_ENV = "HUYGENS_OUTPUT_DIR"
DEFAULT_TOL = 1e-12
DEFAULT_ZERO_COUNT = 10
DEFAULT_GRID = 1000

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _evaluators(cfg: SeriesConfig) -> Dict[str, Callable[[float, float], Enclosure]]:
    return {
        "J": lambda nu, x: eval_Jnorm(nu, x, cfg),
        "I": lambda nu, x: eval_Inorm(nu, x, cfg),
        "Iscaled": lambda nu, x: eval_Inorm_scaled(nu, x, cfg),
        "deficit": lambda nu, x: deficit_J(nu, x, cfg),
        "excess": lambda nu, x: excess_I(nu, x, cfg),
        "dJ": lambda nu, x: deriv_Jnorm(nu, x, cfg),
        "dI": lambda nu, x: deriv_Inorm(nu, x, cfg),
        "F": lambda nu, x: ratio_F(nu, x, cfg=cfg),
        "G": lambda nu, x: ratio_G(nu, x, cfg=cfg),
        "H": lambda nu, x: ratio_H(nu, x, cfg),
        "Phi": lambda nu, x: ratio_Phi(nu, x, cfg),
        "L": lambda nu, x: aux_L(nu, x, cfg=cfg),
        "turan": lambda nu, x: turan_J(nu, x, cfg=cfg),
    }


FUNCTIONS = ("J", "I", "Iscaled", "deficit", "excess", "dJ", "dI", "F", "G", "H", "Phi", "L", "turan")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("plain", "json", "csv"), default=None, help="output format (default: plain; csv for ranges)")
    common.add_argument("--output", "-o", default=None, help=f"write here instead of stdout; relative paths resolve against ${OUTPUT_DIR_ENV} when set")
    common.add_argument("--tol", type=_positive, default=DEFAULT_TOL, help="absolute tolerance for series and zeros (default 1e-12)")

    p = argparse.ArgumentParser(prog="huygens", description="Normalized Bessel functions, Huygens-type ratios and their certification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    ev = sub.add_parser("eval", parents=[common], help="evaluate a function at a point or over a range")
    ev.add_argument("--fn", choices=FUNCTIONS, required=True)
    ev.add_argument("--nu", type=float, required=True)
    where = ev.add_mutually_exclusive_group(required=True)
    where.add_argument("--x", type=float)
    where.add_argument("--x-range", type=float, nargs=2, metavar=("START", "END"))
    ev.add_argument("--points", type=_count, default=DEFAULT_GRID, help="grid size for --x-range (default 1000)")

    zs = sub.add_parser("zeros", parents=[common], help="positive zeros of J_nu")
    zs.add_argument("--nu", type=float, required=True)
    zs.add_argument("--count", type=_count, default=DEFAULT_ZERO_COUNT)

    co = sub.add_parser("constants", parents=[common], help="sharp constants p*, q*")
    co.add_argument("--family", choices=[f.value for f in Family], default=None, help="one family (default: all four)")
    co.add_argument("--nu", type=float, required=True)

    ch = sub.add_parser("check", parents=[common], help="test one inequality at one point")
    ch.add_argument("--family", choices=[f.value for f in Family], required=True)
    ch.add_argument("--nu", type=float, required=True)
    ch.add_argument("--weight", type=float, required=True)
    ch.add_argument("--side", choices=("lower", "upper"), required=True)
    ch.add_argument("--x", type=float, required=True)

    ce = sub.add_parser("certify", parents=[common], help="certify families (and identities) over a grid of orders")
    ce.add_argument("--family", choices=[f.value for f in Family], action="append", default=None, help="repeatable (default: all four)")
    ce.add_argument("--nu", type=float, action="append", default=None, help="repeatable (default: the standard grid)")
    ce.add_argument("--points", type=_count, default=DEFAULT_GRID)
    ce.add_argument("--delta", type=_positive, default=DELTA)
    ce.add_argument("--identities", action="store_true", help="also run the product, Mittag-Leffler, Rayleigh and Turan checks")
    ce.add_argument("--zeros", type=_count, default=500, help="zeros tabulated for --identities (default 500)")
    ce.add_argument("--jobs", type=_count, default=1)

    cj = sub.add_parser("conjecture", parents=[common], help="scan G for monotone decrease at nu > 0")
    cj.add_argument("--nu-min", type=float, default=0.1)
    cj.add_argument("--nu-max", type=float, default=10.0)
    cj.add_argument("--nu-steps", type=_count, default=50)
    cj.add_argument("--points", type=_count, default=DEFAULT_GRID)
    cj.add_argument("--jobs", type=_count, default=1)
    return p


def _kv(pairs) -> str:
    parts = []
    for k, v in pairs:
        parts.append(f"{k}={fmt_float(v) if isinstance(v, float) else v}")
    return " ".join(parts) + "\n"


def _cmd_eval(args, cfg: SeriesConfig) -> tuple[str, int]:
    as_order(args.nu)
    fn = _evaluators(cfg)[args.fn]
    if args.x is not None:
        e = fn(args.nu, args.x)
        fmt = args.format or "plain"
        if fmt == "json":
            return to_json({"fn": args.fn, "nu": args.nu, "x": args.x, "value": e.value, "err": e.err}), EXIT_OK
        if fmt == "csv":
            return to_csv(("x", "value", "err"), [(args.x, e.value, e.err)]), EXIT_OK
        return _kv([("fn", args.fn), ("nu", args.nu), ("x", args.x), ("value", e.value), ("err", e.err)]), EXIT_OK
    a, b = args.x_range
    if not a < b:
        raise UsageError(f"--x-range must be increasing, got {a} {b}")
    rows = []
    for x in uniform_grid(a, b, args.points):
        e = fn(args.nu, x)
        rows.append((x, e.value, e.err))
    fmt = args.format or "csv"
    if fmt == "json":
        return to_json({"fn": args.fn, "nu": args.nu, "rows": [{"x": x, "value": v, "err": r} for x, v, r in rows]}), EXIT_OK
    if fmt == "plain":
        return "".join(_kv([("x", x), ("value", v), ("err", r)]) for x, v, r in rows), EXIT_OK
    return to_csv(("x", "value", "err"), rows), EXIT_OK


def _cmd_zeros(args, cfg) -> tuple[str, int]:
    table = zeros(args.nu, args.count, args.tol)
    rows = table.rows()
    fmt = args.format or "plain"
    if fmt == "json":
        return to_json({"nu": table.order.nu, "tol": table.tol, "zeros": [z for _, z, _ in rows]}), EXIT_OK
    if fmt == "csv":
        return to_csv(("index", "zero", "tol"), rows), EXIT_OK
    return "".join(_kv([("index", k), ("zero", z), ("tol", t)]) for k, z, t in rows), EXIT_OK


def _cmd_constants(args, cfg) -> tuple[str, int]:
    fams = [as_family(args.family)] if args.family else list(Family)
    rows = [sharp_constants(f, args.nu).row() for f in fams]
    fmt = args.format or "plain"
    if fmt == "json":
        return to_json(rows[0] if args.family else rows), EXIT_OK
    header = ("family", "nu", "p_star", "p_dir", "q_star", "q_dir", "validity")
    if fmt == "csv":
        return to_csv(header, [[r[h] for h in header] for r in rows]), EXIT_OK
    return "".join(_kv([(h, r[h]) for h in header]) for r in rows), EXIT_OK


def _cmd_check(args, cfg) -> tuple[str, int]:
    pc = check_point(args.family, args.nu, args.weight, args.side, args.x, cfg=cfg)
    status = "holds" if pc.holds else ("indeterminate" if pc.indeterminate else "fails")
    record = {
        "family": args.family,
        "nu": args.nu,
        "weight": args.weight,
        "side": args.side,
        "x": args.x,
        "holds": pc.holds,
        "status": status,
        "margin": pc.margin,
        "err": pc.err,
    }
    fmt = args.format or "plain"
    if fmt == "json":
        text = to_json(record)
    elif fmt == "csv":
        text = to_csv(tuple(record), [tuple(record.values())])
    else:
        text = _kv(record.items())
    return text, EXIT_OK if pc.holds else EXIT_FAIL


def _family_cell(cell) -> CertReport:
    fam, nu, points, delta, cfg = cell
    return certify_family(fam, nu, points, delta=delta, cfg=cfg)


def _identity_cell(cell) -> CertReport:
    nu, count, tol, cfg = cell
    return certify_identities(nu, zeros(nu, count, tol), 200, cfg=cfg)


def _run_cells(fn, cells, jobs: int) -> List[CertReport]:
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, cells))
    return [fn(c) for c in cells]


def _render_reports(reports: Sequence[CertReport], merged: CertReport, fmt: str) -> str:
    if fmt in ("json", "csv"):
        return render_report(merged, fmt)
    lines = []
    for r in reports:
        lines.append(
            _kv(
                [
                    ("claim", r.claim_id),
                    ("nu", r.nu_grid[0] if len(r.nu_grid) == 1 else "mixed"),
                    ("validity", r.validity),
                    ("passed", "true" if r.passed else "false"),
                    ("checks", r.checks_run),
                    ("indeterminate", r.indeterminate),
                    ("violations", len(r.violations)),
                    ("worst_margin", float(r.worst_margin)),
                ]
            )
        )
    for v in merged.violations:
        lines.append(_kv([("violation", v.check), ("nu", v.nu), ("x", "none" if v.x is None else float(v.x)), ("observed", float(v.observed)), ("required", v.required)]))
    lines.append(_kv([("overall", "passed" if merged.passed else "failed"), ("checks", merged.checks_run), ("violations", len(merged.violations))]))
    return "".join(lines)


def _cmd_certify(args, cfg) -> tuple[str, int]:
    fams = [as_family(f) for f in args.family] if args.family else list(Family)
    nus = args.nu if args.nu else list(DEFAULT_NU_GRID)
    for nu in nus:
        as_order(nu)
    cells = [(f, nu, args.points, args.delta, cfg) for f in fams for nu in nus]
    reports = _run_cells(_family_cell, cells, args.jobs)
    if args.identities:
        reports += _run_cells(_identity_cell, [(nu, args.zeros, args.tol, cfg) for nu in nus], args.jobs)
    merged = merge_reports(reports, claim_id="certify")
    return _render_reports(reports, merged, args.format or "plain"), EXIT_OK if merged.passed else EXIT_FAIL


def _cmd_conjecture(args, cfg) -> tuple[str, int]:
    report = scan_conjecture(args.nu_min, args.nu_max, args.nu_steps, args.points, jobs=args.jobs, cfg=cfg)
    return _render_reports([report], report, args.format or "plain"), EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "eval": _cmd_eval,
    "zeros": _cmd_zeros,
    "constants": _cmd_constants,
    "check": _cmd_check,
    "certify": _cmd_certify,
    "conjecture": _cmd_conjecture,
}


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Parse ``argv``, dispatch and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = SeriesConfig(tol=args.tol)
        if hasattr(args, "nu") and isinstance(args.nu, float):
            as_order(args.nu)
        text, code = COMMANDS[args.command](args, cfg)
    except (UsageError, DomainError, ToleranceNotReached, NoSignChange, CancellationError, ValueError, OverflowError) as exc:
        print(f"huygens {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    if args.output:
        path = _resolve_output(args.output)
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"huygens: cannot write {path}: {exc.strerror or exc}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
