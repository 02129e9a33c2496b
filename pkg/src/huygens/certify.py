"""Grid certification of the monotonicity, sharpness and identity claims.

Every check yields a signed margin and an error bound. A check *fails* only
when the margin is below minus its error bound; when ``|margin| <= err`` the
outcome is counted as indeterminate instead. Reports keep the witness
``(nu, x)`` of each failure so it can be replayed through the point
functions.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .core import (
    DEFAULT_CONFIG,
    UNIT_ROUNDOFF,
    OrderLike,
    SeriesConfig,
    as_order,
    eval_Jnorm,
)
from .errors import DomainError
from .formats import fmt_float, to_csv, to_json
from .ratios import (
    Family,
    aux_L,
    as_family,
    margin_function,
    mittag_leffler_terms,
    ratio_F,
    ratio_G,
    ratio_H,
    ratio_H_complement,
    ratio_Phi,
    sharp_constants,
    to_point_check,
    turan_J,
)
from .zeros import ZeroTable, eval_Jnorm_product, first_zero, rayleigh_residual

__all__ = [
    "Violation",
    "CertReport",
    "merge_reports",
    "certify_monotone",
    "certify_family",
    "scan_conjecture",
    "certify_identities",
    "render_report",
    "write_report",
    "DEFAULT_NU_GRID",
    "EPSILON",
    "X_MAX",
    "DELTA",
    "MONOTONE_TARGETS",
]

DEFAULT_NU_GRID: Tuple[float, ...] = (-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
EPSILON = 1e-2
X_MAX = 50.0
DELTA = 1e-3
# endpoint insets for the clusters that catch sharpness witnesses
CLUSTER_INSETS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
LIMIT_TOL = 1e-10
FAR_LIMIT_TOL = 1e-6


@dataclass(frozen=True)
class Violation:
    nu: float
    x: Optional[float]
    check: str
    observed: float
    required: str

    def sort_key(self):
        return (self.nu, -math.inf if self.x is None else self.x, self.check, self.observed)


@dataclass(frozen=True)
class CertReport:
    claim_id: str
    nu_grid: Tuple[float, ...]
    x_grid: Optional[Tuple[float, float, int]]
    checks_run: int
    violations: Tuple[Violation, ...] = ()
    worst_margin: float = math.inf
    indeterminate: int = 0
    validity: str = "proved"

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> Dict[str, object]:
        grid = None
        if self.x_grid is not None:
            a, b, n = self.x_grid
            grid = {"start": float(a), "end": float(b), "points": int(n)}
        return {
            "claim_id": self.claim_id,
            "validity": self.validity,
            "passed": self.passed,
            "checks_run": self.checks_run,
            "indeterminate": self.indeterminate,
            "worst_margin": float(self.worst_margin),
            "nu_grid": [float(v) for v in self.nu_grid],
            "x_grid": grid,
            "violations": [
                {
                    "nu": float(v.nu),
                    "x": None if v.x is None else float(v.x),
                    "check": v.check,
                    "observed": float(v.observed),
                    "required": v.required,
                }
                for v in self.violations
            ],
        }


def merge_reports(reports: Sequence[CertReport], claim_id: Optional[str] = None) -> CertReport:
    """Combine reports; the result does not depend on their order."""
    if not reports:
        raise ValueError("nothing to merge")
    ids = sorted({r.claim_id for r in reports})
    grids = {r.x_grid for r in reports}
    return CertReport(
        claim_id=claim_id if claim_id is not None else "+".join(ids),
        nu_grid=tuple(sorted({v for r in reports for v in r.nu_grid})),
        x_grid=grids.pop() if len(grids) == 1 else None,
        checks_run=sum(r.checks_run for r in reports),
        violations=tuple(sorted((v for r in reports for v in r.violations), key=Violation.sort_key)),
        worst_margin=min(r.worst_margin for r in reports),
        indeterminate=sum(r.indeterminate for r in reports),
        validity="conjectured" if any(r.validity == "conjectured" for r in reports) else "proved",
    )


class _Tally:
    """Accumulates margins for one report."""

    def __init__(self, nu: float, prefix: str = "") -> None:
        self.nu = nu
        self.prefix = prefix
        self.checks = 0
        self.indeterminate = 0
        self.worst = math.inf
        self.violations: List[Violation] = []

    def record(self, margin: float, err: float, x: Optional[float], check: str, observed: float, required: str) -> None:
        self.checks += 1
        if not math.isnan(margin):
            self.worst = min(self.worst, margin)
        if margin < -err or math.isnan(margin):
            self.violations.append(Violation(self.nu, x, self.prefix + check, observed, required))
        elif abs(margin) <= err:
            self.indeterminate += 1

    def report(self, claim_id: str, x_grid, validity: str = "proved") -> CertReport:
        return CertReport(
            claim_id=claim_id,
            nu_grid=(self.nu,),
            x_grid=x_grid,
            checks_run=self.checks,
            violations=tuple(sorted(self.violations, key=Violation.sort_key)),
            worst_margin=self.worst,
            indeterminate=self.indeterminate,
            validity=validity,
        )


def uniform_grid(a: float, b: float, points: int) -> List[float]:
    """``points`` evenly spaced values from ``a`` to ``b`` inclusive."""
    if points < 1:
        raise DomainError(f"points must be >= 1, got {points}")
    if points == 1:
        return [float(a)]
    step = (b - a) / (points - 1)
    out = [a + k * step for k in range(points - 1)]
    out.append(float(b))
    return out


# -- monotonicity ---------------------------------------------------------

def _mono_F(nu, x, j, cfg):
    return ratio_F(nu, x, j, cfg)


def _mono_G(nu, x, j, cfg):
    return ratio_G(nu, x, j, cfg)


def _mono_H(nu, x, j, cfg):
    # H increasing is certified as 1 - H decreasing; the complement keeps
    # relative accuracy where H itself rounds to 1
    return ratio_H_complement(nu, x, cfg)


def _mono_Phi(nu, x, j, cfg):
    return ratio_Phi(nu, x, cfg)


def _mono_L(nu, x, j, cfg):
    return aux_L(nu, x, j, cfg)


def _mono_J(nu, x, j, cfg):
    return eval_Jnorm(nu, x, cfg)


# name -> (evaluator, +1 increasing / -1 decreasing, needs j_{nu,1}, closed at j, word)
MONOTONE_TARGETS: Dict[str, Tuple[Callable, int, bool, bool, str]] = {
    "F": (_mono_F, 1, True, True, "increasing"),
    "G": (_mono_G, -1, True, False, "decreasing"),
    "H": (_mono_H, -1, False, False, "increasing"),
    "Phi": (_mono_Phi, -1, False, False, "decreasing"),
    "L": (_mono_L, 1, True, False, "increasing"),
    "Jnorm": (_mono_J, -1, True, False, "decreasing"),
}


def certify_monotone(
    target: str,
    order: OrderLike,
    interval: Tuple[float, float],
    points: int,
    cfg: SeriesConfig = DEFAULT_CONFIG,
    jnu1: Optional[float] = None,
) -> CertReport:
    """Check the claimed direction of ``target`` between consecutive points
    of a uniform grid on ``interval``.

    ``points`` may be as small as 2 (one comparison).
    """
    if target not in MONOTONE_TARGETS:
        raise DomainError(f"unknown target {target!r}; expected one of {sorted(MONOTONE_TARGETS)}")
    fn, direction, bounded, closed, word = MONOTONE_TARGETS[target]
    nu = as_order(order).nu
    a, b = float(interval[0]), float(interval[1])
    points = int(points)
    if points < 2:
        raise DomainError(f"points must be >= 2, got {points}")
    if not (a < b and a >= 0.0 and math.isfinite(b)):
        raise DomainError(f"interval must satisfy 0 <= a < b < inf, got ({a}, {b})")
    j = None
    if bounded:
        j = first_zero(nu) if jnu1 is None else float(jnu1)
        if b > j or (b == j and not closed):
            raise DomainError(f"interval end {b} outside the domain (0, {j})")
    xs = uniform_grid(a, b, points)
    vals = [fn(nu, x, j, cfg) for x in xs]
    tally = _Tally(nu)
    for k in range(points - 1):
        lo, hi = vals[k], vals[k + 1]
        diff = hi.value - lo.value
        err = lo.err + hi.err + UNIT_ROUNDOFF * abs(diff)
        tally.record(direction * diff, err, xs[k], f"{target} {word}", diff, "> 0" if direction > 0 else "< 0")
    return tally.report(f"monotone:{target}", (a, b, points))


# -- sharp families -------------------------------------------------------


def _family_grid(fam: Family, nu: float, j: Optional[float], grid_points: int, x_max: float, delta: float) -> List[float]:
    """Uniform interior grid plus geometric clusters at the binding endpoints."""
    if fam.bounded:
        xs = uniform_grid(EPSILON, j - EPSILON, grid_points)
        xs += [d for d in CLUSTER_INSETS]
        xs += [j - d for d in CLUSTER_INSETS]
    else:
        xs = uniform_grid(EPSILON, x_max, grid_points)
        xs += [d for d in CLUSTER_INSETS]
        if fam is Family.I_RECIPROCAL:
            # Phi ~ 2(nu+1)/x, so Phi < delta needs x of order 1/delta
            xs.append(4.0 * (nu + 1.0) / delta)
    return sorted(set(x for x in xs if x > 0.0))


def _weights(threshold: float, direction: str, delta: float) -> Tuple[float, float]:
    """(inside, outside) weights at distance ``delta`` from a threshold."""
    if direction == "<=":
        return threshold - delta, threshold + delta
    return threshold + delta, threshold - delta


def _ratio_bounds(fam: Family, nu: float, x: float, j: Optional[float], sc, cfg) -> List[Tuple[str, float, float, float, str]]:
    """Range-pinching checks at ``x`` as (label, margin, err, observed, required)."""
    p = sc.p_star
    out = []
    if fam is Family.J_RECIPROCAL:
        r = ratio_F(nu, x, j, cfg)
        out.append(("F > p*", r.value - p, r.err, r.value, f"> {fmt_float(p)}"))
        out.append(("F < q*", sc.q_star - r.value, r.err, r.value, f"< {fmt_float(sc.q_star)}"))
    elif fam is Family.J_DIRECT:
        r = ratio_G(nu, x, j, cfg)
        out.append(("G > 0", r.value, r.err, r.value, "> 0"))
        out.append(("G < p*", p - r.value, r.err, r.value, f"< {fmt_float(p)}"))
    elif fam is Family.I_DIRECT:
        r = ratio_H(nu, x, cfg)
        c = ratio_H_complement(nu, x, cfg)
        out.append(("H > p*", r.value - p, r.err, r.value, f"> {fmt_float(p)}"))
        out.append(("H < 1", c.value, c.err, r.value, "< 1"))
    else:
        r = ratio_Phi(nu, x, cfg)
        out.append(("Phi > 0", r.value, r.err, r.value, "> 0"))
        out.append(("Phi < p*", p - r.value, r.err, r.value, f"< {fmt_float(p)}"))
    return out


def _endpoint_checks(fam: Family, nu: float, j: Optional[float], sc, x_max: float, delta: float, cfg):
    """Limits at both ends of the domain as (label, margin, err, x, observed, required)."""
    p = sc.p_star
    near = {
        Family.J_RECIPROCAL: lambda: ratio_F(nu, 0.0, j, cfg),
        Family.J_DIRECT: lambda: ratio_G(nu, 0.0, j, cfg),
        Family.I_DIRECT: lambda: ratio_H(nu, 0.0, cfg),
        Family.I_RECIPROCAL: lambda: ratio_Phi(nu, 0.0, cfg),
    }[fam]()
    name = fam.ratio_name
    out = [
        (f"{name}(0) = p*", LIMIT_TOL - abs(near.value - p), near.err, 0.0, near.value, f"= {fmt_float(p)} +- {LIMIT_TOL:g}")
    ]
    if fam is Family.J_RECIPROCAL:
        far = ratio_F(nu, j, j, cfg)
        out.append(
            ("F(j) = q*", LIMIT_TOL - abs(far.value - sc.q_star), far.err, j, far.value, f"= {fmt_float(sc.q_star)} +- {LIMIT_TOL:g}")
        )
    elif fam is Family.J_DIRECT:
        xf = j - 1e-8
        far = ratio_G(nu, xf, j, cfg)
        out.append(("G(j-) -> 0", FAR_LIMIT_TOL - abs(far.value), far.err, xf, far.value, f"< {FAR_LIMIT_TOL:g}"))
    elif fam is Family.I_DIRECT:
        far = ratio_H_complement(nu, x_max, cfg)
        out.append(("H(inf) -> 1", FAR_LIMIT_TOL - abs(far.value), far.err, x_max, 1.0 - far.value, f"> {1 - FAR_LIMIT_TOL!r}"))
    else:
        xf = 4.0 * (nu + 1.0) / delta
        far = ratio_Phi(nu, xf, cfg)
        out.append(("Phi(inf) -> 0", delta - abs(far.value), far.err, xf, far.value, f"< {delta:g}"))
    return out


def certify_family(
    family,
    order: OrderLike,
    grid_points: int = 1000,
    delta: float = DELTA,
    x_max: float = X_MAX,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> CertReport:
    """Certify the iff statement of one inequality family at one order.

    Three groups of checks run on a grid of the family's domain:

    * endpoint limits of the ratio against ``p*`` and ``q*``;
    * the inequality holds at the sharp weights and at ``delta`` inside them,
      and fails at some grid point ``delta`` outside them;
    * the ratio stays strictly inside its pinched range.
    """
    fam = as_family(family)
    nu = as_order(order).nu
    grid_points = int(grid_points)
    if grid_points < 16:
        raise DomainError(f"grid_points must be >= 16, got {grid_points}")
    sc = sharp_constants(fam, nu)
    j = first_zero(nu) if fam.bounded else None
    xs = _family_grid(fam, nu, j, grid_points, x_max, delta)
    tally = _Tally(nu, prefix=f"{fam.value}: ")

    for label, m, e, x, obs, req in _endpoint_checks(fam, nu, j, sc, x_max, delta, cfg):
        tally.record(m, e, x, label, obs, req)

    p_in, p_out = _weights(sc.p_star, sc.p_direction, delta)
    q_in, q_out = _weights(sc.q_star, sc.q_direction, delta)
    # the p threshold governs "combination > 1", the q threshold "combination < 1"
    sides = (
        ("p", "lower", sc.p_star, p_in, p_out),
        ("q", "upper", sc.q_star, q_in, q_out),
    )
    # most negative margin seen at the outside weight, with its error and x
    worst_out = {"p": (math.inf, 0.0, None), "q": (math.inf, 0.0, None)}
    for x in xs:
        mf = margin_function(fam, nu, x, j, cfg)
        for tag, side, sharp, w_in, w_out in sides:
            for w, what in ((sharp, f"{tag}*"), (w_in, f"{tag}* inside")):
                pc = to_point_check(mf(w), side)
                tally.record(pc.margin, pc.err, x, f"{side} holds at {what}", pc.margin, "> 0")
            pc = to_point_check(mf(w_out), side)
            if pc.margin < worst_out[tag][0]:
                worst_out[tag] = (pc.margin, pc.err, x)
        for label, m, e, obs, req in _ratio_bounds(fam, nu, x, j, sc, cfg):
            tally.record(m, e, x, label, obs, req)
    for tag, side, _, _, w_out in sides:
        # sharpness: the weight just outside must fail at a definite witness
        margin, err, x_w = worst_out[tag]
        tally.record(-margin, err, x_w, f"{side} fails at {tag}* outside ({fmt_float(w_out)})", margin, "< 0 somewhere")
    return tally.report(f"family:{fam.value}", (xs[0], xs[-1], len(xs)), sc.validity)


# -- conjecture -----------------------------------------------------------


def _conjecture_cell(args) -> CertReport:
    nu, x_points, eps, cfg = args
    j = first_zero(nu)
    return certify_monotone("G", nu, (eps, j - eps), x_points, cfg, jnu1=j)


def scan_conjecture(
    nu_min: float,
    nu_max: float,
    nu_steps: int,
    x_points: int,
    eps: float = EPSILON,
    jobs: int = 1,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> CertReport:
    """Check that ``G`` decreases on ``(eps, j - eps)`` for each order of a
    uniform grid in ``[nu_min, nu_max]``.

    Violations are reported as found; none are expected. With ``jobs > 1``
    the orders are spread over worker processes; the merged report is the
    same either way.
    """
    nu_min, nu_max = float(nu_min), float(nu_max)
    if not 0.0 < nu_min:
        raise DomainError(f"nu_min must be > 0, got {nu_min}")
    nu_steps = int(nu_steps)
    if nu_steps < 1:
        raise DomainError(f"nu_steps must be >= 1, got {nu_steps}")
    if nu_steps > 1 and not nu_min < nu_max:
        raise DomainError(f"need nu_min < nu_max, got {nu_min} >= {nu_max}")
    nus = uniform_grid(nu_min, nu_max, nu_steps)
    cells = [(nu, int(x_points), float(eps), cfg) for nu in nus]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_conjecture_cell, cells))
    else:
        reports = [_conjecture_cell(c) for c in cells]
    merged = merge_reports(reports, claim_id="conjecture:G-decreasing")
    return replace(merged, validity="conjectured")


# -- identities -----------------------------------------------------------

IDENTITY_X_START = 1e-2


def certify_identities(
    order: OrderLike,
    table: ZeroTable,
    x_points: int = 200,
    interval: Optional[Tuple[float, float]] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> CertReport:
    """Product, Mittag-Leffler, Rayleigh, Turán and ordering checks over an x grid.

    For ``nu <= 0`` the auxiliary ``L`` is also checked positive and increasing.

    The default grid runs over ``[0.01, j_{nu,1} - 0.01]``.
    """
    o = as_order(order)
    nu = o.nu
    if table.order != o:
        raise DomainError(f"table is for nu={table.order.nu}, not nu={nu}")
    if len(table) < 100:
        raise DomainError(f"need at least 100 tabulated zeros, got {len(table)}")
    j = table.zeros[0]
    if interval is None:
        interval = (IDENTITY_X_START, j - IDENTITY_X_START)
    a, b = float(interval[0]), float(interval[1])
    if not (0.0 < a <= b < j):
        raise DomainError(f"interval must lie inside (0, {j}), got ({a}, {b})")
    xs = uniform_grid(a, b, int(x_points))
    tally = _Tally(nu)

    # Rayleigh: positive residuals that shrink as the table grows
    n = len(table)
    sizes = sorted({max(1, n // 8), max(1, n // 4), max(1, n // 2), n})
    resid = [rayleigh_residual(o, table.truncated(k)) for k in sizes]
    r_err = 4.0 * n * UNIT_ROUNDOFF / (4.0 * (nu + 1.0))
    for k, r in zip(sizes, resid):
        tally.record(r, r_err, None, f"rayleigh residual N={k} positive", r, "> 0")
    for (k0, r0), (k1, r1) in zip(zip(sizes, resid), zip(sizes[1:], resid[1:])):
        tally.record(r0 - r1, 2 * r_err, None, f"rayleigh residual decreasing N={k0}->{k1}", r1 - r0, "< 0")

    full_resid = resid[-1]
    for x in xs:
        prod = eval_Jnorm_product(o, x, table)
        ser = eval_Jnorm(o, x, cfg)
        gap = abs(prod.value - ser.value)
        tally.record(prod.err + ser.err - gap, UNIT_ROUNDOFF * gap, x, "product overlaps series", gap, f"<= {fmt_float(prod.err + ser.err)}")

        ml = mittag_leffler_terms(o, x, table, cfg)
        bound = 0.5 * ml.tail_bound
        m_err = ml.lhs.err + len(table) * UNIT_ROUNDOFF * ml.partial + x * r_err
        tally.record(bound - ml.residual, m_err, x, "mittag-leffler residual", ml.residual, f"<= {fmt_float(bound)}")

        t = turan_J(o, x, j, cfg)
        tally.record(t.value, t.err, x, "turan positive", t.value, "> 0")

        up = eval_Jnorm(nu + 1.0, x, cfg)
        tally.record(ser.value, ser.err, x, "Jnorm positive", ser.value, "> 0")
        tally.record(up.value - ser.value, up.err + ser.err, x, "Jnorm(nu+1) >= Jnorm(nu)", up.value - ser.value, ">= 0")

    if nu <= 0.0:
        # L is positive and increasing on (0, j) for -1 < nu <= 0
        prev = None
        for x in xs:
            cur = aux_L(o, x, j, cfg)
            tally.record(cur.value, cur.err, x, "L positive", cur.value, "> 0")
            if prev is not None:
                tally.record(cur.value - prev.value, cur.err + prev.err, x, "L increasing", cur.value - prev.value, ">= 0")
            prev = cur
    return tally.report(f"identities:nu={fmt_float(nu)}", (a, b, len(xs)))


# -- serialization --------------------------------------------------------

CSV_HEADER = ("kind", "claim_id", "validity", "passed", "checks_run", "indeterminate", "worst_margin", "nu", "x", "check", "observed", "required")


def render_report(report: CertReport, fmt: str) -> str:
    """Serialize deterministically; ``fmt`` is ``json`` or ``csv``."""
    if fmt == "json":
        return to_json(report.as_dict())
    if fmt == "csv":
        rows = [
            (
                "summary",
                report.claim_id,
                report.validity,
                report.passed,
                report.checks_run,
                report.indeterminate,
                float(report.worst_margin),
                None,
                None,
                None,
                None,
                None,
            )
        ]
        for v in report.violations:
            rows.append(
                ("violation", report.claim_id, None, None, None, None, None, float(v.nu), None if v.x is None else float(v.x), v.check, float(v.observed), v.required)
            )
        return to_csv(CSV_HEADER, rows)
    raise DomainError(f"unknown report format {fmt!r}; expected json or csv")


def write_report(report: CertReport, fmt: str, destination) -> None:
    text = render_report(report, fmt)
    path = os.fspath(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
