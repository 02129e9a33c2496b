"""Positive zeros of J_nu, the Rayleigh sum check and the Weierstrass product.

Zeros are bracketed by a sign-change scan that starts at ``sqrt(4 (nu+1))``.
That is a strict lower bound for the first zero because the squared
reciprocals of all zeros sum to ``1 / (4 (nu+1))``. Brackets are then
tightened by bisection with guarded Newton steps.

The normalized series is used for the sign of ``J_nu`` wherever its
enclosure is tight. Further out, cancellation in the power series makes it
useless, and ``scipy.special.jv`` supplies the sign instead. Both have the
same zeros for ``x > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

from scipy import special

from .core import (
    DEFAULT_CONFIG,
    Enclosure,
    OrderLike,
    Order,
    as_order,
    deriv_Jnorm,
    eval_Jnorm,
)
from .errors import DomainError, NoSignChange

__all__ = [
    "ZeroTable",
    "first_zero",
    "zeros",
    "rayleigh_residual",
    "eval_Jnorm_product",
    "DEFAULT_ZERO_TOL",
    "SCAN_STEP",
]

DEFAULT_ZERO_TOL = 1e-12
SCAN_STEP = min(0.5, math.pi / 4)
# series enclosures wider than this hand over to scipy for sign decisions
_SERIES_ERR_LIMIT = 1e-13
_SERIES_X_LIMIT = 40.0
_NEWTON_STEPS = 3


@dataclass(frozen=True)
class ZeroTable:
    """The first ``len(zeros)`` positive zeros of ``J_nu``, each within ``tol``."""

    order: Order
    zeros: Tuple[float, ...]
    tol: float

    def __post_init__(self) -> None:
        zs = self.zeros
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ValueError("zeros must be strictly increasing")
        if zs and zs[0] <= math.sqrt(4.0 * (self.order.nu + 1.0)):
            raise ValueError("first zero violates the Rayleigh lower bound")

    def __len__(self) -> int:
        return len(self.zeros)

    def truncated(self, count: int) -> "ZeroTable":
        return ZeroTable(self.order, self.zeros[:count], self.tol)

    def rows(self) -> List[Tuple[int, float, float]]:
        """``(index, zero, tol)`` rows with 1-based indices."""
        return [(k + 1, z, self.tol) for k, z in enumerate(self.zeros)]


def _eval(nu: float, x: float) -> Tuple[float, float]:
    """A function with the same positive zeros as ``J_nu``, plus its derivative."""
    if x <= _SERIES_X_LIMIT:
        enc = eval_Jnorm(nu, x)
        if enc.err <= _SERIES_ERR_LIMIT:
            return enc.value, deriv_Jnorm(nu, x).value
    return float(special.jv(nu, x)), float(special.jvp(nu, x))


def _refine(nu: float, lo: float, hi: float, f_lo: float, tol: float) -> float:
    """Shrink a sign-change bracket ``[lo, hi]`` to width ``tol``.

    Bisection does the work; once the bracket is under 1e-3 wide, up to three
    Newton steps are tried and kept only if they land inside the bracket.
    """
    newton_left = _NEWTON_STEPS
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # adjacent floats
        x = mid
        if newton_left and hi - lo < 1e-3:
            f_mid, df_mid = _eval(nu, mid)
            newton_left -= 1
            if df_mid != 0.0:
                cand = mid - f_mid / df_mid
                if lo < cand < hi:
                    # probe a tol-wide bracket around the Newton iterate
                    a, b = max(lo, cand - 0.5 * tol), min(hi, cand + 0.5 * tol)
                    fa, _ = _eval(nu, a)
                    fb, _ = _eval(nu, b)
                    if (fa > 0) != (fb > 0):
                        return 0.5 * (a + b)
            f_x = f_mid
        else:
            f_x, _ = _eval(nu, x)
        if f_x == 0.0:
            return x
        if (f_x > 0) == (f_lo > 0):
            lo, f_lo = x, f_x
        else:
            hi = x
    return 0.5 * (lo + hi)


def _scan(nu: float, start: float, horizon: float, tol: float) -> float:
    x = start
    f_x, _ = _eval(nu, x)
    while x < horizon:
        nxt = x + SCAN_STEP
        f_n, _ = _eval(nu, nxt)
        if f_n == 0.0:
            return nxt
        if (f_n > 0) != (f_x > 0):
            return _refine(nu, x, nxt, f_x, tol)
        x, f_x = nxt, f_n
    raise NoSignChange(f"no sign change of J_{nu} on [{start}, {horizon}]")


def _default_horizon(nu: float, start: float) -> float:
    return start + 50.0 + 2.0 * abs(nu)


def first_zero(order: OrderLike, tol: float = DEFAULT_ZERO_TOL, horizon: float | None = None) -> float:
    """First positive zero ``j_{nu,1}`` to within ``tol``.

    >>> round(first_zero(-0.5), 12) == round(math.pi / 2, 12)
    True
    """
    nu = as_order(order).nu
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    return _first_zero(nu, float(tol), None if horizon is None else float(horizon))


@lru_cache(maxsize=1024)
def _first_zero(nu: float, tol: float, horizon: float | None) -> float:
    start = math.sqrt(4.0 * (nu + 1.0))
    if horizon is None:
        horizon = _default_horizon(nu, start)
    return _scan(nu, start, horizon, tol)


def zeros(order: OrderLike, count: int, tol: float = DEFAULT_ZERO_TOL) -> ZeroTable:
    """The first ``count`` positive zeros of ``J_nu``.

    Consecutive zeros of ``J_nu`` are never closer than one scan step, so
    scanning forward from the previous zero finds the next one.
    """
    o = as_order(order)
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    return _zeros(o.nu, count, float(tol))


@lru_cache(maxsize=256)
def _zeros(nu: float, count: int, tol: float) -> ZeroTable:
    zs = [_first_zero(nu, tol, None)]
    while len(zs) < count:
        prev = zs[-1]
        # asymptotic spacing is pi; a 2 pi horizon leaves ample room
        zs.append(_scan(nu, prev + 2.0 * tol + 1e-9 * prev, prev + 2.0 * math.pi + 4.0, tol))
    return ZeroTable(Order(nu), tuple(zs), tol)


def rayleigh_residual(order: OrderLike, table: ZeroTable) -> float:
    """``1/(4(nu+1)) - sum_k 1/j_k^2`` over the table: the omitted tail, positive."""
    o = as_order(order)
    if table.order != o:
        raise DomainError(f"table is for nu={table.order.nu}, not nu={o.nu}")
    return 1.0 / (4.0 * (o.nu + 1.0)) - math.fsum(1.0 / (z * z) for z in table.zeros)


def eval_Jnorm_product(order: OrderLike, x: float, table: ZeroTable) -> Enclosure:
    """Truncated product ``prod (1 - x^2/j_k^2)`` with a certified tail factor.

    For ``|x| < j_N`` the omitted factors multiply to a number in
    ``[exp(-x^2 R / (1 - x^2/j_N^2)), 1]`` where ``R`` is the Rayleigh residual,
    from ``ln(1 - u) >= -u / (1 - u)``.
    """
    o = as_order(order)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    if table.order != o:
        raise DomainError(f"table is for nu={table.order.nu}, not nu={o.nu}")
    if not table.zeros:
        raise DomainError("zero table is empty")
    x2 = x * x
    jn = table.zeros[-1]
    if x2 >= jn * jn:
        raise DomainError(f"|x|={abs(x)} must be below the last tabulated zero {jn}")
    prod = 1.0
    for z in table.zeros:
        prod *= 1.0 - x2 / (z * z)
    n = len(table.zeros)
    # zero errors: d/dj (1 - x^2/j^2) = 2 x^2 / j^3
    zero_rel = sum(2.0 * x2 * table.tol / (z**3 * abs(1.0 - x2 / (z * z))) for z in table.zeros)
    rel_round = (4 * n + 2) * 2.0**-53 + zero_rel
    resid = max(rayleigh_residual(o, table), 0.0) + 4 * n * 2.0**-53 / (4.0 * (o.nu + 1.0))
    low_factor = math.exp(-x2 * resid / (1.0 - x2 / (jn * jn)))
    a, b = prod * low_factor, prod
    lo, hi = min(a, b), max(a, b)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) + rel_round * abs(prod)
    return Enclosure(mid, half)
