"""Huygens-type ratio functions, sharp constants and the supporting sequences.

Each inequality family compares a weighted combination of two normalized
Bessel quotients against 1. Writing the combination minus one as
``scale(x) * (R(x) - w)`` (or ``w - R(x)``), with ``scale > 0``, reduces every
family to one ratio function ``R``:

==============  ==========================================  =======  ==========
family          combination                                 ratio    domain
==============  ==========================================  =======  ==========
j-reciprocal    (1-w)/Jn(nu+1) + w Jn(nu)/Jn(nu+1)          F        (0, j)
j-direct        (1-w) Jn(nu+1) + w Jn(nu+1)/Jn(nu)          G        (0, j)
i-direct        (1-w) In(nu+1) + w In(nu+1)/In(nu)          H        (0, inf)
i-reciprocal    (1-w)/In(nu+1) + w In(nu)/In(nu+1)          Phi      (0, inf)
==============  ==========================================  =======  ==========

All ratios are evaluated through the deficit ``(1 - Jn)/x^2`` and excess
``(In - 1)/x^2`` series, so the removable singularity at ``x = 0`` needs no
special casing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .core import (
    DEFAULT_CONFIG,
    SCALED_THRESHOLD,
    UNIT_ROUNDOFF,
    Enclosure,
    OrderLike,
    Order,
    SeriesConfig,
    _coef,
    as_order,
    deficit_J,
    eval_Inorm,
    eval_Inorm_scaled,
    eval_Jnorm,
    excess_I,
    excess_I_scaled,
    gap_I,
)
from .errors import CancellationError, DomainError
from .gamma import LOG_GAMMA_REL_ERR, log_gamma
from .zeros import ZeroTable, first_zero, rayleigh_residual

__all__ = [
    "Family",
    "SharpConstants",
    "PointCheck",
    "ratio_F",
    "ratio_G",
    "ratio_H",
    "ratio_H_complement",
    "ratio_Phi",
    "sharp_constants",
    "check_point",
    "margin_function",
    "to_point_check",
    "coeff_C",
    "coeff_C_log_gap",
    "coeff_c",
    "p_polynomial",
    "turan_J",
    "aux_L",
    "mittag_leffler_terms",
    "mittag_leffler_residual",
]


class Family(str, enum.Enum):
    J_RECIPROCAL = "j-reciprocal"
    J_DIRECT = "j-direct"
    I_DIRECT = "i-direct"
    I_RECIPROCAL = "i-reciprocal"

    @property
    def bounded(self) -> bool:
        """True for the ordinary-Bessel families living on ``(0, j_{nu,1})``."""
        return self in (Family.J_RECIPROCAL, Family.J_DIRECT)

    @property
    def ratio_name(self) -> str:
        return _RATIO_NAME[self]


_RATIO_NAME = {
    Family.J_RECIPROCAL: "F",
    Family.J_DIRECT: "G",
    Family.I_DIRECT: "H",
    Family.I_RECIPROCAL: "Phi",
}


def as_family(family) -> Family:
    if isinstance(family, Family):
        return family
    try:
        return Family(str(family).lower())
    except ValueError:
        raise DomainError(f"unknown family {family!r}; expected one of {[f.value for f in Family]}") from None


def _x_in(x: float, lo: float, hi: float, *, closed_hi: bool, what: str) -> float:
    x = float(x)
    ok = lo <= x <= hi if closed_hi else lo <= x < hi
    if not ok:
        bracket = "]" if closed_hi else ")"
        raise DomainError(f"{what}: x={x!r} outside [{lo}, {hi}{bracket}")
    return x


def _jnu1(nu: float, jnu1: Optional[float]) -> float:
    return first_zero(nu) if jnu1 is None else float(jnu1)


def ratio_F(
    order: OrderLike, x: float, jnu1: Optional[float] = None, cfg: SeriesConfig = DEFAULT_CONFIG
) -> Enclosure:
    """``F(x) = (1 - Jn(nu+1, x)) / (1 - Jn(nu, x))`` on ``[0, j_{nu,1}]``.

    Increasing from ``(nu+1)/(nu+2)`` at 0 to ``1 - Jn(nu+1, j_{nu,1})``.
    """
    o = as_order(order)
    x = _x_in(x, 0.0, _jnu1(o.nu, jnu1), closed_hi=True, what="ratio_F")
    return deficit_J(o.shifted(), x, cfg) / deficit_J(o, x, cfg)


def ratio_G(
    order: OrderLike, x: float, jnu1: Optional[float] = None, cfg: SeriesConfig = DEFAULT_CONFIG
) -> Enclosure:
    """``G(x) = (1 - Jn(nu+1)) / (Jn(nu+1)/Jn(nu) - Jn(nu+1))`` on ``[0, j_{nu,1})``.

    Evaluated as ``F(x) Jn(nu, x) / Jn(nu+1, x)``.
    """
    o = as_order(order)
    x = _x_in(x, 0.0, _jnu1(o.nu, jnu1), closed_hi=False, what="ratio_G")
    f = deficit_J(o.shifted(), x, cfg) / deficit_J(o, x, cfg)
    return f * eval_Jnorm(o, x, cfg) / eval_Jnorm(o.shifted(), x, cfg)


def _i_parts(nu: float, x: float, cfg: SeriesConfig) -> Tuple[Enclosure, Enclosure, Enclosure, Enclosure]:
    """``(In(nu), In(nu+1), excess(nu), excess(nu+1))``, all carrying a common
    factor ``e^-x`` once ``x`` exceeds the scaling threshold."""
    if x <= SCALED_THRESHOLD:
        return (
            eval_Inorm(nu, x, cfg),
            eval_Inorm(nu + 1.0, x, cfg),
            excess_I(nu, x, cfg),
            excess_I(nu + 1.0, x, cfg),
        )
    return (
        eval_Inorm_scaled(nu, x, cfg),
        eval_Inorm_scaled(nu + 1.0, x, cfg),
        excess_I_scaled(nu, x, cfg),
        excess_I_scaled(nu + 1.0, x, cfg),
    )


def _check_nonneg(x: float, what: str) -> float:
    x = float(x)
    if not (x >= 0.0 and math.isfinite(x)):
        raise DomainError(f"{what}: x must be finite and >= 0, got {x!r}")
    return x


def ratio_H(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``H(x) = (In(nu+1) - 1) / (In(nu+1) - In(nu+1)/In(nu))`` on ``[0, inf)``.

    Increasing from ``(nu+1)/(nu+2)`` towards 1.
    """
    nu = as_order(order).nu
    x = _check_nonneg(x, "ratio_H")
    i0, i1, e0, e1 = _i_parts(nu, x, cfg)
    return e1 * i0 / (i1 * e0)


def ratio_H_complement(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``1 - H(x)`` without cancellation.

    ``1 - H = (In(nu) - In(nu+1)) / (x^2 In(nu+1) excess(nu))`` and the
    numerator is a positive-term series, so relative accuracy survives even
    where ``H`` itself rounds to 1.
    """
    nu = as_order(order).nu
    x = _check_nonneg(x, "ratio_H_complement")
    scaled = x > SCALED_THRESHOLD
    i1 = eval_Inorm_scaled(nu + 1.0, x, cfg) if scaled else eval_Inorm(nu + 1.0, x, cfg)
    e0 = excess_I_scaled(nu, x, cfg) if scaled else excess_I(nu, x, cfg)
    gap = gap_I(nu, x, cfg, scaled=scaled)
    if scaled:
        # every factor carries e^-x, so the quotient is e^x (1 - H)
        return _unscale_ratio(gap, i1, e0, x)
    return gap / (i1 * e0)


def _unscale_ratio(num: Enclosure, d1: Enclosure, d2: Enclosure, x: float) -> Enclosure:
    """``num / (d1 d2)`` for three ``e^-x``-scaled quantities, i.e. times ``e^-x``."""
    q = num / (d1 * d2)
    e = math.exp(-x)
    return q * Enclosure(e, UNIT_ROUNDOFF * e)


def ratio_Phi(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``Phi(x) = (1 - In(nu+1)) / (1 - In(nu))`` on ``[0, inf)``.

    Decreasing from ``(nu+1)/(nu+2)`` to 0, roughly like ``2 (nu+1) / x``.
    """
    nu = as_order(order).nu
    x = _check_nonneg(x, "ratio_Phi")
    if x <= SCALED_THRESHOLD:
        return excess_I(nu + 1.0, x, cfg) / excess_I(nu, x, cfg)
    return excess_I_scaled(nu + 1.0, x, cfg) / excess_I_scaled(nu, x, cfg)


@dataclass(frozen=True)
class SharpConstants:
    """Thresholds for one family and order.

    ``p_direction`` / ``q_direction`` are ``"<="`` or ``">="`` and read as
    "the inequality holds iff p <= p_star" and so on.
    """

    family: Family
    nu: float
    p_star: float
    p_direction: str
    q_star: float
    q_direction: str
    validity: str

    def row(self) -> dict:
        return {
            "family": self.family.value,
            "nu": self.nu,
            "p_star": self.p_star,
            "p_dir": self.p_direction,
            "q_star": self.q_star,
            "q_dir": self.q_direction,
            "validity": self.validity,
        }


def sharp_constants(family, order: OrderLike) -> SharpConstants:
    """Sharp weight thresholds ``(p*, q*)`` for ``family`` at order ``nu``.

    >>> sharp_constants("i-direct", -0.5).q_star
    1.0
    """
    fam = as_family(family)
    nu = as_order(order).nu
    p_star = (nu + 1.0) / (nu + 2.0)
    if fam is Family.J_RECIPROCAL:
        # the limit of F at j_{nu,1}; Jn(nu+1) does not vanish there
        q_star = 1.0 - eval_Jnorm(nu + 1.0, first_zero(nu)).value
        p_dir, q_dir = "<=", ">="
    elif fam is Family.J_DIRECT:
        q_star, p_dir, q_dir = 0.0, ">=", "<="
    elif fam is Family.I_DIRECT:
        q_star, p_dir, q_dir = 1.0, "<=", ">="
    else:
        q_star, p_dir, q_dir = 0.0, ">=", "<="
    validity = "conjectured" if fam is Family.J_DIRECT and nu > 0.0 else "proved"
    return SharpConstants(fam, nu, p_star, p_dir, q_star, q_dir, validity)


@dataclass(frozen=True)
class PointCheck:
    """Outcome of one inequality test.

    ``margin`` is combination minus 1 on the lower side and 1 minus the
    combination on the upper side; ``err`` bounds its error.
    """

    holds: bool
    margin: float
    err: float

    @property
    def fails(self) -> bool:
        return self.margin < -self.err

    @property
    def indeterminate(self) -> bool:
        return abs(self.margin) <= self.err


def margin_function(
    family,
    order: OrderLike,
    x: float,
    jnu1: Optional[float] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> Callable[[float], Enclosure]:
    """``w -> combination(w) - 1`` at a fixed point.

    The Bessel values are computed once, so probing several weights costs
    little. The difference is formed as ``scale * (ratio - w)`` (or its
    negation), never by subtracting the two nearly equal sides.
    """
    fam = as_family(family)
    nu = as_order(order).nu
    x = float(x)
    if fam.bounded:
        j = _jnu1(nu, jnu1)
        _x_in(x, 0.0, j, closed_hi=False, what=f"check_point[{fam.value}]")
        d0 = deficit_J(nu, x, cfg)
        d1 = deficit_J(nu + 1.0, x, cfg)
        j1 = eval_Jnorm(nu + 1.0, x, cfg)
        f = d1 / d0
        if fam is Family.J_RECIPROCAL:
            # x^2 d0 / Jn(nu+1) * (F - w)
            scale = d0 * (x * x) / j1
            return lambda w: scale * (f - w)
        # Jn(nu+1) x^2 d0 / Jn(nu) * (w - G)
        j0 = eval_Jnorm(nu, x, cfg)
        scale = j1 * d0 * (x * x) / j0
        g = f * j0 / j1
        return lambda w: scale * (w - g)
    x = _check_nonneg(x, f"check_point[{fam.value}]")
    scaled = x > SCALED_THRESHOLD
    i1 = eval_Inorm_scaled(nu + 1.0, x, cfg) if scaled else eval_Inorm(nu + 1.0, x, cfg)
    e0 = excess_I_scaled(nu, x, cfg) if scaled else excess_I(nu, x, cfg)
    if fam is Family.I_RECIPROCAL:
        # x^2 e0 / In(nu+1) * (w - Phi); the e^-x factors cancel
        e1 = excess_I_scaled(nu + 1.0, x, cfg) if scaled else excess_I(nu + 1.0, x, cfg)
        scale = e0 * (x * x) / i1
        phi = e1 / e0
        return lambda w: scale * (w - phi)
    # i-direct: scale (H - w) = (1 - w) scale - x^2 (In(nu) - In(nu+1)) / In(nu)
    # with scale = In(nu+1) x^2 e0 / In(nu); the second term is free of e^x
    i0 = eval_Inorm_scaled(nu, x, cfg) if scaled else eval_Inorm(nu, x, cfg)
    tail = gap_I(nu, x, cfg, scaled=scaled) * (x * x) / i0
    scale = i1 * e0 * (x * x) / i0
    huge = scaled and x > _EXP_LIMIT
    if scaled and not huge:
        scale = scale * _coef(math.exp(x), 1)

    def direct(w: float) -> Enclosure:
        one_minus_w = Enclosure(1.0 - w, UNIT_ROUNDOFF * abs(1.0 - w))
        if one_minus_w.value == 0.0:
            return -tail
        if huge:
            # |(1 - w) scale| overflows and swamps the finite second term
            return Enclosure(math.copysign(math.inf, one_minus_w.value), math.inf)
        return one_minus_w * scale - tail

    return direct


_EXP_LIMIT = 700.0


def to_point_check(lower_margin: Enclosure, side: str) -> PointCheck:
    """Turn ``combination - 1`` into the verdict for ``side``."""
    if side not in ("lower", "upper"):
        raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")
    m = lower_margin if side == "lower" else -lower_margin
    if math.isinf(m.value):
        # the sign is exact here, the magnitude is not
        return PointCheck(m.value > 0, m.value, 0.0)
    return PointCheck(m.value > m.err, m.value, m.err)


def check_point(
    family,
    order: OrderLike,
    weight: float,
    side: str,
    x: float,
    jnu1: Optional[float] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> PointCheck:
    """Test one side of a Huygens-type inequality at one point.

    ``side="lower"`` tests ``combination(weight) > 1``; ``side="upper"`` tests
    ``1 > combination(weight)``. ``holds`` requires the margin to clear its
    error bound.
    """
    if side not in ("lower", "upper"):
        raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")
    return to_point_check(margin_function(family, order, x, jnu1, cfg)(float(weight)), side)


def _log_diff_exp(a: float, b: float) -> Tuple[float, float]:
    """``log(e^a - e^b)`` for ``a > b`` and the relative error of the difference.

    Inputs carry absolute error about ``LOG_GAMMA_REL_ERR * |.|``.
    """
    if not a > b:
        raise CancellationError("difference of exponentials is not positive")
    d = a - b
    rel = -math.expm1(-d)
    abs_in = 4.0 * (LOG_GAMMA_REL_ERR + UNIT_ROUNDOFF) * (abs(a) + abs(b))
    return a + math.log(rel), abs_in / rel


_CANCEL_LIMIT = 1e-6


def _coeff_C_terms(order: OrderLike, n: int) -> float:
    """``C_n(nu)`` straight from the four gamma products.

    Each bracket is a difference of two exponentials evaluated by factoring
    out the larger one. Kept as an independent cross-check of
    :func:`coeff_C`; it loses about ``1e-14`` absolute, so it cannot resolve
    ``C_n`` from 1 once ``n`` is a few dozen.
    """
    nu = as_order(order).nu
    n = _index(n)
    lg = log_gamma
    g_big = lg(2 * nu + 2 * n + 4)
    g_mix = lg(2 * nu + n + 3)
    log_a, rel_a = _log_diff_exp(lg(nu + 2) + g_big, g_mix + lg(nu + n + 3))
    log_b, rel_b = _log_diff_exp(lg(nu + 1) + g_big, g_mix + lg(nu + n + 2))
    if rel_a > _CANCEL_LIMIT or rel_b > _CANCEL_LIMIT:
        raise CancellationError(f"C_n(nu) at nu={nu}, n={n} lost more than 1e-6 relative accuracy")
    return math.exp(lg(nu + 1) - lg(nu + 2) + log_a - log_b)


def _index(n: int) -> int:
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return n


def coeff_C_log_gap(order: OrderLike, n: int) -> float:
    """``log(1 - C_n(nu))``.

    With ``y = Gamma(2nu+n+3) Gamma(nu+n+2) / (Gamma(nu+1) Gamma(2nu+2n+4))``
    the two brackets of ``C_n`` become ``(nu+1) - (nu+n+2) y`` and ``1 - y``
    (after dividing out ``Gamma(nu+1) Gamma(2nu+2n+4)``), hence
    ``1 - C_n = (n+1) y / ((nu+1)(1 - y))``. Since ``y <= (nu+1)/(2nu+3) < 1/2``
    the remaining difference ``1 - y`` never cancels.
    """
    nu = as_order(order).nu
    n = _index(n)
    log_y = log_gamma(2 * nu + n + 3) + log_gamma(nu + n + 2) - log_gamma(nu + 1) - log_gamma(2 * nu + 2 * n + 4)
    return math.log(n + 1.0) - math.log(nu + 1.0) + log_y - math.log(-math.expm1(log_y))


def coeff_C(order: OrderLike, n: int) -> float:
    """``C_n(nu) = A_n(nu) / B_n(nu)``, the coefficient ratio behind the
    monotonicity of ``H``, evaluated in log-gamma space.

    The float result rounds to 1 once ``1 - C_n`` drops below ``2^-53``
    (around ``n = 25``); compare neighbours with :func:`coeff_C_log_gap`
    there.

    >>> round(coeff_C(0.0, 0), 15), round(coeff_C(0.0, 1), 15)
    (0.5, 0.777777777777778)
    """
    return -math.expm1(coeff_C_log_gap(order, n))


def coeff_c(order: OrderLike, n: int) -> float:
    """``c_n(nu) = (nu+1)/(nu+n+2)``, strictly decreasing in ``n``."""
    nu = as_order(order).nu
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return (nu + 1.0) / (nu + n + 2.0)


def p_polynomial(nu: float, n: int) -> Tuple[float, float]:
    """``P_n(nu)`` in expanded and factored form ``(nu+n+2)(2nu+2n+7)``."""
    expanded = 2 * nu * nu + (4 * n + 11) * nu + 2 * n * n + 11 * n + 14
    factored = (nu + n + 2) * (2 * nu + 2 * n + 7)
    return expanded, factored


def turan_J(
    order: OrderLike, x: float, jnu1: Optional[float] = None, cfg: SeriesConfig = DEFAULT_CONFIG
) -> Enclosure:
    """Turán expression ``Jn(nu+1)^2 - Jn(nu) Jn(nu+2)`` for ``|x| < j_{nu,1}``."""
    nu = as_order(order).nu
    j = _jnu1(nu, jnu1)
    x = float(x)
    if not abs(x) < j:
        raise DomainError(f"turan_J: |x|={abs(x)} must be below j_(nu,1)={j}")
    j1 = eval_Jnorm(nu + 1.0, x, cfg)
    return j1 * j1 - eval_Jnorm(nu, x, cfg) * eval_Jnorm(nu + 2.0, x, cfg)


def aux_L(
    order: OrderLike, x: float, jnu1: Optional[float] = None, cfg: SeriesConfig = DEFAULT_CONFIG
) -> Enclosure:
    """``L(x) = (nu+2)/(nu+1) Jn(nu+1)^2 / (Jn(nu) Jn(nu+2)) - 1`` on ``(0, j_{nu,1})``."""
    nu = as_order(order).nu
    j = _jnu1(nu, jnu1)
    x = float(x)
    if not 0.0 < x < j:
        raise DomainError(f"aux_L: x={x!r} outside (0, {j})")
    j0 = eval_Jnorm(nu, x, cfg)
    j1 = eval_Jnorm(nu + 1.0, x, cfg)
    j2 = eval_Jnorm(nu + 2.0, x, cfg)
    return _coef((nu + 2.0) / (nu + 1.0)) * (j1 * j1) / (j0 * j2) - 1.0


@dataclass(frozen=True)
class MittagLefflerTerms:
    lhs: Enclosure  # I_{nu+1}(x) / I_nu(x)
    partial: float  # sum over the tabulated zeros
    tail_bound: float  # 2 x R, R the Rayleigh residual

    @property
    def residual(self) -> float:
        return abs(self.lhs.value - self.partial - 0.5 * self.tail_bound)


def mittag_leffler_terms(
    order: OrderLike, x: float, table: ZeroTable, cfg: SeriesConfig = DEFAULT_CONFIG
) -> MittagLefflerTerms:
    """Both sides of ``I_{nu+1}/I_nu = sum_n 2x / (j_n^2 + x^2)``.

    The left side comes from normalized values,
    ``I_{nu+1}/I_nu = x In(nu+1) / (2 (nu+1) In(nu))``. The omitted terms of
    the sum lie in ``[0, 2 x R]``.
    """
    o = as_order(order)
    if table.order != o:
        raise DomainError(f"table is for nu={table.order.nu}, not nu={o.nu}")
    x = float(x)
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"mittag_leffler: x must be finite and > 0, got {x!r}")
    nu = o.nu
    if x <= SCALED_THRESHOLD:
        q = eval_Inorm(nu + 1.0, x, cfg) / eval_Inorm(nu, x, cfg)
    else:
        q = eval_Inorm_scaled(nu + 1.0, x, cfg) / eval_Inorm_scaled(nu, x, cfg)
    lhs = q * _coef(x / (2.0 * (nu + 1.0)))
    x2 = x * x
    partial = math.fsum(2.0 * x / (z * z + x2) for z in table.zeros)
    resid = rayleigh_residual(o, table)
    return MittagLefflerTerms(lhs, partial, 2.0 * x * resid)


def mittag_leffler_residual(
    order: OrderLike, x: float, table: ZeroTable, cfg: SeriesConfig = DEFAULT_CONFIG
) -> float:
    """``|lhs - partial - x R|``; the expansion is consistent when this is at most ``x R``."""
    return mittag_leffler_terms(order, x, table, cfg).residual
