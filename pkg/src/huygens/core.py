"""Normalized Bessel functions of the first kind with certified error bounds.

The normalized functions are

    Jn(nu, x) = 2^nu Gamma(nu+1) x^-nu J_nu(x) = sum_n (-x^2/4)^n / ((nu+1)_n n!)
    In(nu, x) = 2^nu Gamma(nu+1) x^-nu I_nu(x) = sum_n ( x^2/4)^n / ((nu+1)_n n!)

Both equal 1 at the origin and are even in ``x``. Every evaluator returns an
:class:`Enclosure`: a floating point value and a bound on its absolute error
that covers both series truncation and floating point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .errors import DomainError, ToleranceNotReached
from .gamma import LOG_GAMMA_REL_ERR, log_gamma

__all__ = [
    "Order",
    "Enclosure",
    "SeriesConfig",
    "DEFAULT_CONFIG",
    "as_order",
    "eval_Jnorm",
    "eval_Inorm",
    "eval_Inorm_scaled",
    "deficit_J",
    "excess_I",
    "excess_I_scaled",
    "gap_I",
    "deriv_Jnorm",
    "deriv_Inorm",
    "log_gamma",
    "SCALED_THRESHOLD",
]

UNIT_ROUNDOFF = 2.0**-53
# per-operation rounding slack; twice the unit roundoff to stay conservative
_ROUND = 2.0**-52

# Above this argument the modified-Bessel quantities switch to e^-x scaling.
SCALED_THRESHOLD = 30.0

# Largest x for which e^x is finite in double precision.
_EXP_MAX = 709.0


def _gamma_n(k: int) -> float:
    """Classical bound ``k u / (1 - k u)`` on accumulated relative rounding."""
    ku = k * UNIT_ROUNDOFF
    return ku / (1.0 - ku)


@dataclass(frozen=True)
class Order:
    """Bessel order ``nu``; only ``nu > -1`` is admissible."""

    nu: float

    def __post_init__(self) -> None:
        try:
            nu = float(self.nu)
        except (TypeError, ValueError):
            raise DomainError(f"order must be a real number, got {self.nu!r}") from None
        if not math.isfinite(nu) or nu <= -1.0:
            raise DomainError(f"order must satisfy nu > -1, got {self.nu!r}")
        object.__setattr__(self, "nu", nu)

    def shifted(self, k: int = 1) -> "Order":
        return Order(self.nu + k)

    def __float__(self) -> float:
        return self.nu


OrderLike = Union[Order, float, int]


def as_order(order: OrderLike) -> Order:
    return order if isinstance(order, Order) else Order(order)


def _pad(e: float) -> float:
    """Round an error bound up past the few roundings made while forming it."""
    return e + e * 2.0**-48


@dataclass(frozen=True)
class Enclosure:
    """A value with an absolute error bound: the true result lies in
    ``[value - err, value + err]``.

    Arithmetic between enclosures (and plain floats, treated as exact)
    propagates the bounds and adds rounding slack for the operation itself.
    """

    value: float
    err: float = 0.0

    def __post_init__(self) -> None:
        if not self.err >= 0.0:
            raise ValueError(f"error bound must be non-negative, got {self.err!r}")
        if math.isfinite(self.value) and not math.isfinite(self.err):
            raise ValueError("error bound must be finite when the value is finite")

    @property
    def lo(self) -> float:
        return self.value - self.err

    @property
    def hi(self) -> float:
        return self.value + self.err

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Enclosure") -> bool:
        return abs(self.value - other.value) <= self.err + other.err

    def __float__(self) -> float:
        return self.value

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.value, self.err)

    def __add__(self, other) -> "Enclosure":
        o = _lift(other)
        v = self.value + o.value
        return Enclosure(v, _pad(self.err + o.err + _ROUND * abs(v)))

    __radd__ = __add__

    def __sub__(self, other) -> "Enclosure":
        o = _lift(other)
        v = self.value - o.value
        return Enclosure(v, _pad(self.err + o.err + _ROUND * abs(v)))

    def __rsub__(self, other) -> "Enclosure":
        return _lift(other) - self

    def __mul__(self, other) -> "Enclosure":
        o = _lift(other)
        v = self.value * o.value
        e = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
        return Enclosure(v, _pad(e + _ROUND * abs(v)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        o = _lift(other)
        room = abs(o.value) - o.err
        if not room > 0.0:
            raise ZeroDivisionError("denominator enclosure contains zero")
        q = self.value / o.value
        return Enclosure(q, _pad((self.err + abs(q) * o.err) / room + _ROUND * abs(q)))

    def __rtruediv__(self, other) -> "Enclosure":
        return _lift(other) / self


def _coef(c: float, ops: int = 3) -> Enclosure:
    """A coefficient computed with ``ops`` floating point operations."""
    return Enclosure(c, _gamma_n(ops) * abs(c))


def _lift(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure(float(x), 0.0)


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation control: absolute tail tolerance and a term budget."""

    tol: float = 1e-14
    max_terms: int = 400

    def __post_init__(self) -> None:
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise ValueError(f"tol must be a positive finite number, got {self.tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms!r}")


DEFAULT_CONFIG = SeriesConfig()


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    return x


# Fraction bits of the fixed-point accumulator used by the direct series.
_FRAC_BITS = 160
_ONE = 1 << _FRAC_BITS
_ULP_FIXED = 2.0**-_FRAC_BITS


def _series(
    nu: float,
    x: float,
    sign: int,
    shift: int,
    cfg: SeriesConfig,
    weight: bool = False,
) -> Enclosure:
    """Sum ``sum_{m>=0} u_m`` where ``u_0 = 1 / (4^shift (nu+1)_shift shift!)`` and
    ``u_{m+1} / u_m = sign * x^2 / (4 (n+1)(nu+n+1))`` with ``n = m + shift``.

    With ``weight`` the summand becomes ``n / (nu+n+1) * u_m`` (the termwise
    difference between consecutive orders).

    ``x`` and ``nu`` are binary fractions, so every term is rational; terms are
    carried as fixed-point integers with ``_FRAC_BITS`` fraction bits and the
    only rounding is one floor per step, tracked in ``lost``. The ratio
    magnitude decreases in ``m`` for ``nu > -1``, so once it drops below one
    the remaining tail is bounded by a geometric series.
    """
    x2 = x * x
    a, b = abs(x).as_integer_ratio()
    c, d = nu.as_integer_ratio()
    num = a * a * d
    base = 4 * b * b

    t = _ONE * d**shift
    den0 = 1
    for k in range(shift):
        den0 *= 4 * (k + 1) * (c + (k + 1) * d)
    t //= den0
    lost = 1.0 if shift else 0.0  # accumulated floor error of t, in fixed units

    def w_int(n: int, t: int) -> int:
        return (t * n * d) // (c + (n + 1) * d)

    acc = w_int(shift, t) if weight else t
    acc_lost = lost + (1.0 if weight else 0.0)

    tf = 1.0
    for k in range(shift):
        tf /= 4.0 * (k + 1) * (nu + k + 1)
    q = 0.25 * x2
    abs_sum = abs(tf)
    n = shift
    count = 1
    while True:
        r = q / ((n + 1) * (nu + n + 1))
        if r < 1.0:
            tail = abs(tf) * r / (1.0 - r)
            if tail <= cfg.tol:
                break
        if count >= cfg.max_terms:
            raise ToleranceNotReached(
                f"series for nu={nu}, x^2={x2} not converged to tol={cfg.tol} "
                f"within {cfg.max_terms} terms"
            )
        t = (t * num) // (base * (n + 1) * (c + (n + 1) * d))
        if sign < 0:
            t = -t
        lost = lost * r + 1.0
        tf = tf * r if sign > 0 else -tf * r
        abs_sum += abs(tf)
        if math.isinf(abs_sum):
            raise OverflowError(f"series for nu={nu}, x^2={x2} overflows; use the scaled form")
        n += 1
        count += 1
        if weight:
            acc += w_int(n, t)
            acc_lost += lost + 1.0
        else:
            acc += t
            acc_lost += lost
    if not math.isfinite(abs_sum):
        raise OverflowError(f"series for nu={nu}, x^2={x2} overflows; use the scaled form")
    try:
        value = acc / _ONE
    except OverflowError:
        raise OverflowError(f"series for nu={nu}, x^2={x2} overflows; use the scaled form") from None
    num_v, den_v = value.as_integer_ratio()
    rounding = 0.0 if num_v * _ONE == acc * den_v else UNIT_ROUNDOFF * abs(value)
    # the float shadow tf steers termination only; pad its tail for drift
    err = tail * (1.0 + _gamma_n(6 * count)) + acc_lost * _ULP_FIXED * (1.0 + 1e-12) + rounding
    return Enclosure(value, err)


def _scaled_series(
    nu: float,
    x: float,
    cfg: SeriesConfig,
    weight: Optional[Callable[[int], float]] = None,
) -> Enclosure:
    """``e^-x sum_n w(n) t_n`` with ``t_n = (x^2/4)^n / ((nu+1)_n n!)``.

    The sum is anchored at the dominant term ``t_M`` and extended in both
    directions with ratios below one, so no intermediate overflows. ``t_M e^-x``
    is formed in log space from log-gamma values.
    """
    x2 = x * x
    q = 0.25 * x2

    def ratio(n: int) -> float:  # t_{n+1} / t_n
        return q / ((n + 1) * (nu + n + 1))

    k = 0.5 * (-nu + math.sqrt(nu * nu + x2))
    m = max(0, int(k))
    while m > 0 and ratio(m - 1) < 1.0:
        m -= 1
    while ratio(m) >= 1.0:
        m += 1

    two_m_log = 2.0 * m * math.log(0.5 * x)
    lg_m = log_gamma(m + 1.0)
    lg_num = log_gamma(nu + m + 1.0)
    lg_den = log_gamma(nu + 1.0)
    log_pref = two_m_log - lg_m - lg_num + lg_den - x
    log_pref_err = LOG_GAMMA_REL_ERR * (abs(lg_m) + abs(lg_num) + abs(lg_den)) + 4.0 * UNIT_ROUNDOFF * (
        abs(two_m_log) + abs(lg_m) + abs(lg_num) + abs(lg_den) + x
    )
    pref = math.exp(log_pref)
    budget = max(cfg.max_terms, 10 * math.ceil(math.sqrt(x)))
    # the peak term alone is pref, so a tiny prefactor makes tol relative
    half_tol = 0.5 * cfg.tol * min(1.0, pref)

    wf = weight if weight is not None else (lambda n: 1.0)
    terms = [wf(m)]
    abs_sum = 1.0
    max_steps = 0

    # upward from the peak
    t, n, steps = 1.0, m, 0
    while True:
        r = ratio(n)
        up_tail = t * r / (1.0 - r)
        if pref * up_tail <= half_tol:
            break
        if steps >= budget:
            raise ToleranceNotReached(f"scaled series for nu={nu}, x={x} exhausted {budget} terms")
        t *= r
        n += 1
        steps += 1
        terms.append(t * wf(n))
        abs_sum += t
    max_steps = steps

    # downward from the peak; terms shrink as n decreases
    t, n, steps = 1.0, m, 0
    down_tail = 0.0
    while n > 0:
        rho = 1.0 / ratio(n - 1)
        down_tail = min(t * rho / (1.0 - rho), n * t) if rho < 1.0 else n * t
        if pref * down_tail <= half_tol:
            break
        if steps >= budget:
            raise ToleranceNotReached(f"scaled series for nu={nu}, x={x} exhausted {budget} terms")
        t *= rho
        n -= 1
        steps += 1
        terms.append(t * wf(n))
        abs_sum += t
        down_tail = 0.0
    max_steps = max(max_steps, steps)

    s = math.fsum(terms)
    per_step = 8 if weight is not None else 5
    rel_terms = _gamma_n(per_step * max_steps + 2)
    value = pref * s
    err = pref * (rel_terms * abs_sum + up_tail + down_tail) + abs(value) * (
        math.expm1(log_pref_err) + 3.0 * UNIT_ROUNDOFF
    )
    return Enclosure(value, err)


def eval_Jnorm(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """Normalized Bessel function ``Jn(nu, x)``, with ``Jn(nu, 0) = 1``.

    >>> eval_Jnorm(-0.5, 0.0)
    Enclosure(value=1.0, err=0.0)
    """
    nu = as_order(order).nu
    x = _check_x(x)
    return _series(nu, x, -1, 0, cfg)


def eval_Inorm(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """Normalized modified Bessel function ``In(nu, x) >= 1``.

    Raises :class:`OverflowError` once the value leaves double range; use
    :func:`eval_Inorm_scaled` there.
    """
    nu = as_order(order).nu
    x = _check_x(x)
    return _series(nu, x, 1, 0, cfg)


def eval_Inorm_scaled(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``e^-x In(nu, x)`` for ``x >= 0``, finite for every finite ``x``."""
    nu = as_order(order).nu
    x = _check_x(x)
    if x < 0.0:
        raise DomainError(f"scaled evaluation requires x >= 0, got {x!r}")
    if x <= SCALED_THRESHOLD:
        e = math.exp(-x)
        return Enclosure(e, UNIT_ROUNDOFF * e) * _series(nu, x, 1, 0, cfg)
    return _scaled_series(nu, x, cfg)


def deficit_J(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``(1 - Jn(nu, x)) / x^2`` summed directly, so no cancellation near 0.

    The value at ``x = 0`` is the limit ``1 / (4 (nu + 1))``.
    """
    nu = as_order(order).nu
    x = _check_x(x)
    return _series(nu, x, -1, 1, cfg)


def excess_I(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``(In(nu, x) - 1) / x^2`` by its positive-term series; ``1/(4(nu+1))`` at 0."""
    nu = as_order(order).nu
    x = _check_x(x)
    return _series(nu, x, 1, 1, cfg)


def excess_I_scaled(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``e^-x (In(nu, x) - 1) / x^2`` for ``x >= 0``."""
    nu = as_order(order).nu
    x = _check_x(x)
    if x < 0.0:
        raise DomainError(f"scaled evaluation requires x >= 0, got {x!r}")
    if x <= SCALED_THRESHOLD:
        e = math.exp(-x)
        return Enclosure(e, UNIT_ROUNDOFF * e) * _series(nu, x, 1, 1, cfg)
    e = math.exp(-x)
    # e^-x is far below the scaled value here, so the subtraction is benign
    return (_scaled_series(nu, x, cfg) - Enclosure(e, UNIT_ROUNDOFF * e)) / (x * x)


def gap_I(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG, scaled: bool = False) -> Enclosure:
    """``(In(nu, x) - In(nu+1, x)) / x^2`` as a positive-term series.

    Termwise ``1/(nu+1)_n - 1/(nu+2)_n = n / ((nu+n+1) (nu+1)_n)``, so the
    difference never cancels. With ``scaled`` the result carries ``e^-x``.
    """
    nu = as_order(order).nu
    x = _check_x(x)

    def w(n: int) -> float:
        return n / (nu + n + 1.0)

    if not scaled:
        return _series(nu, x, 1, 1, cfg, weight=True)
    if x < 0.0:
        raise DomainError(f"scaled evaluation requires x >= 0, got {x!r}")
    if x <= SCALED_THRESHOLD:
        e = math.exp(-x)
        return Enclosure(e, UNIT_ROUNDOFF * e) * gap_I(nu, x, cfg)
    return _scaled_series(nu, x, cfg, weight=w) / (x * x)


def deriv_Jnorm(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``d/dx Jn(nu, x) = -x / (2 (nu+1)) * Jn(nu+1, x)``."""
    o = as_order(order)
    x = _check_x(x)
    return eval_Jnorm(o.shifted(), x, cfg) * _coef(-x / (2.0 * (o.nu + 1.0)))


def deriv_Inorm(order: OrderLike, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> Enclosure:
    """``d/dx In(nu, x) = x / (2 (nu+1)) * In(nu+1, x)``."""
    o = as_order(order)
    x = _check_x(x)
    return eval_Inorm(o.shifted(), x, cfg) * _coef(x / (2.0 * (o.nu + 1.0)))
