"""The twelve acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line (visible without ``-s``).
Reference values come from mpmath at 40 digits or from closed forms.
"""

import contextlib
import math
import subprocess
import sys
from pathlib import Path

import mpmath
import pytest

from huygens import (
    DEFAULT_NU_GRID,
    Family,
    certify_family,
    certify_monotone,
    coeff_C,
    coeff_c,
    eval_Inorm,
    eval_Jnorm,
    first_zero,
    ratio_F,
    ratio_G,
    ratio_H,
    ratio_Phi,
    rayleigh_residual,
    scan_conjecture,
    sharp_constants,
    turan_J,
    zeros,
)
from huygens.certify import EPSILON, X_MAX, uniform_grid
from huygens.ratios import mittag_leffler_terms

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def criterion(capsys):
    """Context manager that prints ``criterion N: PASS|FAIL  title``."""

    @contextlib.contextmanager
    def run(number, title):
        ok = False
        try:
            yield
            ok = True
        finally:
            with capsys.disabled():
                print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")

    return run


def test_01_elementary_reduction(criterion):
    with criterion(1, "elementary reduction on 1000 points in [0, 10], tol 1e-12"):
        mpmath.mp.dps = 40
        worst = 0.0
        for x in uniform_grid(0.0, 10.0, 1000):
            xm = mpmath.mpf(x)
            sinc = mpmath.sin(xm) / xm if x else mpmath.mpf(1)
            sinhc = mpmath.sinh(xm) / xm if x else mpmath.mpf(1)
            pairs = [
                (eval_Jnorm(-0.5, x), mpmath.cos(xm)),
                (eval_Jnorm(0.5, x), sinc),
                (eval_Inorm(-0.5, x), mpmath.cosh(xm)),
                (eval_Inorm(0.5, x), sinhc),
            ]
            for enc, ref in pairs:
                worst = max(worst, float(abs(mpmath.mpf(enc.value) - ref)))
        assert worst <= 1e-12, worst


def test_02_j_reciprocal_at_minus_half(criterion):
    with criterion(2, "j-reciprocal at nu=-1/2: p*=1/3, q*=1-2/pi, iff certified"):
        sc = sharp_constants(Family.J_RECIPROCAL, -0.5)
        assert abs(sc.p_star - 1 / 3) <= 1e-10
        assert abs(sc.q_star - (1 - 2 / math.pi)) <= 1e-10
        assert (sc.p_direction, sc.q_direction) == ("<=", ">=")
        report = certify_family(Family.J_RECIPROCAL, -0.5, delta=1e-3)
        assert report.passed, report.violations[:3]


@pytest.mark.parametrize(
    "family, expected",
    [
        (Family.J_DIRECT, (1 / 3, 0.0)),
        (Family.I_DIRECT, (1 / 3, 1.0)),
        (Family.I_RECIPROCAL, (1 / 3, 0.0)),
    ],
)
def test_03_other_families_at_minus_half(criterion, family, expected):
    with criterion(3, f"{family.value} at nu=-1/2: constants {expected[0]:.6f}, {expected[1]:g}"):
        sc = sharp_constants(family, -0.5)
        assert abs(sc.p_star - expected[0]) <= 1e-10
        assert abs(sc.q_star - expected[1]) <= 1e-10
        report = certify_family(family, -0.5, delta=1e-3)
        assert report.passed, report.violations[:3]


def test_04_endpoint_limits(criterion):
    with criterion(4, "F, G, H, Phi -> (nu+1)/(nu+2) at x=1e-4 within 1e-8, quadratic approach"):
        x, half = 1e-4, 5e-5
        for nu in DEFAULT_NU_GRID:
            p = (nu + 1) / (nu + 2)
            j = first_zero(nu)
            fns = {
                "F": lambda t: ratio_F(nu, t, jnu1=j),
                "G": lambda t: ratio_G(nu, t, jnu1=j),
                "H": lambda t: ratio_H(nu, t),
                "Phi": lambda t: ratio_Phi(nu, t),
            }
            for name, fn in fns.items():
                d_full = fn(x).value - p
                d_half = fn(half).value - p
                assert abs(d_full) <= 1e-8, (nu, name, d_full)
                ratio = d_full / d_half
                assert 3.9 < ratio < 4.1, (nu, name, ratio)


def _mp_first_zero(nu, tol=1e-13):
    mpmath.mp.dps = 40
    lo, hi = mpmath.mpf(2), mpmath.mpf(3)
    f_lo = mpmath.besselj(nu, lo)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        f_mid = mpmath.besselj(nu, mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def test_05_zeros(criterion):
    with criterion(5, "zeros of J_{1/2} are n*pi; j_{-1/2,1}=pi/2; j_{0,1} vs bisection"):
        table = zeros(0.5, 10)
        for n, z in enumerate(table.zeros, start=1):
            assert abs(z - n * math.pi) <= 1e-10, (n, z)
        assert abs(first_zero(-0.5) - math.pi / 2) <= 1e-12
        oracle = _mp_first_zero(0)
        assert abs(oracle - 2.4048255577) <= 1e-9
        assert abs(first_zero(0) - oracle) <= 1e-9


def test_06_rayleigh(criterion):
    with criterion(6, "Rayleigh residual in (0, 1e-3) at N=500, halves at N=1000"):
        for nu in DEFAULT_NU_GRID:
            big = zeros(nu, 1000)
            r500 = rayleigh_residual(nu, big.truncated(500))
            r1000 = rayleigh_residual(nu, big)
            assert 0.0 < r500 < 1e-3, (nu, r500)
            assert 1.9 < r500 / r1000 < 2.1, (nu, r500 / r1000)


def test_07_mittag_leffler(criterion):
    with criterion(7, "Mittag-Leffler partial sum at nu=1/2 within 2xR of coth x - 1/x"):
        mpmath.mp.dps = 40
        table = zeros(0.5, 500)
        for x in (0.5, 1.0, 2.0):
            terms = mittag_leffler_terms(0.5, x, table)
            exact = float(mpmath.coth(x) - 1 / mpmath.mpf(x))
            assert abs(terms.lhs.value - exact) <= 1e-14
            gap = abs(exact - terms.partial)
            assert gap < terms.tail_bound, (x, gap, terms.tail_bound)


def test_08_monotonicity_suites(criterion):
    with criterion(8, "monotone F, H, Phi on the default grid and G at nu <= 0, 2000 points"):
        reports = []
        for nu in DEFAULT_NU_GRID:
            j = first_zero(nu)
            reports.append(certify_monotone("F", nu, (EPSILON, j), 2000, jnu1=j))
            reports.append(certify_monotone("H", nu, (EPSILON, X_MAX), 2000))
            reports.append(certify_monotone("Phi", nu, (EPSILON, X_MAX), 2000))
            if nu in (-0.9, -0.5, -0.1, 0.0):
                reports.append(certify_monotone("G", nu, (EPSILON, j - EPSILON), 2000, jnu1=j))
        bad = [(r.claim_id, v) for r in reports for v in r.violations]
        assert not bad, bad[:3]


def test_09_turan(criterion):
    with criterion(9, "Turan expression positive on (0.01, j) and zero at x=0"):
        for nu in DEFAULT_NU_GRID:
            j = first_zero(nu)
            at_zero = turan_J(nu, 0.0, jnu1=j)
            assert abs(at_zero.value) <= 1e-14
            lowest = min(
                (turan_J(nu, x, jnu1=j) for x in uniform_grid(0.01, j, 1002)[:-1]),
                key=lambda e: e.value - e.err,
            )
            assert lowest.value - lowest.err > 0.0, (nu, lowest)


def test_10_coefficients(criterion):
    with criterion(10, "C_n strictly increasing for n=0..100, C_0=(nu+1)/(nu+2), c_n decreasing"):
        for nu in DEFAULT_NU_GRID:
            assert abs(coeff_C(nu, 0) - (nu + 1) / (nu + 2)) <= 1e-12
            for n in range(101):
                assert coeff_c(nu, n + 1) < coeff_c(nu, n)
        # stated in double precision as written; 1 - C_n falls below the
        # unit roundoff near n = 25, after which neighbours compare equal
        stalls = [
            (nu, n)
            for nu in DEFAULT_NU_GRID
            for n in range(101)
            if not coeff_C(nu, n + 1) > coeff_C(nu, n)
        ]
        assert not stalls, f"{len(stalls)} non-strict steps, first {stalls[:3]}"


def test_11_conjecture_scan(criterion):
    with criterion(11, "conjecture scan nu in [0.1, 10], 50 orders, 1000 points"):
        report = scan_conjecture(0.1, 10.0, 50, 1000)
        assert report.checks_run > 0
        assert report.passed, report.violations[:3]


CLI_EXAMPLES = {
    "constants_j_reciprocal.json": ["constants", "--family", "j-reciprocal", "--nu", "-0.5", "--format", "json"],
    "zeros_half.csv": ["zeros", "--nu", "0.5", "--count", "3", "--format", "csv"],
    "eval_H.txt": ["eval", "--fn", "H", "--nu", "0", "--x", "1"],
}


def test_12_cli_golden(criterion):
    with criterion(12, "three CLI examples byte-identical across two runs and to golden files"):
        for name, argv in CLI_EXAMPLES.items():
            runs = [
                subprocess.run([sys.executable, "-m", "huygens", *argv], capture_output=True, check=True).stdout
                for _ in range(2)
            ]
            assert runs[0] == runs[1], name
            assert runs[0] == (GOLDEN / name).read_bytes(), name
