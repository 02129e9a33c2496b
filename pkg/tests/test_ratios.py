import math

import pytest
from hypothesis import given, strategies as st

from huygens import (
    CancellationError,
    DomainError,
    Family,
    aux_L,
    check_point,
    coeff_C,
    coeff_C_log_gap,
    coeff_c,
    eval_Jnorm,
    first_zero,
    mittag_leffler_residual,
    p_polynomial,
    ratio_F,
    ratio_G,
    ratio_H,
    ratio_H_complement,
    ratio_Phi,
    sharp_constants,
    turan_J,
    zeros,
)
from huygens.ratios import mittag_leffler_terms

S1, C1 = math.sin(1.0), math.cos(1.0)

# [DERIVED] 40-digit mpmath evaluations of the closed forms, frozen
F_MHALF_1 = 0.34485492795756949  # (1 - sin 1)/(1 - cos 1)
G_MHALF_1 = 0.22142880281012095  # (1 - sin 1)/(tan 1 - sin 1)
H_MHALF_1 = 0.42359335717093647  # (sinh 1 - 1)/(sinh 1 - tanh 1)
PHI_MHALF_1 = 0.32260622532306821  # (sinh 1 - 1)/(cosh 1 - 1)
CHECK_JREC = 0.0062942758301910452  # (2/3)/sin 1 + (1/3) cot 1 - 1
TURAN_MHALF_1 = 0.21990702321433507
TURAN_0_1 = 0.071187025279129006
L_MHALF_1 = 3.3514266371468522
QSTAR_HALF = 0.69603644907298669  # 1 - 3/pi^2
H_0_1 = 0.54861982697765028
LOG_ONE_MINUS_C = {(0, 1): -1.5040773967762741, (0, 50): -64.911943353618188, (1, 2): -2.5902671654458266}

NUS = [-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0]


def encloses(enc, truth, slack=1e-16):
    return abs(enc.value - truth) <= enc.err + slack


class TestRatioValues:
    @pytest.mark.parametrize("nu", NUS)
    def test_origin_limits(self, nu):
        p = (nu + 1) / (nu + 2)
        for f in (ratio_F, ratio_G, ratio_H, ratio_Phi):
            assert f(nu, 0.0).value == pytest.approx(p, abs=1e-15)

    def test_closed_forms(self):
        assert encloses(ratio_F(-0.5, 1.0), F_MHALF_1)
        assert encloses(ratio_G(-0.5, 1.0), G_MHALF_1)
        assert encloses(ratio_H(-0.5, 1.0), H_MHALF_1)
        assert encloses(ratio_Phi(-0.5, 1.0), PHI_MHALF_1)
        assert encloses(ratio_H(0.0, 1.0), H_0_1)

    def test_F_at_first_zero(self):
        assert ratio_F(-0.5, math.pi / 2, math.pi / 2).value == pytest.approx(1 - 2 / math.pi, abs=1e-14)

    def test_G_vanishes_at_first_zero(self):
        assert ratio_G(-0.5, math.pi / 2 - 1e-9).value < 1e-8

    def test_far_limits(self):
        assert ratio_H_complement(0.0, 200.0).value < 1e-80
        assert 0 < ratio_Phi(0.0, 1e4).value < 2.1e-4

    def test_domains(self):
        with pytest.raises(DomainError):
            ratio_F(-0.5, 2.0)
        with pytest.raises(DomainError):
            ratio_G(-0.5, math.pi / 2, math.pi / 2)
        with pytest.raises(DomainError):
            ratio_H(0.0, -1.0)
        with pytest.raises(DomainError):
            ratio_Phi(0.0, float("inf"))

    @pytest.mark.parametrize("nu", [-0.5, 0.0, 3.0])
    def test_G_F_identity(self, nu):
        j = first_zero(nu)
        for k in range(1, 10):
            x = j * k / 10
            lhs = ratio_G(nu, x) * eval_Jnorm(nu + 1, x)
            rhs = ratio_F(nu, x) * eval_Jnorm(nu, x)
            assert lhs.overlaps(rhs)

    @pytest.mark.parametrize("nu", [-0.5, 1.0])
    def test_H_and_complement_agree(self, nu):
        for x in (0.5, 5.0, 29.0, 31.0, 40.0):
            h, c = ratio_H(nu, x), ratio_H_complement(nu, x)
            assert abs(h.value + c.value - 1.0) <= h.err + c.err + 1e-15

    def test_ratios_against_mpmath(self, mp):
        def In(v, x):
            return mp.besseli(v, x) * mp.gamma(v + 1) * (x / 2) ** (-v)

        for nu in (-0.7, 2.0):
            for x in (0.3, 3.0, 35.0):
                X = mp.mpf(x)
                e0, e1 = (In(nu, X) - 1) / X**2, (In(nu + 1, X) - 1) / X**2
                assert encloses(ratio_Phi(nu, x), float(e1 / e0))
                comp = 1 - e1 * In(nu, X) / (In(nu + 1, X) * e0)
                assert encloses(ratio_H_complement(nu, x), float(comp), 0.0)


class TestSharpConstants:
    def test_j_reciprocal_at_minus_half(self):
        sc = sharp_constants("j-reciprocal", -0.5)
        assert sc.p_star == pytest.approx(1 / 3, abs=1e-15)
        assert sc.q_star == pytest.approx(1 - 2 / math.pi, abs=1e-10)
        assert (sc.p_direction, sc.q_direction, sc.validity) == ("<=", ">=", "proved")

    def test_i_direct(self):
        sc = sharp_constants(Family.I_DIRECT, -0.5)
        assert (sc.p_star, sc.q_star) == (pytest.approx(1 / 3), 1.0)

    def test_q_star_at_half(self):
        assert sharp_constants("j-reciprocal", 0.5).q_star == pytest.approx(QSTAR_HALF, abs=1e-10)

    @pytest.mark.parametrize("nu", NUS)
    def test_invariants(self, nu):
        for fam in Family:
            sc = sharp_constants(fam, nu)
            assert sc.p_star == (nu + 1) / (nu + 2)
            assert sc.validity == ("conjectured" if fam is Family.J_DIRECT and nu > 0 else "proved")
        assert 0 < sharp_constants("j-reciprocal", nu).q_star < 1

    def test_row_layout(self):
        row = sharp_constants("i-reciprocal", 1.0).row()
        assert list(row) == ["family", "nu", "p_star", "p_dir", "q_star", "q_dir", "validity"]

    def test_unknown_family(self):
        with pytest.raises(DomainError):
            sharp_constants("nonsense", 0.0)


class TestCheckPoint:
    def test_huygens_lower(self):
        pc = check_point("j-reciprocal", -0.5, 1 / 3, "lower", 1.0)
        assert pc.holds
        assert abs(pc.margin - CHECK_JREC) <= pc.err + 1e-16

    def test_j_direct_upper(self):
        pc = check_point("j-direct", -0.5, 0.0, "upper", 1.0)
        assert pc.holds and pc.margin == pytest.approx(1 - S1, abs=1e-14)

    def test_sharpness_at_origin(self):
        margins = [check_point("i-direct", 0.0, 0.5, "lower", x).margin for x in (1e-1, 1e-2, 1e-3)]
        assert margins[0] > margins[1] > margins[2] > 0
        assert margins[2] < 1e-12

    @pytest.mark.parametrize("x", [0.5, 10.0, 45.0, 800.0])
    def test_i_families_far_out(self, x):
        assert check_point("i-direct", 1.0, 1.0, "upper", x).holds
        assert check_point("i-direct", 1.0, 0.5, "lower", x).holds
        assert check_point("i-reciprocal", 1.0, 0.0, "upper", x).holds
        assert not check_point("i-direct", 1.0, 1.1, "lower", x).holds

    def test_against_direct_combination(self, mp):
        def In(v, x):
            return mp.besseli(v, x) * mp.gamma(v + 1) * (x / 2) ** (-v)

        for w in (0.2, 0.7):
            X = mp.mpf(3)
            comb = (1 - w) / In(1.5, X) + w * In(0.5, X) / In(1.5, X) - 1
            pc = check_point("i-reciprocal", 0.5, w, "lower", 3.0)
            assert abs(pc.margin - float(comb)) <= pc.err + 1e-16

    def test_bad_side(self):
        with pytest.raises(DomainError):
            check_point("j-direct", 0.0, 0.5, "middle", 1.0)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            check_point("j-direct", -0.5, 0.5, "lower", 2.0)


class TestCoefficients:
    @pytest.mark.parametrize("nu", NUS)
    def test_C0(self, nu):
        assert coeff_C(nu, 0) == pytest.approx((nu + 1) / (nu + 2), abs=1e-12)

    def test_C1_exceeds_C0(self):
        assert coeff_C(0.0, 1) > coeff_C(0.0, 0) == pytest.approx(0.5)

    def test_log_gap_oracle(self):
        for (nu, n), ref in LOG_ONE_MINUS_C.items():
            assert coeff_C_log_gap(nu, n) == pytest.approx(ref, rel=1e-12)

    def test_C_approaches_one_from_below(self):
        vals = [coeff_C(0.5, n) for n in (10, 20, 200)]
        assert all(v <= 1.0 for v in vals)
        assert vals[-1] == pytest.approx(1.0, abs=1e-12)
        assert coeff_C_log_gap(0.5, 200) < coeff_C_log_gap(0.5, 20) < 0

    def test_c_sequence(self):
        assert coeff_c(0.0, 2) == 0.25
        assert coeff_c(1.5, 0) == (1.5 + 1) / (1.5 + 2)

    @given(st.floats(-0.99, 50), st.integers(0, 500))
    def test_c_strictly_decreasing(self, nu, n):
        assert coeff_c(nu, n + 1) < coeff_c(nu, n)

    @given(st.floats(-0.99, 50), st.integers(0, 100))
    def test_p_polynomial(self, nu, n):
        expanded, factored = p_polynomial(nu, n)
        assert expanded == pytest.approx(factored, rel=1e-12, abs=1e-12)
        assert factored > 0

    def test_negative_index(self):
        with pytest.raises(DomainError):
            coeff_C(0.0, -1)


class TestTuranAndL:
    def test_origin(self):
        assert abs(turan_J(0.3, 0.0).value) <= 1e-14

    def test_values(self):
        assert encloses(turan_J(-0.5, 1.0), TURAN_MHALF_1)
        assert encloses(turan_J(0.0, 1.0), TURAN_0_1)
        assert encloses(aux_L(-0.5, 1.0), L_MHALF_1, 1e-15)

    def test_L_limit(self):
        for nu in (-0.5, 0.0, 2.0):
            assert aux_L(nu, 1e-4).value == pytest.approx(1 / (nu + 1), rel=1e-6)

    def test_L_increasing_for_nonpositive_orders(self):
        j = first_zero(-0.3)
        vals = [aux_L(-0.3, j * k / 50).value for k in range(1, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_domains(self):
        with pytest.raises(DomainError):
            turan_J(0.0, 3.0)
        with pytest.raises(DomainError):
            aux_L(0.0, 0.0)


class TestMittagLeffler:
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_half_order(self, x):
        t = zeros(0.5, 500)
        terms = mittag_leffler_terms(0.5, x, t)
        assert abs(terms.lhs.value - (1 / math.tanh(x) - 1 / x)) <= terms.lhs.err + 1e-15
        r = mittag_leffler_residual(0.5, x, t)
        assert r <= 0.5 * terms.tail_bound

    def test_order_zero(self, mp):
        t = zeros(0.0, 500)
        terms = mittag_leffler_terms(0.0, 2.0, t)
        assert abs(terms.lhs.value - float(mp.besseli(1, 2) / mp.besseli(0, 2))) <= terms.lhs.err + 1e-16
        assert terms.residual <= 0.5 * terms.tail_bound

    def test_small_x(self):
        t = zeros(1.0, 100)
        terms = mittag_leffler_terms(1.0, 1e-9, t)
        assert terms.lhs.value < 1e-9 and terms.partial < 1e-9

    def test_validation(self):
        with pytest.raises(DomainError):
            mittag_leffler_residual(0.0, 0.0, zeros(0.0, 5))
        with pytest.raises(DomainError):
            mittag_leffler_residual(0.0, 1.0, zeros(1.0, 5))
