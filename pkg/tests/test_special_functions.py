"""Bessel evaluator checks against independent references.

References used: mpmath at 40 digits (its own hypergeometric machinery),
elementary closed forms on the half-integer family, the J/Y Wronskian,
and scipy's zero tables.  Tolerances follow the module's accuracy note:
J is near machine precision everywhere tested, Y loses ~eps*exp(|z|)
to cancellation, so Y grids stay at |z| <= 9.
"""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sps

from dtnlab.errors import ParameterError, PoleError, ScaleOverflowError
from dtnlab.special_functions import (
    Order,
    bessel_deriv,
    bessel_deriv_log,
    bessel_j,
    bessel_j_log,
    bessel_j_zeros,
    bessel_y,
    bessel_y_log,
    envelope_order_threshold,
    leading_term_deviation_bound,
    verify_envelope_bounds,
)

mp.mp.dps = 40


def ref_j(a, z, deriv=0):
    return complex(mp.besselj(mp.mpf(a), mp.mpc(z), derivative=deriv))


def ref_y(a, z, deriv=0):
    return complex(mp.bessely(mp.mpf(a), mp.mpc(z), derivative=deriv))


def rel(got, want):
    return abs(got - want) / max(abs(want), 1e-300)


def polar(r, phi):
    return r * complex(math.cos(phi), math.sin(phi))


def polar_array(r, phi):
    return r * np.exp(1j * phi)


class TestOrder:
    def test_parity_validation(self):
        with pytest.raises(ParameterError):
            Order(3, 2)
        with pytest.raises(ParameterError):
            Order(4, 3)
        with pytest.raises(ParameterError):
            Order(0, 1)
        assert Order(3, 3).alpha == 1.5
        assert Order(-4, 2).alpha == -2.0

    def test_from_degree(self):
        assert Order.from_degree(5, 2).alpha == 5.0
        assert Order.from_degree(5, 3).alpha == 5.5
        assert Order.from_degree(0, 3).alpha == 0.5
        assert Order.from_degree(2, 4).alpha == 3.0

    def test_from_alpha_and_shift(self):
        assert Order.from_alpha(2.5).twice_alpha == 5
        assert Order.from_alpha(3).dim_parity == 2
        assert Order.from_alpha(2.5).shift(-1).alpha == 1.5
        with pytest.raises(ParameterError):
            Order.from_alpha(0.3)

    def test_plain_numbers_accepted(self):
        assert rel(bessel_j(2, 1.0).value, bessel_j(Order(4, 2), 1.0).value) == 0
        with pytest.raises(ParameterError):
            bessel_j(0.25, 1.0)


class TestAgainstMpmath:
    """Grids of exact values; J wide, Y capped at |z| = 9 (cancellation)."""

    J_ALPHAS = [0, 1, 2, 5, 10, 0.5, 1.5, 4.5]
    NEG_ALPHAS = [-0.5, -2.5, -3, -7]
    PHASES = [0.0, 0.7, math.pi / 2, 2.5]

    def test_j_wide_grid(self):
        for a in self.J_ALPHAS:
            for r in (0.3, 1.0, 3.2, 6.5, 11.0, 20.0):
                for phi in self.PHASES:
                    z = polar(r, phi)
                    got = bessel_j(Order.from_alpha(a), z)
                    assert rel(got.value, ref_j(a, z)) < 5e-11

    def test_j_negative_orders(self):
        # negative orders stay on the plain series; keep |z| moderate
        for a in self.NEG_ALPHAS:
            for r in (0.3, 1.0, 3.2, 6.5):
                for phi in self.PHASES:
                    z = polar(r, phi)
                    got = bessel_j(a, z)
                    assert rel(got.value, ref_j(a, z)) < 1e-11

    def test_y_grid(self):
        for a in [0, 1, 3, 8, 0.5, 2.5, -0.5, -3.5, -4]:
            for r in (0.3, 1.0, 3.2, 6.5, 9.0):
                for phi in self.PHASES:
                    z = polar(r, phi)
                    got = bessel_y(a, z)
                    assert rel(got.value, ref_y(a, z)) < 1e-9

    def test_derivatives(self):
        for a in [0, 1, 4, 0.5, 3.5, -1.5, -2]:
            for z in (0.7, 2.0 + 1.1j, 5.5, 3.0j):
                gj = bessel_deriv("j", a, z)
                gy = bessel_deriv("y", a, z)
                assert rel(gj.value, ref_j(a, z, deriv=1)) < 1e-10
                assert rel(gy.value, ref_y(a, z, deriv=1)) < 1e-9

    def test_seeded_sweep(self):
        rng = np.random.default_rng(20260822)
        for _ in range(80):
            ta = int(rng.integers(-16, 25))
            a = ta / 2.0
            r = float(rng.uniform(0.05, 12.0 if (a >= 0 and ta % 2 == 0) else 6.0))
            z = polar(r, float(rng.uniform(0.0, 2 * math.pi)))
            assert rel(bessel_j(a, z).value, ref_j(a, z)) < 1e-9
            if r <= 9.0:
                assert rel(bessel_y(a, z).value, ref_y(a, z)) < 1e-8

    def test_large_order_log_form(self):
        # the plain values over/underflow doubles; compare in log space
        a, z = 200, 1.0
        got = bessel_j_log(a, z)
        want = mp.besselj(200, 1)
        assert abs(got.log_scale - float(mp.log(abs(want)))) < 1e-10
        assert abs(got.mantissa - 1.0) < 1e-12  # J_200(1) > 0
        with pytest.raises(ScaleOverflowError):
            bessel_j(a, z)
        gy = bessel_y_log(a, z)
        wanty = mp.bessely(200, 1)
        assert abs(gy.log_scale - float(mp.log(abs(wanty)))) < 1e-10
        assert abs(gy.mantissa + 1.0) < 1e-12  # Y_200(1) < 0
        with pytest.raises(ScaleOverflowError):
            bessel_y(a, z)

    def test_log_and_plain_agree(self):
        for a in (0, 3, 0.5, -1.5):
            for z in (0.4, 2.0 + 0.3j, 7.0):
                p = bessel_j(a, z).value
                q = bessel_j_log(a, z)
                assert rel(q.mantissa * math.exp(q.log_scale), p) < 1e-14
                assert abs(abs(q.mantissa) - 1.0) < 1e-14


class TestClosedForms:
    """Half-integer orders against sqrt(2/(pi z)) * trig combinations."""

    def test_j_half(self):
        for x in np.linspace(0.1, 20.0, 61):
            want = math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
            assert rel(bessel_j(Order(1, 3), x).value, want) < 1e-11

    def test_j_three_halves(self):
        for x in np.linspace(0.1, 20.0, 61):
            want = math.sqrt(2.0 / (math.pi * x)) * (math.sin(x) / x - math.cos(x))
            # reference itself loses accuracy at its zeros; scale the bound
            scale = max(abs(want), math.sqrt(2.0 / (math.pi * x)) * 1e-4)
            assert abs(bessel_j(Order(3, 3), x).value - want) < 1e-11 * scale

    def test_y_half_is_minus_cos(self):
        # Y keeps the plain series; allow its eps*exp(x) roundoff envelope
        for x in np.linspace(0.1, 10.0, 34):
            want = -math.sqrt(2.0 / (math.pi * x)) * math.cos(x)
            tol = 1e-12 * math.sqrt(2.0 / (math.pi * x)) + 50e-16 * math.exp(x)
            assert abs(bessel_y(Order(1, 3), x).value - want) < tol

    def test_integer_reflection(self):
        for n in (1, 2, 5, 8):
            for z in (0.8, 2.5 + 1.0j):
                lhs = bessel_j(-n, z).value
                rhs = (-1) ** n * bessel_j(n, z).value
                assert rel(lhs, rhs) < 1e-15

    def test_wronskian(self):
        # J_a Y_a' - J_a' Y_a = 2 / (pi z)
        rng = np.random.default_rng(7)
        for _ in range(40):
            ta = int(rng.integers(0, 13))
            order = Order(ta, 2 if ta % 2 == 0 else 3)
            z = polar(float(rng.uniform(0.3, 8.0)), float(rng.uniform(0, 2 * math.pi)))
            j = bessel_j(order, z).value
            y = bessel_y(order, z).value
            jp = bessel_deriv("j", order, z).value
            yp = bessel_deriv("y", order, z).value
            assert rel(j * yp - jp * y, 2.0 / (math.pi * z)) < 1e-9


class TestTailsAndLimits:
    def test_tail_bound_honest(self):
        # |computed - exact| <= truncation tail + a roundoff cushion
        for a in (0, 2, 0.5, -1.5):
            for z in (0.5, 1.8, 3.9 + 0.4j):
                got = bessel_j(a, z)
                err = abs(got.value - ref_j(a, z))
                assert err <= got.tail_bound + 1e-12 * max(1.0, abs(got.value))

    def test_z_zero_values(self):
        assert bessel_j(0, 0.0).value == 1.0
        assert bessel_j(3, 0.0).value == 0.0
        assert bessel_j(Order(1, 3), 0.0).value == 0.0
        with pytest.raises(PoleError):
            bessel_j(-1.5, 0.0)
        with pytest.raises(PoleError):
            bessel_y(0, 0.0)
        with pytest.raises(PoleError):
            bessel_y(2.5, 0.0)

    def test_deriv_limits_at_zero(self):
        assert bessel_deriv("j", 0, 0.0).value == 0.0
        assert bessel_deriv("j", 1, 0.0).value == 0.5
        assert bessel_deriv("j", 4, 0.0).value == 0.0
        with pytest.raises(PoleError):
            bessel_deriv("y", 1, 0.0)
        with pytest.raises(ParameterError):
            bessel_deriv("x", 1, 1.0)

    def test_deriv_log_matches_plain(self):
        for a in (1, 2.5):
            for z in (0.9, 4.0 + 0.7j):
                p = bessel_deriv("j", a, z).value
                q = bessel_deriv_log("j", a, z)
                assert rel(q.mantissa * math.exp(q.log_scale), p) < 1e-13


class TestEnvelopes:
    def test_threshold_frozen_values(self):
        # smallest admissible starting order for |z| <= C, from the
        # three summed remainder conditions; dimension independent
        for d in (2, 3):
            assert envelope_order_threshold(1e-9, d) == 5
            assert envelope_order_threshold(1.0, d) == 6
            assert envelope_order_threshold(5.0, d) == 38
            assert envelope_order_threshold(10.0, d) == 151

    def test_threshold_monotone(self):
        vals = [envelope_order_threshold(c) for c in (0.5, 1.0, 2.0, 4.0, 6.0, 8.0)]
        assert vals == sorted(vals)

    def test_deviation_bound_formula(self):
        # expm1((|z|^2/4)/min_k |a+k|) with the minimum over k >= 1
        b = leading_term_deviation_bound(Order.from_alpha(10), 1.0 + 0.0j)
        assert math.isclose(b, math.expm1(0.25 / 11.0), rel_tol=1e-15)
        # for a = -12.5 the closest shifted order is |a + 12| = 1/2
        b2 = leading_term_deviation_bound(Order.from_alpha(-12.5), 2.0)
        assert math.isclose(b2, math.expm1(2.0), rel_tol=1e-15)

    def test_deviation_bound_holds(self):
        # measured |J_a / leading term - 1| never exceeds the bound
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(7, 40))
            d = int(rng.integers(2, 4))
            order = Order.from_degree(n, d)
            a = order.alpha
            z = polar(float(rng.uniform(1e-3, 5.0)), float(rng.uniform(0, 2 * math.pi)))
            ev = bessel_j_log(order, z)
            lead = a * cmath.log(complex(z) / 2.0) - math.lgamma(a + 1)
            h = ev.mantissa * cmath.exp(complex(ev.log_scale) - lead)
            bound = leading_term_deviation_bound(order, z)
            assert abs(h - 1.0) <= bound + 1e-12

    def test_envelope_report_passes_above_threshold(self):
        rng = np.random.default_rng(3)
        zs = polar_array(rng.uniform(0.0, 1.0, 200), rng.uniform(0, 2 * math.pi, 200))
        for d in (2, 3):
            rep = verify_envelope_bounds(7, d, zs)
            assert rep.all_ok
            for m in (rep.j_margin, rep.j_deriv_margin, rep.y_margin, rep.y_deriv_margin):
                assert m > 0.0

    def test_envelope_report_fails_below_threshold(self):
        # n = 2 with |z| up to 5 genuinely violates the J lower envelope
        zs = np.linspace(4.0, 5.0, 20) + 0.0j
        rep = verify_envelope_bounds(2, 2, zs)
        assert not rep.j_ok
        assert rep.j_margin < 0.0
        assert not rep.all_ok

    def test_envelope_handles_z_zero(self):
        zs = np.array([0.0, 0.5, 1.0 + 0.2j])
        rep = verify_envelope_bounds(8, 2, zs)
        assert rep.all_ok


class TestZeros:
    def test_against_scipy_tables(self):
        for n in (0, 1, 2, 5):
            got = bessel_j_zeros(Order.from_degree(n, 2), 6)
            want = sps.jn_zeros(n, 6)
            assert np.max(np.abs(got - want)) < 1e-10

    def test_half_order_zeros_are_k_pi(self):
        got = bessel_j_zeros(Order(1, 3), 5)
        want = math.pi * np.arange(1, 6)
        assert np.max(np.abs(got - want)) < 1e-11

    def test_interlacing(self):
        # j_{a,k} < j_{a+1,k} < j_{a,k+1}
        for d in (2, 3):
            prev = bessel_j_zeros(Order.from_degree(0, d), 7)
            for n in range(1, 6):
                cur = bessel_j_zeros(Order.from_degree(n, d), 7)
                assert np.all(prev[:6] < cur[:6])
                assert np.all(cur[:6] < prev[1:])
                prev = cur

    def test_x_max_truncates(self):
        got = bessel_j_zeros(0, 50, x_max=10.0)
        assert 2 <= len(got) <= 4
        assert np.all(got < 11.0)

    def test_negative_order_rejected(self):
        with pytest.raises(ParameterError):
            bessel_j_zeros(-0.5, 3)
