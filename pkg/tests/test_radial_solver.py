"""Radial solver checks: free-solution identities, the energy-shift and
matched-Bessel oracles, pole-crossing fallback, batched consistency, and
conditioning behavior near Dirichlet eigenvalues."""

import math
import warnings

import numpy as np
import pytest
import scipy.special as sps

from dtnlab.energy import ComplexEnergy, dirichlet_spectrum
from dtnlab.errors import (
    ConditioningError,
    ConditioningWarning,
    ParameterError,
)
from dtnlab.harmonics import HarmonicIndex, basis_eval
from dtnlab.potentials import (
    Potential,
    bump_profile,
    constant_profile,
    piecewise_constant_profile,
    radial_potential,
    zero_profile,
)
from dtnlab.radial_solver import (
    _radial_log_derivative,
    free_dtn_entry,
    free_radial_ratio,
    radial_dtn,
    radial_dtn_many,
    ring_radial,
)
from dtnlab.special_functions import bessel_deriv, bessel_j, bessel_y


def matched_two_region(j, d, E, c):
    """Closed form for v = c on [0, 1/3], 0 outside, via scipy Bessels."""
    al = j + (d - 2) / 2
    kc = complex(np.sqrt(complex(E - c)))
    k = complex(np.sqrt(complex(E)))
    rb = 1.0 / 3.0

    def pair(f, z):
        return f(al, z), 0.5 * (f(al - 1, z) - f(al + 1, z))

    Ji, Jip = pair(sps.jv, kc * rb)
    Jo, Jop = pair(sps.jv, k * rb)
    Yo, Yop = pair(sps.yv, k * rb)
    M = np.array([[Jo, Yo], [k * Jop, k * Yop]])
    A, B = np.linalg.solve(M, np.array([Ji, kc * Jip]))
    J1, J1p = pair(sps.jv, k)
    Y1, Y1p = pair(sps.yv, k)
    return -(d - 2) / 2 + k * (A * J1p + B * Y1p) / (A * J1 + B * Y1)


class TestFreeSolution:
    def test_ratio_at_zero_energy(self):
        assert free_radial_ratio(3, 2, 0.0, 0.5) == 0.125
        assert free_radial_ratio(2, 3, 0.0, 0.5) == 0.25

    def test_ratio_boundary_normalization(self):
        for d in (2, 3):
            for j in (0, 4):
                for E in (0.0, 6.6, 2.0 + 1.0j):
                    assert free_radial_ratio(j, d, E, 1.0) == pytest.approx(1.0)

    def test_ratio_explicit_value(self):
        want = bessel_j(0, 0.5).value / bessel_j(0, 1.0).value
        assert free_radial_ratio(0, 2, 1.0, 0.5) == pytest.approx(want, rel=1e-12)

    def test_ratio_large_degree_underflows_cleanly(self):
        assert free_radial_ratio(400, 2, 6.6, 0.01) == 0.0

    def test_entry_at_zero_energy(self):
        for d in (2, 3, 4):
            assert free_dtn_entry(5, d, 0.0) == 5.0

    def test_entry_small_energy_expansion(self):
        # d=2, j=0: entry = -E/2 - E^2/16 + O(E^3)
        E = 1e-3
        got = free_dtn_entry(0, 2, E)
        assert abs(got - (-E / 2 - E * E / 16)) < 1e-3 * E * E

    def test_entry_matches_direct_formula(self):
        for d in (2, 3):
            for j in (0, 2, 7):
                for E in (6.6, 11.2, 3.0 - 0.8j):
                    k = ComplexEnergy(E).k
                    al = j + (d - 2) / 2
                    want = -(d - 2) / 2 + k * bessel_deriv(
                        "j", al, k
                    ).value / bessel_j(al, k).value
                    assert free_dtn_entry(j, d, E) == pytest.approx(want, rel=1e-11)

    def test_eigenvalue_proximity_warns_then_raises(self):
        # d=3, j=0 puts the lowest eigenvalue at pi^2
        with pytest.warns(ConditioningWarning):
            val = free_dtn_entry(0, 3, math.pi**2 - 1e-3)
        assert val.real < -1e3
        with pytest.raises(ConditioningError):
            free_dtn_entry(0, 3, math.pi**2 * (1.0 + 1e-15))

    def test_validation(self):
        with pytest.raises(ParameterError):
            free_radial_ratio(-1, 2, 1.0, 0.5)
        with pytest.raises(ParameterError):
            free_radial_ratio(0, 2, 1.0, 0.0)
        with pytest.raises(ParameterError):
            free_radial_ratio(0, 2, 1.0, 1.5)


class TestRingSystem:
    def test_vanishes_at_boundary(self):
        for d in (2, 3):
            for j in (0, 3):
                for E in (6.6, 2.0 + 1.0j):
                    assert abs(ring_radial(j, d, E, 1.0)) < 1e-14

    def test_boundary_slope_is_wronskian(self):
        # d/dr at r=1 equals k (Y' J - J' Y)(k) = 2/pi for d = 2
        E = 6.6
        h = 1e-6
        for j in (0, 2, 5):
            slope = (ring_radial(j, 2, E, 1.0) - ring_radial(j, 2, E, 1.0 - h)) / h
            assert slope == pytest.approx(2.0 / math.pi, rel=1e-4)

    def test_boundary_slope_formula_exact(self):
        E = 6.6
        k = ComplexEnergy(E).k
        for j in (0, 4):
            got = k * (
                bessel_deriv("y", j, k).value * bessel_j(j, k).value
                - bessel_deriv("j", j, k).value * bessel_y(j, k).value
            )
            assert got == pytest.approx(2.0 / math.pi, rel=1e-10)

    def test_zero_energy_rejected(self):
        with pytest.raises(ParameterError):
            ring_radial(0, 2, 0.0, 0.5)

    def test_ring_mode_orthogonality(self):
        # psi_jp = R_j(r) f_jp(t): quadrature over the ring annulus
        E = 6.6
        nr, nt = 80, 64
        rs, wr = np.polynomial.legendre.leggauss(nr)
        rs = (rs + 1.0) * (1.0 - 1.0 / 3.0) / 2.0 + 1.0 / 3.0
        wr = wr * (1.0 - 1.0 / 3.0) / 2.0
        ts = np.arange(nt) * 2 * math.pi / nt
        wt = 2 * math.pi / nt
        pairs = [(j, p) for j in range(0, 7) for p in range(1, (1 if j == 0 else 2) + 1)]
        rad = {j: np.array([ring_radial(j, 2, E, r) for r in rs]) for j in range(7)}
        vals = {}
        for j, p in pairs:
            ang = basis_eval(HarmonicIndex(j, p), ts)
            vals[(j, p)] = np.outer(rad[j], ang)
        scale = max(np.max(np.abs(v)) for v in vals.values()) ** 2
        for i, a in enumerate(pairs):
            for b in pairs[i + 1 :]:
                ip = np.sum(vals[a] * vals[b] * (wr * rs)[:, None] * wt)
                assert abs(ip) < 1e-10 * scale


class TestPotentialSolves:
    def test_zero_potential_matches_free(self):
        for d in (2, 3):
            for j in (0, 1, 5, 12):
                for E in (0.0, 6.6, 11.2, 6.6 + 0.4j, -3.0):
                    got = radial_dtn(zero_profile(), E, j, d)
                    want = free_dtn_entry(j, d, E)
                    assert abs(got - want) <= 1e-10 * max(1.0, abs(want))

    def test_energy_shift_identity(self):
        for c in (-1.0, 0.5, 2.0):
            prof = constant_profile(c, 1.0)
            for d in (2, 3):
                for j in (0, 3, 20):
                    for E in (0.0, 6.6, 11.2):
                        got = radial_dtn(prof, E, j, d)
                        want = free_dtn_entry(j, d, E - c)
                        assert abs(got - want) <= 1e-8 * max(1.0, abs(want))

    def test_full_disk_support_is_flagged(self):
        pot = radial_potential(constant_profile(2.0, 1.0))
        assert not pot.small_support_ok
        ring = radial_potential(piecewise_constant_profile([2.0], [0.0, 1.0 / 3.0]))
        assert ring.small_support_ok

    def test_matched_bessel_oracle(self):
        for c in (2.0, -1.5):
            prof = piecewise_constant_profile([c], [0.0, 1.0 / 3.0])
            for d in (2, 3):
                for j in (0, 1, 4, 6):
                    got = radial_dtn(prof, 6.6, j, d)
                    want = matched_two_region(j, d, 6.6, c)
                    assert abs(got - want) <= 1e-8 * max(1.0, abs(want))

    def test_pole_crossing_falls_back_to_linear(self):
        # E = 30, j = 0: R has an interior zero, so the log-derivative
        # integration must detect the pole and the linear path take over
        prof = constant_profile(1e-30, 1.0)
        w, info = _radial_log_derivative(prof, ComplexEnergy(30.0), 0, 2)
        assert info["method"] == "linear"
        want = free_dtn_entry(0, 2, 30.0)
        assert abs(w - want) <= 1e-7 * abs(want)

    def test_smooth_case_stays_riccati(self):
        prof = bump_profile(7.0 / 24.0, 1.0 / 24.0, 0.25)
        w, info = _radial_log_derivative(prof, ComplexEnergy(6.6), 3, 2)
        assert info["method"] == "riccati"

    def test_eigenvalue_hit_raises(self):
        lam = dirichlet_spectrum(2, 3, 10.0)[0][0]
        with pytest.raises(ConditioningError):
            radial_dtn(constant_profile(1e-30, 1.0), lam, 0, 2)

    def test_potential_object_accepted(self):
        pot = radial_potential(bump_profile(0.29, 0.03, 0.5))
        got = radial_dtn(pot, 6.6, 2, 2)
        want = radial_dtn(pot.radial_profile(), 6.6, 2, 2)
        assert got == want
        with pytest.raises(ParameterError):
            radial_dtn(pot, 6.6, 2, 3)  # built for d=2

    def test_complex_energy(self):
        prof = piecewise_constant_profile([1.5], [0.0, 1.0 / 3.0])
        E = 6.6 + 0.4j
        got = radial_dtn(prof, E, 2, 2)
        want = matched_two_region(2, 2, E, 1.5)
        assert abs(got - want) <= 1e-8 * max(1.0, abs(want))


class TestBatchedSolve:
    def test_matches_scalar_path(self):
        prof = bump_profile(7.0 / 24.0, 1.0 / 24.0, 0.25)
        js = np.arange(0, 25)
        for E in (6.6, 6.6 + 0.4j):
            batch = radial_dtn_many(prof, E, js, 2)
            singles = np.array([radial_dtn(prof, E, j, 2) for j in js])
            assert np.max(np.abs(batch - singles)) < 1e-8

    def test_zero_profile_short_circuit(self):
        js = np.arange(0, 6)
        got = radial_dtn_many(zero_profile(), 6.6, js, 3)
        want = np.array([free_dtn_entry(int(j), 3, 6.6) for j in js])
        assert np.max(np.abs(got - want)) == 0.0

    def test_validation(self):
        prof = bump_profile(0.29, 0.03, 1.0)
        with pytest.raises(ParameterError):
            radial_dtn_many(prof, 6.6, [], 2)
        with pytest.raises(ParameterError):
            radial_dtn_many(prof, 6.6, [-1, 2], 2)

    def test_eigenvalue_names_degree(self):
        lam = dirichlet_spectrum(2, 3, 10.0)[0][0]  # degree-0 eigenvalue
        with pytest.raises(ConditioningError) as exc:
            radial_dtn_many(constant_profile(1e-30, 1.0), lam, np.arange(4), 2)
        assert 0 in exc.value.detail["degrees"]
