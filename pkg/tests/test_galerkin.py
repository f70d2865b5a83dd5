import math
import warnings

import numpy as np
import pytest

from dtnlab.dtn_matrix import decay_fit
from dtnlab.energy import EnergyIntervalSet
from dtnlab.errors import (
    CapabilityError,
    ConditioningError,
    ConvergenceError,
    ParameterError,
    TruncationWarning,
)
from dtnlab.galerkin import (
    DiskModeWorkspace,
    chebyshev_radial_grid,
    galerkin_dtn,
    lambda_matrix,
    potential_breakpoints,
)
from dtnlab.harmonics import HarmonicIndex
from dtnlab.potentials import (
    angular_potential,
    bump_profile,
    counterexample_potential,
    piecewise_constant_profile,
    radial_potential,
    ring_bump_profile,
    zero_profile,
)
from dtnlab.radial_solver import free_dtn_entry, radial_dtn_many


class TestRadialGrid:
    def test_nodes_and_orientation(self):
        r, d = chebyshev_radial_grid(48)
        assert r[0] == 1.0 and r[-1] == 0.0
        assert np.all(np.diff(r) < 0)

    def test_differentiates_polynomials(self):
        r, d = chebyshev_radial_grid(32)
        assert np.max(np.abs(d @ r ** 5 - 5 * r ** 4)) < 1e-10
        assert np.max(np.abs(d @ np.ones_like(r))) < 1e-11

    def test_too_few_points(self):
        with pytest.raises(ParameterError):
            chebyshev_radial_grid(4)


class TestFreeMap:
    @pytest.mark.parametrize("E", [6.6, 0.0, 10.9 + 0.4j])
    def test_diagonal_matches_free_entries(self, E):
        M = galerkin_dtn(zero_profile(), E, 12)
        diag = np.diag(M.values)
        for k, ix in enumerate(M.indices):
            want = free_dtn_entry(ix.j, 2, E)
            assert abs(diag[k] - want) <= 1e-9 * max(1.0, abs(want))

    def test_off_diagonal_exactly_zero(self):
        M = galerkin_dtn(zero_profile(), 6.6, 10)
        off = M.values - np.diag(np.diag(M.values))
        assert np.max(np.abs(off)) < 1e-14

    def test_workspace_free_derivative(self):
        ws = DiskModeWorkspace(6.6, 20)
        for j in (0, 1, 5, 13, 20):
            want = free_dtn_entry(j, 2, 6.6)
            got = ws.free_boundary_derivative(j)
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    def test_mode_range_enforced(self):
        ws = DiskModeWorkspace(6.6, 4)
        with pytest.raises(ParameterError):
            ws.free_boundary_solution(5)
        with pytest.raises(ParameterError):
            ws.boundary_mode_response(radial_potential(zero_profile()), 6)


class TestRadialConsistency:
    def test_bump_against_adaptive_solver(self):
        # the collocation and adaptive integrators are fully independent
        v = radial_potential(bump_profile(7 / 24, 1 / 24, 0.2))
        exact = np.diag(lambda_matrix(v, 6.6, 10).values)
        A = galerkin_dtn(v, 6.6, 10)
        B = galerkin_dtn(zero_profile(), 6.6, 10)
        diff = A.values - B.values
        assert np.max(np.abs(np.diag(diff) - exact)) < 5e-8
        assert np.max(np.abs(diff - np.diag(np.diag(diff)))) < 1e-12

    def test_piecewise_constant_against_adaptive_solver(self):
        v = radial_potential(piecewise_constant_profile([1.5, 0.0], [0.0, 1 / 3, 1.0]))
        exact = np.diag(lambda_matrix(v, 6.6, 8).values)
        A = galerkin_dtn(v, 6.6, 8)
        B = galerkin_dtn(zero_profile(), 6.6, 8)
        assert np.max(np.abs(np.diag(A.values - B.values) - exact)) < 1e-7

    def test_complex_energy(self):
        v = radial_potential(bump_profile(7 / 24, 1 / 24, 0.2))
        E = 10.9 + 0.4j
        exact = np.diag(lambda_matrix(v, E, 6).values)
        A = galerkin_dtn(v, E, 6)
        B = galerkin_dtn(zero_profile(), E, 6)
        assert np.max(np.abs(np.diag(A.values - B.values) - exact)) < 5e-8


class TestLambdaRadialPath:
    def test_zero_potential_is_zero_matrix(self):
        M = lambda_matrix(radial_potential(zero_profile()), 6.6, 8)
        assert np.all(M.values == 0)
        assert M.v_sup_norm == 0.0

    def test_diagonal_matches_solver_difference(self):
        prof = bump_profile(7 / 24, 1 / 24, 0.3)
        M = lambda_matrix(prof, 6.6, 10)
        js = np.arange(11)
        want = radial_dtn_many(prof, 6.6, js, 2) - np.array(
            [free_dtn_entry(int(j), 2, 6.6) for j in js]
        )
        for k, ix in enumerate(M.indices):
            assert M.values[k, k] == pytest.approx(want[ix.j], rel=1e-9, abs=1e-13)
        off = M.values - np.diag(np.diag(M.values))
        assert np.all(off == 0)

    def test_d3_multiplicity_blocks(self):
        prof = bump_profile(7 / 24, 1 / 24, 0.3)
        M = lambda_matrix(prof, 12.5, 4, d=3)
        assert M.size == 25  # sum of 2j+1
        js = np.arange(5)
        want = radial_dtn_many(prof, 12.5, js, 3) - np.array(
            [free_dtn_entry(int(j), 3, 12.5) for j in js]
        )
        for k, ix in enumerate(M.indices):
            assert M.values[k, k] == pytest.approx(want[ix.j], rel=1e-9, abs=1e-13)

    def test_radial_solver_tol_default(self):
        M = lambda_matrix(radial_potential(zero_profile()), 6.6, 2)
        assert M.solver_tol == 1e-10


class TestCounterexampleStructure:
    def test_vanishing_block_is_exact_zero(self):
        v = counterexample_potential(6, 2.0, 0.3)
        M = lambda_matrix(v, 6.6, 8)
        js = M.degrees
        blk = [
            abs(M.values[a, b])
            for a in range(M.size)
            for b in range(M.size)
            if js[a] <= 2 and js[b] <= 2
        ]
        assert max(blk) == 0.0
        assert np.max(np.abs(M.values)) > 0

    @pytest.mark.parametrize("n", [4, 5, 8])
    def test_entry_pattern(self, n):
        # real-basis entries survive only when i+j or |i-j| is a positive
        # multiple of the angular frequency
        v = counterexample_potential(n, 2.0, 0.3)
        M = lambda_matrix(v, 6.6, 8)
        js = M.degrees
        for a in range(M.size):
            for b in range(M.size):
                i, j = int(js[a]), int(js[b])
                on = any(
                    i + j == n * k or abs(i - j) == n * k
                    for k in range(1, (16 // n) + 2)
                )
                if not on:
                    assert M.values[a, b] == 0.0

    def test_first_level_matches_half_frequency(self):
        for n in (4, 6, 10):
            v = counterexample_potential(n, 2.0, 0.3)
            M = lambda_matrix(v, 6.6, 12)
            fit = decay_fit(M)
            assert fit.defined
            assert fit.levels[0] == math.ceil(n / 2)

    def test_reciprocity(self):
        v = counterexample_potential(6, 2.0, 0.3)
        M = lambda_matrix(v, 6.6, 8)
        assert M.symmetry_defect() <= 1e-9 * np.max(np.abs(M.values))

    def test_metadata(self):
        v = counterexample_potential(4, 2.0, 0.3)
        M = lambda_matrix(v, 6.6, 6, resolvent_factor=20.0)
        assert M.v_sup_norm == pytest.approx((0.3 / 3) * 4.0 ** -2.0)
        assert M.small_support
        assert M.resolvent_factor == 20.0
        assert M.solver_tol == 1e-8


class TestRealPotentialPath:
    def test_real_symmetric_matrix(self):
        g = ring_bump_profile(0.1)
        v = angular_potential({2: g, -2: g})
        assert v.is_real
        M = lambda_matrix(v, 6.6, 6)
        sup = np.max(np.abs(M.values))
        assert sup > 0
        assert np.max(np.abs(M.values.imag)) <= 1e-12 * sup
        assert M.symmetry_defect() <= 1e-12 * sup

    def test_picard_marks_info(self):
        g = ring_bump_profile(0.1)
        v = angular_potential({2: g, -2: g})
        ws = DiskModeWorkspace(6.6, 10, breakpoints=potential_breakpoints(v))
        lam, info = ws.boundary_mode_response(v, 4)
        assert info["method"] == "picard"
        assert info["iterations"] > 1
        assert info["residual"] <= 1e-12 * max(1.0, float(np.max(np.abs(lam))))

    def test_march_used_for_single_sign(self):
        v = counterexample_potential(4, 2.0, 0.3)
        ws = DiskModeWorkspace(6.6, 8, breakpoints=potential_breakpoints(v))
        lam, info = ws.boundary_mode_response(v, 8)
        assert info["method"] == "march"
        assert info["dropped_coupling_sup"] == 0.0

    def test_workspace_reuse_matches_fresh(self):
        vs = [counterexample_potential(n, 2.0, 0.3) for n in (4, 6)]
        ws = DiskModeWorkspace(6.6, 10, breakpoints=potential_breakpoints(vs[0]))
        for v in vs:
            shared = ws.boundary_mode_response(v, 10)[0]
            fresh = lambda_matrix(v, 6.6, 10)
            again = lambda_matrix(v, 6.6, 10, workspace=ws)
            assert np.array_equal(again.values, lambda_matrix(v, 6.6, 10, workspace=ws).values)
            assert np.max(np.abs(again.values - fresh.values)) <= 1e-12 * max(
                1e-300, np.max(np.abs(fresh.values))
            )
            assert shared.shape == (21, 21)


class TestFailureModes:
    def test_dirichlet_eigenvalue_raises(self):
        with pytest.raises(ConditioningError):
            ws = DiskModeWorkspace(5.783185962946785, 4)
            ws.free_boundary_derivative(0)

    def test_oversized_potential_diverges(self):
        g = ring_bump_profile(40.0)
        v = angular_potential({2: g, -2: g})
        with pytest.raises(ConvergenceError):
            lambda_matrix(v, 6.6, 4)

    def test_d3_angular_rejected(self):
        # the capability gate sits at construction: angular modes only exist
        # on the disk
        g = ring_bump_profile(0.1)
        with pytest.raises(CapabilityError):
            angular_potential({2: g, -2: g}, d=3)

    def test_d_mismatch_rejected(self):
        v = radial_potential(zero_profile(), d=3)
        with pytest.raises(ParameterError):
            lambda_matrix(v, 6.6, 4, d=2)

    def test_bad_j_max(self):
        with pytest.raises(ParameterError):
            lambda_matrix(radial_potential(zero_profile()), 6.6, -1)


class TestTruncationWarnings:
    def test_dropped_feedback_mass_warns(self):
        g = ring_bump_profile(0.5)
        v = angular_potential({2: g, -2: g})
        ws = DiskModeWorkspace(6.6, 4, breakpoints=potential_breakpoints(v))
        with pytest.warns(TruncationWarning, match="dropped past mode cutoff"):
            ws.boundary_mode_response(v, 4)

    def test_unaligned_breakpoints_warn(self):
        v = counterexample_potential(4, 2.0, 0.3)
        ws = DiskModeWorkspace(6.6, 6)  # no panel edges at the ring
        with pytest.warns(TruncationWarning, match="not panel edges"):
            ws.boundary_mode_response(v, 6)

    def test_aligned_breakpoints_silent(self):
        v = counterexample_potential(4, 2.0, 0.3)
        ws = DiskModeWorkspace(6.6, 6, breakpoints=potential_breakpoints(v))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            ws.boundary_mode_response(v, 6)


class TestHolomorphyProxy:
    def test_radial_entries_are_polynomial_in_energy(self):
        # entries of an analytic operator family over a spectral-gap
        # interval are captured by a low-degree polynomial to high accuracy;
        # [10.5, 11.5] keeps a gap of ~3.18 to the free spectrum, wide
        # enough for degree 10 (the [6.2, 7.0] gap of 0.4168 needs ~14)
        iset = EnergyIntervalSet(((10.5, 11.5),), 0.3, grid_points_per_interval=33)
        grid = iset.interval_grid(0)
        prof = bump_profile(7 / 24, 1 / 24, 0.3)
        js = np.arange(5)
        vals = np.array(
            [
                radial_dtn_many(prof, E, js, 2)
                - np.array([free_dtn_entry(int(j), 2, E) for j in js])
                for E in grid
            ]
        )
        t = (2 * grid - (10.5 + 11.5)) / 1.0
        for col in range(5):
            y = vals[:, col]
            scale = np.max(np.abs(y))
            fit = np.polyfit(t, y, 10)
            resid = np.max(np.abs(np.polyval(fit, t) - y))
            assert resid <= 1e-6 * scale

    def test_coupled_entry_is_polynomial_in_energy(self):
        iset = EnergyIntervalSet(((6.2, 7.0),), 0.3, grid_points_per_interval=17)
        grid = iset.interval_grid(0)
        v = counterexample_potential(4, 2.0, 0.3)
        row = HarmonicIndex(2, 1, 2)
        ys = []
        for E in grid:
            M = lambda_matrix(v, E, 4)
            ys.append(M.entry(row, row))
        y = np.array(ys)
        t = (2 * grid - (6.2 + 7.0)) / 0.8
        fit = np.polyfit(t, y, 10)
        resid = np.max(np.abs(np.polyval(fit, t) - y))
        assert resid <= 1e-6 * np.max(np.abs(y))
