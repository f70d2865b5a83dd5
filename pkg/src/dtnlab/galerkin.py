"""Coupled-mode solver for boundary response matrices on the unit disk.

Angular Fourier truncation turns ``-Delta + v - E`` into a stack of radial
operators coupled by the angular modes of v.  Radially we collocate on
Chebyshev panels split at the potential's profile breakpoints, glued with
value and first-derivative matching; splitting at the breakpoints is what
keeps the convergence root-exponential for compactly supported bump
factors (and restores spectral accuracy for piecewise-constant ones).
The free-operator factorizations depend only on the energy and the panel
layout, so they are shared across every potential evaluated at that
energy; that sharing is what makes family sweeps affordable.

A potential whose angular modes all have the same sign couples the mode
ladder strictly upward (or downward), so one ordered sweep solves the
coupled system exactly.  Anything else goes through fixed-point
iteration against the factorized free operators, which converges
whenever the potential is small against the distance from the Dirichlet
spectrum.

The difference with the zero-potential response is read off the
correction field alone, on the same discretization, so free-solver bias
never enters the difference and coupling-pattern zeros are exact zeros.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .dtn_matrix import DtnMatrix, full_index_list
from .energy import as_energy
from .errors import (
    CapabilityError,
    ConditioningError,
    ConvergenceError,
    ParameterError,
    TruncationWarning,
)
from .harmonics import basis_indices, real_index_to_fourier
from .potentials import Potential, RadialProfile, radial_potential
from .radial_solver import free_dtn_entry, radial_dtn_many

_DEFAULT_N_R = 128
_PICARD_TOL = 1e-12
_PICARD_MAX = 400
_LU_DIAG_FLOOR = 1e-13   # relative pivot collapse => singular mode operator
_DROPPED_WARN = 1e-6     # feedback mass lost past the mode cutoff, rel to result
_EDGE_TOL = 1e-12


@lru_cache(maxsize=64)
def _cheb_unit(n: int):
    """Chebyshev-Lobatto nodes (descending) and d/dx on [-1, 1]."""
    if n < 8:
        raise ParameterError("need at least 8 points per panel")
    deg = n - 1
    k = np.arange(n)
    x = np.cos(np.pi * k / deg)
    c = np.ones(n)
    c[0] = c[deg] = 2.0
    c *= (-1.0) ** k
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n))
    d -= np.diag(d.sum(axis=1))
    x.setflags(write=False)
    d.setflags(write=False)
    return x, d


@lru_cache(maxsize=8)
def chebyshev_radial_grid(n_r: int):
    """Single-panel collocation nodes on [0, 1] (boundary first) and d/dr."""
    x, d = _cheb_unit(n_r)
    r = 0.5 * (x + 1.0)
    dr = 2.0 * d
    r.setflags(write=False)
    dr.setflags(write=False)
    return r, dr


def _panel_sizes(edges, n_r: int, max_abs_mode: int):
    """Point budget per panel, outermost panel first.

    ``edges`` ascending from 0 to 1.  Interior panels get the lion's share
    (they exist because a profile factor lives there); any panel on which
    r^j is not negligible for the largest mode j gets enough points to
    carry that polynomial exactly.
    """
    m = len(edges) - 1
    if m == 1:
        return [n_r]
    mid = max(1, m - 2)
    mid_n = int(max(48, min(168, (3 * n_r) // 4, int(np.ceil(1.5 * n_r / mid)))))
    sizes = []
    for i in range(m - 1, -1, -1):          # outermost first
        hi = edges[i + 1]
        if hi >= 1.0 or hi ** max(max_abs_mode, 1) > 1e-13:
            poly_need = max_abs_mode + 12
        else:
            poly_need = 0
        if i == m - 1:
            base = 44
        elif i == 0:
            base = 40
        else:
            base = mid_n
        sizes.append(max(base, poly_need))
    return sizes


class DiskModeWorkspace:
    """Factorized free mode operators at one energy, d = 2.

    Holds, lazily, the LU factors of the panelled collocation operator for
    each angular mode magnitude up to ``max_abs_mode``, plus the free
    solutions with unit boundary data.  ``breakpoints`` should contain the
    profile breakpoints of every potential the workspace will see; build
    one workspace per energy and reuse it for the whole family sweep.
    """

    def __init__(self, energy, max_abs_mode: int, n_r: int = _DEFAULT_N_R,
                 breakpoints=()):
        if max_abs_mode < 0:
            raise ParameterError("max_abs_mode must be >= 0")
        self.energy = as_energy(energy)
        self.max_abs_mode = int(max_abs_mode)
        self.n_r = int(n_r)
        bps = sorted({float(b) for b in breakpoints})
        for b in bps:
            if not 0.0 < b < 1.0:
                raise ParameterError("breakpoints must lie strictly inside (0, 1)")
        self.breakpoints = tuple(bps)
        edges = [0.0] + bps + [1.0]
        sizes = _panel_sizes(edges, self.n_r, self.max_abs_mode)

        # panels ordered from r = 1 inward, nodes descending inside each
        panels = []
        start = 0
        for i, n_p in zip(range(len(edges) - 2, -1, -1), sizes):
            lo, hi = edges[i], edges[i + 1]
            x, d = _cheb_unit(n_p)
            rp = lo + 0.5 * (x + 1.0) * (hi - lo)
            dp = d * (2.0 / (hi - lo))
            panels.append((slice(start, start + n_p), rp, dp))
            start += n_p
        self.panels = panels
        self.size = start
        self.r = np.concatenate([rp for _, rp, _ in panels])
        self.r.setflags(write=False)

        n = self.size
        rr = self.r * self.r
        e_val = self.energy.E
        base = np.zeros((n, n), dtype=complex)
        interior = []
        for sl, rp, dp in panels:
            d2 = dp @ dp
            loc = np.arange(1, len(rp) - 1)
            gi = sl.start + loc
            base[gi, sl] = -(rr[gi, None] * d2[loc]) - self.r[gi, None] * dp[loc]
            base[gi, gi] += -e_val * rr[gi]
            interior.extend(gi.tolist())
        base[0, :] = 0.0
        base[0, 0] = 1.0                      # Dirichlet value at r = 1
        constraint = [0]
        for p in range(len(panels) - 1):
            sl_a, rp_a, dp_a = panels[p]
            sl_b, rp_b, dp_b = panels[p + 1]
            end = sl_a.stop - 1               # shared radius, value from outside
            first = sl_b.start                # same radius, value from inside
            base[end, :] = 0.0
            base[end, end] = 1.0
            base[end, first] = -1.0
            base[first, :] = 0.0
            base[first, sl_a] = dp_a[-1, :]
            base[first, sl_b] -= dp_b[0, :]
            constraint.extend([end, first])
        constraint.append(n - 1)              # regularity row, filled per mode
        self._base = base
        self._rr = rr
        self._interior = np.array(interior)
        self._constraint = np.array(sorted(constraint))
        self._readout = np.zeros(n)
        sl0, _, dp0 = panels[0]
        self._readout[sl0] = dp0[0, :]        # d/dr at r = 1
        self._lus = {}
        self._free = {}

    def _lu(self, abs_mode: int):
        j = int(abs_mode)
        hit = self._lus.get(j)
        if hit is not None:
            return hit
        a = self._base.copy()
        idx = self._interior
        a[idx, idx] += float(j) * float(j)
        last = self.size - 1
        a[last, :] = 0.0
        if j == 0:
            sl, _, dp = self.panels[-1]
            a[last, sl] = dp[-1, :]           # u'(0) = 0
        else:
            a[last, last] = 1.0               # u(0) = 0
        rown = np.max(np.abs(a), axis=1)
        a /= rown[:, None]
        lu, piv = sla.lu_factor(a)
        ud = np.abs(np.diag(lu))
        if ud.min() <= _LU_DIAG_FLOOR * ud.max():
            raise ConditioningError(
                f"mode {j} operator is numerically singular at E={self.energy.E} "
                "(Dirichlet eigenvalue hit)",
                detail={"mode": j, "E": self.energy.E},
            )
        entry = (lu, piv, rown)
        self._lus[j] = entry
        return entry

    def _solve(self, abs_mode: int, b: np.ndarray) -> np.ndarray:
        lu, piv, rown = self._lu(abs_mode)
        return sla.lu_solve((lu, piv), b / (rown[:, None] if b.ndim == 2 else rown))

    def free_boundary_solution(self, abs_mode: int) -> np.ndarray:
        """Grid values of the solution with zero potential and boundary value 1."""
        j = int(abs_mode)
        if not 0 <= j <= self.max_abs_mode:
            raise ParameterError(f"mode {j} outside workspace range")
        hit = self._free.get(j)
        if hit is None:
            b = np.zeros(self.size, dtype=complex)
            b[0] = 1.0
            hit = self._solve(j, b)
            hit.setflags(write=False)
            self._free[j] = hit
        return hit

    def free_boundary_derivative(self, abs_mode: int) -> complex:
        return complex(self._readout @ self.free_boundary_solution(abs_mode))

    def _check_alignment(self, v: Potential):
        mine = np.array(self.breakpoints) if self.breakpoints else np.empty(0)
        loose = []
        for prof in v.modes.values():
            for b in prof.breakpoints:
                if mine.size == 0 or np.min(np.abs(mine - b)) > _EDGE_TOL:
                    loose.append(b)
        if loose:
            warnings.warn(
                "potential breakpoints {} are not panel edges of this workspace; "
                "accuracy degrades to single-panel rates there".format(sorted(set(loose))),
                TruncationWarning,
                stacklevel=3,
            )

    def boundary_mode_response(
        self,
        v: Potential,
        j_max: int,
        picard_tol: float = _PICARD_TOL,
        max_iterations: int = _PICARD_MAX,
    ):
        """Response difference of v against 0 in the exponential mode basis.

        Returns ``(lam, info)`` where ``lam[i + j_max, m + j_max]`` is the
        boundary-derivative coefficient of mode i for boundary data
        ``e^{i m theta}``, for |i|, |m| <= j_max, and ``info`` records the
        solve method, iteration count and truncation diagnostics.  Rows a
        coupling chain cannot reach are exact zeros.
        """
        if not isinstance(v, Potential):
            raise ParameterError("v must be a Potential")
        if v.d != 2:
            raise CapabilityError("mode-coupled solves are only wired for d = 2")
        if j_max < 0:
            raise ParameterError("j_max must be >= 0")
        vmodes = sorted(v.modes)
        cap = self.max_abs_mode
        if j_max > cap:
            raise ParameterError(f"j_max={j_max} exceeds workspace mode range {cap}")

        n_cols = 2 * j_max + 1
        if not vmodes:
            lam = np.zeros((n_cols, n_cols), dtype=complex)
            info = {"method": "free", "iterations": 0, "mode_cutoff": cap,
                    "leak_sup": 0.0, "dropped_coupling_sup": 0.0, "residual": 0.0}
            return lam, info
        self._check_alignment(v)
        march = all(n > 0 for n in vmodes) or all(n < 0 for n in vmodes)

        n_rows = 2 * cap + 1
        gv = {n: np.asarray(prof(self.r), dtype=complex) for n, prof in v.modes.items()}

        # free field: column for input mode m holds the free solution in row m
        free_field = np.zeros((n_rows, self.size, n_cols), dtype=complex)
        for m in range(-j_max, j_max + 1):
            free_field[m + cap, :, m + j_max] = self.free_boundary_solution(abs(m))

        if march:
            w, info = self._march(gv, free_field)
        else:
            w, info = self._picard(gv, free_field, picard_tol, max_iterations)
        info["mode_cutoff"] = cap

        lam_full = np.einsum("k,jkc->jc", self._readout, w)
        keep = slice(cap - j_max, cap + j_max + 1)
        lam = lam_full[keep].copy()
        outside = np.abs(lam_full)
        outside[keep] = 0.0
        info["leak_sup"] = float(outside.max()) if outside.size else 0.0
        inside = float(np.max(np.abs(lam))) if lam.size else 0.0
        if (
            info["method"] == "picard"
            and info["dropped_coupling_sup"] > _DROPPED_WARN * max(inside, 1e-300)
        ):
            warnings.warn(
                "coupling mass {:.3e} was dropped past mode cutoff {} "
                "(result scale {:.3e}); enlarge the workspace mode range".format(
                    info["dropped_coupling_sup"], cap, inside
                ),
                TruncationWarning,
                stacklevel=2,
            )
        return lam, info

    def _rhs(self, coupled_rows: np.ndarray) -> np.ndarray:
        b = -(self._rr[:, None] * coupled_rows)
        b[self._constraint] = 0.0
        return b

    def _march(self, gv, free_field):
        """Exact single-sweep solve for single-signed mode coupling."""
        n_rows = free_field.shape[0]
        cap = self.max_abs_mode
        upward = all(n > 0 for n in gv)
        order = range(n_rows) if upward else range(n_rows - 1, -1, -1)
        psi = free_field.copy()
        w = np.zeros_like(free_field)
        solved = 0
        for t in order:
            coupled = None
            for n, g in gv.items():
                s = t - n
                if 0 <= s < n_rows and np.any(psi[s]):
                    term = g[:, None] * psi[s]
                    coupled = term if coupled is None else coupled + term
            if coupled is None:
                continue
            wt = self._solve(abs(t - cap), self._rhs(coupled))
            w[t] = wt
            psi[t] += wt
            solved += 1
        return w, {"method": "march", "iterations": solved,
                   "dropped_coupling_sup": 0.0, "residual": 0.0}

    def _picard(self, gv, free_field, tol, max_iterations):
        n_rows = free_field.shape[0]
        cap = self.max_abs_mode
        w = np.zeros_like(free_field)
        delta_prev = np.inf
        dropped = 0.0
        for it in range(1, max_iterations + 1):
            psi = free_field + w
            coupled = np.zeros_like(psi)
            dropped = 0.0
            for n, g in gv.items():
                if n >= 0:
                    if n > 0:
                        lost = psi[n_rows - n:]
                        if np.any(lost):
                            dropped = max(dropped, float(np.max(np.abs(g)) * np.max(np.abs(lost))))
                    coupled[n:] += g[None, :, None] * psi[: n_rows - n]
                else:
                    lost = psi[: -n]
                    if np.any(lost):
                        dropped = max(dropped, float(np.max(np.abs(g)) * np.max(np.abs(lost))))
                    coupled[:n] += g[None, :, None] * psi[-n:]
            w_new = np.zeros_like(w)
            active = np.where(np.any(coupled.reshape(n_rows, -1), axis=1))[0]
            for t in active:
                w_new[t] = self._solve(abs(int(t) - cap), self._rhs(coupled[t]))
            delta = float(np.max(np.abs(w_new - w)))
            w = w_new
            scale = max(1.0, float(np.max(np.abs(w))))
            if delta <= tol * scale:
                return w, {"method": "picard", "iterations": it,
                           "dropped_coupling_sup": dropped, "residual": delta}
            if it > 8 and delta > delta_prev:
                raise ConvergenceError(
                    "mode-coupling iteration is diverging "
                    f"(update {delta:.3e} after {it} sweeps); the potential is "
                    "too large for the spectral gap at this energy"
                )
            delta_prev = delta
        raise ConvergenceError(
            f"mode-coupling iteration did not settle in {max_iterations} sweeps "
            f"(last update {delta_prev:.3e})"
        )


@lru_cache(maxsize=32)
def _fourier_column_map(j_max: int):
    """Columns = real boundary basis elements as exponential-mode vectors."""
    idx = basis_indices(j_max, 2)
    u = np.zeros((2 * j_max + 1, len(idx)), dtype=complex)
    for c, hi in enumerate(idx):
        for m, wgt in real_index_to_fourier(hi).items():
            u[m + j_max, c] = wgt
    u.setflags(write=False)
    return idx, u


def _real_from_modes(lam_exp: np.ndarray, j_max: int) -> np.ndarray:
    # <out, f_iq> pairs the output modes against conj coefficients; columns
    # expand the inputs.  Exact zeros in lam_exp stay exact: they only ever
    # multiply into sums of other exact zeros.
    _, u = _fourier_column_map(j_max)
    return 2.0 * np.pi * (u.conj().T @ lam_exp @ u)


def potential_breakpoints(v: Potential):
    """Union of profile breakpoints over the angular modes of v."""
    out = set()
    for prof in v.modes.values():
        out.update(prof.breakpoints)
    return tuple(sorted(out))


def _as_potential(v, d: int) -> Potential:
    if isinstance(v, Potential):
        if v.d != d:
            raise ParameterError(f"potential was built for d={v.d}, not d={d}")
        return v
    if isinstance(v, RadialProfile):
        return radial_potential(v, d)
    raise ParameterError("v must be a Potential or a RadialProfile")


def _auto_workspace(v: Potential, ce, j_max, n_r, mode_margin) -> DiskModeWorkspace:
    vmodes = sorted(v.modes)
    march = bool(vmodes) and (all(n > 0 for n in vmodes) or all(n < 0 for n in vmodes))
    if march or not vmodes:
        cap = j_max
    else:
        span = v.n_max
        margin = max(2, span) if mode_margin is None else int(mode_margin)
        cap = j_max + span + margin
    return DiskModeWorkspace(ce, cap, n_r=n_r, breakpoints=potential_breakpoints(v))


def galerkin_dtn(
    v,
    energy,
    j_max: int,
    n_r: int = _DEFAULT_N_R,
    mode_margin=None,
    workspace: DiskModeWorkspace | None = None,
    solver_tol: float = 1e-8,
) -> DtnMatrix:
    """Full boundary response matrix of -Delta + v at one energy, d = 2.

    Real harmonic basis up to degree j_max.  ``mode_margin`` widens the
    solver's mode range beyond ``j_max + n_max`` when the coupling has
    feedback (mixed-sign angular modes); single-signed coupling is exact
    without any margin.
    """
    v = _as_potential(v, 2)
    ce = as_energy(energy)
    if workspace is None:
        workspace = _auto_workspace(v, ce, j_max, n_r, mode_margin)
    lam_exp, _ = workspace.boundary_mode_response(v, j_max)
    indices, u = _fourier_column_map(j_max)
    phi0 = np.array(
        [workspace.free_boundary_derivative(abs(m)) for m in range(-j_max, j_max + 1)]
    )
    phi_real = 2.0 * np.pi * (u.conj().T @ (phi0[:, None] * u)) + _real_from_modes(lam_exp, j_max)
    return DtnMatrix(
        d=2,
        j_max=j_max,
        energy=ce,
        indices=indices,
        values=phi_real,
        v_sup_norm=v.sup_norm,
        small_support=v.small_support_ok,
        solver_tol=solver_tol,
    )


def lambda_matrix(
    v,
    energy,
    j_max: int,
    d: int = 2,
    n_r: int = _DEFAULT_N_R,
    mode_margin=None,
    workspace: DiskModeWorkspace | None = None,
    resolvent_factor: float = 1.0,
    solver_tol=None,
) -> DtnMatrix:
    """Response difference against the zero potential, real harmonic basis.

    Radial potentials (any d >= 2) go through the adaptive radial solver
    and give a diagonal matrix; genuinely angular potentials take the
    mode-coupled path, which is d = 2 only.  Either way the free part is
    removed in a form where discretization bias cancels instead of by
    subtracting two independently computed maps.
    """
    v = _as_potential(v, d)
    ce = as_energy(energy)
    if j_max < 0:
        raise ParameterError("j_max must be >= 0")
    indices = full_index_list(j_max, d)

    if v.is_radial:
        degrees = np.arange(j_max + 1)
        if v.is_zero:
            diff = np.zeros(j_max + 1, dtype=complex)
        else:
            phi = radial_dtn_many(v.radial_profile(), ce, degrees, d)
            diff = phi - np.array([free_dtn_entry(int(j), d, ce) for j in degrees])
        values = np.diag(np.array([diff[ix.j] for ix in indices]))
        tol = 1e-10 if solver_tol is None else solver_tol
        return DtnMatrix(
            d=d, j_max=j_max, energy=ce, indices=indices, values=values,
            v_sup_norm=v.sup_norm, small_support=v.small_support_ok,
            resolvent_factor=resolvent_factor, solver_tol=tol,
        )

    if d != 2:
        raise CapabilityError("angular potentials need the d = 2 mode-coupled path")
    if workspace is None:
        workspace = _auto_workspace(v, ce, j_max, n_r, mode_margin)
    lam_exp, _ = workspace.boundary_mode_response(v, j_max)
    values = _real_from_modes(lam_exp, j_max)
    tol = 1e-8 if solver_tol is None else solver_tol
    return DtnMatrix(
        d=2, j_max=j_max, energy=ce, indices=indices, values=values,
        v_sup_norm=v.sup_norm, small_support=v.small_support_ok,
        resolvent_factor=resolvent_factor, solver_tol=tol,
    )
