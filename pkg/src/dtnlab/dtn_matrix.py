"""Containers and norms for boundary-response difference matrices.

A DtnMatrix holds the entries <A f_jp, f_iq> of a response difference at
one energy over the truncated harmonic basis, together with the potential
certificates (sup-norm bound, small-support flag, resolvent factor) that
turn raw magnitudes into decay statements.  EnergyCurveMatrix strings
samples over an interval-set grid.  The weighted operator norm uses the
exact singular value of D^s M D^s, D = diag(1+j), and is always compared
against the entrywise bound 4 sup (1+max(j,i))^(2s+d) |a|, which holds
for every matrix by a Schur row/column-sum test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import ComplexEnergy, EnergyIntervalSet
from .errors import ParameterError
from .harmonics import HarmonicIndex, basis_indices

_FIT_REL_FLOOR = 1e-8   # entries below max * this are solver noise
_FIT_ABS_FLOOR = 1e-11  # ... and below this absolutely


@dataclass(frozen=True)
class DtnMatrix:
    """Response-difference matrix at one energy in the real harmonic basis."""

    d: int
    j_max: int
    energy: ComplexEnergy
    indices: tuple
    values: np.ndarray
    v_sup_norm: float = 0.0
    small_support: bool = True
    resolvent_factor: float = 1.0
    solver_tol: float = 1e-8

    def __post_init__(self):
        idxs = tuple(self.indices)
        vals = np.asarray(self.values, dtype=complex)
        n = len(idxs)
        if vals.shape != (n, n):
            raise ParameterError(f"values shape {vals.shape} != ({n}, {n})")
        for ix in idxs:
            if not isinstance(ix, HarmonicIndex) or ix.d != self.d:
                raise ParameterError("indices must be HarmonicIndex values for d")
            if ix.j > self.j_max:
                raise ParameterError("index degree exceeds j_max")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idxs)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([ix.j for ix in self.indices])

    @property
    def degree_pair_max(self) -> np.ndarray:
        """max(j, i) over (row, column) index pairs."""
        js = self.degrees
        return np.maximum.outer(js, js)

    def entry(self, row: HarmonicIndex, col: HarmonicIndex) -> complex:
        i = self.indices.index(row)
        k = self.indices.index(col)
        return complex(self.values[i, k])

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.values - self.values.T)))

    def abs_entries(self) -> np.ndarray:
        return np.abs(self.values)


def full_index_list(j_max: int, d: int):
    return tuple(basis_indices(j_max, d))


@dataclass(frozen=True)
class EnergyCurveMatrix:
    """DtnMatrix samples over the grid of an interval set."""

    interval_set: EnergyIntervalSet
    samples: tuple

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise ParameterError("a curve needs at least one sample")
        d, j_max, n = samples[0].d, samples[0].j_max, samples[0].size
        for s in samples:
            if (s.d, s.j_max, s.size) != (d, j_max, n):
                raise ParameterError("all samples must share d, j_max and size")
        want = len(self.interval_set.intervals) * self.interval_set.grid_points_per_interval
        if len(samples) != want:
            raise ParameterError(
                f"{len(samples)} samples do not cover the {want}-point grid"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def d(self) -> int:
        return self.samples[0].d

    @property
    def j_max(self) -> int:
        return self.samples[0].j_max

    @property
    def indices(self):
        return self.samples[0].indices

    @property
    def v_sup_norm(self) -> float:
        return self.samples[0].v_sup_norm

    @property
    def resolvent_factor(self) -> float:
        return max(s.resolvent_factor for s in self.samples)

    @property
    def solver_tol(self) -> float:
        return max(s.solver_tol for s in self.samples)

    @property
    def degree_pair_max(self) -> np.ndarray:
        return self.samples[0].degree_pair_max

    def sup_abs(self) -> np.ndarray:
        """Entrywise sup_E |a(E)| over the grid."""
        out = self.samples[0].abs_entries()
        for s in self.samples[1:]:
            out = np.maximum(out, s.abs_entries())
        return out

    def energies(self):
        return [s.energy for s in self.samples]


def _weighted(M: DtnMatrix, s: float) -> np.ndarray:
    w = (1.0 + M.degrees) ** s
    return w[:, None] * M.values * w[None, :]


def hs_operator_norm(M: DtnMatrix, s: float):
    """(exact weighted operator norm, entrywise 4-sup bound).

    The norm is the top singular value of D^s M D^s with D = diag(1+j) —
    the truncated operator norm from the (1+j)^(-s)-weighted sequence
    space to its dual.  The bound never falls below it.
    """
    if s < 0:
        raise ParameterError("s must be >= 0")
    if M.size == 0:
        return 0.0, 0.0
    norm = float(np.linalg.norm(_weighted(M, s), ord=2))
    weights = (1.0 + M.degree_pair_max) ** (2.0 * s + M.d)
    bound = 4.0 * float(np.max(weights * np.abs(M.values)))
    return norm, bound


def xss_norm(curve, s: float) -> float:
    """sup over grid energies and entries of (1+max(j,i))^(2s+d) |a(E)|."""
    if s < 0:
        raise ParameterError("s must be >= 0")
    if isinstance(curve, DtnMatrix):
        sup = curve.abs_entries()
        d = curve.d
        pair = curve.degree_pair_max
    else:
        sup = curve.sup_abs()
        d = curve.d
        pair = curve.degree_pair_max
    return float(np.max((1.0 + pair) ** (2.0 * s + d) * sup))


def truncation_tail_bound(j_max: int, s: float, d: int, rho_hat: float) -> float:
    """4 sup_{l > j_max} (1+l)^(2s+d) rho_hat 2^(-l), the discarded-band bound."""
    if rho_hat < 0:
        raise ParameterError("rho_hat must be >= 0")
    ls = np.arange(j_max + 1, j_max + 400, dtype=float)
    logs = (2.0 * s + d) * np.log1p(ls) - ls * math.log(2.0)
    top = float(np.max(logs))
    if logs[-1] >= top - 1e-3:  # sup not yet attained in the window
        raise ParameterError("tail window too short; raise j_max")
    return 4.0 * rho_hat * math.exp(top)


@dataclass(frozen=True)
class DecayFit:
    """Fitted envelope |a| <= rho_hat 2^(-max(j,i)) * ||v|| * resolvent.

    ``defined`` is False for matrices with no entry above the noise floor;
    rho_hat and slope are then NaN.  Iterates as (rho_hat, slope).
    """

    rho_hat: float
    slope: float
    defined: bool
    levels: tuple
    level_maxima: tuple
    floor: float

    def __iter__(self):
        return iter((self.rho_hat, self.slope))


def _level_maxima(sup: np.ndarray, pair: np.ndarray):
    levels = np.unique(pair)
    return levels, np.array([np.max(sup[pair == l]) for l in levels])


def decay_fit(M) -> DecayFit:
    """Envelope constant and log2 level slope of a matrix or curve.

    Levels whose maximum sits below the noise floor (relative 1e-8 of the
    top entry plus 1e-11 absolute) are excluded from both the constant and
    the slope, so amplification by 2^l never turns solver noise into a
    fake envelope.
    """
    if isinstance(M, DtnMatrix):
        sup = M.abs_entries()
    else:
        sup = M.sup_abs()
    pair = M.degree_pair_max
    denom = max(M.v_sup_norm, 0.0) * max(M.resolvent_factor, 0.0)
    if denom == 0.0:
        denom = 1.0
    top = float(np.max(sup)) if sup.size else 0.0
    floor = _FIT_REL_FLOOR * top + _FIT_ABS_FLOOR
    levels, maxima = _level_maxima(sup, pair)
    keep = maxima > floor
    if top == 0.0 or not np.any(keep):
        return DecayFit(math.nan, math.nan, False, (), (), floor)
    lv, mx = levels[keep], maxima[keep]
    rho_hat = float(np.max(sup[sup > floor] * 2.0 ** pair[sup > floor].astype(float)))
    rho_hat /= denom
    if len(lv) >= 3:
        slope = float(np.polyfit(lv.astype(float), np.log2(mx), 1)[0])
    else:
        slope = math.nan
    return DecayFit(
        rho_hat, slope, True, tuple(int(l) for l in lv), tuple(map(float, mx)), floor
    )
