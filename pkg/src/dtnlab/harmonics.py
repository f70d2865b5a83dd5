"""Orthonormal spherical-harmonics bookkeeping and weighted coefficient norms.

On the circle (d = 2) the basis is explicit: 1/sqrt(2 pi), cos(j t)/sqrt(pi),
sin(j t)/sqrt(pi).  For d = 3 only the degree multiplicities are needed (the
lab restricts d = 3 to radial potentials, where every map is diagonal in the
degree with multiplicity p_j), so point evaluation is deliberately absent
there.  The real basis is what the public API speaks; the coupled solver
works in e^{i j t} modes, and the unitary conversion between the two lives
here so conventions stay in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ParameterError

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _binom(n: int, k: int) -> int:
    if n < 0:
        return 0
    return math.comb(n, k)


def harmonic_dim(j: int, d: int) -> int:
    """Dimension p_j of the degree-j spherical harmonics on S^(d-1)."""
    if j < 0:
        raise ParameterError("degree j must be >= 0")
    if d < 2:
        raise ParameterError("dimension d must be >= 2")
    return _binom(j + d - 1, d - 1) - _binom(j + d - 3, d - 1)


@dataclass(frozen=True, order=True)
class HarmonicIndex:
    """Degree j, multiplicity slot p in [1, p_j], ambient dimension d."""

    j: int
    p: int
    d: int = 2

    def __post_init__(self):
        if self.j < 0:
            raise ParameterError("degree j must be >= 0")
        pj = harmonic_dim(self.j, self.d)
        if not 1 <= self.p <= pj:
            raise ParameterError(
                f"slot p={self.p} outside [1, {pj}] at degree {self.j}, d={self.d}"
            )


def basis_indices(j_max: int, d: int = 2):
    """All HarmonicIndex values with j <= j_max, degree-major, slots ascending."""
    out = []
    for j in range(j_max + 1):
        for p in range(1, harmonic_dim(j, d) + 1):
            out.append(HarmonicIndex(j, p, d))
    return out


@dataclass(frozen=True)
class CoeffSeq:
    """Finitely supported coefficient sequence over the harmonic basis."""

    entries: dict
    j_max: int

    def __post_init__(self):
        for idx in self.entries:
            if not isinstance(idx, HarmonicIndex):
                raise ParameterError("entries must be keyed by HarmonicIndex")
            if idx.j > self.j_max:
                raise ParameterError(
                    f"index degree {idx.j} exceeds truncation j_max={self.j_max}"
                )

    def get(self, idx: HarmonicIndex) -> complex:
        return self.entries.get(idx, 0.0 + 0.0j)


def _angle_of(omega):
    w = np.asarray(omega)
    if w.ndim == 0:
        return float(w)
    if w.shape[-1] == 2:
        return np.arctan2(w[..., 1], w[..., 0])
    # already an array of angles
    return w


def basis_eval(idx: HarmonicIndex, omega):
    """Evaluate f_{j,p} at a point of S^(d-1).

    d = 2 only; omega is an angle (scalar or array) or a point (x, y).
    p = 1 is the cosine slot, p = 2 the sine slot.
    """
    if idx.d != 2:
        raise CapabilityError(
            "explicit harmonic evaluation is provided for d = 2 only; "
            "the d = 3 path is radial (diagonal in degree, multiplicity p_j)"
        )
    t = np.asarray(_angle_of(omega), dtype=float)
    if idx.j == 0:
        out = np.full(t.shape, 1.0 / _SQRT_2PI)
    elif idx.p == 1:
        out = np.cos(idx.j * t) / _SQRT_PI
    else:
        out = np.sin(idx.j * t) / _SQRT_PI
    return out[()] if out.ndim == 0 else out


def hs_norm(c: CoeffSeq, s: float) -> float:
    """Weighted norm (sum (1+j)^(2s) |c_jp|^2)^(1/2); s = 0 is plain l2."""
    if s < 0:
        raise ParameterError("s must be >= 0")
    acc = 0.0
    for idx, val in c.entries.items():
        acc += (1.0 + idx.j) ** (2.0 * s) * abs(val) ** 2
    return math.sqrt(acc)


# ---------------------------------------------------------------------------
# unitary map between the real basis and e^{i j t} modes (d = 2)
#
# With u(t) = sum_m N_m e^{i m t}:
#   <u, f_{0,1}> = sqrt(2 pi) N_0
#   <u, f_{j,1}> = sqrt(pi) (N_j + N_{-j})
#   <u, f_{j,2}> = i sqrt(pi) (N_j - N_{-j})
# and conversely f_{j,1} has N_{+-j} = 1/(2 sqrt(pi)),
# f_{j,2} has N_j = -i/(2 sqrt(pi)), N_{-j} = +i/(2 sqrt(pi)).


def real_index_to_fourier(idx: HarmonicIndex) -> dict:
    """Exponential-mode coefficients N_m of the real basis function f_{j,p}."""
    if idx.d != 2:
        raise CapabilityError("the exponential-mode map is a d = 2 construction")
    j = idx.j
    if j == 0:
        return {0: 1.0 / _SQRT_2PI + 0.0j}
    if idx.p == 1:
        a = 1.0 / (2.0 * _SQRT_PI)
        return {j: a + 0.0j, -j: a + 0.0j}
    b = 1.0 / (2.0 * _SQRT_PI)
    return {j: -1j * b, -j: 1j * b}


def fourier_to_real_coeffs(modes: dict, j_max: int) -> CoeffSeq:
    """Pair u = sum N_m e^{i m t} against the real basis: c_jp = <u, f_jp>.

    Modes with |m| > j_max are rejected so nothing silently drops.
    """
    for m in modes:
        if abs(m) > j_max:
            raise ParameterError(f"mode {m} exceeds truncation j_max={j_max}")
    entries = {}
    n0 = modes.get(0, 0.0)
    if n0 != 0.0:
        entries[HarmonicIndex(0, 1, 2)] = _SQRT_2PI * n0
    for j in range(1, j_max + 1):
        np_, nm = modes.get(j, 0.0), modes.get(-j, 0.0)
        if np_ == 0.0 and nm == 0.0:
            continue
        entries[HarmonicIndex(j, 1, 2)] = _SQRT_PI * (np_ + nm)
        entries[HarmonicIndex(j, 2, 2)] = 1j * _SQRT_PI * (np_ - nm)
    return CoeffSeq(entries, j_max)


def real_coeffs_to_fourier(c: CoeffSeq) -> dict:
    """Inverse of fourier_to_real_coeffs on sequences (d = 2)."""
    modes: dict = {}
    for idx, val in c.entries.items():
        if val == 0.0:
            continue
        for m, w in real_index_to_fourier(idx).items():
            modes[m] = modes.get(m, 0.0 + 0.0j) + val * w
    return modes
