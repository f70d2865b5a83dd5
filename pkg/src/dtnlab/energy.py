"""Energies, the free Dirichlet spectrum, and interval regularity.

The free eigenvalues on the unit ball are squares of positive zeros of
J_(j+(d-2)/2), each carrying the degree multiplicity.  An interval is
usable for boundary-response sweeps when it keeps distance sigma from
that spectrum: distance > sigma is sufficient for any real potential
with sup-norm below sigma (self-adjoint perturbation moves eigenvalues
by at most the sup-norm), while distance >= sigma is merely necessary
in general, so the checker distinguishes `certified`, `necessary-only`
and `violated` and always reports the nearest eigenvalue as witness.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RegularityError
from .harmonics import harmonic_dim
from .special_functions import Order, bessel_j_zeros

_BOUNDARY_TOL = 1e-12  # |dist - sigma| below this is treated as the boundary case


@dataclass(frozen=True)
class ComplexEnergy:
    """Energy E together with k = sqrt(E) on the branch Im k >= 0."""

    E: complex
    k: complex = None  # type: ignore[assignment]

    def __post_init__(self):
        e = complex(self.E)
        k = self.k
        if k is None:
            k = cmath.sqrt(e)
            if k.imag < 0:
                k = -k
        else:
            k = complex(k)
            if abs(k * k - e) > 1e-12 * max(1.0, abs(e)):
                raise ParameterError("provided k does not square to E")
            if k.imag < 0 or (k.imag == 0 and k.real < 0):
                raise ParameterError(
                    "k must lie on the branch Im k >= 0 (Re k >= 0 on the real axis)"
                )
        object.__setattr__(self, "E", e)
        object.__setattr__(self, "k", k)

    @property
    def is_zero(self) -> bool:
        return self.E == 0


def as_energy(value) -> ComplexEnergy:
    if isinstance(value, ComplexEnergy):
        return value
    return ComplexEnergy(complex(value))


@dataclass(frozen=True)
class EnergyIntervalSet:
    """Disjoint real intervals with a regularity margin and per-interval grids.

    Grids are Chebyshev-Lobatto (endpoints included); `refined()` doubles
    the resolution with nested nodes so sup-refinement differences are
    directly comparable.
    """

    intervals: tuple
    sigma: float
    grid_points_per_interval: int = 33

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise ParameterError("at least one interval is required")
        for a, b in ivs:
            if not a <= b:
                raise ParameterError(f"interval [{a}, {b}] is reversed")
        if not self.sigma > 0:
            raise ParameterError("sigma must be > 0")
        if self.grid_points_per_interval < 2:
            raise ParameterError("need at least 2 grid points per interval")
        object.__setattr__(self, "intervals", ivs)

    def interval_grid(self, i: int) -> np.ndarray:
        a, b = self.intervals[i]
        K = self.grid_points_per_interval
        nodes = np.cos(np.pi * np.arange(K - 1, -1, -1) / (K - 1))
        return 0.5 * (a + b) + 0.5 * (b - a) * nodes

    def grids(self):
        return [self.interval_grid(i) for i in range(len(self.intervals))]

    def energies(self):
        return [ComplexEnergy(complex(E)) for g in self.grids() for E in g]

    def refined(self) -> "EnergyIntervalSet":
        return EnergyIntervalSet(
            self.intervals, self.sigma, 2 * self.grid_points_per_interval - 1
        )


def dirichlet_spectrum(d: int, j_max: int, E_max: float):
    """Free Dirichlet eigenvalues below E_max on the unit ball.

    Returns (eigenvalue, degree j, multiplicity p_j) sorted by eigenvalue.
    Degrees stop early once the first zero passes sqrt(E_max) (zeros of
    J_a start above sqrt(a(a+2))), so large j_max costs nothing.
    """
    if E_max <= 0:
        return []
    if d < 2:
        raise ParameterError("dimension d must be >= 2")
    kmax = math.sqrt(E_max)
    out = []
    for j in range(j_max + 1):
        a = j + 0.5 * (d - 2)
        if a > 0 and math.sqrt(a * (a + 2.0)) > kmax:
            break
        zs = bessel_j_zeros(Order.from_degree(j, d), count=10**6, x_max=kmax)
        mult = harmonic_dim(j, d)
        for z in zs:
            lam = z * z
            if lam < E_max:
                out.append((float(lam), j, mult))
    out.sort()
    return out


def spectrum_distance(E, d: int, *, spectrum=None) -> float:
    """Distance from E (complex allowed) to the free Dirichlet spectrum."""
    e = as_energy(E).E
    if spectrum is None:
        e_max = max(4.0 * abs(e) + 10.0, 40.0)
        spectrum = dirichlet_spectrum(d, j_max=int(math.sqrt(e_max)) + 3, E_max=e_max)
    if not spectrum:
        raise ParameterError("empty spectrum window")
    return min(abs(e - lam) for lam, _, _ in spectrum)


@dataclass(frozen=True)
class RegularityReport:
    """Verdict of the sigma-distance check with the closest eigenvalue."""

    verdict: str  # certified | necessary-only | violated
    distance: float
    witness: tuple  # (eigenvalue, degree, multiplicity)
    sigma: float
    interval: tuple

    @property
    def ok(self) -> bool:
        return self.verdict != "violated"


def sigma_regular_check(
    interval, sigma: float, d: int, *, real_potential: bool = True
) -> RegularityReport:
    """Classify one interval against the free spectrum at margin sigma.

    Distance > sigma is sufficient for real potentials (sup-norm below
    sigma) and thus `certified`; for complex potentials only the necessary
    direction is decidable, so a passing check reports `necessary-only`.
    Distance within 1e-12 of sigma is always the boundary case.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a <= b:
        raise ParameterError(f"interval [{a}, {b}] is reversed")
    if not sigma > 0:
        raise ParameterError("sigma must be > 0")
    e_max = b + 2.0 * sigma + 10.0
    spec = dirichlet_spectrum(d, j_max=int(math.sqrt(e_max)) + 3, E_max=e_max)
    best = None
    best_dist = math.inf
    for lam, j, mult in spec:
        dist = max(a - lam, lam - b, 0.0)
        if dist < best_dist:
            best_dist = dist
            best = (lam, j, mult)
    if best is None:
        raise ParameterError("no eigenvalue found in the search window")
    if abs(best_dist - sigma) <= _BOUNDARY_TOL:
        verdict = "necessary-only"
    elif best_dist < sigma:
        verdict = "violated"
    elif real_potential:
        verdict = "certified"
    else:
        verdict = "necessary-only"
    return RegularityReport(verdict, best_dist, best, sigma, (a, b))


def check_interval_set(S: EnergyIntervalSet, d: int, *, real_potential: bool = True):
    """Per-interval regularity reports for a whole interval set."""
    return [
        sigma_regular_check(iv, S.sigma, d, real_potential=real_potential)
        for iv in S.intervals
    ]


def resolvent_bound(sigma: float, v_sup: float, E, d: int = 2, *, dist: float = None) -> float:
    """Bound (dist(E, spectrum) - v_sup)^(-1) on the perturbed resolvent.

    Preconditions: v_sup <= 2 sigma / 3 and dist >= 5 sigma / 6, under
    which the returned value never exceeds 6 / sigma.
    """
    if not sigma > 0:
        raise ParameterError("sigma must be > 0")
    if v_sup < 0:
        raise ParameterError("v_sup must be >= 0")
    if v_sup > 2.0 * sigma / 3.0 + _BOUNDARY_TOL:
        raise ParameterError(
            f"v_sup={v_sup} exceeds the admissible 2*sigma/3={2 * sigma / 3}"
        )
    if dist is None:
        dist = spectrum_distance(E, d)
    if dist < 5.0 * sigma / 6.0 - _BOUNDARY_TOL:
        raise RegularityError(
            f"dist(E, spectrum)={dist} below the required 5*sigma/6={5 * sigma / 6}",
            witness={"distance": dist, "required": 5.0 * sigma / 6.0},
        )
    denom = dist - v_sup
    if denom <= 0:
        raise RegularityError(
            f"nonpositive resolvent denominator dist - v_sup = {denom}",
            witness={"distance": dist, "v_sup": v_sup},
        )
    return 1.0 / denom
