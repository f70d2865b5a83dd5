"""Constructive metric-entropy objects: packed sign families and coefficient nets.

Two constructions live here.  The first packs sign-patterned mollifier bumps
into the cube [-1/6, 1/6]^d (inside the small-support ball), producing a family
of potentials that is eps-separated in sup norm while staying inside a C^m
ball; its cardinality 2^(N^d) is what drives the entropy lower bound.  The
second discretizes boundary-value data: any function analytic and bounded on a
Bernstein ellipse around an interval is approximated within delta by a
truncated Chebyshev expansion whose coefficients are snapped to a finite grid,
giving a delta-net with an explicitly computable cardinality.  Composing the
per-entry nets over a decaying matrix family yields the image-side net size
that the instability verdicts compare against.

Both constructions are certificates, not optimizers: the nets carry the
constants the estimates prove, and no attempt is made to shrink them.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import sympy

from .energy import EnergyIntervalSet
from .errors import CapabilityError, ParameterError, PreconditionWarning, TruncationWarning
from .harmonics import harmonic_dim
from .potentials import Potential, RadialProfile, angular_potential

__all__ = [
    "EpsDiscreteFamily",
    "HoloNet",
    "ImageNetReport",
    "build_eps_family",
    "build_holo_net",
    "bump_shape_cm_norm",
    "dtn_image_net_size",
    "ellipse_gamma",
    "family_log_cardinality",
    "project_to_net",
]

_SIX = 6.0  # unit-cell bumps live on cubes of side 1/3: argument scale 6 per axis
_MAX_CELLS = 4_000_000
_MAX_ENUMERATION = 1_000_000


# ---------------------------------------------------------------------------
# 1-d mollifier shape and its derivative sups


def _phi1(t):
    """exp(1 - 1/(1-t^2)) on (-1, 1), 0 outside; peak value exactly 1 at 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    m = np.abs(t) < 1.0
    tm = t[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - tm * tm))
    return out[()]


_PHI1_DERIV_SUP: dict = {}


def _phi1_derivative_sup(order: int) -> float:
    """sup |d^k/dt^k phi1| by symbolic differentiation + dense sampling."""
    if order in _PHI1_DERIV_SUP:
        return _PHI1_DERIV_SUP[order]
    t = sympy.symbols("t")
    expr = sympy.exp(1 - 1 / (1 - t**2))
    deriv = sympy.diff(expr, t, order)
    fn = sympy.lambdify(t, deriv, "numpy")
    # derivative maxima sit well inside the support; the endpoint limits are 0
    u = np.linspace(-1.0 + 1e-6, 1.0 - 1e-6, 20001)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        vals = np.asarray(fn(u), dtype=float)
    sup = float(np.nanmax(np.abs(vals)))
    if not math.isfinite(sup):
        raise ParameterError(f"derivative order {order} overflowed the sampler")
    _PHI1_DERIV_SUP[order] = sup
    return sup


def bump_shape_cm_norm(order: int, d: int) -> float:
    """max over |J| <= order of sup |d^J Phi| for the tensor unit-cell bump.

    Phi(y) = prod_i phi1(6 y_i) lives on the side-1/3 cube; the tensor form
    makes every mixed sup an exact product of 1-d sups, so only 1-d sampling
    is ever needed.
    """
    if order < 0 or d < 1:
        raise ParameterError("need order >= 0 and d >= 1")
    best = 0.0
    for combo in itertools.product(range(order + 1), repeat=d):
        if sum(combo) > order:
            continue
        val = 1.0
        for k in combo:
            val *= _SIX**k * _phi1_derivative_sup(k)
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# eps-separated sign family


@dataclass(frozen=True)
class EpsDiscreteFamily:
    """Sign-patterned bump family: eps-separated in sup norm, C^m-bounded.

    Each member is eps * sum_cells s_cell * Phi(N (x - x_cell)) with the cells
    tiling [-1/6, 1/6]^d (N per axis) and Phi the tensor mollifier inscribed
    in one cell, so distinct patterns touch disjoint supports.  Patterns are
    generated lazily from 64-bit seeds; the family never materializes its
    2^(N^d) members.
    """

    d: int
    m: float
    eps: float
    beta: float
    cells_per_axis: int
    bump_cm_norm: float
    pattern_count: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def mu(self) -> float:
        return 1.0 / (2.0 * self.bump_cm_norm)

    @property
    def cell_count(self) -> int:
        return self.cells_per_axis**self.d

    @property
    def cell_width(self) -> float:
        return 1.0 / (3.0 * self.cells_per_axis)

    @property
    def support_radius(self) -> float:
        # outermost bump corner: |x|_inf < 1/6, so |x|_2 < sqrt(d)/6
        return math.sqrt(self.d) / 6.0

    @property
    def cm_bound(self) -> float:
        """Certified C^m budget of any member: eps * N^m * bump_cm_norm."""
        return self.eps * self.cells_per_axis**self.m * self.bump_cm_norm

    def descriptor(self) -> dict:
        return {
            "construction": "eps_discrete_family",
            "d": self.d,
            "m": self.m,
            "eps": self.eps,
            "beta": self.beta,
            "cells_per_axis": self.cells_per_axis,
            "bump_cm_norm": self.bump_cm_norm,
            "pattern_count": self.pattern_count,
        }

    # -- patterns ----------------------------------------------------------

    def pattern_from_seed(self, seed: int) -> np.ndarray:
        if not 0 <= int(seed) < 2**64:
            raise ParameterError("pattern seeds are 64-bit unsigned integers")
        rng = np.random.default_rng(np.uint64(seed))
        return (2 * rng.integers(0, 2, size=self.cell_count) - 1).astype(np.int8)

    def _check_pattern(self, pattern) -> np.ndarray:
        pat = np.asarray(pattern)
        if pat.shape != (self.cell_count,):
            raise ParameterError(
                f"pattern must have one sign per cell ({self.cell_count})"
            )
        if not np.all(np.abs(pat.astype(float)) == 1.0):
            raise ParameterError("pattern entries must be +1 or -1")
        return pat.astype(np.int8)

    def cell_centers(self) -> np.ndarray:
        n = self.cells_per_axis
        axis = -1.0 / 6.0 + (np.arange(n) + 0.5) / (3.0 * n)
        grids = np.meshgrid(*([axis] * self.d), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    # -- members -----------------------------------------------------------

    def member_values(self, pattern, points) -> np.ndarray:
        """Evaluate the member at points (..., d); cells never overlap."""
        pat = self._check_pattern(pattern)
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.d:
            raise ParameterError(f"points need a trailing axis of length {self.d}")
        flat = pts.reshape(-1, self.d)
        n = self.cells_per_axis
        u = (flat + 1.0 / 6.0) * (3.0 * n)
        inside = np.all((u > 0.0) & (u < float(n)), axis=1)
        idx = np.clip(np.floor(u).astype(int), 0, n - 1)
        local = 2.0 * (u - idx) - 1.0  # 6N(x - x_cell) within the cell
        shape = np.ones(len(flat))
        for ax in range(self.d):
            shape = shape * _phi1(local[:, ax])
        cell = np.ravel_multi_index(tuple(idx.T), (n,) * self.d)
        vals = self.eps * pat[cell].astype(float) * shape
        vals[~inside] = 0.0
        return vals.reshape(pts.shape[:-1])

    def member(self, pattern):
        pat = self._check_pattern(pattern)
        return lambda points: self.member_values(pat, points)

    def evaluation_grid(self, points_per_axis: int = 9) -> np.ndarray:
        """Cell-resolving grid; odd counts place a node on every cell center."""
        if points_per_axis < 8:
            raise ParameterError("need >= 8 points per axis per cell")
        n = self.cells_per_axis
        u = (np.arange(n * points_per_axis) + 0.5) / points_per_axis
        axis = u / (3.0 * n) - 1.0 / 6.0
        grids = np.meshgrid(*([axis] * self.d), indexing="ij")
        return np.stack(grids, axis=-1)

    def sup_distance(self, pattern_a, pattern_b, points_per_axis: int = 9) -> float:
        """Grid sup of |member_a - member_b|; exactly 2*eps per differing cell
        when the grid contains cell centers (points_per_axis odd)."""
        grid = self.evaluation_grid(points_per_axis)
        diff = self.member_values(pattern_a, grid) - self.member_values(
            pattern_b, grid
        )
        return float(np.max(np.abs(diff)))

    # -- export to the solver's potential format ---------------------------

    def _mode_table(self, pat: np.ndarray, key: bytes, r: np.ndarray, n_theta: int):
        ck = (key, n_theta, r.tobytes())
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        pts = np.stack(
            [r[:, None] * np.cos(theta)[None, :], r[:, None] * np.sin(theta)[None, :]],
            axis=-1,
        )
        vals = self.member_values(pat, pts)
        coeff = np.fft.fft(vals, axis=1) / n_theta  # bin n holds g_n(r)
        # members are real, so force the exact conjugate symmetry g_{-n} = conj(g_n)
        flip = (-np.arange(n_theta)) % n_theta
        coeff = 0.5 * (coeff + np.conj(coeff[:, flip]))
        if len(self._cache) > 128:
            self._cache.clear()
        self._cache[ck] = coeff
        return coeff

    def member_mode_spectrum(self, pattern, n_theta: int = 1024):
        """Measured angular spectrum: (mode numbers, per-mode sup over radius).

        The members' angular series decays only root-exponentially (smooth but
        not analytic), so callers imposing a mode cap should report the
        residual this table exposes.
        """
        pat = self._check_pattern(pattern)
        probe = np.linspace(0.0, self.support_radius, 257)
        table = self._mode_table(pat, pat.tobytes(), probe, n_theta)
        sups = np.max(np.abs(table), axis=0)
        half = n_theta // 2
        ns = np.where(np.arange(n_theta) < half, np.arange(n_theta),
                      np.arange(n_theta) - n_theta)
        order = np.argsort(ns)
        return ns[order], sups[order]

    def member_potential(
        self, pattern, n_theta: int = 1024, mode_tol: float = 1e-7, n_max: int = None
    ):
        """Re-expand a d = 2 member as a finite angular-Fourier potential.

        Mode functions are evaluated on demand through an FFT over theta (the
        members are smooth, so the angular series converges spectrally); the
        cutoff keeps every mode with |n| <= n_max whose measured sup exceeds
        mode_tol * eps.
        """
        if self.d != 2:
            raise CapabilityError("potential export is a d = 2 operation")
        pat = self._check_pattern(pattern)
        key = pat.tobytes()
        probe = np.linspace(0.0, self.support_radius, 257)
        table = self._mode_table(pat, key, probe, n_theta)
        sups = np.max(np.abs(table), axis=0)
        half = n_theta // 2
        keep = np.nonzero(sups > mode_tol * self.eps)[0]
        band = [b for b in keep if half - 4 <= b <= half + 4]
        if band and n_max is None:
            warnings.warn(
                "angular resolution exhausted: modes near the FFT fold still "
                f"carry mass {max(sups[b] for b in band):.3e}; raise n_theta",
                TruncationWarning,
            )
        modes = {}
        for b in keep:
            n = int(b) if b < half else int(b) - n_theta
            if n_max is not None and abs(n) > n_max:
                continue
            snapshot = table[:, b]
            modes[n] = RadialProfile(
                fn=self._mode_fn(pat, key, int(b), n_theta),
                sup_norm=float(sups[b]),
                support_radius=self.support_radius,
                breakpoints=(),
                config={
                    "kind": "sampled",
                    "radii": [float(x) for x in probe],
                    "values": [
                        v.real if v.imag == 0.0 else {"re": v.real, "im": v.imag}
                        for v in (complex(z) for z in snapshot)
                    ],
                },
            )
        return angular_potential(modes, d=2)

    def _mode_fn(self, pat, key, bin_index, n_theta):
        def fn(r):
            scalar = np.ndim(r) == 0
            rr = np.atleast_1d(np.asarray(r, dtype=float))
            out = self._mode_table(pat, key, rr, n_theta)[:, bin_index]
            return out[0] if scalar else out

        return fn


def _family_sizing(d: int, m: float, eps: float, beta: float):
    if not 2 <= d <= 4:
        raise ParameterError("the cube tiling stays inside the ball only for d <= 4")
    if m <= 0:
        raise ParameterError("smoothness order m must be > 0")
    if eps <= 0 or beta <= 0:
        raise ParameterError("eps and beta must be > 0")
    norm = bump_shape_cm_norm(math.ceil(m), d)
    mu = 1.0 / (2.0 * norm)
    if eps >= mu * beta:
        raise ParameterError(
            f"eps = {eps:g} leaves no room: need eps < mu*beta = {mu * beta:g}"
        )
    n = int(math.floor((mu * beta / eps) ** (1.0 / m)))
    return n, norm


def family_log_cardinality(d: int, m: float, eps: float, beta: float):
    """(cells per axis, ln #patterns) without materializing anything.

    Sizing-only companion to build_eps_family for budgets where N^d sign
    cells are far beyond what any pattern array could hold.
    """
    n, _ = _family_sizing(d, m, eps, beta)
    return n, float(n**d) * math.log(2.0)


def build_eps_family(d: int, m: float, eps: float, beta: float) -> EpsDiscreteFamily:
    """Pack the largest admissible sign family into the small-support cube.

    N = floor((mu beta / eps)^(1/m)) with mu = 1/(2 bump_cm_norm); the
    resulting members satisfy ||f||_{C^m} <= eps N^m bump_cm_norm = beta/2.
    """
    n, norm = _family_sizing(d, m, eps, beta)
    if n**d > _MAX_CELLS:
        raise ParameterError(
            f"{n}^{d} cells exceed the materializable pattern size"
        )
    return EpsDiscreteFamily(
        d=d,
        m=float(m),
        eps=float(eps),
        beta=float(beta),
        cells_per_axis=n,
        bump_cm_norm=norm,
        pattern_count=2 ** (n**d),
    )


# ---------------------------------------------------------------------------
# coefficient nets for functions analytic on a Bernstein ellipse


def ellipse_gamma(interval, clearance: float) -> float:
    """Largest strip parameter whose ellipse stays within `clearance` of the
    interval: the extreme point sits at height half*sinh(gamma)."""
    a, b = float(interval[0]), float(interval[1])
    if clearance <= 0:
        raise ParameterError("clearance must be > 0")
    if b < a:
        raise ParameterError("interval must satisfy a <= b")
    if a == b:
        return math.inf
    return math.asinh(2.0 * clearance / (b - a))


@dataclass(frozen=True)
class HoloNet:
    """delta-net of truncated, coefficient-quantized Chebyshev expansions.

    Elements are x -> (d_0 + 2 sum_{1<=n<n_delta} d_n T_n((x-mid)/half))/(2pi)
    with each d_n on the square grid of step delta_prime clamped to modulus
    2*pi*bound.  A degenerate interval (a == b) nets the single value g(a) on
    a (delta/2)-grid instead.
    """

    interval: tuple
    gamma: float
    bound: float
    delta: float
    n_delta: int
    delta_prime: float
    grid_step: float

    @property
    def degenerate(self) -> bool:
        return self.interval[0] == self.interval[1]

    @property
    def axis_extent(self) -> int:
        """Largest grid index along one real axis."""
        if self.degenerate:
            return int(math.floor(2.0 * self.bound / self.delta))
        return int(math.floor(2.0 * math.pi * self.bound / self.grid_step))

    @property
    def coeff_choices(self) -> int:
        return (1 + 2 * self.axis_extent) ** 2

    @property
    def log_cardinality(self) -> float:
        if self.degenerate:
            return math.log(self.coeff_choices)
        if self.n_delta == 0:
            return 0.0
        return self.n_delta * math.log(self.coeff_choices)

    @property
    def cardinality(self) -> int:
        if self.degenerate:
            return self.coeff_choices
        return self.coeff_choices**self.n_delta

    @property
    def nu(self) -> float:
        """Exponent constant in cardinality <= exp(nu * ln(1/delta)^2)."""
        return self.log_cardinality / math.log(1.0 / self.delta) ** 2

    def descriptor(self) -> dict:
        return {
            "construction": "holo_net",
            "interval": [self.interval[0], self.interval[1]],
            "gamma": None if math.isinf(self.gamma) else self.gamma,
            "bound": self.bound,
            "delta": self.delta,
            "n_delta": self.n_delta,
            "delta_prime": self.delta_prime,
            "grid_step": self.grid_step,
            "log_cardinality": self.log_cardinality,
            "nu": self.nu,
        }

    # -- elements ----------------------------------------------------------

    def quantize(self, c: complex) -> tuple:
        """Nearest grid pair for one coefficient, clamped to the modulus box."""
        k = self.axis_extent
        step = self.grid_step if not self.degenerate else self.delta / 2.0
        kr = int(np.clip(round(c.real / step), -k, k))
        ki = int(np.clip(round(c.imag / step), -k, k))
        return (kr, ki)

    def coeff_value(self, pair) -> complex:
        step = self.grid_step if not self.degenerate else self.delta / 2.0
        return complex(pair[0] * step, pair[1] * step)

    def _check_element(self, element_id) -> tuple:
        want = 1 if self.degenerate else self.n_delta
        eid = tuple(tuple(int(x) for x in pair) for pair in element_id)
        if len(eid) != want:
            raise ParameterError(f"element id needs {want} coefficient pairs")
        k = self.axis_extent
        for kr, ki in eid:
            if abs(kr) > k or abs(ki) > k:
                raise ParameterError("element id leaves the coefficient grid")
        return eid

    def element_values(self, element_id) -> np.ndarray:
        eid = self._check_element(element_id)
        return np.array([self.coeff_value(p) for p in eid], dtype=complex)

    def element_function(self, element_id):
        coeffs = self.element_values(element_id)
        a, b = self.interval
        if self.degenerate:
            value = coeffs[0]
            return lambda x: np.full(np.shape(x), value, dtype=complex)[()]
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        ns = np.arange(len(coeffs))

        def fn(x):
            t = np.clip((np.asarray(x, dtype=float) - mid) / half, -1.0, 1.0)
            s = np.arccos(t)
            basis = np.cos(np.multiply.outer(s, ns))  # (..., n_delta)
            weights = np.where(ns == 0, 1.0, 2.0) * coeffs
            return (basis @ weights) / (2.0 * np.pi)

        return fn

    def enumerate_elements(self):
        """All element ids, smallest nets only."""
        if self.cardinality > _MAX_ENUMERATION:
            raise ParameterError("net too large to enumerate; use the log size")
        k = self.axis_extent
        pairs = list(itertools.product(range(-k, k + 1), repeat=2))
        reps = 1 if self.degenerate else self.n_delta
        return itertools.product(pairs, repeat=reps)


def build_holo_net(interval, gamma: float, bound: float, delta: float) -> HoloNet:
    """Size the truncation and the coefficient grid for one interval.

    n_delta is the first index beyond every violation of
    2 pi bound e^{-n gamma} <= (6/pi^2) (n+1)^{-2} delta, so the dropped tail
    plus the per-coefficient rounding spends at most the total budget delta.
    """
    a, b = float(interval[0]), float(interval[1])
    if not 0.0 < delta < math.exp(-1.0):
        raise ParameterError("delta must lie in (0, e^{-1})")
    if bound <= 0:
        raise ParameterError("the analytic bound must be > 0")
    if b < a:
        raise ParameterError("interval must satisfy a <= b")
    if a == b:
        return HoloNet(
            interval=(a, b),
            gamma=math.inf,
            bound=float(bound),
            delta=float(delta),
            n_delta=1,
            delta_prime=delta / 2.0,
            grid_step=delta / 2.0,
        )
    if not (math.isfinite(gamma) and gamma > 0):
        raise ParameterError("gamma must be positive and finite")

    lead = 2.0 * math.pi * bound
    allow = 6.0 / math.pi**2 * delta
    n_stop = max(4, math.ceil(2.0 / gamma))
    last_violation = -1
    n = 0
    while True:
        ok = lead * math.exp(-n * gamma) <= allow / (n + 1) ** 2
        if not ok:
            last_violation = n
        elif n >= n_stop:
            break  # the violation ratio is now strictly decreasing
        n += 1
        if n > 10_000_000:
            raise ParameterError("gamma too small: truncation index diverges")
    n_delta = last_violation + 1
    delta_prime = 3.0 / math.pi**2 * delta / (n_delta + 1) ** 2
    return HoloNet(
        interval=(a, b),
        gamma=float(gamma),
        bound=float(bound),
        delta=float(delta),
        n_delta=n_delta,
        delta_prime=delta_prime,
        grid_step=delta_prime,
    )


def project_to_net(net: HoloNet, g, sample_points: int = 1000, slack: float = 0.5):
    """Snap a function on the net's interval to the nearest net element.

    Coefficients come from the 4(n_delta+1)-point periodic trapezoid rule on
    f(z) = g(mid + half cos z); g must accept numpy arrays.  Returns
    (element_id, sup_error) with the error measured on a sample_points grid.
    Measured coefficients above the declared analytic envelope raise a
    PreconditionWarning — the net's budget no longer covers such a function.
    """
    a, b = net.interval
    if net.degenerate:
        val = complex(np.asarray(g(np.array([a])), dtype=complex).ravel()[0])
        if abs(val) > net.bound * (1.0 + slack):
            warnings.warn(
                f"|g(a)| = {abs(val):.3e} exceeds the declared bound "
                f"{net.bound:.3e}",
                PreconditionWarning,
            )
        eid = (net.quantize(val),)
        err = abs(val - net.coeff_value(eid[0]))
        return eid, float(err)

    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    m_quad = 4 * (net.n_delta + 1)
    s = 2.0 * np.pi * np.arange(m_quad) / m_quad
    x = mid + half * np.cos(s)
    f = np.asarray(g(x), dtype=complex)
    if f.shape != s.shape:
        raise ParameterError("g must be vectorized over the sample grid")
    coeff = np.fft.fft(f) * (2.0 * np.pi / m_quad)  # c_n = int F e^{-ins} ds

    worst = 0.0
    for n in range(min(net.n_delta, m_quad // 2)):
        envelope = 2.0 * np.pi * net.bound * math.exp(-n * net.gamma)
        if abs(coeff[n]) > envelope * (1.0 + slack):
            worst = max(worst, abs(coeff[n]) / envelope)
    if worst > 0.0:
        warnings.warn(
            f"measured coefficients exceed the analytic envelope by x{worst:.2f}; "
            "the net's error budget does not cover this function",
            PreconditionWarning,
        )

    eid = tuple(net.quantize(complex(coeff[n])) for n in range(net.n_delta))
    f_net = net.element_function(eid)
    xs = np.linspace(a, b, sample_points)
    err = float(np.max(np.abs(np.asarray(g(xs), dtype=complex) - f_net(xs))))
    return eid, err


# ---------------------------------------------------------------------------
# composed net over the image of a decaying matrix family


@dataclass(frozen=True)
class ImageNetReport:
    """Net size for energy-curves of matrices under the weighted decay bound.

    Iterating yields (l_delta_s, log_cardinality) — the truncation level and
    the natural-log cardinality of the composed per-entry net.
    """

    l_delta_s: int
    log_cardinality: float
    eta: float
    retained_tuples: int
    tuple_bound: float
    delta: float
    level_table: tuple  # rows (level, tuples at level, summed per-entry log size)

    def __iter__(self):
        return iter((self.l_delta_s, self.log_cardinality))

    def descriptor(self) -> dict:
        return {
            "construction": "dtn_image_net",
            "l_delta_s": self.l_delta_s,
            "log_cardinality": self.log_cardinality,
            "eta": self.eta,
            "retained_tuples": self.retained_tuples,
            "tuple_bound": self.tuple_bound,
            "delta": self.delta,
            "level_table": [list(row) for row in self.level_table],
        }


def dtn_image_net_size(
    S: EnergyIntervalSet, s: float, d: int, delta: float, rho_hat: float
) -> ImageNetReport:
    """Compose per-entry coefficient nets into a delta-net for the matrix image.

    Entries at pair level l carry the envelope 4 rho_hat 2^{-l}; levels where
    (1+l)^{2s+d} 4 rho_hat 2^{-l} <= delta are covered by the zero matrix, and
    each retained entry gets its own net at the down-weighted resolution
    (1+l)^{-2s-d} delta on every interval of S.
    """
    if not isinstance(S, EnergyIntervalSet):
        raise ParameterError("S must be an EnergyIntervalSet")
    if not 0.0 < delta < math.exp(-1.0):
        raise ParameterError("delta must lie in (0, e^{-1})")
    if rho_hat <= 0:
        raise ParameterError("rho_hat must be > 0")
    if s < 0:
        raise ParameterError("smoothness weight s must be >= 0")
    if d < 2:
        raise ParameterError("dimension d must be >= 2")

    power = 2.0 * s + d
    log_delta = math.log(delta)
    l_stop = max(4, math.ceil(power / math.log(2.0)))
    last_violation = -1
    level = 0
    while True:
        h = power * math.log1p(level) + math.log(4.0 * rho_hat) - level * math.log(2.0)
        if h > log_delta:
            last_violation = level
        elif level >= l_stop:
            break
        level += 1
        if level > 1_000_000:
            raise ParameterError("decay too slow: truncation level diverges")
    l_cut = last_violation + 1

    gammas = [ellipse_gamma(iv, S.sigma / 6.0) for iv in S.intervals]
    cum = 0  # indices with degree < current level
    rows = []
    log_total = 0.0
    for level in range(l_cut):
        below = cum
        cum += harmonic_dim(level, d)
        tuples = cum * cum - below * below
        entry_delta = (1.0 + level) ** (-power) * delta
        entry_bound = 4.0 * rho_hat * 2.0 ** (-float(level))
        level_log = 0.0
        for iv, gamma in zip(S.intervals, gammas):
            net = build_holo_net(iv, gamma, entry_bound, entry_delta)
            level_log += net.log_cardinality
        rows.append((level, tuples, tuples * level_log))
        log_total += tuples * level_log

    retained = cum * cum
    bound = 8.0 * (1.0 + l_cut) ** (2 * d - 2)
    eta = log_total / math.log(1.0 / delta) ** (2 * d)
    return ImageNetReport(
        l_delta_s=l_cut,
        log_cardinality=log_total,
        eta=eta,
        retained_tuples=retained,
        tuple_bound=bound,
        delta=delta,
        level_table=tuple(rows),
    )
