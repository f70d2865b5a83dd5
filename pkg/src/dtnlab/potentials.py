"""Potential descriptors: radial profiles and finite angular-mode sums.

A potential is a finite collection of radial profiles g_n on [0, 1], one
per angular mode, representing v(r, t) = sum_n g_n(r) e^{i n t} (d = 2);
d = 3 admits the purely radial case only.  Profiles carry the metadata the
solvers and certificates need — support radius, a sup-norm bound,
breakpoint radii for the integrator — plus the JSON config that rebuilds
them, so every run report can state exactly what was solved.

`sup_norm` on a multi-mode potential is the bound sum_n sup|g_n|, which is
exact for a single mode (|e^{i n t}| = 1) and for one conjugate pair, the
only shapes the experiments use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ParameterError

SMALL_SUPPORT_RADIUS = 1.0 / 3.0

# the ring bump: supp in (1/4, 1/3), unit sup-norm attained at the center.
# Hugging the outer edge keeps the radial moments free of the harmonic
# (n+4)/(n+2) suppression a centered ring would add, so the fitted per-mode
# envelope prefactor stays flat across the swept modes.
RING_CENTER = 29.0 / 90.0
RING_HALF_WIDTH = 1.0 / 96.0


def _bump_shape(u):
    """exp(1 - 1/(1-u^2)) on |u| < 1, 0 outside; peak value 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    with np.errstate(over="ignore"):
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
    return out


@dataclass(frozen=True)
class RadialProfile:
    """One radial factor g on [0, 1] with certificates and rebuild config."""

    fn: object  # vectorized callable r -> complex/real
    sup_norm: float
    support_radius: float
    breakpoints: tuple
    config: dict

    def __post_init__(self):
        if self.sup_norm < 0:
            raise ParameterError("sup_norm must be >= 0")
        if not 0.0 <= self.support_radius <= 1.0:
            raise ParameterError("support_radius must lie in [0, 1]")
        for b in self.breakpoints:
            if not 0.0 < b < 1.0:
                raise ParameterError("breakpoints must lie strictly inside (0, 1)")

    def __call__(self, r):
        return self.fn(r)

    @property
    def is_zero(self) -> bool:
        return self.sup_norm == 0.0


def zero_profile() -> RadialProfile:
    return RadialProfile(
        fn=lambda r: np.zeros(np.shape(r)) if np.ndim(r) else 0.0,
        sup_norm=0.0,
        support_radius=0.0,
        breakpoints=(),
        config={"kind": "zero"},
    )


def constant_profile(value, radius: float = 1.0) -> RadialProfile:
    """value on [0, radius], 0 beyond; radius = 1 fills the whole ball."""
    if not 0.0 < radius <= 1.0:
        raise ParameterError("radius must lie in (0, 1]")
    c = complex(value)
    if c.imag == 0.0:
        c = c.real

    def fn(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= radius, c, 0.0 * c)[()]

    return RadialProfile(
        fn=fn,
        sup_norm=abs(c),
        support_radius=radius,
        breakpoints=(radius,) if radius < 1.0 else (),
        config={"kind": "constant", "value": _num(value), "radius": radius},
    )


def piecewise_constant_profile(values, edges) -> RadialProfile:
    """values[i] on (edges[i], edges[i+1]]; edges start at 0 and end <= 1."""
    edges = tuple(float(e) for e in edges)
    vals = tuple(complex(v) for v in values)
    if len(edges) != len(vals) + 1:
        raise ParameterError("need len(edges) == len(values) + 1")
    if edges[0] != 0.0 or edges[-1] > 1.0 or any(
        a >= b for a, b in zip(edges, edges[1:])
    ):
        raise ParameterError("edges must increase from 0 to at most 1")

    def fn(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape, dtype=complex)
        for v, a, b in zip(vals, edges, edges[1:]):
            out = np.where((r > a) & (r <= b) | ((a == 0.0) & (r == 0.0)), v, out)
        return out[()]

    support = 0.0
    for v, b in zip(vals, edges[1:]):
        if v != 0:
            support = b
    return RadialProfile(
        fn=fn,
        sup_norm=max((abs(v) for v in vals), default=0.0),
        support_radius=support,
        breakpoints=tuple(e for e in edges if 0.0 < e < 1.0),
        config={
            "kind": "piecewise_constant",
            "values": [_num(v) for v in vals],
            "edges": list(edges),
        },
    )


def bump_profile(center: float, half_width: float, amplitude=1.0) -> RadialProfile:
    """Smooth bump amplitude * exp(1 - 1/(1-u^2)), u = (r-center)/half_width."""
    if half_width <= 0:
        raise ParameterError("half_width must be > 0")
    if not (center - half_width > 0.0 and center + half_width <= 1.0):
        raise ParameterError("bump support must sit inside (0, 1]")
    amp = complex(amplitude)
    if amp.imag == 0.0:
        amp = amp.real

    def fn(r):
        r = np.asarray(r, dtype=float)
        return (amp * _bump_shape((r - center) / half_width))[()]

    lo, hi = center - half_width, center + half_width
    return RadialProfile(
        fn=fn,
        sup_norm=abs(amp),
        support_radius=hi,
        breakpoints=tuple(b for b in (lo, hi) if 0.0 < b < 1.0),
        config={
            "kind": "bump",
            "center": center,
            "half_width": half_width,
            "amplitude": _num(amplitude),
        },
    )


def ring_bump_profile(amplitude=1.0) -> RadialProfile:
    """The counterexample ring: unit bump supported in (1/4, 1/3)."""
    prof = bump_profile(RING_CENTER, RING_HALF_WIDTH, amplitude)
    cfg = {"kind": "counterexample_ring", "amplitude": _num(amplitude)}
    return RadialProfile(
        fn=prof.fn,
        sup_norm=prof.sup_norm,
        support_radius=prof.support_radius,
        breakpoints=prof.breakpoints,
        config=cfg,
    )


def sampled_profile(radii, values) -> RadialProfile:
    """Piecewise-linear interpolation through (radii, values); 0 outside."""
    rs = np.asarray(radii, dtype=float)
    vs = np.asarray(values)
    if rs.ndim != 1 or rs.shape != vs.shape or len(rs) < 2:
        raise ParameterError("need matching 1-d arrays with >= 2 samples")
    if np.any(np.diff(rs) <= 0) or rs[0] < 0.0 or rs[-1] > 1.0:
        raise ParameterError("radii must increase inside [0, 1]")

    def fn(r):
        r = np.asarray(r, dtype=float)
        re = np.interp(r, rs, vs.real, left=0.0, right=0.0)
        if np.iscomplexobj(vs):
            return (re + 1j * np.interp(r, rs, vs.imag, left=0.0, right=0.0))[()]
        return re[()]

    nonzero = np.nonzero(np.abs(vs) > 0)[0]
    support = float(rs[nonzero[-1]]) if len(nonzero) else 0.0
    bps = [float(r) for r in rs if 0.0 < r < 1.0]
    return RadialProfile(
        fn=fn,
        sup_norm=float(np.max(np.abs(vs))) if len(vs) else 0.0,
        support_radius=support,
        breakpoints=tuple(bps),
        config={
            "kind": "sampled",
            "radii": [float(r) for r in rs],
            "values": [_num(v) for v in vs],
        },
    )


def _num(v):
    c = complex(v)
    if c.imag == 0.0:
        return c.real
    return {"re": c.real, "im": c.imag}


def _num_back(v):
    if isinstance(v, dict):
        return complex(v["re"], v["im"])
    return v


def profile_from_config(cfg: dict) -> RadialProfile:
    try:
        kind = cfg["kind"]
    except (TypeError, KeyError):
        raise ParameterError("profile config needs a 'kind' field") from None
    if kind == "zero":
        return zero_profile()
    if kind == "constant":
        return constant_profile(_num_back(cfg["value"]), cfg.get("radius", 1.0))
    if kind == "piecewise_constant":
        return piecewise_constant_profile(
            [_num_back(v) for v in cfg["values"]], cfg["edges"]
        )
    if kind == "bump":
        return bump_profile(
            cfg["center"], cfg["half_width"], _num_back(cfg.get("amplitude", 1.0))
        )
    if kind == "counterexample_ring":
        return ring_bump_profile(_num_back(cfg.get("amplitude", 1.0)))
    if kind == "sampled":
        return sampled_profile(cfg["radii"], [_num_back(v) for v in cfg["values"]])
    raise ParameterError(f"unknown profile kind {kind!r}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Finite angular-mode potential sum_n g_n(r) e^{i n t} (mode 0 = radial)."""

    modes: dict
    d: int = 2

    def __post_init__(self):
        if self.d < 2:
            raise ParameterError("dimension d must be >= 2")
        clean = {}
        for n, prof in self.modes.items():
            if not isinstance(prof, RadialProfile):
                raise ParameterError("modes must map int -> RadialProfile")
            if not prof.is_zero:
                clean[int(n)] = prof
        if self.d != 2 and any(n != 0 for n in clean):
            raise CapabilityError(
                "angular modes are a d = 2 construction; d = 3 is radial-only"
            )
        object.__setattr__(self, "modes", clean)

    @property
    def is_radial(self) -> bool:
        return all(n == 0 for n in self.modes)

    @property
    def is_zero(self) -> bool:
        return not self.modes

    @property
    def n_max(self) -> int:
        return max((abs(n) for n in self.modes), default=0)

    @property
    def support_radius(self) -> float:
        return max((p.support_radius for p in self.modes.values()), default=0.0)

    @property
    def sup_norm(self) -> float:
        return sum(p.sup_norm for p in self.modes.values())

    @property
    def small_support_ok(self) -> bool:
        return self.support_radius <= SMALL_SUPPORT_RADIUS + 1e-12

    @property
    def is_real(self) -> bool:
        """Structural check g_{-n} = conj(g_n), verified on a radius sample."""
        rs = np.linspace(0.0, 1.0, 33)
        for n, prof in self.modes.items():
            other = self.modes.get(-n)
            if other is None:
                return False
            a = np.asarray(prof(rs), dtype=complex)
            b = np.asarray(other(rs), dtype=complex)
            scale = max(prof.sup_norm, 1e-300)
            if np.max(np.abs(b - np.conj(a))) > 1e-12 * scale:
                return False
        return True

    def mode(self, n: int) -> RadialProfile:
        return self.modes.get(n, zero_profile())

    def radial_profile(self) -> RadialProfile:
        if not self.is_radial:
            raise ParameterError("potential has angular modes; no single profile")
        return self.mode(0)

    def eval_at(self, r, theta):
        """Pointwise value; r and theta broadcast."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast(r, theta).shape, dtype=complex)
        for n, prof in self.modes.items():
            out = out + np.asarray(prof(r), dtype=complex) * np.exp(1j * n * theta)
        return out[()]

    def describe(self) -> dict:
        if self.is_radial:
            return {
                "kind": "radial",
                "d": self.d,
                "profile": dict(self.mode(0).config),
            }
        return {
            "kind": "angular_fourier",
            "d": self.d,
            "modes": {str(n): dict(p.config) for n, p in sorted(self.modes.items())},
        }


def radial_potential(profile: RadialProfile, d: int = 2) -> Potential:
    return Potential({0: profile}, d)


def angular_potential(modes: dict, d: int = 2) -> Potential:
    return Potential(dict(modes), d)


def counterexample_potential(n: int, m: float, sigma: float) -> Potential:
    """Single-mode ring potential (sigma/3) n^(-m) e^{i n t} * ring bump."""
    if n < 1:
        raise ParameterError("mode index n must be >= 1")
    if m <= 0:
        raise ParameterError("decay exponent m must be > 0")
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    eps = (sigma / 3.0) * float(n) ** (-float(m))
    return Potential({n: ring_bump_profile(eps)}, d=2)


def potential_from_config(cfg: dict) -> Potential:
    try:
        kind = cfg["kind"]
    except (TypeError, KeyError):
        raise ParameterError("potential config needs a 'kind' field") from None
    d = int(cfg.get("d", 2))
    if kind == "radial":
        return radial_potential(profile_from_config(cfg["profile"]), d)
    if kind == "angular_fourier":
        modes = {
            int(n): profile_from_config(pc) for n, pc in cfg["modes"].items()
        }
        return angular_potential(modes, d)
    if kind == "counterexample":
        return counterexample_potential(
            int(cfg["n"]), float(cfg["m"]), float(cfg["sigma"])
        )
    raise ParameterError(f"unknown potential kind {kind!r}")
