"""Radial boundary-response machinery on the unit ball.

Separation in d dimensions leaves one ODE per harmonic degree j,

    -R'' - ((d-1)/r) R' + (j(j+d-2)/r^2) R + g(r) R = E R,

whose regular solution scales like r^j at the origin.  The boundary entry
is R'(1)/R(1).  For g = 0 everything is explicit through J_a with
a = j + (d-2)/2; for general radial g the solver integrates the
log-derivative in the shifted variable u = R'/R - j/r, which starts at
O(r) instead of j/r and obeys

    u' = -(2j+d-1) u / r - u^2 + (g - E),

so the step count never grows with j.  Crossings of interior zeros of R
(poles of u) trigger a fall back to the linear system for Rt = R / r^j,
renormalized segment-by-segment, which handles oscillatory regimes and
detects genuine Dirichlet hits at r = 1.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import solve_ivp

from .energy import ComplexEnergy, as_energy
from .errors import (
    ConditioningError,
    ConditioningWarning,
    ConvergenceError,
    ParameterError,
    ScaleOverflowError,
)
from .potentials import Potential, RadialProfile
from .special_functions import (
    Order,
    _sadd,
    bessel_deriv_log,
    bessel_j_log,
    bessel_y_log,
)

_NEWTON_WARN = 1e-3   # |J/J'| below this * max(1,|k|): digits are leaking
_NEWTON_ERROR = 1e-10  # ... below this: refuse
_POLE_CAP = 1e8        # |u| beyond this counts as a log-derivative pole
_R_START = 1e-3        # series-start radius; expansion error ~ (qr^2)^2/(8j+..)
_RTOL = 1e-11
_ATOL = 1e-13


def _exp_guard(log_mag: float, what: str) -> float:
    if log_mag > 709.0:
        raise ScaleOverflowError(f"{what} exceeds the double range (log {log_mag:.1f})")
    return math.exp(log_mag)


def _checked_free_pair(order: Order, k: complex):
    """J and J' at k in log form, with a Newton-distance conditioning gate."""
    jv = bessel_j_log(order, k)
    jd = bessel_deriv_log("j", order, k)
    newton = math.exp(min(jv.log_scale - jd.log_scale, 700.0))
    scale = max(1.0, abs(k))
    if newton < _NEWTON_ERROR * scale:
        raise ConditioningError(
            f"J_{order.alpha}(k) vanishes to working precision at k={k}",
            detail={"newton_distance": newton, "order": order.alpha, "k": k},
        )
    if newton < _NEWTON_WARN * scale:
        warnings.warn(
            f"k={k} lies within {newton:.2e} of a zero of J_{order.alpha}; "
            "digits are being lost",
            ConditioningWarning,
            stacklevel=3,
        )
    return jv, jd


def free_radial_ratio(j: int, d: int, E, r: float) -> complex:
    """r^(-(d-2)/2) J_a(k r)/J_a(k); the limit r^j at E = 0."""
    if j < 0 or d < 2:
        raise ParameterError("need degree j >= 0 and dimension d >= 2")
    if not 0.0 < r <= 1.0:
        raise ParameterError("radius must lie in (0, 1]")
    ce = as_energy(E)
    if ce.is_zero:
        return complex(r**j)
    order = Order.from_degree(j, d)
    k = ce.k
    den, _ = _checked_free_pair(order, k)
    num = bessel_j_log(order, k * r)
    log_mag = num.log_scale - den.log_scale - 0.5 * (d - 2) * math.log(r)
    if log_mag < -745.0:
        return 0.0 + 0.0j
    return num.mantissa / den.mantissa * _exp_guard(log_mag, "radial ratio")


def ring_radial(j: int, d: int, E, r: float) -> complex:
    """r^(-(d-2)/2) (Y_a(kr) J_a(k) - J_a(kr) Y_a(k)); vanishes at r = 1."""
    if j < 0 or d < 2:
        raise ParameterError("need degree j >= 0 and dimension d >= 2")
    if not 0.0 < r <= 1.0:
        raise ParameterError("radius must lie in (0, 1]")
    ce = as_energy(E)
    if ce.is_zero:
        raise ParameterError("the ring system needs k != 0")
    order = Order.from_degree(j, d)
    k = ce.k
    ya, jb = bessel_y_log(order, k * r), bessel_j_log(order, k)
    ja, yb = bessel_j_log(order, k * r), bessel_y_log(order, k)
    m, e = _sadd(
        ya.mantissa * jb.mantissa,
        ya.log_scale + jb.log_scale,
        -ja.mantissa * yb.mantissa,
        ja.log_scale + yb.log_scale,
    )
    m = complex(np.asarray(m).reshape(()))
    e = float(np.asarray(e).reshape(()))
    if e == -math.inf:
        return 0.0 + 0.0j
    e -= 0.5 * (d - 2) * math.log(r)
    if e < -745.0:
        return 0.0 + 0.0j
    return m * _exp_guard(e, "ring value")


def free_dtn_entry(j: int, d: int, E) -> complex:
    """Boundary log-derivative -(d-2)/2 + k J_a'(k)/J_a(k); equals j at E = 0."""
    if j < 0 or d < 2:
        raise ParameterError("need degree j >= 0 and dimension d >= 2")
    ce = as_energy(E)
    if ce.is_zero:
        return complex(j)
    order = Order.from_degree(j, d)
    k = ce.k
    jv, jd = _checked_free_pair(order, k)
    ratio = jd.mantissa / jv.mantissa * _exp_guard(
        jd.log_scale - jv.log_scale, "J'/J ratio"
    )
    return -0.5 * (d - 2) + k * ratio


# ---------------------------------------------------------------------------
# potential solves


def _segments(profile: RadialProfile, r0: float, r1: float):
    cuts = [r0] + [b for b in sorted(profile.breakpoints) if r0 < b < r1] + [r1]
    return list(zip(cuts, cuts[1:]))


def _radial_log_derivative(
    profile: RadialProfile,
    E: ComplexEnergy,
    j: int,
    d: int,
    rtol: float = _RTOL,
    atol: float = _ATOL,
):
    """w(1) = R'(1)/R(1) for the regular solution, with solve diagnostics."""
    e_val = E.E
    q = lambda r: np.asarray(profile(r), dtype=complex) - e_val
    u0 = complex(q(0.0)) * _R_START / (2 * j + d)
    info = {"method": "riccati", "segments": 0, "renormalizations": 0}

    def rhs_u(r, y):
        return [-(2 * j + d - 1) * y[0] / r - y[0] * y[0] + complex(q(r))]

    def pole(r, y):
        return _POLE_CAP - abs(y[0])

    pole.terminal = True
    pole.direction = -1

    hit_pole = False
    u = np.array([u0], dtype=complex)
    for a, b in _segments(profile, _R_START, 1.0):
        info["segments"] += 1
        sol = solve_ivp(
            rhs_u, (a, b), u, method="DOP853", rtol=rtol, atol=atol, events=pole
        )
        if sol.status == 1:  # pole event
            hit_pole = True
            break
        if not sol.success:
            raise ConvergenceError(f"log-derivative integration failed: {sol.message}")
        u = sol.y[:, -1]
    if not hit_pole:
        return j + complex(u[0]), info

    # linear fallback on Rt = R / r^j: Rt'' + ((2j+d-1)/r) Rt' = q Rt
    info["method"] = "linear"

    def rhs_lin(r, y):
        return [y[1], -(2 * j + d - 1) * y[1] / r + complex(q(r)) * y[0]]

    y = np.array([1.0, u0], dtype=complex)
    for a, b in _segments(profile, _R_START, 1.0):
        sol = solve_ivp(rhs_lin, (a, b), y, method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise ConvergenceError(f"linear integration failed: {sol.message}")
        y = sol.y[:, -1]
        scale = max(abs(y[0]), abs(y[1]))
        if scale > 1e50:
            y = y / scale
            info["renormalizations"] += 1
    rt, st = complex(y[0]), complex(y[1])
    if abs(rt) <= 1e-10 * max(1.0, abs(st)):
        raise ConditioningError(
            "boundary value R(1) vanishes to working precision "
            "(E sits on a Dirichlet eigenvalue of the perturbed operator)",
            detail={"R_boundary": abs(rt), "R_deriv_boundary": abs(st)},
        )
    return j + st / rt, info


def radial_dtn_many(
    profile: RadialProfile,
    E,
    js,
    d: int = 2,
    rtol: float = _RTOL,
    atol: float = _ATOL,
) -> np.ndarray:
    """Boundary entries for a whole degree list in one linear solve.

    Integrates the Rt = R / r^j systems for every degree simultaneously
    (they share the radius variable, so the step controller pays for the
    stiffest degree once instead of once per degree).  The linear form has
    no poles, so no event handling is needed; a vanishing boundary value
    on any component raises ConditioningError naming the degree.
    """
    js = np.asarray(js, dtype=int)
    if js.ndim != 1 or len(js) == 0 or np.any(js < 0):
        raise ParameterError("js must be a nonempty 1-d list of degrees >= 0")
    if d < 2:
        raise ParameterError("dimension d must be >= 2")
    ce = as_energy(E)
    if profile.is_zero:
        return np.array([free_dtn_entry(int(j), d, ce) for j in js])
    e_val = ce.E
    n = len(js)
    jv = js.astype(float)

    def rhs(r, y):
        rt, st = y[:n], y[n:]
        qr = complex(np.asarray(profile(r), dtype=complex)) - e_val
        return np.concatenate([st, -(2 * jv + d - 1) * st / r + qr * rt])

    q0 = complex(np.asarray(profile(0.0), dtype=complex)) - e_val
    y = np.concatenate(
        [np.ones(n, dtype=complex), q0 * _R_START / (2 * jv + d)]
    )
    for a, b in _segments(profile, _R_START, 1.0):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise ConvergenceError(f"batched integration failed: {sol.message}")
        y = sol.y[:, -1]
    rt, st = y[:n], y[n:]
    bad = np.abs(rt) <= 1e-10 * np.maximum(1.0, np.abs(st))
    if np.any(bad):
        raise ConditioningError(
            f"boundary value vanishes at degrees {js[bad].tolist()} "
            "(Dirichlet eigenvalue hit)",
            detail={"degrees": js[bad].tolist(), "E": e_val},
        )
    return jv + st / rt


def radial_dtn(
    v,
    E,
    j: int,
    d: int = 2,
    rtol: float = _RTOL,
    atol: float = _ATOL,
) -> complex:
    """Boundary entry R'(1)/R(1) of -Delta + v at energy E, degree j.

    ``v`` is a radial Potential or a bare RadialProfile.  Interior zeros of
    R are handled automatically; a vanishing boundary value raises
    ConditioningError (Dirichlet eigenvalue hit).
    """
    if isinstance(v, Potential):
        if v.d != d:
            raise ParameterError(f"potential was built for d={v.d}, not d={d}")
        profile = v.radial_profile()
    elif isinstance(v, RadialProfile):
        profile = v
    else:
        raise ParameterError("v must be a radial Potential or a RadialProfile")
    if j < 0 or d < 2:
        raise ParameterError("need degree j >= 0 and dimension d >= 2")
    ce = as_energy(E)
    if profile.is_zero:
        return free_dtn_entry(j, d, ce)
    w1, _ = _radial_log_derivative(profile, ce, j, d, rtol=rtol, atol=atol)
    return w1
