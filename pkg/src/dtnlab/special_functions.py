"""Bessel functions of exact integer and half-integer order with certified tails.

Everything here is built from the ascending power series

    J_a(z) = sum_m (-1)^m (z/2)^(2m+a) / (m! Gamma(m+a+1))

and its companions for Y: the reflection Y_{n+1/2} = (-1)^(n+1) J_{-n-1/2}
on the half-integer family and the logarithm/digamma series on the integer
family.  Derivatives come from J_a' = J_{a-1} - (a/z) J_a and the same
relation for Y.  Each evaluation carries a rigorous truncation-tail bound
obtained from a geometric ratio test on the dropped remainder.

Internally all values live in a scaled representation value = m * exp(e)
with |m| = 1, so that orders far beyond the overflow range of Gamma remain
usable.  The plain-value API raises ScaleOverflowError outside the double
range and the ``*_log`` companions stay exact there.

Accuracy note: the alternating series loses significance once |z| is large
compared to the order (the summands reach ~exp(|z|) while the value stays
O(1)).  For a >= 0 and |z| > _SERIES_Z_CUT the J path therefore switches to
a backward three-term recurrence seeded by the series at an order where the
first term dominates; this keeps J accurate near machine precision for
|z| up to several tens.  Y keeps the plain series, whose roundoff grows
like eps * exp(|z|) / |Y|; with |z| <= 10 that is still below 1e-10
relative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    ParameterError,
    PoleError,
    ScaleOverflowError,
)

_STOP_REL = 1e-16          # relative size at which series summation stops
_MAX_TERMS = 700
_SERIES_Z_CUT = 6.0        # beyond this, small-order J switches to recurrence
_LOG_HUGE = 700.0          # exp() overflow guard for plain-value output


# ---------------------------------------------------------------------------
# order bookkeeping


@dataclass(frozen=True)
class Order:
    """Bessel order a = twice_alpha / 2 tagged with the dimension it came from.

    The radial reduction in dimension d produces orders n + (d-2)/2, so
    twice_alpha and d always share parity.  Negative orders are accepted and
    folded back onto the nonnegative family inside the evaluators, via
    J_{-n} = (-1)^n J_n on integers and the J/Y swap on half-integers.
    """

    twice_alpha: int
    dim_parity: int = 2

    def __post_init__(self):
        if self.dim_parity < 2:
            raise ParameterError("dim_parity must be >= 2")
        if (self.twice_alpha - self.dim_parity) % 2 != 0:
            raise ParameterError(
                f"order {self.twice_alpha}/2 has the wrong parity for d={self.dim_parity}"
            )

    @classmethod
    def from_degree(cls, n: int, d: int) -> "Order":
        """Order n + (d-2)/2 attached to harmonic degree n in dimension d."""
        return cls(2 * n + (d - 2), d)

    @classmethod
    def from_alpha(cls, a: float) -> "Order":
        ta = round(2 * a)
        if abs(2 * a - ta) > 1e-12:
            raise ParameterError(f"order {a} is neither integer nor half-integer")
        return cls(ta, 2 if ta % 2 == 0 else 3)

    @property
    def alpha(self) -> float:
        return self.twice_alpha / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice_alpha % 2 == 0

    def shift(self, k: int) -> "Order":
        return Order(self.twice_alpha + 2 * k, self.dim_parity)


def _as_alpha(order) -> float:
    if isinstance(order, Order):
        return order.alpha
    a = float(order)
    if abs(2 * a - round(2 * a)) > 1e-12:
        raise ParameterError(f"order {a} is neither integer nor half-integer")
    return round(2 * a) / 2.0


@dataclass(frozen=True)
class SeriesEval:
    """A series value with the number of summed terms and a remainder bound.

    ``tail_bound`` bounds the dropped truncation remainder in absolute
    value.  Floating roundoff is not included; see the module note.
    """

    value: complex
    truncation_terms: int
    tail_bound: float


@dataclass(frozen=True)
class LogScaledEval:
    """Scaled evaluation value = mantissa * exp(log_scale), |mantissa| = 1.

    ``log|value| = log_scale`` and ``phase = arg(mantissa)``; usable at
    orders where the plain value over- or underflows.  ``tail_bound`` is
    relative to |value|.
    """

    mantissa: complex
    log_scale: float
    truncation_terms: int
    tail_bound: float

    @property
    def log_abs(self) -> float:
        return self.log_scale


# ---------------------------------------------------------------------------
# scaled arithmetic: value = m * exp(e), e real, phase folded into m


def _renorm(m, e):
    a = np.abs(m)
    nz = a > 0.0
    safe = np.where(nz, a, 1.0)
    with np.errstate(divide="ignore"):
        e = np.where(nz, e + np.log(safe), -np.inf)
    m = m / safe
    m = np.where(nz, m, 0.0 + 0.0j)
    return m, e


def _sadd(m1, e1, m2, e2):
    big = np.maximum(e1, e2)
    ok = np.isfinite(big)
    bigw = np.where(ok, big, 0.0)
    with np.errstate(invalid="ignore"):
        m = m1 * np.exp(np.where(np.isneginf(e1), -np.inf, e1 - bigw)) \
            + m2 * np.exp(np.where(np.isneginf(e2), -np.inf, e2 - bigw))
    m = np.where(ok, m, 0.0 + 0.0j)
    return _renorm(m, np.where(ok, bigw, -np.inf))


def _smul_scalarish(m, e, c):
    """Multiply a scaled value by an ordinary (array of) complex factor c."""
    c = np.asarray(c, dtype=complex)
    return _renorm(m * np.where(np.abs(c) > 0, c / np.maximum(np.abs(c), 1e-300), 0.0),
                   e + np.where(np.abs(c) > 0, np.log(np.maximum(np.abs(c), 1e-300)), -np.inf))


def _signed_lgamma(x: float):
    """(sign, log|Gamma(x)|) for real non-pole x."""
    if x > 0:
        return 1.0, math.lgamma(x)
    if x == int(x):
        raise PoleError(f"Gamma pole at {x}")
    sign = -1.0 if math.ceil(-x) % 2 == 1 else 1.0
    return sign, math.lgamma(x)


# digamma at positive integers, by the recurrence psi(x+1) = psi(x) + 1/x
# run down from an asymptotic seed
_DIGAMMA_SEED_AT = 16
_B_TERMS = (1.0 / 12, -1.0 / 120, 1.0 / 252, -1.0 / 240, 1.0 / 132, -691.0 / 32760)


def _digamma_asymptotic(x: float) -> float:
    s = math.log(x) - 0.5 / x
    x2 = 1.0 / (x * x)
    p = x2
    for b in _B_TERMS:
        s -= b * p
        p *= x2
    return s


class _DigammaTable:
    def __init__(self):
        self._vals = [math.nan]  # 1-based

    def __call__(self, k: int) -> float:
        while len(self._vals) <= k:
            n = len(self._vals)
            if n < _DIGAMMA_SEED_AT:
                top = _DIGAMMA_SEED_AT + 8
                seed = _digamma_asymptotic(float(top))
                vals = [0.0] * (top + 1)
                vals[top] = seed
                for j in range(top - 1, 0, -1):
                    vals[j] = vals[j + 1] - 1.0 / j
                self._vals = [math.nan] + vals[1:]
            else:
                self._vals.append(self._vals[n - 1] + 1.0 / (n - 1))
        return self._vals[k]


_digamma_int = _DigammaTable()


# ---------------------------------------------------------------------------
# core series (vectorised over z)


def _clog_half(z):
    """Principal log(z/2) with -inf at z = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(np.asarray(z, dtype=complex) / 2.0)
    out = np.where(np.asarray(z) == 0, -np.inf + 0.0j, out)
    return out


def _min_abs_shift(alpha: float, k0: int) -> float:
    """min over k >= k0 of |alpha + k| on a unit-spaced family."""
    lo = alpha + k0
    if lo >= 0.5:
        return lo
    # the family crosses zero; half-integer spacing keeps it >= 1/2,
    # and a negative-integer order never reaches this path
    return 0.5


def _j_mantissa(alpha: float, z):
    """h(z) = J_a(z) * Gamma(a+1) / (z/2)^a as (values, abs_tail, terms).

    Requires a not a negative integer.  The ratio test certifies the
    dropped remainder once terms shrink geometrically with ratio <= 1/2.
    """
    z = np.asarray(z, dtype=complex)
    w = (z / 2.0) ** 2
    wmax = float(np.max(np.abs(w))) if w.size else 0.0
    s = np.ones_like(w)
    t = np.ones_like(w)
    m = 0
    while True:
        t = -t * w / ((m + 1) * (alpha + m + 1))
        m += 1
        smax = float(np.max(np.abs(s))) if s.size else 0.0
        tmax = float(np.max(np.abs(t)))
        q = wmax / ((m + 1) * _min_abs_shift(alpha, m + 1))
        if tmax <= _STOP_REL * max(smax, 1e-300) and q <= 0.5:
            tail = np.abs(t) / (1.0 - q)
            return s, tail, m
        s = s + t
        if m > _MAX_TERMS:
            raise ConvergenceError(
                f"J series did not settle after {m} terms (alpha={alpha}, |z|max={2 * math.sqrt(wmax):.3g})"
            )


def _j_scaled_series(alpha: float, z):
    """Scaled J_a(z) for a not a negative integer, via the plain series."""
    z = np.asarray(z, dtype=complex)
    h, tail, terms = _j_mantissa(alpha, z)
    sgn, lg = _signed_lgamma(alpha + 1.0)
    lz = _clog_half(z)
    if alpha == 0.0:
        esc = np.zeros(z.shape)
        ph = np.zeros(z.shape)
    else:
        esc = alpha * lz.real - lg
        ph = alpha * lz.imag
        # z = 0: (z/2)^a is 0 for a > 0, a pole for a < 0
        zero = np.asarray(z) == 0
        if np.any(zero) and alpha < 0:
            raise PoleError("J of negative order has a pole at z = 0")
        esc = np.where(zero, -np.inf, esc)
        ph = np.where(zero, 0.0, ph)
    m = sgn * h * np.exp(1j * ph)
    m, e = _renorm(m, np.where(np.isfinite(esc), esc, -np.inf))
    # tail shares the (z/2)^a / Gamma scale of the mantissa
    with np.errstate(invalid="ignore"):
        rel = np.where(np.abs(h) > 0, tail / np.maximum(np.abs(h), 1e-300), np.inf)
    return m, e, rel, terms


def _j_scaled_recurrence(alpha: float, z):
    """Scaled J_a(z) by backward recurrence from series seeds.

    Used for a >= 0 when |z| is large enough that the plain series loses
    significance.  Seeds are taken at an order above |z|^2/4 where the
    first series term dominates; the downward direction amplifies the
    wanted (minimal) solution, so seed accuracy is preserved.
    """
    z = np.asarray(z, dtype=complex)
    zmax = float(np.max(np.abs(z)))
    top = max(math.ceil(zmax * zmax / 4.0), math.ceil(1.4 * zmax))
    k = max(0, math.ceil(top - alpha)) + 8
    m1, e1, r1, t1 = _j_scaled_series(alpha + k + 1, z)
    m0, e0, r0, t0 = _j_scaled_series(alpha + k, z)
    inv_z = np.where(np.abs(z) > 0, 1.0 / np.where(z == 0, 1.0, z), 0.0)
    nu = alpha + k
    while nu > alpha:
        mm, ee = _smul_scalarish(m0, e0, 2.0 * nu * inv_z)
        m_new, e_new = _sadd(mm, ee, -m1, e1)
        m1, e1 = m0, e0
        m0, e0 = m_new, e_new
        nu -= 1
    rel = 2.0 * (float(np.max(np.where(np.isfinite(r0), r0, 0.0)))
                 + float(np.max(np.where(np.isfinite(r1), r1, 0.0))))
    return m0, e0, np.full(z.shape, rel), t0 + t1


def _j_scaled(alpha: float, z):
    """Scaled J_a(z); dispatches between the plain series and recurrence."""
    z = np.asarray(z, dtype=complex)
    if alpha < 0 and alpha == int(alpha):
        n = int(-alpha)
        m, e, rel, terms = _j_scaled(float(n), z)
        return ((-1.0) ** n) * m, e, rel, terms
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    if alpha >= 0 and zmax > _SERIES_Z_CUT and alpha <= 1.2 * zmax:
        return _j_scaled_recurrence(alpha, z)
    return _j_scaled_series(alpha, z)


def _y_scaled_half(alpha: float, z):
    """Scaled Y_a for half-integer a = n + 1/2 via reflection to J_{-a}."""
    n = int(round(alpha - 0.5))
    m, e, rel, terms = _j_scaled_series(-alpha, z)
    return ((-1.0) ** (n + 1)) * m, e, rel, terms


def _y_scaled_int(n: int, z):
    """Scaled Y_n for integer n >= 0 from the logarithm/digamma series.

    Pieces, each tracked in scaled form:
      (2/pi) J_n(z) log(z/2)
      -(1/pi) sum_{m<n} (n-m-1)!/m! (z/2)^(2m-n)
      -(1/pi) sum_m (-1)^m (z/2)^(2m+n) (psi(m+1)+psi(m+n+1)) / (m! (m+n)!)
    The middle sum is factored against its leading term Gamma(n)(z/2)^(-n).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.asarray(z) == 0):
        raise PoleError("Y has a pole at z = 0")
    w = (z / 2.0) ** 2
    wmax = float(np.max(np.abs(w))) if w.size else 0.0
    lz = _clog_half(z)

    total_m = np.zeros(z.shape, dtype=complex)
    total_e = np.full(z.shape, -np.inf)
    tails_m = np.zeros(z.shape)
    tails_e = np.full(z.shape, -np.inf)
    terms_used = 0

    def add_piece(pm, pe, tail_rel):
        nonlocal total_m, total_e, tails_m, tails_e
        total_m, total_e = _sadd(total_m, total_e, pm, pe)
        tm, te = _sadd(tails_m.astype(complex), tails_e,
                       (np.abs(pm) * tail_rel).astype(complex), pe)
        tails_m, tails_e = np.abs(tm), te

    # log piece
    jm, je, jrel, jterms = _j_scaled(float(n), z)
    terms_used += jterms
    fac = (2.0 / math.pi) * lz
    pm, pe = _smul_scalarish(jm, je, fac)
    add_piece(pm, pe, np.where(np.abs(jrel) < np.inf, jrel, 0.0))

    if n >= 1:
        # middle sum, scaled against S0 = (1/pi) Gamma(n) (z/2)^(-n)
        e_mid = math.lgamma(n) - math.log(math.pi) - n * lz.real
        ph_mid = -n * lz.imag
        u = np.ones(z.shape, dtype=complex)
        s = np.zeros(z.shape, dtype=complex)
        tail_mid = np.zeros(z.shape)
        full = n <= max(40, int(2 * wmax) + 2)
        mstop = n - 1
        m = 0
        while m <= n - 1:
            if not full and m >= 1:
                umax = float(np.max(np.abs(u)))
                smax = float(np.max(np.abs(s)))
                qa = wmax / ((m + 1) * max(n - 1 - m, 1))
                qb = wmax / max(n - 1.0, 1.0)
                if umax <= 1e-20 * max(smax, 1e-300) and qa <= 0.5 and qb <= 0.5:
                    tail_mid = np.abs(u) * 2.0
                    mstop = m - 1
                    break
            s = s + u
            if m < n - 1:
                u = u * w / ((m + 1) * (n - 1 - m))
            m += 1
        terms_used += mstop + 1
        pm = -s * np.exp(1j * ph_mid)
        pm, pe = _renorm(pm, e_mid)
        with np.errstate(invalid="ignore"):
            rel_mid = np.where(np.abs(s) > 0, tail_mid / np.maximum(np.abs(s), 1e-300), 0.0)
        add_piece(pm, pe, rel_mid)

    # digamma sum, scaled against (1/pi) (z/2)^n / Gamma(n+1)
    e_dig = n * lz.real - math.log(math.pi) - math.lgamma(n + 1.0)
    ph_dig = n * lz.imag
    raw = np.ones(z.shape, dtype=complex)  # (-1)^m w^m / (m! (n+1)_m)
    psum = _digamma_int(1) + _digamma_int(n + 1)
    s2 = np.zeros(z.shape, dtype=complex)
    m = 0
    while True:
        s2 = s2 + raw * psum
        raw = -raw * w / ((m + 1) * (m + n + 1))
        m += 1
        psum = _digamma_int(m + 1) + _digamma_int(m + n + 1)
        envelope = 2.0 + 2.0 * math.log(m + n + 2.0)
        env_q = 1.5 * wmax / ((m + 1) * (m + n + 1))
        if float(np.max(np.abs(raw))) * envelope \
                <= _STOP_REL * max(float(np.max(np.abs(s2))), 1e-300) and env_q <= 0.5:
            tail_dig = 2.0 * np.abs(raw) * envelope
            break
        if m > _MAX_TERMS:
            raise ConvergenceError(f"Y digamma series did not settle (n={n})")
    terms_used += m
    pm = -s2 * np.exp(1j * ph_dig)
    pm, pe = _renorm(pm, e_dig)
    with np.errstate(invalid="ignore"):
        rel_dig = np.where(np.abs(s2) > 0, tail_dig / np.maximum(np.abs(s2), 1e-300), 0.0)
    add_piece(pm, pe, rel_dig)

    with np.errstate(invalid="ignore", over="ignore"):
        rel_total = np.where(
            np.isfinite(total_e),
            np.abs(tails_m) * np.exp(np.minimum(tails_e - total_e, 700.0)),
            0.0,
        )
    return total_m, total_e, rel_total, terms_used


def _y_scaled(alpha: float, z):
    z = np.asarray(z, dtype=complex)
    if alpha >= 0:
        if alpha == int(alpha):
            return _y_scaled_int(int(alpha), z)
        return _y_scaled_half(alpha, z)
    if alpha == int(alpha):
        n = int(-alpha)
        m, e, rel, t = _y_scaled_int(n, z)
        return ((-1.0) ** n) * m, e, rel, t
    # Y_{-(n+1/2)} = (-1)^n J_{n+1/2}
    n = int(round(-alpha - 0.5))
    m, e, rel, t = _j_scaled(-alpha, z)
    return ((-1.0) ** n) * m, e, rel, t


def _deriv_scaled(kind: str, alpha: float, z):
    """Scaled F' = F_{a-1} - (a/z) F_a for F in {J, Y}."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.asarray(z) == 0):
        raise PoleError("derivative recurrence needs z != 0")
    fn = _j_scaled if kind == "J" else _y_scaled
    m1, e1, r1, t1 = fn(alpha - 1.0, z)
    m0, e0, r0, t0 = fn(alpha, z)
    ms, es = _smul_scalarish(m0, e0, -alpha / z)
    m, e = _sadd(m1, e1, ms, es)
    # propagate absolute tails onto the result scale
    with np.errstate(over="ignore", invalid="ignore"):
        abs1 = r1 * np.exp(np.minimum(e1 - e, 700.0))
        abs0 = r0 * np.abs(alpha / np.where(z == 0, 1, z)) * np.exp(np.minimum(e0 - e, 700.0))
    rel = np.where(np.isfinite(e), np.nan_to_num(abs1) + np.nan_to_num(abs0), 0.0)
    return m, e, rel, t0 + t1


# ---------------------------------------------------------------------------
# public evaluation API


def _unscale(m, e, rel, terms) -> SeriesEval:
    m = complex(np.asarray(m).reshape(()))
    e = float(np.asarray(e).reshape(()))
    rel = float(np.asarray(rel).reshape(()))
    if e == -np.inf:
        return SeriesEval(0.0 + 0.0j, terms, 0.0)
    if abs(e) > _LOG_HUGE:
        raise ScaleOverflowError(
            f"value magnitude exp({e:.1f}) leaves the double range; use the *_log companion"
        )
    v = m * math.exp(e)
    return SeriesEval(v, terms, rel * abs(v))


def _to_log_eval(m, e, rel, terms) -> LogScaledEval:
    return LogScaledEval(
        complex(np.asarray(m).reshape(())),
        float(np.asarray(e).reshape(())),
        terms,
        float(np.asarray(rel).reshape(())),
    )


def bessel_j(order, z) -> SeriesEval:
    """J_a(z) for integer or half-integer a, complex z, with a tail bound.

    Negative half-integer orders use the series directly; negative integer
    orders route through J_{-n} = (-1)^n J_n.  For non-integer a and z on
    the negative real axis the principal branch of (z/2)^a applies.
    """
    a = _as_alpha(order)
    return _unscale(*_j_scaled(a, complex(z)))


def bessel_j_log(order, z) -> LogScaledEval:
    a = _as_alpha(order)
    return _to_log_eval(*_j_scaled(a, complex(z)))


def bessel_y(order, z) -> SeriesEval:
    """Y_a(z) for integer or half-integer a, complex z != 0."""
    a = _as_alpha(order)
    if complex(z) == 0:
        raise PoleError("Y has a pole at z = 0")
    return _unscale(*_y_scaled(a, complex(z)))


def bessel_y_log(order, z) -> LogScaledEval:
    a = _as_alpha(order)
    if complex(z) == 0:
        raise PoleError("Y has a pole at z = 0")
    return _to_log_eval(*_y_scaled(a, complex(z)))


def bessel_deriv(kind: str, order, z) -> SeriesEval:
    """d/dz of J or Y at order a, via F' = F_{a-1} - (a/z) F_a.

    At z = 0 only the J limits exist: 0 for a = 0 or a > 1, 1/2 for a = 1.
    """
    kind = str(kind).upper()
    if kind not in ("J", "Y"):
        raise ParameterError("kind must be 'J' or 'Y'")
    a = _as_alpha(order)
    zc = complex(z)
    if zc == 0:
        if kind == "Y":
            raise PoleError("Y' has a pole at z = 0")
        if a == 0.0 or a > 1.0:
            return SeriesEval(0.0 + 0.0j, 1, 0.0)
        if a == 1.0:
            return SeriesEval(0.5 + 0.0j, 1, 0.0)
        raise PoleError(f"J' of order {a} has no finite limit at z = 0")
    return _unscale(*_deriv_scaled(kind, a, zc))


def bessel_deriv_log(kind: str, order, z) -> LogScaledEval:
    kind = str(kind).upper()
    if kind not in ("J", "Y"):
        raise ParameterError("kind must be 'J' or 'Y'")
    a = _as_alpha(order)
    zc = complex(z)
    if zc == 0:
        raise PoleError("log-scaled derivative needs z != 0")
    return _to_log_eval(*_deriv_scaled(kind, a, zc))


# ---------------------------------------------------------------------------
# leading-term deviation and the certified large-order envelope


def leading_term_deviation_bound(order, z) -> float:
    """Bound on |J_a(z) Gamma(a+1) / (z/2)^a - 1|.

    Classical estimate exp((|z|^2/4) / mshift) - 1 where mshift is the
    least of |a+1|, |a+2|, ...  Meaningful for a >= 0, where mshift = a+1.
    """
    a = _as_alpha(order)
    mshift = _min_abs_shift(a, 1)
    if mshift == 0.0:
        return math.inf
    x = (abs(complex(z)) ** 2 / 4.0) / mshift
    return math.expm1(x)


def envelope_order_threshold(C: float, d: int = 2) -> int:
    """Smallest N making the large-order J/Y envelope certifiable on |z| <= C.

    Returns the first integer N > 3 with
        exp((C^2/4)/(N+1)) - 1 <= 1/2   and
        3 pi max(1, (C/2)^(2N+1))/Gamma(N) + C^2/(2N - C^2)
            + (C/2)^(2N) exp(C^2/4)/Gamma(N) <= 1/2.
    Every order a = n + (d-2)/2 with n >= N+1 then satisfies the two-sided
    envelopes checked by verify_envelope_bounds.  The conditions do not
    involve d; the parameter is accepted for interface symmetry.
    """
    if C <= 0:
        raise ParameterError("C must be positive")
    if d < 2:
        raise ParameterError("d must be >= 2")
    logc2 = math.log(C / 2.0)
    N = 4
    while N < 10**6:
        cond2 = (C * C / 4.0) / (N + 1) <= math.log(1.5)
        cond3 = False
        if 2 * N > C * C:
            a1 = math.log(3 * math.pi) + max(0.0, (2 * N + 1) * logc2) - math.lgamma(N)
            a3 = 2 * N * logc2 + C * C / 4.0 - math.lgamma(N)
            t1 = math.exp(a1) if a1 < _LOG_HUGE else math.inf
            t3 = math.exp(a3) if a3 < _LOG_HUGE else math.inf
            t2 = C * C / (2 * N - C * C)
            # compare small terms against the remaining headroom so they are
            # not absorbed by rounding when t2 sits exactly at 1/2
            cond3 = t2 <= 0.5 and t1 + t3 <= 0.5 - t2
        if cond2 and cond3:
            return N
        N += 1
    raise ParameterError(f"no envelope threshold found below 10^6 for C={C}")


@dataclass(frozen=True)
class EnvelopeReport:
    """Result of the four envelope checks at one (n, d) over a z set.

    Margins are in natural-log units: the distance from the measured
    log-ratio to the nearest failing boundary, minimised over the z set,
    with the series tail already subtracted.  Nonnegative margin = pass.
    """

    n: int
    d: int
    j_ok: bool
    j_margin: float
    j_deriv_ok: bool
    j_deriv_margin: float
    y_ok: bool
    y_margin: float
    y_deriv_ok: bool
    y_deriv_margin: float

    @property
    def all_ok(self) -> bool:
        return self.j_ok and self.j_deriv_ok and self.y_ok and self.y_deriv_ok


def _log_ratio(m, e, ref_log):
    with np.errstate(invalid="ignore"):
        return np.where(np.isfinite(e), e - ref_log, -np.inf)


def verify_envelope_bounds(n: int, d: int, z) -> EnvelopeReport:
    """Check the four large-order envelopes at order a = n + (d-2)/2.

    On the scale u = (|z|/2)^a / Gamma(a+1) and its Y counterpart
    Gamma(a)(|z|/2)^(-a) / pi:
        1/2 <= |J_a|/u <= 3/2        |J_a'| <= 3 (|z|/2)^(a-1)/Gamma(a)
        1/2 <= pi |Y_a| (|z|/2)^a / Gamma(a) <= 3/2
        |Y_a'| <= 3 Gamma(a+1) (|z|/2)^(-a-1) / pi
    Accepts a scalar z or an array; margins are minimised over the set.
    All comparisons run in log scale, so huge orders are fine.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    a = n + (d - 2) / 2.0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    absz = np.abs(z)
    with np.errstate(divide="ignore"):
        lhalf = np.where(absz > 0, np.log(np.maximum(absz, 1e-300) / 2.0), -np.inf)
    lg_a1 = math.lgamma(a + 1.0)
    lg_a = math.lgamma(a)
    zero = absz == 0

    # J against u = (z/2)^a / Gamma(a+1): the mantissa series is the ratio
    mj, ej, rj, _ = _j_scaled(a, z)
    ref_j = np.where(zero, -np.inf, a * lhalf - lg_a1)
    rat_j = np.where(zero, 0.0, _log_ratio(mj, ej, ref_j))
    tail_j = np.where(np.isfinite(rj), rj, 0.0)
    mar_j = np.minimum(rat_j - math.log(0.5), math.log(1.5) - rat_j) - tail_j

    # J' against 3 (z/2)^(a-1) / Gamma(a)
    mjp, ejp, rjp, _ = _deriv_scaled("J", a, np.where(zero, 1.0, z))
    ref_jp = (a - 1.0) * lhalf - lg_a
    rat_jp = np.where(zero, math.log(0.5), _log_ratio(mjp, ejp, ref_jp))
    tail_jp = np.where(np.isfinite(rjp), rjp, 0.0)
    mar_jp = math.log(3.0) - rat_jp - np.where(zero, 0.0, tail_jp)

    # Y against Gamma(a) (z/2)^(-a) / pi
    my, ey, ry, _ = _y_scaled(a, np.where(zero, 1.0, z))
    ref_y = -a * lhalf + lg_a - math.log(math.pi)
    rat_y = np.where(zero, 0.0, _log_ratio(my, ey, ref_y))
    tail_y = np.where(np.isfinite(ry) & ~zero, ry, 0.0)
    mar_y = np.minimum(rat_y - math.log(0.5), math.log(1.5) - rat_y) - tail_y

    # Y' against 3 Gamma(a+1) (z/2)^(-a-1) / pi
    myp, eyp, ryp, _ = _deriv_scaled("Y", a, np.where(zero, 1.0, z))
    ref_yp = -(a + 1.0) * lhalf + lg_a1 - math.log(math.pi)
    rat_yp = np.where(zero, math.log(0.5), _log_ratio(myp, eyp, ref_yp))
    tail_yp = np.where(np.isfinite(ryp) & ~zero, ryp, 0.0)
    mar_yp = math.log(3.0) - rat_yp - np.where(zero, 0.0, tail_yp)

    def_min = lambda arr: float(np.min(arr))
    jm, jpm, ym, ypm = def_min(mar_j), def_min(mar_jp), def_min(mar_y), def_min(mar_yp)
    return EnvelopeReport(
        n=n, d=d,
        j_ok=jm >= 0, j_margin=jm,
        j_deriv_ok=jpm >= 0, j_deriv_margin=jpm,
        y_ok=ym >= 0, y_margin=ym,
        y_deriv_ok=ypm >= 0, y_deriv_margin=ypm,
    )


# ---------------------------------------------------------------------------
# real-axis zeros


def _j_real(alpha: float, x: float) -> float:
    """Sign-faithful J_a(x) for real x > 0, tolerating extreme scales."""
    m, e, _, _ = _j_scaled(alpha, complex(x))
    m = complex(np.asarray(m).reshape(()))
    e = float(np.asarray(e).reshape(()))
    if e == -np.inf:
        return 0.0
    # zeros only matter up to a positive factor; clip so sign never underflows
    mag = math.exp(min(max(e, -600.0), 0.0))
    return m.real * mag


def bessel_j_zeros(order, count: int, x_max: float | None = None) -> np.ndarray:
    """First ``count`` positive zeros of J_a, a >= 0, to ~1e-12.

    Brackets come from a sign scan with step well below the minimal zero
    spacing (> 3.1 for a >= 0), then bisection to 1e-12 and one final
    secant step safeguarded to stay inside the bracket.  If ``x_max`` is
    given the scan stops early once past it.
    """
    a = _as_alpha(order)
    if a < 0:
        raise ParameterError("zeros are provided for orders a >= 0 only")
    if count < 0:
        raise ParameterError("count must be >= 0")
    zeros = []
    x = max(math.sqrt(a * (a + 2.0)), 0.35)
    fx = _j_real(a, x)
    step = 0.75
    while len(zeros) < count:
        if x_max is not None and x > x_max + step:
            break
        x2 = x + step
        fx2 = _j_real(a, x2)
        if fx == 0.0:
            zeros.append(x)
            x, fx = x2, fx2
            continue
        if fx * fx2 < 0:
            lo, hi, flo = x, x2, fx
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                fm = _j_real(a, mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            root = 0.5 * (lo + hi)
            f_lo, f_hi = _j_real(a, lo), _j_real(a, hi)
            if f_hi != f_lo:
                sec = lo - f_lo * (hi - lo) / (f_hi - f_lo)
                if lo <= sec <= hi and math.isfinite(sec):
                    root = sec
            zeros.append(root)
        x, fx = x2, fx2
    return np.array(zeros)
