"""Continued fractions, Ford horoballs and excursion heights in the modular picture.

Excursion heights use the height-1 normalisation: a geodesic with endpoints
``-β`` and ``α`` reaches Euclidean height ``(α + β) / 2`` and so penetrates the
horoball ``Horoball(INFINITY, 1)`` with height ``2 log((α + β) / 2)``.
"""
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from .entities import INFINITY, CFExpansion, FordFamily, Geodesic, Horoball
from .enums import Ring
from .exceptions import DomainError, FiniteExpansionError, PreconditionError, UnsupportedError
from .models import geodesic_between
from .penetration import check_family

logger = structlog.get_logger()

CF_Q_LIMIT = 10 ** 7
"""Convergent denominators beyond this are not resolved by a double."""
CF_DIGIT_BLOWUP = 10 ** 6
UNFOLD_DIGITS = 60
GAUSSIAN_SOFT_CAP = 0.58
DEFAULT_WINDOWS = {
    Ring.RATIONAL: (complex(-1, 0), complex(2, 0)),
    Ring.GAUSSIAN: (complex(0, 0), complex(1, 1)),
}

CFLike = Union[CFExpansion, float, str]


def cf_expand(x: float, n: int) -> CFExpansion:
    """First ``n`` partial quotients of ``x``, fewer if the double runs out of precision.

    The Euclidean algorithm runs exactly on the binary value of ``x``. A zero
    remainder or a partial quotient above ``CF_DIGIT_BLOWUP`` while the
    denominators are still resolved means ``x`` is rational.
    """
    r = Fraction(x)
    a0 = math.floor(r)
    r -= a0
    digits: List[int] = []
    q_prev, q = 0, 1
    while len(digits) < n:
        if r == 0:
            raise FiniteExpansionError([a0] + digits, "{!r} is rational".format(x))
        r = 1 / r
        a = math.floor(r)
        if a > CF_DIGIT_BLOWUP:
            raise FiniteExpansionError([a0] + digits, "{!r} is rational at machine scale".format(x))
        q_prev, q = q, a * q + q_prev
        if q > CF_Q_LIMIT:
            break
        digits.append(a)
        r -= a
    return CFExpansion(a0, digits)


def _tail_value(digits: Sequence[int]) -> float:
    """[d0; d1, d2, ...] evaluated from the back."""
    v = float(digits[-1])
    for a in reversed(digits[:-1]):
        v = a + 1.0 / v
    return v


def cf_value(e: CFExpansion) -> float:
    if e.is_periodic:
        tail = e.unfold(len(e.digits) + UNFOLD_DIGITS)
    else:
        tail = list(e.digits)
    if not tail:
        return float(e.a0)
    return e.a0 + 1.0 / _tail_value(tail)


def convergents(e: CFExpansion, n: int) -> List[Tuple[int, int]]:
    """The convergents p_k / q_k for k = 0 .. n - 1."""
    out = []
    p_prev, q_prev = 1, 0
    p, q = e.a0, 1
    out.append((p, q))
    for a in e.unfold(n - 1):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out[:n]


def cf_sqrt(d: int) -> CFExpansion:
    """Exact periodic expansion of √d."""
    a0 = math.isqrt(d)
    if a0 * a0 == d:
        raise FiniteExpansionError([a0], "{} is a perfect square".format(d))
    m, den, a = 0, 1, a0
    period = []
    while a != 2 * a0:
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        period.append(a)
    return CFExpansion(a0, (), period)


def parse_cf(text: str) -> CFExpansion:
    """Parse ``cf:a0;d1,d2,(p1,p2)``, ``cf:a0,d1,...,dk,…``, ``sqrt:D`` or a float.

    Parentheses mark the period. A trailing ellipsis repeats the last digit.
    """
    text = text.strip()
    if text.startswith("sqrt:"):
        return cf_sqrt(int(text[5:]))
    if not text.startswith("cf:"):
        return cf_expand(float(text), UNFOLD_DIGITS)
    body = text[3:].replace(";", ",").replace("…", "...")
    repeat_last = body.endswith("...")
    body = body.rstrip(".").rstrip(",")
    period: Tuple[int, ...] = ()
    if "(" in body:
        head, _, rest = body.partition("(")
        period = tuple(int(v) for v in rest.rstrip(")").split(",") if v.strip())
        body = head.rstrip(",")
    values = [int(v) for v in body.split(",") if v.strip()]
    if not values:
        raise ValueError("empty continued fraction {!r}".format(text))
    a0, digits = values[0], values[1:]
    if repeat_last and not period:
        if not digits:
            raise ValueError("nothing to repeat in {!r}".format(text))
        period = (digits.pop(),)
    return CFExpansion(a0, digits, period)


def _as_cf(x: CFLike, n: int) -> CFExpansion:
    if isinstance(x, CFExpansion):
        return x
    if isinstance(x, str):
        return parse_cf(x)
    return cf_expand(x, n)


def _alpha_beta(e: CFExpansion, n: int) -> Tuple[float, float]:
    """α_{n+1} = [a_{n+1}; a_{n+2}, ...] and β_{n+1} = [0; a_n, ..., a_1]."""
    ahead = [e.digit(k) for k in range(n + 1, n + 2 + UNFOLD_DIGITS)] if e.is_periodic else list(e.digits[n:])
    if not ahead:
        raise IndexError(n)
    behind = [e.digit(k) for k in range(n, 0, -1)]
    alpha = _tail_value(ahead)
    beta = 1.0 / _tail_value(behind) if behind else 0.0
    return alpha, beta


def approx_constant(e: CFExpansion) -> float:
    """c(x) = liminf q^2 |x - p/q| from one period of α + β deep in the expansion."""
    if not e.is_periodic:
        raise UnsupportedError("approximation constant needs a periodic expansion")
    start = len(e.digits) + UNFOLD_DIGITS
    best = max(sum(_alpha_beta(e, start + j)) for j in range(len(e.period)))
    return 1.0 / best


def approx_constant_bruteforce(x: float, q_lo: int = 1000, q_hi: int = 10 ** 5) -> float:
    """min q^2 |x - p/q| over the window q_lo <= q <= q_hi."""
    q = np.arange(q_lo, q_hi + 1, dtype=np.float64)
    qx = q * x
    return float(np.min(q * np.abs(qx - np.round(qx))))


def _gaussian_grid(qmax: int) -> np.ndarray:
    a, b = np.meshgrid(np.arange(1, qmax + 1), np.arange(0, qmax + 1), indexing="ij")
    q = (a + 1j * b).ravel()
    return q[np.abs(q) <= qmax]


def complex_approx_constant(x: complex, qmax: int, reach: int = 1) -> float:
    """Running minimum of |q|^2 |x - p/q| over Gaussian q with |q| <= qmax.

    ``p`` ranges over the Gaussian integers within ``reach`` of round(qx) in
    both coordinates; unit multiples of q are skipped.
    """
    q = _gaussian_grid(qmax)
    qx = q * x
    centre = np.round(qx.real) + 1j * np.round(qx.imag)
    best = np.inf
    for dx in range(-reach, reach + 1):
        for dy in range(-reach, reach + 1):
            p = centre + complex(dx, dy)
            best = min(best, float(np.min(np.abs(q) * np.abs(qx - p))))
    if best < 1e-9:
        raise DomainError("{!r} is a Gaussian rational at denominators up to {}".format(x, qmax))
    if best > GAUSSIAN_SOFT_CAP:
        logger.warning("gaussian_constant_outside_band", x=x, qmax=qmax, estimate=best)
    return best


def gauss_divmod(a: complex, b: complex) -> Tuple[complex, complex]:
    z = a / b
    q = complex(round(z.real), round(z.imag))
    return q, a - q * b


def gauss_gcd(a: complex, b: complex) -> complex:
    while b != 0:
        _, r = gauss_divmod(a, b)
        a, b = b, r
    return a


def _coprime(p: complex, q: complex) -> bool:
    g = gauss_gcd(p, q)
    return abs(abs(g) - 1) < 1e-9


def _rational_points(bound: int, window: Tuple[complex, complex]) -> List[Tuple[complex, complex]]:
    lo, hi = window[0].real, window[1].real
    out = []
    for q in range(1, bound + 1):
        for p in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            if math.gcd(p, q) == 1:
                out.append((complex(p), complex(q)))
    return out


def _gaussian_points(bound: int, window: Tuple[complex, complex]) -> List[Tuple[complex, complex]]:
    lo, hi = window
    corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
    out = []
    for q in _gaussian_grid(bound):
        q = complex(q)
        image = [q * c for c in corners]
        xs = [z.real for z in image]
        ys = [z.imag for z in image]
        for pr in range(math.floor(min(xs)), math.ceil(max(xs)) + 1):
            for pi in range(math.floor(min(ys)), math.ceil(max(ys)) + 1):
                p = complex(pr, pi)
                z = p / q
                inside = lo.real - 1e-12 <= z.real <= hi.real + 1e-12 and lo.imag - 1e-12 <= z.imag <= hi.imag + 1e-12
                if inside and _coprime(p, q):
                    out.append((p, q))
    return out


def ford_bodies(bound: int, ring: Ring, window: Optional[Tuple[complex, complex]] = None) -> List[Horoball]:
    """Horoball(∞, 1) followed by the horoballs at p/q with diameter 1/|q|^2 inside ``window``."""
    if bound < 1:
        raise PreconditionError("bound", bound, "the denominator bound must be at least 1")
    window = window or DEFAULT_WINDOWS[ring]
    points = _rational_points(bound, window) if ring is Ring.RATIONAL else _gaussian_points(bound, window)
    bodies = [Horoball(INFINITY, 1.0)]
    for p, q in points:
        bodies.append(Horoball(p / q, 1.0 / abs(q) ** 2))
    return bodies


def ford_family(bound: int, ring: Union[Ring, str] = Ring.RATIONAL, window=None) -> FordFamily:
    ring = Ring(ring)
    window = window or DEFAULT_WINDOWS[ring]
    fam = FordFamily(bound=bound, ring=ring, bodies=ford_bodies(bound, ring, window), window=window)
    gap = check_family(fam.as_obstacles())
    logger.info("ford_family", ring=ring.value, bound=bound, count=fam.count, min_gap=gap)
    return fam


def excursion_magnitudes(x: CFLike, horizon: int) -> List[float]:
    """α_{n+1} + β_{n+1} for n = 1 .. horizon."""
    e = _as_cf(x, horizon + UNFOLD_DIGITS)
    out = []
    for n in range(1, horizon + 1):
        try:
            alpha, beta = _alpha_beta(e, n)
        except IndexError:
            logger.warning("excursions_truncated", available=n - 1, horizon=horizon)
            break
        out.append(alpha + beta)
    return out


def excursion_height(magnitude: float) -> float:
    return 2 * max(0.0, math.log(magnitude / 2))


def excursions(x: CFLike, horizon: int) -> List[float]:
    """Penetration heights of the successive excursions into Horoball(∞, 1)."""
    return [excursion_height(m) for m in excursion_magnitudes(x, horizon)]


def excursion_geodesic(x: CFLike, n: int) -> Geodesic:
    """The geodesic from -β_{n+1} to α_{n+1} realising the n-th excursion."""
    alpha, beta = _alpha_beta(_as_cf(x, n + UNFOLD_DIGITS), n)
    return geodesic_between(complex(-beta), complex(alpha))


def limsup_estimate(values: Sequence[float]) -> float:
    """Maximum over the tail half of a finite window."""
    if not values:
        raise PreconditionError("values", values, "empty window")
    return max(values[len(values) // 2:])


def spectrum_map(c: float) -> float:
    """t -> -2 log t, from approximation constants to heights."""
    if c <= 0:
        raise PreconditionError("c", c, "approximation constants are positive")
    return -2 * math.log(c)


def lagrange_from_height(h: float) -> float:
    return math.exp(-h / 2)
