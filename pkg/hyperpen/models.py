"""Closed-form geometry of the upper half-plane and upper half-space.

Boundary points are complex numbers or ``INFINITY``; the upper half-plane is
the slice where every coordinate is real. Isometries are ``Moebius`` matrices
acting by Poincaré extension.
"""
import cmath
import math
from typing import Optional, Tuple, Union

import numpy as np

from .entities import (
    INFINITY,
    Ball,
    Boundary,
    ExtReal,
    Geodesic,
    Horoball,
    Moebius,
    Point,
    Tube,
    Unbounded,
)
from .exceptions import DegenerateGeodesicError, DomainError, ProjectionUndefinedError

ORIGIN = Point(0, 1)
ANCHOR_TOL = 1e-7


def same_boundary(x: Boundary, y: Boundary, tol: float = 1e-12) -> bool:
    if x is INFINITY or y is INFINITY:
        return x is y
    return abs(x - y) <= tol * (1 + abs(x) + abs(y))


def moebius_compose(m: Moebius, n: Moebius) -> Moebius:
    """The map ``m ∘ n``."""
    return Moebius(
        m.a * n.a + m.b * n.c,
        m.a * n.b + m.b * n.d,
        m.c * n.a + m.d * n.c,
        m.c * n.b + m.d * n.d,
    )


def moebius_inverse(m: Moebius) -> Moebius:
    return Moebius(m.d, -m.b, -m.c, m.a)


def apply_point(m: Moebius, p: Point) -> Point:
    z, h = p.base, p.height
    w = m.c * z + m.d
    den = abs(w) ** 2 + abs(m.c) ** 2 * h * h
    base = ((m.a * z + m.b) * w.conjugate() + m.a * m.c.conjugate() * h * h) / den
    return Point(base, h / den)


def apply_boundary(m: Moebius, x: Boundary) -> Boundary:
    if x is INFINITY:
        return INFINITY if m.c == 0 else m.a / m.c
    w = m.c * x + m.d
    if w == 0:
        return INFINITY
    return (m.a * x + m.b) / w


def apply_horoball(m: Moebius, hb: Horoball) -> Horoball:
    center = apply_boundary(m, hb.center)
    if hb.center is INFINITY:
        on_sphere = Point(0, hb.size)
    else:
        on_sphere = Point(hb.center, hb.size)
    q = apply_point(m, on_sphere)
    if center is INFINITY:
        return Horoball(INFINITY, q.height)
    return Horoball(center, (abs(q.base - center) ** 2 + q.height ** 2) / q.height)


def apply_geodesic(m: Moebius, g: Geodesic) -> Geodesic:
    return Geodesic(
        apply_boundary(m, g.xi_minus),
        apply_boundary(m, g.xi_plus),
        apply_point(m, g.anchor),
        is_ray=g.is_ray,
    )


def moebius_apply(m: Moebius, x):
    """Act on a point, boundary point, geodesic or body."""
    if isinstance(x, Point):
        return apply_point(m, x)
    if isinstance(x, Geodesic):
        return apply_geodesic(m, x)
    if isinstance(x, Horoball):
        return apply_horoball(m, x)
    if isinstance(x, Ball):
        return Ball(apply_point(m, x.center), x.radius)
    if isinstance(x, Tube):
        return Tube(apply_geodesic(m, x.core), x.radius)
    return apply_boundary(m, x)


def dist(p: Point, q: Point) -> float:
    chord = math.sqrt(abs(p.base - q.base) ** 2 + (p.height - q.height) ** 2)
    return 2 * math.asinh(chord / (2 * math.sqrt(p.height * q.height)))


def busemann(xi: Boundary, x: Point, y: Point) -> float:
    """β_ξ(x, y), the signed amount by which y is closer to ξ than x."""
    if xi is INFINITY:
        return math.log(y.height / x.height)
    nx = abs(x.base - xi) ** 2 + x.height ** 2
    ny = abs(y.base - xi) ** 2 + y.height ** 2
    return math.log(y.height * nx / (x.height * ny))


def basepoint_busemann(xi: Point, x: Point, y: Point) -> float:
    return dist(x, xi) - dist(y, xi)


def frame_to_axis(u: Boundary, v: Boundary) -> Moebius:
    """A map sending u to 0 and v to infinity."""
    if same_boundary(u, v):
        raise DegenerateGeodesicError("geodesic endpoints coincide: {!r}".format(u))
    if u is INFINITY:
        return Moebius(0, -1, 1, -v)
    if v is INFINITY:
        return Moebius(1, -u, 0, 1)
    s = cmath.sqrt(u - v)
    return Moebius(1 / s, -u / s, 1 / s, -v / s)


def translation_to(p: Point) -> Moebius:
    """The map (z, h) -> (p.base + p.height z, p.height h), taking (0, 1) to p."""
    r = math.sqrt(p.height)
    return Moebius(r, p.base / r, 0, 1 / r)


def _dilation(lam: float) -> Moebius:
    r = math.sqrt(lam)
    return Moebius(r, 0, 0, 1 / r)


def normal_frame(g: Geodesic) -> Moebius:
    """The isometry putting ``g`` on the vertical axis with its anchor at (0, 1)."""
    f = frame_to_axis(g.xi_minus, g.xi_plus)
    a = apply_point(f, g.anchor)
    return moebius_compose(_dilation(1 / a.height), f)


def geodesic_between(
    a: Boundary, b: Boundary, anchor: Optional[Point] = None, is_ray: bool = False
) -> Geodesic:
    f = frame_to_axis(a, b)
    if anchor is None:
        anchor = apply_point(moebius_inverse(f), ORIGIN)
    else:
        q = apply_point(f, anchor)
        if abs(q.base) > ANCHOR_TOL * q.height:
            raise DomainError("anchor {!r} is not on the geodesic".format(anchor))
    return Geodesic(a, b, anchor, is_ray=is_ray)


def point_at(g: Geodesic, t: float) -> Point:
    return apply_point(moebius_inverse(normal_frame(g)), Point(0, math.exp(t)))


def time_of(g: Geodesic, p: Point) -> float:
    """Time parameter of the projection of ``p`` onto ``g``."""
    q = apply_point(normal_frame(g), p)
    return 0.5 * math.log(abs(q.base) ** 2 + q.height ** 2)


def reanchor(g: Geodesic, t: float, is_ray: Optional[bool] = None) -> Geodesic:
    """The same line with time ``t`` moved to 0."""
    return Geodesic(
        g.xi_minus, g.xi_plus, point_at(g, t), is_ray=g.is_ray if is_ray is None else is_ray
    )


def reverse(g: Geodesic) -> Geodesic:
    return Geodesic(g.xi_plus, g.xi_minus, g.anchor)


def ray_from(start: Union[Point, Boundary], endpoint: Boundary) -> Geodesic:
    """Geodesic from ``start`` to ``endpoint``; a ray when ``start`` is interior."""
    if not isinstance(start, Point):
        return geodesic_between(start, endpoint)
    m = translation_to(start)
    w = apply_boundary(moebius_inverse(m), endpoint)
    if w is INFINITY:
        other: Boundary = 0j
    elif w == 0:
        other = INFINITY
    else:
        other = -w / abs(w) ** 2
    return Geodesic(apply_boundary(m, other), endpoint, start, is_ray=True)


def geodesic_through(p: Point, q: Point) -> Geodesic:
    """The line through p and q, oriented from p to q, with p at time 0."""
    m = translation_to(p)
    local = apply_point(moebius_inverse(m), q)
    z, h = local.base, local.height
    r = abs(z)
    if r <= 1e-15 * (1 + h):
        if abs(h - 1) <= 1e-15:
            raise DegenerateGeodesicError("points coincide")
        back: Boundary
        fwd: Boundary
        back, fwd = (0j, INFINITY) if h > 1 else (INFINITY, 0j)
    else:
        u = z / r
        tau = (r * r + h * h - 1) / (2 * r)
        big = math.hypot(tau, 1.0)
        # stable form of tau - big
        small = -1 / (tau + big) if tau >= 0 else tau - big
        if tau < 0:
            fwd_r = 1 / (big - tau)
        else:
            fwd_r = tau + big
        back, fwd = small * u, fwd_r * u
    return Geodesic(apply_boundary(m, back), apply_boundary(m, fwd), p)


def dist_to_geodesic(p: Point, g: Geodesic) -> float:
    q = apply_point(normal_frame(g), p)
    return math.asinh(abs(q.base) / q.height)


def dist_to_ray(p: Point, g: Geodesic) -> float:
    """Distance to the part of ``g`` with nonnegative time when it is a ray."""
    q = apply_point(normal_frame(g), p)
    if not g.is_ray or abs(q.base) ** 2 + q.height ** 2 >= 1:
        return math.asinh(abs(q.base) / q.height)
    return dist(q, ORIGIN)


def project_to_geodesic(p: Union[Point, Boundary], g: Geodesic) -> Point:
    f = normal_frame(g)
    back = moebius_inverse(f)
    if isinstance(p, Point):
        q = apply_point(f, p)
        return apply_point(back, Point(0, math.hypot(abs(q.base), q.height)))
    if same_boundary(p, g.xi_minus) or same_boundary(p, g.xi_plus):
        raise ProjectionUndefinedError("cannot project an endpoint of the geodesic")
    w = apply_boundary(f, p)
    return apply_point(back, Point(0, abs(w)))


def project_to_segment(p: Union[Point, Boundary], g: Geodesic, t_max: Optional[float]) -> Point:
    """Projection onto ``g`` restricted to times in [0, t_max] (t_max None: a ray)."""
    proj = project_to_geodesic(p, g)
    t = time_of(g, proj)
    if t < 0:
        t = 0.0
    elif t_max is not None and t > t_max:
        t = t_max
    else:
        return proj
    return point_at(g, t)


def crossratio(a: Boundary, b: Boundary, c: Boundary, d: Boundary) -> ExtReal:
    """[a, b, c, d] = log(|a-c||b-d| / (|c-b||d-a|)), factors with infinity cancelled."""
    if same_boundary(a, b, 0.0) or same_boundary(c, d, 0.0):
        raise DomainError("crossratio needs a != b and c != d")
    if same_boundary(a, c, 0.0) or same_boundary(b, d, 0.0):
        return Unbounded.NEG
    if same_boundary(c, b, 0.0) or same_boundary(d, a, 0.0):
        return Unbounded.POS

    def gap(x: Boundary, y: Boundary) -> float:
        if x is INFINITY or y is INFINITY:
            return 1.0
        return abs(x - y)

    return math.log(gap(a, c) * gap(b, d) / (gap(c, b) * gap(d, a)))


def hamenstadt_dist(a: Boundary, b: Boundary) -> float:
    """Hamenstädt distance seen from infinity, normalised on the horosphere at height 1."""
    if a is INFINITY or b is INFINITY:
        raise DomainError("Hamenstädt distance from infinity needs finite points")
    return abs(a - b)


def _direction(x0: Point, a: Boundary) -> np.ndarray:
    w = apply_boundary(moebius_inverse(translation_to(x0)), a)
    if w is INFINITY:
        return np.array([0.0, 0.0, 1.0])
    n = abs(w) ** 2
    return np.array([2 * w.real, 2 * w.imag, n - 1]) / (n + 1)


def visual_distance(x0: Point, a: Boundary, b: Boundary) -> float:
    """d_{x0}(a, b), the sine of half the angle between a and b seen from x0."""
    return float(np.linalg.norm(_direction(x0, a) - _direction(x0, b)) / 2)


def gromov_product(x0: Point, a: Boundary, b: Boundary) -> ExtReal:
    v = visual_distance(x0, a, b)
    if v == 0:
        return Unbounded.POS
    return -math.log(v)


def is_on_geodesic(p: Point, g: Geodesic, tol: float = 1e-8) -> bool:
    return dist_to_geodesic(p, g) <= tol


def random_moebius(rng: np.random.Generator, dim: int = 3, scale: float = 1.0) -> Moebius:
    """A moderately sized random isometry; real coefficients when ``dim`` is 2."""
    while True:
        if dim == 2:
            a, b, c = rng.normal(0, scale, 3) + np.array([1.0, 0.0, 0.0])
            a, b, c = complex(a), complex(b), complex(c)
        else:
            re = rng.normal(0, scale, 3)
            im = rng.normal(0, scale, 3)
            a, b, c = (complex(re[i], im[i]) for i in range(3))
            a += 1
        if abs(a) > 0.2:
            return Moebius(a, b, c, (1 + b * c) / a)


def rand_boundary(rng: np.random.Generator, dim: int, spread: float = 10.0) -> complex:
    x = rng.uniform(-spread, spread)
    y = rng.uniform(-spread, spread) if dim == 3 else 0.0
    return complex(x, y)


def rand_point(rng: np.random.Generator, dim: int, spread: float = 10.0) -> Point:
    """Base uniform in [-spread, spread], height log-uniform in [e^-3, e^3]."""
    return Point(rand_boundary(rng, dim, spread), math.exp(rng.uniform(-3, 3)))


def rand_unit_direction(rng: np.random.Generator, dim: int) -> Tuple[complex, float]:
    """Unit tangent vector at (0, 1) split into horizontal and vertical parts."""
    if dim == 2:
        theta = rng.uniform(0, 2 * math.pi)
        return complex(math.cos(theta), 0), math.sin(theta)
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return complex(v[0], v[1]), float(v[2])


def point_at_distance(p: Point, rho: float, direction: Tuple[complex, float]) -> Point:
    """The point reached from ``p`` by a geodesic of length rho in the direction given at (0, 1)."""
    horiz, vert = direction
    local = Point(math.sinh(rho) * horiz, math.cosh(rho) + math.sinh(rho) * vert)
    return apply_point(translation_to(p), local)


def endpoint_towards(p: Point, direction: Tuple[complex, float]) -> Boundary:
    """Forward endpoint of the geodesic leaving ``p`` in the given direction."""
    q = point_at_distance(p, 1.0, direction)
    return geodesic_through(p, q).xi_plus

