"""Convex bodies, entry and exit times, and penetration maps.

All times refer to the unit-speed parametrisation of a geodesic with its anchor
at time 0. Entry/exit intervals are computed in the geodesic's normal frame,
where the geodesic is the vertical axis and membership in a horoball, a ball or
a tube is a quadratic inequality in the height (or its square).
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy import optimize

from . import constants
from .entities import (
    EMPTY,
    INFINITY,
    Ball,
    Body,
    Boundary,
    Empty,
    ExtReal,
    Geodesic,
    Horoball,
    ObstacleFamily,
    PenRecord,
    Point,
    Tube,
    Unbounded,
)
from .enums import PenKind
from .exceptions import DomainError, FamilyError, ProjectionUndefinedError
from .models import (
    apply_boundary,
    apply_point,
    crossratio,
    dist,
    dist_to_geodesic,
    dist_to_ray,
    frame_to_axis,
    geodesic_between,
    geodesic_through,
    normal_frame,
    point_at,
    point_at_distance,
    project_to_geodesic,
    project_to_segment,
    rand_unit_direction,
    ray_from,
    same_boundary,
    time_of,
)
from .utils import ext_float, ext_from_float, ext_max, ext_sub

logger = structlog.get_logger()

Interval = Tuple[ExtReal, ExtReal]
Source = Union[Point, Boundary]

TUBE_TANGENCY = 1e-10
TUBE_SCAN_SPAN = 60.0
IPP_PH_OFFSET = 2 * math.log(2)
"""In real hyperbolic space ipp_H - ph_H equals this constant once the geodesic meets H."""


def shrink(body: Body, t: float) -> Union[Body, Empty]:
    """H[t]: the body whose boundary lies at distance ``t`` inside ``body``."""
    if isinstance(body, Horoball):
        if body.center is INFINITY:
            return Horoball(INFINITY, body.size * math.exp(t))
        return Horoball(body.center, body.size * math.exp(-t))
    if body.radius - t <= 0:
        return EMPTY
    if isinstance(body, Ball):
        return Ball(body.center, body.radius - t)
    return Tube(body.core, body.radius - t)


def signed_depth(p: Point, body: Body) -> float:
    """Busemann height inside a horoball, r - d(p, core) for balls and tubes."""
    if isinstance(body, Horoball):
        if body.center is INFINITY:
            return math.log(p.height / body.size)
        a = body.center
        return math.log(body.size * p.height / (abs(p.base - a) ** 2 + p.height ** 2))
    if isinstance(body, Ball):
        return body.radius - dist(p, body.center)
    return body.radius - dist_to_geodesic(p, body.core)


def contains(body: Union[Body, Empty], p: Point) -> bool:
    if body is EMPTY:
        return False
    return signed_depth(p, body) >= 0


def _sphere_point(hb: Horoball) -> Point:
    if hb.center is INFINITY:
        return Point(0, hb.size)
    return Point(hb.center, hb.size)


def _horoball_frame(g: Geodesic, hb: Horoball):
    """Horoball seen from the normal frame of ``g``: ('up', s), ('down', D) or ('off', a, D)."""
    f = normal_frame(g)
    q = apply_point(f, _sphere_point(hb))
    if same_boundary(hb.center, g.xi_plus):
        return ("up", q.height)
    if same_boundary(hb.center, g.xi_minus):
        return ("down", (abs(q.base) ** 2 + q.height ** 2) / q.height)
    a = apply_boundary(f, hb.center)
    if a is INFINITY:
        return ("up", q.height)
    return ("off", a, (abs(q.base - a) ** 2 + q.height ** 2) / q.height)


def _log_interval(lo: Optional[float], hi: Optional[float]) -> Interval:
    # None stands for 0 (lower) or +inf (upper) in the height variable
    t_lo: ExtReal = Unbounded.NEG if not lo else math.log(lo)
    t_hi: ExtReal = Unbounded.POS if hi is None else math.log(hi)
    return t_lo, t_hi


def _horoball_interval(g: Geodesic, hb: Horoball) -> Optional[Interval]:
    view = _horoball_frame(g, hb)
    if view[0] == "up":
        return _log_interval(view[1], None)
    if view[0] == "down":
        return _log_interval(None, view[1])
    _, a, d = view
    r2 = abs(a) ** 2
    disc = d * d - 4 * r2
    if disc < 0:
        return None
    y2 = (d + math.sqrt(disc)) / 2
    return _log_interval(r2 / y2, y2)


def _ball_interval(g: Geodesic, ball: Ball) -> Optional[Interval]:
    c = apply_point(normal_frame(g), ball.center)
    rz, h = abs(c.base), c.height
    hs = h * math.sinh(ball.radius)
    if hs < rz:
        return None
    y2 = h * math.cosh(ball.radius) + math.sqrt((hs - rz) * (hs + rz))
    return _log_interval((rz * rz + h * h) / y2, y2)


def _tube_interval(g: Geodesic, tube: Tube) -> Optional[Interval]:
    f = normal_frame(g)
    k1 = apply_boundary(f, tube.core.xi_minus)
    k2 = apply_boundary(f, tube.core.xi_plus)
    m = frame_to_axis(k1, k2)
    p = m.b * m.d.conjugate()
    q = m.a * m.c.conjugate()
    k2r = math.sinh(tube.radius) ** 2
    qa = abs(q) ** 2
    cross = 2 * (p.conjugate() * q).real
    pc = abs(p) ** 2
    b = cross - k2r
    if qa * pc <= (1e-14 * k2r) ** 2:
        # the core shares an endpoint with g, up to rounding
        if qa == 0.0 and pc == 0.0:
            return Unbounded.NEG, Unbounded.POS
        if qa == 0.0:
            # membership reduces to X >= |P|^2 / k^2
            return (0.5 * math.log(pc / k2r), Unbounded.POS)
        if pc == 0.0:
            return (Unbounded.NEG, 0.5 * math.log(-b / qa))
        return _tube_scan(g, tube)
    min_sinh2 = 2 * math.sqrt(qa * pc) + cross
    if math.asinh(math.sqrt(max(min_sinh2, 0.0))) > tube.radius - TUBE_TANGENCY:
        return None
    disc = b * b - 4 * qa * pc
    x2 = (-b + math.sqrt(max(disc, 0.0))) / (2 * qa)
    x1 = pc / (qa * x2)
    return 0.5 * math.log(x1), 0.5 * math.log(x2)


def _tube_scan(g: Geodesic, tube: Tube) -> Optional[Interval]:
    iv = entry_exit_scan(g, tube, -TUBE_SCAN_SPAN, TUBE_SCAN_SPAN)
    if iv is None:
        return None
    lo, hi = iv
    return (
        Unbounded.NEG if lo <= -TUBE_SCAN_SPAN else lo,
        Unbounded.POS if hi >= TUBE_SCAN_SPAN else hi,
    )


def entry_exit(g: Geodesic, body: Union[Body, Empty]) -> Optional[Interval]:
    """Maximal time interval spent in ``body``; ``None`` when it is not met."""
    if body is EMPTY:
        return None
    if isinstance(body, Horoball):
        iv = _horoball_interval(g, body)
    elif isinstance(body, Ball):
        iv = _ball_interval(g, body)
    else:
        iv = _tube_interval(g, body)
    if iv is None or not g.is_ray:
        return iv
    lo, hi = iv
    if ext_float(hi) < 0:
        return None
    return (max(ext_float(lo), 0.0), hi)


def entry_exit_scan(
    g: Geodesic, body: Body, t_lo: float = -40.0, t_hi: float = 40.0, samples: int = 4001
) -> Optional[Tuple[float, float]]:
    """Entry/exit by a coarse scan of the signed depth followed by Brent refinement.

    Endpoints that are not crossed inside [t_lo, t_hi] are reported as the window
    bounds. Used to cross-check the closed forms.
    """
    ts = np.linspace(t_lo, t_hi, samples)
    depth = np.array([signed_depth(point_at(g, t), body) for t in ts])
    inside = np.nonzero(depth >= 0)[0]
    if inside.size == 0:
        return None

    def fn(t):
        return signed_depth(point_at(g, t), body)

    i, j = inside[0], inside[-1]
    lo = t_lo if i == 0 else optimize.brentq(fn, ts[i - 1], ts[i], xtol=1e-13)
    hi = t_hi if j == samples - 1 else optimize.brentq(fn, ts[j], ts[j + 1], xtol=1e-13)
    return lo, hi


def pen_record(g: Geodesic, body: Body) -> PenRecord:
    iv = entry_exit(g, body)
    if iv is None:
        return PenRecord(Unbounded.POS, Unbounded.POS, 0.0)
    return PenRecord(iv[0], iv[1], ext_sub(iv[1], iv[0]))


def max_depth(g: Geodesic, body: Body, t_lo: float, t_hi: float) -> float:
    """Largest signed depth of ``g`` over the time window [t_lo, t_hi]."""
    y_lo, y_hi = math.exp(t_lo), math.exp(t_hi)
    if isinstance(body, Horoball):
        view = _horoball_frame(g, body)
        if view[0] == "up":
            return math.log(y_hi / view[1])
        if view[0] == "down":
            return math.log(view[1] / y_lo)
        _, a, d = view
        y = min(max(abs(a), y_lo), y_hi)
        return math.log(d * y / (abs(a) ** 2 + y * y))
    if isinstance(body, Ball):
        c = apply_point(normal_frame(g), body.center)
        y = min(max(math.hypot(abs(c.base), c.height), y_lo), y_hi)
        return body.radius - dist(c, Point(0, y))
    res = optimize.minimize_scalar(
        lambda t: dist_to_geodesic(point_at(g, t), body.core),
        bounds=(t_lo, t_hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return body.radius - float(res.fun)


def _check_source(body: Body, xi0: Source) -> None:
    if isinstance(xi0, Point):
        if signed_depth(xi0, body) > 0:
            raise DomainError("source lies inside the body")
        return
    if isinstance(body, Horoball) and same_boundary(xi0, body.center):
        raise DomainError("source is the point at infinity of the horoball")
    if isinstance(body, Tube) and (
        same_boundary(xi0, body.core.xi_minus) or same_boundary(xi0, body.core.xi_plus)
    ):
        raise DomainError("source is an endpoint of the tube core")


def _ph(g: Geodesic, body: Body) -> ExtReal:
    if isinstance(body, Horoball):
        view = _horoball_frame(g, body)
        if view[0] == "up":
            return Unbounded.POS
        if view[0] == "down":
            if not g.is_ray:
                return Unbounded.POS
            return 2 * max(0.0, math.log(view[1]))
        _, a, d = view
        y = abs(a)
        if g.is_ray:
            y = max(y, 1.0)
        return 2 * max(0.0, math.log(d * y / (abs(a) ** 2 + y * y)))
    if isinstance(body, Ball):
        return 2 * max(0.0, body.radius - dist_to_ray(body.center, g))
    raise DomainError("penetration height is defined for horoballs and balls")


def _ipp(g: Geodesic, body: Body, xi0: Source) -> ExtReal:
    if isinstance(body, Horoball):
        if same_boundary(g.xi_plus, body.center):
            return Unbounded.POS
        axis = ray_from(xi0, body.center)
        try:
            if axis.is_ray:
                p = project_to_segment(g.xi_plus, axis, None)
            else:
                p = project_to_geodesic(g.xi_plus, axis)
        except ProjectionUndefinedError:
            p = axis.anchor
        return 2 * max(0.0, signed_depth(p, body))
    if isinstance(body, Ball):
        if isinstance(xi0, Point):
            axis = geodesic_through(body.center, xi0)
            t_max: Optional[float] = dist(body.center, xi0)
        else:
            axis = ray_from(body.center, xi0)
            t_max = None
        try:
            p = project_to_segment(g.xi_plus, axis, t_max)
        except ProjectionUndefinedError:
            p = body.center
        return 2 * max(0.0, signed_depth(p, body))
    raise DomainError("inner projection is defined for horoballs and balls")


def _toward(p: Point, x: Source, r: float) -> Point:
    if isinstance(x, Point):
        return point_at(geodesic_through(p, x), r)
    return point_at(ray_from(p, x), r)


def closest_point(body: Body, x: Source) -> Optional[Point]:
    """Closest point of ``body`` to ``x``; ``None`` when ``x`` is a point at infinity of it."""
    if isinstance(x, Point) and signed_depth(x, body) >= 0:
        return x
    if isinstance(body, Ball):
        return _toward(body.center, x, body.radius)
    if isinstance(body, Tube):
        core = body.core
        if not isinstance(x, Point) and (
            same_boundary(x, core.xi_minus) or same_boundary(x, core.xi_plus)
        ):
            return None
        return _toward(project_to_geodesic(x, core), x, body.radius)
    if not isinstance(x, Point) and same_boundary(x, body.center):
        return None
    line = ray_from(x, body.center)
    iv = entry_exit(line, body)
    if iv is None:
        raise DomainError("geodesic towards the horoball centre missed it")
    return point_at(line, ext_float(iv[0]))


def _ftp(g: Geodesic, body: Body, xi0: Source) -> ExtReal:
    if not isinstance(body, Tube):
        raise DomainError("fellow-traveller penetration needs a tube")
    core = body.core
    if same_boundary(g.xi_plus, core.xi_minus) or same_boundary(g.xi_plus, core.xi_plus):
        return Unbounded.POS
    return dist(project_to_geodesic(xi0, core), project_to_geodesic(g.xi_plus, core))


def _bp(g: Geodesic, body: Body, xi0: Source) -> ExtReal:
    q_minus = closest_point(body, xi0)
    q_plus = closest_point(body, g.xi_plus)
    if q_plus is None or q_minus is None:
        return Unbounded.POS
    return dist(q_minus, q_plus)


def _crp(g: Geodesic, body: Body, xi0: Source) -> ExtReal:
    if not isinstance(body, Tube) or isinstance(xi0, Point):
        raise DomainError("crossratio penetration needs a tube and a source at infinity")
    l1, l2 = body.core.xi_minus, body.core.xi_plus
    gp = g.xi_plus
    if same_boundary(gp, l1) or same_boundary(gp, l2):
        return Unbounded.POS
    return ext_max([0.0, crossratio(xi0, l1, gp, l2), crossratio(xi0, l2, gp, l1)])


def penetration(g: Geodesic, body: Body, kind: PenKind, xi0: Source) -> ExtReal:
    """Value of the penetration map ``kind`` of ``body`` on the geodesic ``g`` issued from ``xi0``."""
    _check_source(body, xi0)
    if kind is PenKind.LENGTH:
        return pen_record(g, body).value
    if kind is PenKind.PH:
        return _ph(g, body)
    if kind is PenKind.IPP:
        return _ipp(g, body, xi0)
    if kind is PenKind.FTP:
        return _ftp(g, body, xi0)
    if kind is PenKind.BP:
        return _bp(g, body, xi0)
    return _crp(g, body, xi0)


def body_eps(body: Body) -> Union[float, object]:
    """The ε for which the body is ε-convex."""
    if isinstance(body, Horoball):
        return INFINITY
    return body.radius


def penetration_constant(body: Body, kind: PenKind) -> float:
    """The κ with |f - ℓ| ≤ κ for the map ``kind`` of ``body``."""
    if kind is PenKind.LENGTH:
        return 0.0
    if kind in (PenKind.PH, PenKind.IPP):
        if isinstance(body, Tube):
            raise DomainError("{} is not defined for tubes".format(kind.value))
        return constants.C1_PRIME_INF
    if kind in (PenKind.FTP, PenKind.CRP) and not isinstance(body, Tube):
        raise DomainError("{} is defined for tubes only".format(kind.value))
    eps = body_eps(body)
    k1 = constants.c1_prime(eps)
    if kind is PenKind.BP:
        return 2 * k1
    if kind is PenKind.FTP:
        return 2 * k1 + 2 * body.radius
    return 2 * k1 + 2 * constants.C1_PRIME_INF + 2 * body.radius


def _core_sup_depth(core: Geodesic, hb: Horoball) -> ExtReal:
    view = _horoball_frame(core, hb)
    if view[0] != "off":
        return Unbounded.POS
    _, a, d = view
    return math.log(d / (2 * abs(a)))


def body_gap(a: Body, b: Body) -> ExtReal:
    """Signed distance between two bodies: nonnegative iff their interiors are disjoint."""
    if isinstance(b, Horoball) and not isinstance(a, Horoball):
        a, b = b, a
    if isinstance(a, Horoball) and isinstance(b, Horoball):
        if a.center is INFINITY and b.center is INFINITY:
            return Unbounded.NEG
        if a.center is INFINITY or b.center is INFINITY:
            s, d = (a.size, b.size) if a.center is INFINITY else (b.size, a.size)
            return math.log(s / d)
        sep = abs(a.center - b.center)
        if sep == 0:
            return Unbounded.NEG
        return math.log(sep * sep / (a.size * b.size))
    if isinstance(a, Horoball):
        if isinstance(b, Ball):
            return -signed_depth(b.center, a) - b.radius
        sup = _core_sup_depth(b.core, a)
        return ext_sub(-b.radius, sup)
    if isinstance(a, Ball) and isinstance(b, Ball):
        return dist(a.center, b.center) - a.radius - b.radius
    if isinstance(a, Tube) and isinstance(b, Tube):
        res = optimize.minimize_scalar(
            lambda t: dist_to_geodesic(point_at(a.core, t), b.core),
            bounds=(-60.0, 60.0),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return float(res.fun) - a.radius - b.radius
    ball, tube = (a, b) if isinstance(a, Ball) else (b, a)
    return dist_to_geodesic(ball.center, tube.core) - a.radius - b.radius


def _anchor(body: Body, other: Body) -> Source:
    if isinstance(body, Horoball):
        return body.center
    if isinstance(body, Ball):
        return body.center
    target = _anchor(other, body) if not isinstance(other, Tube) else other.core.anchor
    try:
        return project_to_geodesic(target, body.core)
    except ProjectionUndefinedError:
        return body.core.anchor


def _joining(x: Source, y: Source) -> Geodesic:
    if isinstance(x, Point):
        if isinstance(y, Point):
            return geodesic_through(x, y)
        return ray_from(x, y)
    if isinstance(y, Point):
        return ray_from(y, x)
    return geodesic_between(x, y)


def chord(g: Geodesic, a: Body, b: Body) -> ExtReal:
    """Length of the part of ``g`` inside both bodies."""
    ia, ib = entry_exit(g, a), entry_exit(g, b)
    if ia is None or ib is None:
        return 0.0
    lo = max(ext_float(ia[0]), ext_float(ib[0]))
    hi = min(ext_float(ia[1]), ext_float(ib[1]))
    return ext_from_float(max(0.0, hi - lo))


def intersection_diameter(
    a: Body, b: Body, rng: Optional[np.random.Generator] = None, samples: int = 256
) -> ExtReal:
    """Diameter of a ∩ b by sampled chord maximisation (closed form for two horoballs)."""
    gap = body_gap(a, b)
    if ext_float(gap) >= 0:
        return 0.0
    if isinstance(a, Horoball) and isinstance(b, Horoball):
        if gap is Unbounded.NEG:
            return Unbounded.POS
        return 2 * math.asinh(math.sqrt(math.expm1(-gap)))
    rng = rng if rng is not None else np.random.default_rng(0)
    x, y = _anchor(a, b), _anchor(b, a)
    line = _joining(x, y)
    ia, ib = entry_exit(line, a), entry_exit(line, b)
    if ia is None or ib is None:
        logger.warning("intersection_seed_missing", a=a, b=b)
        return 0.0
    lo = max(ext_float(ia[0]), ext_float(ib[0]), -50.0)
    hi = min(ext_float(ia[1]), ext_float(ib[1]), 50.0)
    if hi < lo:
        return 0.0
    seed = point_at(line, (lo + hi) / 2)
    dim = 2 if all(_is_planar(body) for body in (a, b)) and seed.base.imag == 0 else 3
    best, best_g = ext_float(chord(line, a, b)), line
    for _ in range(samples):
        g = geodesic_through(seed, point_at_distance(seed, 1.0, rand_unit_direction(rng, dim)))
        c = ext_float(chord(g, a, b))
        if c > best:
            best, best_g = c, g
    if math.isinf(best):
        return Unbounded.POS
    if best_g.xi_minus is INFINITY or best_g.xi_plus is INFINITY:
        return best

    def objective(v: np.ndarray) -> float:
        if dim == 2:
            u, w = complex(v[0]), complex(v[1])
        else:
            u, w = complex(v[0], v[1]), complex(v[2], v[3])
        if abs(u - w) < 1e-12:
            return 0.0
        return -ext_float(chord(geodesic_between(u, w), a, b))

    u0, w0 = best_g.xi_minus, best_g.xi_plus
    x0 = [u0.real, w0.real] if dim == 2 else [u0.real, u0.imag, w0.real, w0.imag]
    res = optimize.minimize(objective, np.array(x0), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
    return max(best, -float(res.fun))


def _is_planar(body: Body) -> bool:
    if isinstance(body, Horoball):
        return body.center is INFINITY or body.center.imag == 0
    if isinstance(body, Ball):
        return body.center.base.imag == 0
    core = body.core
    return all(x is INFINITY or x.imag == 0 for x in (core.xi_minus, core.xi_plus))


def _horoball_gaps(bodies: Sequence[Horoball], chunk: int = 256) -> Tuple[float, Tuple[int, int]]:
    finite = [i for i, b in enumerate(bodies) if b.center is not INFINITY]
    top = [i for i, b in enumerate(bodies) if b.center is INFINITY]
    worst, pair = math.inf, (-1, -1)
    if len(top) > 1:
        return -math.inf, (top[0], top[1])
    centers = np.array([bodies[i].center for i in finite], dtype=complex)
    sizes = np.array([bodies[i].size for i in finite])
    if top:
        s = bodies[top[0]].size
        if sizes.size:
            k = int(np.argmax(sizes))
            worst, pair = math.log(s / sizes[k]), (top[0], finite[k])
    n = len(finite)
    for start in range(0, n, chunk):
        block = slice(start, min(start + chunk, n))
        sep = np.abs(centers[block, None] - centers[None, :]) ** 2
        with np.errstate(divide="ignore"):
            gaps = np.log(sep / (sizes[block, None] * sizes[None, :]))
        rows = np.arange(block.start, block.stop)
        gaps[rows - start, rows] = np.inf
        k = int(np.argmin(gaps))
        i, j = divmod(k, n)
        if gaps[i, j] < worst:
            worst, pair = float(gaps[i, j]), (finite[start + i], finite[j])
    return worst, pair


def check_family(fam: ObstacleFamily, rng: Optional[np.random.Generator] = None) -> float:
    """Check almost disjointness; returns the smallest pairwise gap.

    Pairs with overlapping interiors are accepted as long as their intersection
    has diameter at most ``fam.delta0``.
    """
    bodies = fam.bodies
    tol = 1e-12
    if all(isinstance(b, Horoball) for b in bodies):
        worst, pair = _horoball_gaps(bodies)  # type: ignore
        if worst >= -tol:
            return worst
        overlapping = [pair]
        if fam.delta0 > 0:
            overlapping = [
                (i, j)
                for i in range(len(bodies))
                for j in range(i + 1, len(bodies))
                if ext_float(body_gap(bodies[i], bodies[j])) < -tol
            ]
    else:
        worst, pair = math.inf, (-1, -1)
        overlapping = []
        for i in range(len(bodies)):
            for j in range(i + 1, len(bodies)):
                g = ext_float(body_gap(bodies[i], bodies[j]))
                if g < worst:
                    worst, pair = g, (i, j)
                if g < -tol:
                    overlapping.append((i, j))
    for i, j in overlapping:
        diam = ext_float(intersection_diameter(bodies[i], bodies[j], rng))
        if diam > fam.delta0 + 1e-8:
            raise FamilyError(
                (i, j),
                worst,
                "bodies {} and {} meet in a set of diameter {:.6g} > {}".format(i, j, diam, fam.delta0),
            )
    return worst


def depth_matrix(points: Sequence[Point], bodies: Sequence[Body]) -> np.ndarray:
    """Signed depth of every point (rows) in every body (columns)."""
    base = np.array([p.base for p in points], dtype=complex)
    h = np.array([p.height for p in points])
    out = np.empty((len(points), len(bodies)))
    for j, body in enumerate(bodies):
        if isinstance(body, Horoball):
            if body.center is INFINITY:
                out[:, j] = np.log(h / body.size)
            else:
                out[:, j] = np.log(body.size * h / (np.abs(base - body.center) ** 2 + h ** 2))
        elif isinstance(body, Ball):
            c = body.center
            chordlen = np.sqrt(np.abs(base - c.base) ** 2 + (h - c.height) ** 2)
            out[:, j] = body.radius - 2 * np.arcsinh(chordlen / (2 * np.sqrt(h * c.height)))
        else:
            out[:, j] = [signed_depth(p, body) for p in points]
    return out


def depth_along(g: Geodesic, ts: Sequence[float], bodies: Sequence[Body]) -> np.ndarray:
    return depth_matrix([point_at(g, t) for t in ts], bodies)


def penetration_table(g: Geodesic, bodies: Sequence[Body]) -> Dict[int, PenRecord]:
    """Entry/exit records of every body the geodesic meets."""
    out = {}
    for i, body in enumerate(bodies):
        rec = pen_record(g, body)
        if rec.t_minus is not Unbounded.POS:
            out[i] = rec
    return out


def segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the geodesic segment [a, b]."""
    if dist(a, b) == 0:
        return dist(p, a)
    line = geodesic_through(a, b)
    t = min(max(time_of(line, p), 0.0), dist(a, b))
    return dist(p, point_at(line, t))


def entries(g: Geodesic, bodies: Sequence[Body]) -> List[Tuple[int, Interval]]:
    out = []
    for i, body in enumerate(bodies):
        iv = entry_exit(g, body)
        if iv is not None:
            out.append((i, iv))
    return out
