"""Randomised inequality registry.

Every entry owns a sampler that draws a configuration satisfying the
hypotheses of one geometric inequality (rejecting draws that do not) and
returns the ``(lhs, bound)`` pairs the inequality asserts, ``lhs <= bound``.
"""
import math
from typing import Callable, Dict, List, Optional, Tuple, Union

import attr
import numpy as np
import structlog

from . import constants
from .entities import (
    INFINITY,
    Ball,
    Body,
    Boundary,
    Geodesic,
    Horoball,
    Point,
    Tube,
)
from .enums import PenKind
from .exceptions import UnknownLemmaError
from .models import (
    apply_boundary,
    apply_horoball,
    apply_point,
    basepoint_busemann,
    busemann,
    crossratio,
    dist,
    dist_to_geodesic,
    dist_to_ray,
    geodesic_between,
    geodesic_through,
    point_at,
    point_at_distance,
    project_to_geodesic,
    rand_boundary,
    rand_point,
    rand_unit_direction,
    random_moebius,
    ray_from,
    reverse,
    same_boundary,
    time_of,
)
from .penetration import (
    IPP_PH_OFFSET,
    entry_exit,
    penetration,
    penetration_constant,
    segment_distance,
    shrink,
    signed_depth,
)
from .utils import Rejected, as_json_dict, ext_float, rejection_sample, trial_rngs

logger = structlog.get_logger()

VIOLATION_SLACK = 1e-9
EPS_RANGE = (0.05, 5.0)

Source = Union[Point, Boundary]
Check = Tuple[float, float]
Sampler = Callable[[np.random.Generator, int], List[Check]]


@attr.attrs(frozen=True)
class Lemma(object):
    lemma_id: str = attr.attrib()
    statement: str = attr.attrib()
    sampler: Sampler = attr.attrib(repr=False)


@attr.attrs(frozen=True)
class LemmaReport(object):
    lemma: str = attr.attrib()
    trials: int = attr.attrib()
    seed: int = attr.attrib()
    violations: int = attr.attrib()
    worst_margin: float = attr.attrib()
    samples: int = attr.attrib()

    as_dict = as_json_dict


REGISTRY: Dict[str, Lemma] = {}


def register(lemma_id: str, statement: str):
    """Add a sampler to the registry, wrapped in rejection sampling."""

    def decorator(func: Sampler) -> Sampler:
        REGISTRY[lemma_id] = Lemma(lemma_id, statement, rejection_sample(exc=Rejected)(func))
        return func

    return decorator


def normalize_id(lemma_id: str) -> str:
    """``L2_1`` and ``l2.1`` both name ``L2.1``."""
    if lemma_id[:1] in ("l", "L") and lemma_id[1:2].isdigit():
        return "L" + lemma_id[1:].replace("_", ".")
    return lemma_id


def get_lemma(lemma_id: str) -> Lemma:
    try:
        return REGISTRY[normalize_id(lemma_id)]
    except KeyError:
        raise UnknownLemmaError(lemma_id, "unknown lemma id {!r}".format(lemma_id))


def _margin(lhs: float, bound: float) -> float:
    if lhs == bound:
        return 0.0
    return bound - lhs


def check_inequality(lemma_id: str, trials: int, seed: int, dim: int = 3) -> LemmaReport:
    """Run ``trials`` independent samples; a trial is a violation when any of its checks fails."""
    lemma = get_lemma(lemma_id)
    violations, samples = 0, 0
    worst = math.inf
    for k, rng in enumerate(trial_rngs(seed, trials)):
        failed = False
        for lhs, bound in lemma.sampler(rng, dim):
            samples += 1
            margin = _margin(lhs, bound)
            worst = min(worst, margin)
            if margin < -VIOLATION_SLACK * (1 + abs(bound)):
                failed = True
                logger.warning("inequality_violated", lemma=lemma.lemma_id, trial=k, lhs=lhs, bound=bound)
        violations += failed
    logger.info("inequality_checked", lemma=lemma.lemma_id, trials=trials, violations=violations)
    return LemmaReport(
        lemma=lemma.lemma_id,
        trials=trials,
        seed=seed,
        violations=violations,
        worst_margin=worst,
        samples=samples,
    )


# configuration helpers


def _eps(rng: np.random.Generator) -> float:
    lo, hi = EPS_RANGE
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def _unit(rng: np.random.Generator, dim: int) -> complex:
    if dim == 2:
        return 1.0 if rng.uniform() < 0.5 else -1.0
    return complex(np.exp(1j * rng.uniform(0, 2 * math.pi)))


def _jiggle(rng: np.random.Generator, p: Point, radius: float, dim: int) -> Point:
    rho = radius * rng.uniform() ** (1.0 / dim)
    return point_at_distance(p, rho, rand_unit_direction(rng, dim))


def _random_line(rng: np.random.Generator, dim: int) -> Geodesic:
    while True:
        u, v = rand_boundary(rng, dim, 5.0), rand_boundary(rng, dim, 5.0)
        if abs(u - v) > 1e-3:
            return geodesic_between(u, v)


def _random_horoball(rng: np.random.Generator, dim: int) -> Horoball:
    if rng.uniform() < 0.3:
        return Horoball(INFINITY, math.exp(rng.uniform(-1, 1)))
    return Horoball(rand_boundary(rng, dim, 5.0), math.exp(rng.uniform(-2, 2)))


def _random_body(rng: np.random.Generator, dim: int, kinds: str = "hbt") -> Body:
    kind = kinds[rng.integers(len(kinds))]
    if kind == "h":
        return _random_horoball(rng, dim)
    if kind == "b":
        return Ball(rand_point(rng, dim, 3.0), _eps(rng))
    return Tube(_random_line(rng, dim), _eps(rng))


def _inside(rng: np.random.Generator, body: Body, dim: int) -> Point:
    """A random point of the body, at most three units deep for horoballs."""
    if isinstance(body, Ball):
        return _jiggle(rng, body.center, body.radius, dim)
    if isinstance(body, Tube):
        return _jiggle(rng, point_at(body.core, rng.uniform(-3, 3)), body.radius, dim)
    depth = rng.uniform(0, 3)
    if body.center is INFINITY:
        return Point(rand_boundary(rng, dim, 3.0), body.size * math.exp(depth))
    diam = body.size * math.exp(-depth)
    horiz, vert = rand_unit_direction(rng, dim)
    r = 0.95 * rng.uniform() ** (1.0 / dim)
    return Point(body.center + diam / 2 * r * horiz, diam / 2 * (1 + r * vert))


def _source(rng: np.random.Generator, dim: int, body: Body, boundary_only: bool = False) -> Source:
    if boundary_only or rng.uniform() < 0.5:
        xi = rand_boundary(rng, dim)
        if isinstance(body, Horoball) and same_boundary(xi, body.center, 1e-9):
            raise Rejected()
        return xi
    p = rand_point(rng, dim)
    if signed_depth(p, body) >= 0:
        raise Rejected()
    return p


def _through(xi0: Source, q: Point) -> Geodesic:
    """The geodesic issued from ``xi0`` passing through ``q``."""
    if isinstance(xi0, Point):
        g = geodesic_through(xi0, q)
        return Geodesic(g.xi_minus, g.xi_plus, xi0, is_ray=True)
    return reverse(ray_from(q, xi0))


def _issued(rng: np.random.Generator, dim: int, xi0: Source, body: Body) -> Geodesic:
    """Half of the draws aim at the body, the others are arbitrary."""
    if rng.uniform() < 0.5:
        target = _inside(rng, body, dim)
    else:
        target = rand_point(rng, dim)
    if isinstance(xi0, Point) and dist(xi0, target) < 1e-6:
        raise Rejected()
    return _through(xi0, target)


def _entry(g: Geodesic, body: Body) -> Optional[Point]:
    iv = entry_exit(g, body)
    if iv is None or math.isinf(ext_float(iv[0])):
        return None
    return point_at(g, ext_float(iv[0]))


def _chord_points(g: Geodesic, body: Body) -> Optional[Tuple[Point, Point]]:
    iv = entry_exit(g, body)
    if iv is None:
        return None
    lo, hi = ext_float(iv[0]), ext_float(iv[1])
    if math.isinf(lo) or math.isinf(hi):
        return None
    return point_at(g, lo), point_at(g, hi)


def _gap(f: float, g: float) -> float:
    if f == g:
        return 0.0
    return abs(f - g)


def _near(rng: np.random.Generator, w: complex, dim: int, lo: float, hi: float) -> complex:
    return w + math.exp(rng.uniform(lo, hi)) * _unit(rng, dim)


def _beta(xi0: Source, x: Point, y: Point) -> float:
    if isinstance(xi0, Point):
        return basepoint_busemann(xi0, x, y)
    return busemann(xi0, x, y)


def _move_source(m, xi0: Source) -> Source:
    if isinstance(xi0, Point):
        return apply_point(m, xi0)
    return apply_boundary(m, xi0)


# distances, segments and ε-neighbourhoods


@register("L2.1", "d(x_t, [y, z]) <= e^-t sinh d(x, y) <= e^(d(x, y) - t) / 2")
def _thin_triangles(rng: np.random.Generator, dim: int) -> List[Check]:
    x, y = rand_point(rng, dim, 3.0), rand_point(rng, dim, 3.0)
    d = dist(x, y)
    if rng.uniform() < 0.5:
        z = rand_point(rng, dim, 3.0)
        t = rng.uniform(0, dist(x, z))
        lhs = segment_distance(point_at(geodesic_through(x, z), t), y, z)
    else:
        w = rand_boundary(rng, dim, 3.0)
        t = rng.uniform(0, 8)
        lhs = dist_to_ray(point_at(ray_from(x, w), t), ray_from(y, w))
    bound = math.exp(-t) * math.sinh(d)
    return [(lhs, bound), (bound, 0.5 * math.exp(d - t))]


@register("L2.2", "d(m, [a', b']) <= eps / 2 when d(a, a'), d(b, b') <= eps and d(a, b) >= c0(eps)")
def _midpoint_shadow(rng: np.random.Generator, dim: int) -> List[Check]:
    eps = _eps(rng)
    a = rand_point(rng, dim, 3.0)
    length = constants.c0(eps) + rng.exponential(2.0)
    b = point_at_distance(a, length, rand_unit_direction(rng, dim))
    m = point_at(geodesic_through(a, b), length / 2)
    a2, b2 = _jiggle(rng, a, eps, dim), _jiggle(rng, b, eps, dim)
    return [(segment_distance(m, a2, b2), eps / 2)]


@register("L2.5", "entry points into N_eps C of two geodesics from xi0 are c1'(eps) apart")
def _entry_points(rng: np.random.Generator, dim: int) -> List[Check]:
    eps = _eps(rng)
    if rng.uniform() < 0.5:
        body: Body = Tube(_random_line(rng, dim), eps)
    else:
        body = Ball(rand_point(rng, dim, 3.0), eps)
    xi0 = _source(rng, dim, body)
    x1 = _entry(_through(xi0, _inside(rng, body, dim)), body)
    x2 = _entry(_through(xi0, _inside(rng, body, dim)), body)
    if x1 is None or x2 is None:
        raise Rejected()
    return [(dist(x1, x2), constants.c1_prime(eps))]


@register("L2.6", "d(a0, C) <= eps - eta on long segments with endpoints in N_eps C")
def _deep_inside(rng: np.random.Generator, dim: int) -> List[Check]:
    eps = _eps(rng)
    core = _random_line(rng, dim)
    cpp = constants.c_dprime(eps)
    t1 = rng.uniform(-3, 3)
    length = constants.c0(eps) + rng.exponential(2.0)
    a = _jiggle(rng, point_at(core, t1), eps, dim)
    b = _jiggle(rng, point_at(core, t1 + length), eps, dim)
    d = dist(a, b)
    if d < constants.c0(eps):
        raise Rejected()
    s = rng.uniform(0, min(cpp * eps / 2, d / 2))
    a0 = point_at(geodesic_through(a, b), s if rng.uniform() < 0.5 else d - s)
    eta = min(dist(a0, a), dist(a0, b)) / cpp
    if eta > eps / 2:
        raise Rejected()
    return [(dist_to_geodesic(a0, core), eps - eta)]


@register("L2.7", "d(x, x') <= c2'(eps) d(x, gamma') when gamma' stays c0(eps) inside N_eps C")
def _entry_stability(rng: np.random.Generator, dim: int) -> List[Check]:
    eps = _eps(rng)
    tube = Tube(_random_line(rng, dim), eps)
    xi0 = _source(rng, dim, tube)
    end = _near(rng, tube.core.xi_plus, dim, -18, -2)
    g2 = ray_from(xi0, end)
    chord = _chord_points(g2, tube)
    if chord is None or dist(*chord) < constants.c0(eps):
        raise Rejected()
    g1 = ray_from(xi0, _near(rng, end, dim, math.log(abs(end - tube.core.xi_plus)) - 8, 1))
    x = _entry(g1, tube)
    if x is None:
        raise Rejected()
    return [(dist(x, chord[0]), constants.c2_prime(eps) * dist_to_ray(x, g2))]


@register("L2.8", "d(y, y') <= c3'(eps) d(y, gamma') or d(x', y') > d(x, y) after a long chord")
def _exit_stability(rng: np.random.Generator, dim: int) -> List[Check]:
    eps, eta = _eps(rng), rng.uniform(0, 1)
    tube = Tube(_random_line(rng, dim), eps)
    xi0 = _source(rng, dim, tube)
    end = _near(rng, tube.core.xi_plus, dim, -24, -3)
    g = ray_from(xi0, end)
    chord = _chord_points(g, tube)
    if chord is None:
        raise Rejected()
    x, y = chord
    if dist(x, y) < constants.h_prime(eps, eta):
        raise Rejected()
    scale = math.log(abs(end - tube.core.xi_plus))
    g2 = ray_from(xi0, _near(rng, end, dim, scale - 6, scale + 2))
    eta2 = dist_to_ray(y, g2)
    if eta2 > eta:
        raise Rejected()
    iv = entry_exit(g2, tube)
    if iv is None:
        return [(math.inf, 0.0)]
    x2 = point_at(g2, ext_float(iv[0]))
    hi = ext_float(iv[1])
    if math.isinf(hi):
        return [(-math.inf, 0.0)]
    y2 = point_at(g2, hi)
    first = dist(y, y2) - constants.c3_prime(eps) * eta2
    second = dist(x, y) - dist(x2, y2)
    return [(min(first, second), 0.0)]


# horoballs


@register("L2.11", "entry points into a horoball of two geodesics from xi0 are c1'(inf) apart")
def _horoball_entries(rng: np.random.Generator, dim: int) -> List[Check]:
    hb = _random_horoball(rng, dim)
    xi0 = _source(rng, dim, hb)
    x1 = _entry(_through(xi0, _inside(rng, hb, dim)), hb)
    x2 = _entry(_through(xi0, _inside(rng, hb, dim)), hb)
    if x1 is None or x2 is None:
        raise Rejected()
    return [(dist(x1, x2), constants.C1_PRIME_INF)]


@register("L2.12", "a0 in H[2/3 min(d(a0, a), d(a0, b))] for a, b on the horosphere with d(a, b) >= c0(inf)")
def _horosphere_chords(rng: np.random.Generator, dim: int) -> List[Check]:
    length = constants.C0_INF + rng.exponential(2.0)
    u = rand_boundary(rng, dim, 3.0)
    a = Point(u, 1.0)
    b = Point(u + 2 * math.sinh(length / 2) * _unit(rng, dim), 1.0)
    m = random_moebius(rng, dim, 0.5)
    hb = apply_horoball(m, Horoball(INFINITY, 1.0))
    a, b = apply_point(m, a), apply_point(m, b)
    d = dist(a, b)
    a0 = point_at(geodesic_through(a, b), rng.uniform(0, d))
    lhs = 2.0 / 3.0 * min(dist(a0, a), dist(a0, b)) - signed_depth(a0, hb)
    return [(lhs, 0.0)]


def _normalized_horoball_pair(rng: np.random.Generator, dim: int):
    """Source and a deep geodesic endpoint for Horoball(inf, 1), before a random isometry."""
    if rng.uniform() < 0.5:
        xi0: Source = rand_boundary(rng, dim, 3.0)
        base = xi0
    else:
        xi0 = Point(rand_boundary(rng, dim, 3.0), math.exp(rng.uniform(-3, 0)))
        base = xi0.base
    far = base + math.exp(rng.uniform(math.log(8), 7)) * _unit(rng, dim)
    return xi0, far


@register("L2.13", "d(x, x') <= 5/2 d(x, gamma') when gamma' stays c0(inf) inside the horoball")
def _horoball_entry_stability(rng: np.random.Generator, dim: int) -> List[Check]:
    xi0, far = _normalized_horoball_pair(rng, dim)
    spread = abs(far - (xi0.base if isinstance(xi0, Point) else xi0))
    near = _near(rng, far, dim, math.log(spread) - 8, math.log(spread) + 1)
    m = random_moebius(rng, dim, 0.3)
    hb = apply_horoball(m, Horoball(INFINITY, 1.0))
    src = _move_source(m, xi0)
    g2 = ray_from(src, apply_boundary(m, far))
    chord = _chord_points(g2, hb)
    if chord is None or dist(*chord) < constants.C0_INF:
        raise Rejected()
    x = _entry(ray_from(src, apply_boundary(m, near)), hb)
    if x is None:
        raise Rejected()
    return [(dist(x, chord[0]), constants.C2_PRIME_INF * dist_to_ray(x, g2))]


@register("L2.14", "d(y, y') <= 5/2 d(y, gamma') when d(x, y) >= h'(inf, d(y, gamma'))")
def _horoball_exit_stability(rng: np.random.Generator, dim: int) -> List[Check]:
    xi0, far = _normalized_horoball_pair(rng, dim)
    spread = abs(far - (xi0.base if isinstance(xi0, Point) else xi0))
    near = _near(rng, far, dim, math.log(spread) - 10, math.log(spread) - 1)
    m = random_moebius(rng, dim, 0.3)
    hb = apply_horoball(m, Horoball(INFINITY, 1.0))
    src = _move_source(m, xi0)
    chord = _chord_points(ray_from(src, apply_boundary(m, far)), hb)
    if chord is None:
        raise Rejected()
    x, y = chord
    g2 = ray_from(src, apply_boundary(m, near))
    eta = dist_to_ray(y, g2)
    if dist(x, y) < constants.h_prime(INFINITY, eta):
        raise Rejected()
    chord2 = _chord_points(g2, hb)
    if chord2 is None:
        return [(math.inf, 0.0)]
    return [(dist(y, chord2[1]), constants.C3_PRIME_INF * eta)]


# penetration maps


@register("L3.2", "|bp_C - l_C| <= 2 c1'(eps)")
def _boundary_projection(rng: np.random.Generator, dim: int) -> List[Check]:
    body = _random_body(rng, dim)
    xi0 = _source(rng, dim, body)
    g = _issued(rng, dim, xi0, body)
    bp = ext_float(penetration(g, body, PenKind.BP, xi0))
    length = ext_float(penetration(g, body, PenKind.LENGTH, xi0))
    return [(_gap(bp, length), penetration_constant(body, PenKind.BP))]


@register("L3.3", "|ph_H - ipp_H| <= 2 log(1 + sqrt 2), both within the same of l_H")
def _horoball_heights(rng: np.random.Generator, dim: int) -> List[Check]:
    hb = _random_horoball(rng, dim)
    xi0 = _source(rng, dim, hb)
    g = _issued(rng, dim, xi0, hb)
    ph = ext_float(penetration(g, hb, PenKind.PH, xi0))
    ipp = ext_float(penetration(g, hb, PenKind.IPP, xi0))
    length = ext_float(penetration(g, hb, PenKind.LENGTH, xi0))
    k = constants.C1_PRIME_INF
    checks = [(_gap(ph, ipp), k), (_gap(ph, length), k), (_gap(ipp, length), k)]
    # the offset is exact only for sources on the boundary
    if not isinstance(xi0, Point) and 0 < length < math.inf:
        checks.append((abs(ipp - ph - IPP_PH_OFFSET), 1e-7))
    return checks


@register("L3.4", "|ftp_L - l| <= 2 c1'(eps) + 2 eps and 0 <= bp - ftp <= 2 eps")
def _fellow_traveller(rng: np.random.Generator, dim: int) -> List[Check]:
    tube = Tube(_random_line(rng, dim), _eps(rng))
    xi0 = _source(rng, dim, tube)
    g = _issued(rng, dim, xi0, tube)
    ftp = ext_float(penetration(g, tube, PenKind.FTP, xi0))
    bp = ext_float(penetration(g, tube, PenKind.BP, xi0))
    length = ext_float(penetration(g, tube, PenKind.LENGTH, xi0))
    return [
        (_gap(ftp, length), penetration_constant(tube, PenKind.FTP)),
        (ftp - bp, 0.0),
        (bp - ftp, 2 * tube.radius),
    ]


@register("L3.5", "crossratio [a, b, c, d] against d(p, q) for the projections p, q of a, c on [b, d]")
def _crossratio_projection(rng: np.random.Generator, dim: int) -> List[Check]:
    def spot() -> complex:
        return math.exp(rng.uniform(-6, 6)) * _unit(rng, dim)

    a, c = spot(), spot()
    m = random_moebius(rng, dim, 0.3)
    a, b, c, d = (apply_boundary(m, x) for x in (a, 0j, c, INFINITY))
    line = geodesic_between(b, d)
    p, q = project_to_geodesic(a, line), project_to_geodesic(c, line)
    pq = dist(p, q)
    cr = ext_float(crossratio(a, b, c, d))
    k = constants.C1_PRIME_INF
    if pq <= k:
        return [(cr, 2 * k)]
    if time_of(line, q) <= time_of(line, p):
        return [(abs(cr - pq), 2 * k)]
    return [(cr, k)]


@register("L3.6", "|crp_L - ftp_L| <= 2 c1'(inf) and |crp_L - l| <= 2 c1'(eps) + 2 c1'(inf) + 2 eps")
def _crossratio_penetration(rng: np.random.Generator, dim: int) -> List[Check]:
    tube = Tube(_random_line(rng, dim), _eps(rng))
    xi0 = _source(rng, dim, tube, boundary_only=True)
    g = _issued(rng, dim, xi0, tube)
    crp = ext_float(penetration(g, tube, PenKind.CRP, xi0))
    ftp = ext_float(penetration(g, tube, PenKind.FTP, xi0))
    length = ext_float(penetration(g, tube, PenKind.LENGTH, xi0))
    return [
        (_gap(crp, ftp), 2 * constants.C1_PRIME_INF),
        (_gap(crp, length), penetration_constant(tube, PenKind.CRP)),
    ]


# avoidance


@register("L4.2", "d(x, x') <= nu(mu) and d(gamma(-s), gamma'(-s)) <= nu(mu) e^-s")
def _entry_convergence(rng: np.random.Generator, dim: int) -> List[Check]:
    if rng.uniform() < 0.5:
        radius = rng.uniform(math.log(2), 6)
        body: Body = Ball(rand_point(rng, dim, 3.0), radius)
        mu = rng.uniform(math.log(2), radius)
    else:
        body = _random_horoball(rng, dim)
        mu = rng.uniform(math.log(2), 4)
    xi0 = _source(rng, dim, body)
    deep = shrink(body, mu)
    if not isinstance(deep, (Horoball, Ball)):
        raise Rejected()
    g1 = _through(xi0, _inside(rng, deep, dim))
    g2 = _through(xi0, _inside(rng, deep, dim))
    x, x2 = _entry(g1, body), _entry(g2, body)
    if x is None or x2 is None:
        raise Rejected()
    nu = constants.nu(mu)
    t0 = time_of(g1, x)
    c = -_beta(xi0, g2.anchor, x)
    checks = [(dist(x, x2), nu)]
    reach = dist(x, xi0) if isinstance(xi0, Point) else math.inf
    for s in (0.0, 0.5, 1.0, 2.0, 4.0):
        if s > reach:
            break
        checks.append((dist(point_at(g1, t0 - s), point_at(g2, c - s)), nu * math.exp(-s)))
    return checks


# penetration property and Lipschitz property

_PROPERTY_TABLE = [
    ("horoball", PenKind.PH),
    ("horoball", PenKind.IPP),
    ("horoball", PenKind.BP),
    ("ball", PenKind.PH),
    ("ball", PenKind.IPP),
    ("ball", PenKind.BP),
    ("tube", PenKind.FTP),
    ("tube", PenKind.BP),
    ("tube", PenKind.CRP),
    ("tube", PenKind.LENGTH),
]


def _property_sampler(kind_letter: str, kind: PenKind) -> Sampler:
    def sample(rng: np.random.Generator, dim: int) -> List[Check]:
        body = _random_body(rng, dim, kind_letter)
        xi0 = _source(rng, dim, body, boundary_only=kind is PenKind.CRP)
        g = _issued(rng, dim, xi0, body)
        f = ext_float(penetration(g, body, kind, xi0))
        length = ext_float(penetration(g, body, PenKind.LENGTH, xi0))
        return [(_gap(f, length), penetration_constant(body, kind) + 1e-8)]

    return sample


def _lipschitz_sampler(kind_letter: str, kind: PenKind) -> Sampler:
    def sample(rng: np.random.Generator, dim: int) -> List[Check]:
        body = _random_body(rng, dim, kind_letter)
        xi0 = _source(rng, dim, body)
        g = _through(xi0, _inside(rng, body, dim))
        if g.xi_plus is INFINITY:
            raise Rejected()
        g2 = ray_from(xi0, _near(rng, g.xi_plus, dim, -8, 0))
        c1, c2 = _chord_points(g, body), _chord_points(g2, body)
        if c1 is None or c2 is None:
            raise Rejected()
        f1 = ext_float(penetration(g, body, kind, xi0))
        f2 = ext_float(penetration(g2, body, kind, xi0))
        bound = 2 * max(dist(c1[0], c2[0]), dist(c1[1], c2[1]))
        return [(abs(f1 - f2), bound + 1e-8)]

    return sample


CONTINUITY_STEPS = (1e-2, 1e-4, 1e-6)
MIN_CONTINUITY_CHORD = 0.05


def _continuity_sampler(kind_letter: str) -> Sampler:
    """Length after moving the endpoint by shrinking amounts, away from tangency."""

    def sample(rng: np.random.Generator, dim: int) -> List[Check]:
        body = _random_body(rng, dim, kind_letter)
        xi0 = _source(rng, dim, body)
        g = _through(xi0, _inside(rng, body, dim))
        w = g.xi_plus
        if w is INFINITY:
            raise Rejected()
        ref = xi0.base if isinstance(xi0, Point) else (0.0 if xi0 is INFINITY else xi0)
        u = _unit(rng, dim) * (1.0 + abs(w - ref))
        lengths = []
        for g_delta in [g] + [ray_from(xi0, w + delta * u) for delta in CONTINUITY_STEPS]:
            length = ext_float(penetration(g_delta, body, PenKind.LENGTH, xi0))
            if not MIN_CONTINUITY_CHORD <= length < math.inf:
                raise Rejected()
            lengths.append(length)
        gaps = [abs(length - lengths[0]) for length in lengths[1:]]
        return [(b, a + 1e-9 * (1 + lengths[0])) for a, b in zip(gaps, gaps[1:])]

    return sample


for _body_name in ("horoball", "ball", "tube"):
    REGISTRY["cont:{}:length".format(_body_name)] = Lemma(
        "cont:{}:length".format(_body_name),
        "|l(g') - l(g)| decreases to 0 as the endpoint of g' tends to that of g on {}s".format(_body_name),
        rejection_sample(exc=Rejected)(_continuity_sampler(_body_name[0])),
    )

for _body_name, _kind in _PROPERTY_TABLE:
    REGISTRY["pen:{}:{}".format(_body_name, _kind.value)] = Lemma(
        "pen:{}:{}".format(_body_name, _kind.value),
        "|{} - l_C| <= kappa on {}s".format(_kind.value, _body_name),
        rejection_sample(exc=Rejected)(_property_sampler(_body_name[0], _kind)),
    )

for _body_name, _kind in [
    ("horoball", PenKind.LENGTH),
    ("ball", PenKind.LENGTH),
    ("tube", PenKind.LENGTH),
    ("horoball", PenKind.PH),
    ("ball", PenKind.PH),
]:
    REGISTRY["lip:{}:{}".format(_body_name, _kind.value)] = Lemma(
        "lip:{}:{}".format(_body_name, _kind.value),
        "|f(g) - f(g')| <= 2 max(d(a, a'), d(b, b')) for {} on {}s".format(_kind.value, _body_name),
        rejection_sample(exc=Rejected)(_lipschitz_sampler(_body_name[0], _kind)),
    )


def lemma_ids() -> List[str]:
    return sorted(REGISTRY)
