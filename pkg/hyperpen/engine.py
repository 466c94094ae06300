"""Constructive algorithms: unclouding, penetration prescription and their certificates.

The constructions run on finite families of bodies. Each returns a
``ConstructionTrace`` whose ``checks`` hold what was measured directly on the
final geodesic, so a truncated family is certified only for the bodies it
enumerates.

Geodesics issued from a point at infinity ``xi0`` are parametrised so that
time 0 lies on the horosphere of height 1 seen from ``xi0``; entry times of
successive lines are then comparable. Rays from an interior point start at
time 0 at the source.
"""
import cmath
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import attr
import numpy as np
import structlog
from scipy import optimize

from . import constants, dioph
from .entities import (
    IDENTITY,
    INFINITY,
    Ball,
    Body,
    Boundary,
    CFExpansion,
    ConstructionTrace,
    Geodesic,
    Horoball,
    Moebius,
    ObstacleFamily,
    ParamSet,
    Point,
    TraceStep,
    Tube,
)
from .enums import Model, PenKind, Ring, ThresholdCase
from .exceptions import (
    DegenerateGeodesicError,
    DomainError,
    FamilyError,
    PreconditionError,
    PrescriptionInfeasibleError,
    StepError,
    UnsupportedError,
)
from .models import (
    ORIGIN,
    apply_boundary,
    apply_geodesic,
    apply_point,
    dist,
    geodesic_through,
    moebius_apply,
    moebius_compose,
    moebius_inverse,
    normal_frame,
    point_at,
    ray_from,
    same_boundary,
    translation_to,
)
from .penetration import (
    IPP_PH_OFFSET,
    body_eps,
    body_gap,
    check_family,
    entry_exit,
    max_depth,
    pen_record,
    penetration,
    penetration_constant,
    shrink,
    signed_depth,
)
from .utils import as_json_dict, ext_float

logger = structlog.get_logger()

DEFAULT_HORIZON = 30.0
DEFAULT_MAX_ITER = 10 ** 4
TANGENT_CLEARANCE = 1e-9
"""Tangent rays are aimed at H[mu - TANGENT_CLEARANCE] so that they miss H[mu]."""
MIN_CHORD = 1e-6
COARSE_GRID = 72
NEAR_GRID = 120
RESIDUAL_TOL = 1e-8
REPORT_TOL = 1e-6
VIOLATION_TOL = 1e-7
LEVEL_SEARCH_STEPS = 400
CAUCHY_SAMPLES = 33
WINDOW_SAMPLES = 64
PEAK_SPACING = 10
MIN_DIGITS_BUDGET = 50
BASE_DIGITS = (1, 2)
OUT_OF_HYPOTHESIS = "planar run: local prescription is only proven in dimension at least 3"

Source = Union[Point, Boundary]


def _unit(theta: float) -> complex:
    u = cmath.exp(1j * theta)
    # keep planar endpoints on the real line
    if abs(u.imag) < 1e-15:
        return complex(u.real, 0.0)
    return u


def _phase(w: Boundary) -> float:
    if w is INFINITY or w == 0:
        return 0.0
    return cmath.phase(w)


def _source_frame(xi0: Boundary) -> Moebius:
    if xi0 is INFINITY:
        return IDENTITY
    return Moebius(0, -1, 1, -xi0)


def _rotation_to_bottom(w: Boundary) -> Moebius:
    """Rotation about (0, 1) taking the boundary point ``w`` to 0."""
    if w is INFINITY:
        return Moebius(0, 1, -1, 0)
    a = 1 / math.sqrt(1 + abs(w) ** 2)
    return Moebius(a, -w * a, w.conjugate() * a, a)


def issue(xi0: Source, endpoint: Boundary) -> Geodesic:
    """The geodesic from ``xi0`` to ``endpoint``.

    A ray starting at time 0 when ``xi0`` is an interior point; otherwise a line
    whose time 0 lies on the horosphere of height 1 seen from ``xi0``.
    """
    if isinstance(xi0, Point):
        return ray_from(xi0, endpoint)
    f = _source_frame(xi0)
    w = apply_boundary(f, endpoint)
    if w is INFINITY:
        raise DegenerateGeodesicError("endpoint coincides with the source")
    return apply_geodesic(moebius_inverse(f), Geodesic(INFINITY, w, Point(w, 1)))


def aim(xi0: Source, body: Union[Horoball, Ball]) -> Moebius:
    """Isometry normalising the source together with the axis towards ``body``.

    An interior source goes to (0, 1) with the body straight below it. A source
    at infinity goes to infinity with the body centred above 0.
    """
    if isinstance(body, Tube):
        raise UnsupportedError("tubes are seen through the normal frame of their core")
    if isinstance(xi0, Point):
        m = moebius_inverse(translation_to(xi0))
        if isinstance(body, Horoball):
            w = apply_boundary(m, body.center)
        else:
            c = apply_point(m, body.center)
            if dist(c, ORIGIN) == 0:
                raise DomainError("source is the centre of the ball")
            w = geodesic_through(ORIGIN, c).xi_plus
        return moebius_compose(_rotation_to_bottom(w), m)
    f = _source_frame(xi0)
    if isinstance(body, Horoball):
        a = apply_boundary(f, body.center)
        if a is INFINITY:
            raise DomainError("source is the point at infinity of the horoball")
    else:
        a = apply_point(f, body.center).base
    return moebius_compose(Moebius(1, -a, 0, 1), f)


def _local_source(xi0: Source) -> Source:
    return ORIGIN if isinstance(xi0, Point) else INFINITY


def tangent_radius(source: Source, body: Union[Horoball, Ball]) -> float:
    """|w| of the endpoints of the geodesics from an aimed source tangent to an aimed body."""
    if isinstance(source, Point):
        if isinstance(body, Horoball):
            gap = -signed_depth(source, body)
            if gap <= 0:
                raise DomainError("source is not outside the horoball")
            s = math.exp(-gap)
        else:
            d = dist(source, body.center)
            if d <= body.radius:
                raise DomainError("source is not outside the ball")
            # sinh r / sinh d without overflow
            s = math.exp(body.radius - d) * -math.expm1(-2 * body.radius) / -math.expm1(-2 * d)
        return s / (1 + math.sqrt((1 - s) * (1 + s)))
    if isinstance(body, Horoball):
        return body.size / 2
    return body.center.height * math.sinh(body.radius)


@attr.attrs(frozen=True)
class LevelSet(object):
    """Endpoints ``center + radius e^{iθ}``, in the local frame ``frame``, of the
    geodesics from ``source`` on which the map ``kind`` of ``body`` equals ``value``.

    ``source`` and ``body`` are already expressed in the local frame.
    """

    frame: Moebius = attr.attrib()
    source: Source = attr.attrib()
    body: Body = attr.attrib()
    kind: PenKind = attr.attrib()
    value: float = attr.attrib(converter=float)
    radius: float = attr.attrib(converter=float)
    center: complex = attr.attrib(default=0j, converter=complex)

    def endpoint(self, theta: float) -> complex:
        return self.center + self.radius * _unit(theta)

    def geodesic(self, theta: float) -> Geodesic:
        return issue(self.source, self.endpoint(theta))

    def theta_of(self, w: Boundary) -> float:
        if w is INFINITY:
            return 0.0
        return _phase(w - self.center)

    def f0(self, g: Geodesic) -> float:
        return ext_float(penetration(g, self.body, self.kind, self.source))

    def localize(self, x: Any) -> Any:
        return moebius_apply(self.frame, x)

    def to_global(self, x: Any) -> Any:
        return moebius_apply(moebius_inverse(self.frame), x)

    as_dict = as_json_dict


def _solve_radius(source: Source, body: Body, kind: PenKind, h: float, rho_t: float) -> float:
    def excess(u: float) -> float:
        g = issue(source, complex(math.exp(u)))
        return min(ext_float(penetration(g, body, kind, source)), 1e300) - h

    hi = math.log(rho_t)
    if excess(hi) >= 0:
        raise PreconditionError("h", h, "h must exceed the value on tangent geodesics")
    lo = hi
    for _ in range(LEVEL_SEARCH_STEPS):
        lo -= 1.0
        if excess(lo) >= 0:
            break
    else:
        raise PreconditionError(
            "h", h, "no geodesic from the source reaches {} = {}".format(kind.value, h)
        )
    return math.exp(optimize.brentq(excess, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500))


def _tube_level(tube: Tube, kind: PenKind, h: float, xi0: Source) -> LevelSet:
    if kind is not PenKind.FTP:
        raise UnsupportedError("level sets on tubes are built for ftp only")
    if h <= 0:
        raise PreconditionError("h", h, "h must be positive")
    frame = normal_frame(tube.core)
    src = moebius_apply(frame, xi0)
    if isinstance(src, Point):
        t0 = 0.5 * math.log(abs(src.base) ** 2 + src.height ** 2)
    elif src is INFINITY or src == 0:
        raise DomainError("source is an endpoint of the tube core")
    else:
        t0 = math.log(abs(src))
    local = moebius_apply(frame, tube)
    return LevelSet(frame, src, local, kind, h, math.exp(t0 + h))


def level_set(C0: Body, kind: PenKind, h: float, xi0: Source) -> LevelSet:
    """The set of endpoints of geodesics from ``xi0`` with f0 = h, as a circle in a local frame."""
    if isinstance(C0, Tube):
        return _tube_level(C0, kind, h, xi0)
    if isinstance(xi0, Point) and signed_depth(xi0, C0) >= 0:
        raise DomainError("source lies in the designated body")
    frame = aim(xi0, C0)
    src = _local_source(xi0)
    body = moebius_apply(frame, C0)
    rho = _solve_radius(src, body, kind, h, tangent_radius(src, body))
    return LevelSet(frame, src, body, kind, h, rho)


def initial_geodesic(
    C0: Body, f0kind: PenKind, h: float, xi0: Source, angle: float = 0.0
) -> Geodesic:
    """A geodesic from ``xi0`` on which the map ``f0kind`` of ``C0`` takes the value ``h``."""
    level = level_set(C0, f0kind, h, xi0)
    return level.to_global(level.geodesic(angle))


def _chord(g: Geodesic, body: Body) -> float:
    return min(ext_float(pen_record(g, body).value), 1e300)


@attr.attrs(frozen=True)
class Thresholds(object):
    """Proven range of a local prescription for one pair of bodies."""

    case: ThresholdCase = attr.attrib()
    eps: Any = attr.attrib()
    h_min: float = attr.attrib()
    h_max: float = attr.attrib()
    h0_min: float = attr.attrib()

    def violations(self, h: float, target: Optional[float] = None) -> List[str]:
        out = []
        if h < self.h_min:
            out.append("h = {:.6g} is below the proven minimum {:.6g}".format(h, self.h_min))
        if h > self.h_max:
            out.append("h = {:.6g} is above the proven maximum {:.6g}".format(h, self.h_max))
        if target is not None and target < self.h0_min:
            out.append(
                "target = {:.6g} is below the proven minimum {:.6g}".format(target, self.h0_min)
            )
        return out

    as_dict = as_json_dict


def _common_eps(bodies: Sequence[Optional[Body]]) -> Any:
    finite = [body_eps(b) for b in bodies if b is not None and not isinstance(b, Horoball)]
    return min(finite) if finite else INFINITY


def _map_offset(C0: Body, kind: PenKind, reference: PenKind) -> float:
    if kind is reference:
        return 0.0
    if kind is PenKind.IPP and reference is PenKind.PH and isinstance(C0, Horoball):
        return IPP_PH_OFFSET
    return penetration_constant(C0, kind) + penetration_constant(C0, reference)


def prescription_thresholds(
    C0: Body,
    f0kind: PenKind,
    Cn: Optional[Body] = None,
    delta: float = 0.0,
    eps: Any = None,
) -> Thresholds:
    """h^min, h^max and h0^min of the local prescription with C0 first and Cn second.

    ``eps`` defaults to the common convexity of the two bodies.
    """
    if eps is None:
        eps = _common_eps([C0, Cn])
    k1 = constants.c1_prime(eps)
    if isinstance(C0, Tube):
        offset = _map_offset(C0, f0kind, PenKind.FTP)
        e = float(C0.radius)
        h_min = 4 * k1 + 2 * e + delta + offset
        if Cn is not None and ext_float(body_gap(C0, Cn)) >= 0:
            return Thresholds(ThresholdCase.DISJOINT, eps, h_min, math.inf, 0.0)
        return Thresholds(ThresholdCase.TUBE, eps, h_min, math.inf, delta)
    offset = _map_offset(C0, f0kind, PenKind.PH)
    h_min = 2 * k1 + 2 * delta + offset
    if isinstance(C0, Horoball):
        return Thresholds(ThresholdCase.HOROBALL, eps, h_min, math.inf, 2 * delta)
    h_max = 2 * C0.radius - 2 * k1 - offset
    return Thresholds(ThresholdCase.BALL, eps, h_min, h_max, 2 * delta)


@attr.attrs(frozen=True)
class LocalPrescription(object):
    geodesic: Geodesic = attr.attrib()
    theta: float = attr.attrib()
    f0_residual: float = attr.attrib()
    target_residual: float = attr.attrib()
    grid: Tuple[Tuple[float, float], ...] = attr.attrib(converter=tuple)
    warnings: Tuple[str, ...] = attr.attrib(factory=tuple, converter=tuple)

    as_dict = as_json_dict


def _near_offsets() -> np.ndarray:
    step = 2 * math.pi / COARSE_GRID
    near = np.geomspace(step * 1e-12, step, NEAR_GRID)
    coarse = step * np.arange(2, COARSE_GRID // 2 + 1)
    return np.concatenate([near, coarse])


def _walk(
    level: LevelSet, body: Body, target: float, theta0: float, model: Model
) -> Tuple[float, List[Tuple[float, float]]]:
    """Angle of the crossing of ℓ_body = target nearest to ``theta0`` on the level set."""

    def ell(theta: float) -> float:
        return _chord(level.geodesic(theta), body)

    if model is Model.H2:
        grid = [(theta, ell(theta)) for theta in (0.0, math.pi)]
        for theta, value in grid:
            if abs(value - target) <= RESIDUAL_TOL:
                return theta, grid
        raise PrescriptionInfeasibleError(
            grid, "neither point of the planar level set has length {}".format(target)
        )
    step = 2 * math.pi / COARSE_GRID
    grid = [(theta0 + j * step, ell(theta0 + j * step)) for j in range(COARSE_GRID)]
    best: Optional[Tuple[float, float]] = None
    for sign in (1.0, -1.0):
        prev = 0.0
        for off in _near_offsets():
            if ell(theta0 + sign * off) <= target:
                root = optimize.brentq(
                    lambda x: ell(theta0 + sign * x) - target, prev, off, xtol=1e-15, maxiter=500
                )
                if best is None or root < best[0]:
                    best = (root, theta0 + sign * root)
                break
            prev = off
    if best is None:
        raise PrescriptionInfeasibleError(
            grid, "no angle on the level set brings the length down to {}".format(target)
        )
    return best[1], grid


def local_prescribe(
    C0: Body,
    f0kind: PenKind,
    h: float,
    Cn: Body,
    target: float,
    xi0: Source,
    current: Geodesic,
    model: Model = Model.H3,
    delta: float = 0.0,
) -> LocalPrescription:
    """Move ``current`` along {f0 = h} until the length inside ``Cn`` equals ``target``."""
    level = level_set(C0, f0kind, h, xi0)
    body = level.localize(Cn)
    theta0 = level.theta_of(level.localize(current.xi_plus))
    warnings = prescription_thresholds(C0, f0kind, Cn, delta).violations(h, target)
    if model is Model.H2:
        warnings.append(OUT_OF_HYPOTHESIS)
    here = _chord(level.geodesic(theta0), body)
    if abs(here - target) <= RESIDUAL_TOL:
        theta, grid = theta0, [(theta0, here)]
    elif here < target:
        raise PreconditionError(
            "target", target, "current length {:.6g} is already below the target".format(here)
        )
    else:
        theta, grid = _walk(level, body, target, theta0, model)
    g = level.geodesic(theta)
    iv0, ivn = entry_exit(g, level.body), entry_exit(g, body)
    if iv0 is not None and ivn is not None and ext_float(ivn[0]) < ext_float(iv0[0]):
        raise PrescriptionInfeasibleError(grid, "the prescribed geodesic meets Cn before C0")
    target_residual = abs(_chord(g, body) - target)
    if target_residual > RESIDUAL_TOL:
        raise PrescriptionInfeasibleError(
            grid, "target residual {:.3g} above tolerance {:.1g}".format(target_residual, RESIDUAL_TOL)
        )
    for w in warnings:
        logger.warning("local_prescribe_warning", message=w)
    return LocalPrescription(
        geodesic=level.to_global(g),
        theta=theta,
        f0_residual=abs(level.f0(g) - h),
        target_residual=target_residual,
        grid=grid,
        warnings=warnings,
    )


def verify_avoidance(
    g: Geodesic,
    bodies: Sequence[Body],
    mu: float,
    horizon: float,
    t_lo: float = 0.0,
    indices: Optional[Sequence[int]] = None,
) -> Tuple[Dict[int, float], bool]:
    """Largest depth of ``g`` in every body it meets over [t_lo, horizon].

    The second item is true when no depth reaches ``mu - 1e-6``, that is when
    ``g`` penetrates no H[mu - 1e-6].
    """
    if indices is None:
        indices = range(len(bodies))
    depths = {}
    for i in indices:
        iv = entry_exit(g, bodies[i])
        if iv is None:
            continue
        lo, hi = max(ext_float(iv[0]), t_lo), min(ext_float(iv[1]), horizon)
        if lo > hi:
            continue
        depths[i] = max_depth(g, bodies[i], lo, hi)
    return depths, all(d < mu - REPORT_TOL for d in depths.values())


def _first_entry(
    g: Geodesic, targets: Dict[int, Body], after: float, horizon: float
) -> Optional[Tuple[int, float]]:
    best = None
    for i, body in targets.items():
        iv = entry_exit(g, body)
        if iv is None:
            continue
        lo, hi = ext_float(iv[0]), ext_float(iv[1])
        if hi - lo < MIN_CHORD or lo <= after or lo >= horizon:
            continue
        if best is None or lo < best[1]:
            best = (i, lo)
    return best


def _tangent(xi0: Source, body: Body, mu1: float, current: Geodesic, k: int, i: int) -> Geodesic:
    m = aim(xi0, body)
    src = _local_source(xi0)
    local = moebius_apply(m, shrink(body, mu1 - TANGENT_CLEARANCE))
    try:
        rho = tangent_radius(src, local)
    except DomainError as exc:
        raise StepError(
            k,
            {"body": i, "reason": str(exc), "current_endpoint": current.xi_plus},
            "no geodesic from the source is tangent to body {}".format(i),
        )
    w = rho * _unit(_phase(apply_boundary(m, current.xi_plus)))
    return issue(xi0, apply_boundary(moebius_inverse(m), w))


def _cauchy_excess(
    steps: Sequence[TraceStep], mu2: float, horizon: float, is_ray: bool
) -> float:
    """Largest d(γ_k(t), γ_{k-1}(t)) - μ2 e^{t - t_k} over t up to t_k."""
    worst = -math.inf
    for prev, step in zip(steps, steps[1:]):
        t_k = step.t_entry
        lo = 0.0 if is_ray else t_k - horizon
        for t in np.linspace(lo, t_k, CAUCHY_SAMPLES):
            d = dist(point_at(step.geodesic, t), point_at(prev.geodesic, t))
            worst = max(worst, d - mu2 * math.exp(t - t_k))
    return worst


def _entry_gaps(steps: Sequence[TraceStep]) -> List[float]:
    times = [s.t_entry for s in steps if s.obstacle_index is not None]
    return [b - a for a, b in zip(times, times[1:])]


def uncloud(
    fam: ObstacleFamily,
    xi0: Source,
    mu1: float,
    horizon: float = DEFAULT_HORIZON,
    max_iter: int = DEFAULT_MAX_ITER,
    endpoint: Optional[Boundary] = None,
) -> ConstructionTrace:
    """Bend a geodesic from ``xi0`` until it avoids every H[μ5] of the family.

    Each step takes the first shrunk body H[mu1] entered after the previous entry
    time and replaces the geodesic by the one from ``xi0`` tangent to it, on the
    side of the current endpoint.
    """
    mu2, mu3, mu4, mu5 = constants.mu_chain(mu1)
    if any(isinstance(b, Tube) for b in fam.bodies):
        raise UnsupportedError("unclouding needs horoballs and balls")
    gap = check_family(fam)
    if gap < -1e-12:
        raise FamilyError((-1, -1), gap, "unclouding needs bodies with disjoint interiors")
    active = []
    for i, body in enumerate(fam.bodies):
        if isinstance(xi0, Point):
            if signed_depth(xi0, body) > 0:
                raise DomainError("source lies inside body {}".format(i))
        elif isinstance(body, Horoball) and same_boundary(xi0, body.center):
            if i != fam.designated_index:
                raise DomainError("source is the centre of body {}".format(i))
            continue
        active.append(i)
    targets = {i: shrink(fam.bodies[i], mu1) for i in active}
    if endpoint is None:
        if not isinstance(xi0, Point):
            raise PreconditionError("endpoint", None, "a source at infinity needs an initial endpoint")
        endpoint = xi0.base
    g = issue(xi0, endpoint)
    is_ray = isinstance(xi0, Point)
    t_lo = 0.0 if is_ray else -horizon
    steps = [TraceStep(0, None, 0.0, g.xi_plus, g)]
    t_prev = -math.inf
    converged = False
    for k in range(1, max_iter + 1):
        hit = _first_entry(g, targets, t_prev, horizon)
        if hit is None:
            converged = True
            break
        i, t_hit = hit
        g = _tangent(xi0, fam.bodies[i], mu1, g, k, i)
        # the bent geodesic's entry into the full body, not the shrunk one
        iv = entry_exit(g, fam.bodies[i])
        t_k = ext_float(iv[0]) if iv is not None else t_hit
        steps.append(TraceStep(k, i, t_k, g.xi_plus, g))
        logger.debug("uncloud_step", k=k, body=i, t_entry=t_k, t_hit=t_hit)
        t_prev = t_hit

    depths, avoids = verify_avoidance(g, fam.bodies, mu5, horizon, t_lo, active)
    gaps = _entry_gaps(steps)
    cauchy = _cauchy_excess(steps, mu2, horizon, is_ray)
    checks = {
        "mu_chain": [mu1, mu2, mu3, mu4, mu5],
        "avoidance_radius": mu5,
        "avoids": avoids,
        "max_depth": max(depths.values()) if depths else 0.0,
        "entry_gaps": gaps,
        "gaps_ok": all(d >= mu4 - REPORT_TOL for d in gaps),
        "cauchy_excess": cauchy if math.isfinite(cauchy) else 0.0,
        "cauchy_ok": cauchy <= REPORT_TOL,
        "converged": converged,
        "truncation": fam.note,
    }
    ok = converged and avoids and checks["gaps_ok"] and checks["cauchy_ok"]
    warnings = [] if converged else ["max_iter reached before the geodesic cleared the horizon"]
    logger.info("uncloud", steps=len(steps), ok=ok, max_depth=checks["max_depth"])
    return ConstructionTrace(steps, g, depths, checks, ok=ok, warnings=warnings)


def _relative_records(
    g: Geodesic, bodies: Sequence[Body], c0_index: int, k: int
) -> Dict[int, Tuple[float, float, float]]:
    """(t_minus, t_plus, length) of every body met, times relative to the entry into C0."""
    iv0 = entry_exit(g, bodies[c0_index])
    if iv0 is None:
        raise StepError(k, {"reason": "geodesic misses C0"}, "the geodesic left the designated body")
    t0 = ext_float(iv0[0])
    out = {}
    for i, body in enumerate(bodies):
        if i == c0_index:
            continue
        iv = entry_exit(g, body)
        if iv is None:
            continue
        lo, hi = ext_float(iv[0]), ext_float(iv[1])
        out[i] = (lo - t0, hi - t0, min(hi - lo, 1e300))
    return out


def _next_violator(
    records: Dict[int, Tuple[float, float, float]],
    delta0: float,
    t_prev: Optional[float],
    horizon: float,
    bound: float,
) -> Optional[Tuple[int, float]]:
    best = None
    for i, (lo, hi, length) in records.items():
        if hi <= delta0 or lo >= horizon or length <= bound + VIOLATION_TOL:
            continue
        if t_prev is not None and lo <= t_prev + 1e-9:
            continue
        if best is None or lo < best[1]:
            best = (i, lo)
    return best


def prescribe(
    fam: ObstacleFamily,
    f0kind: PenKind,
    h: float,
    p: ParamSet,
    xi0: Source,
    horizon: float = DEFAULT_HORIZON,
    max_iter: int = DEFAULT_MAX_ITER,
    h0_prime: Optional[float] = None,
    endpoint: Optional[Boundary] = None,
    model: Model = Model.H3,
) -> ConstructionTrace:
    """Build a geodesic with f0 = h on the designated body and lengths at most h1' elsewhere.

    Violators are handled in order of entry: the first body after the last reset
    whose length exceeds h0' is brought down to exactly h0' by a local prescription.
    """
    c0_index = fam.designated_index
    if c0_index is None:
        raise PreconditionError("designated_index", None, "prescription needs a designated body")
    C0 = fam.bodies[c0_index]
    table = constants.derived_constants(p)
    h0p = table.h0 if h0_prime is None else float(h0_prime)
    if h0p < table.h0 - 1e-12:
        raise PreconditionError("h0_prime", h0p, "h0' must be at least h0 = {:.6g}".format(table.h0))
    h1p = table.h1_prime(h0p)
    if h < h1p:
        raise PreconditionError("h", h, "h = {} is below h1' = {:.6g}".format(h, h1p))
    check_family(fam)
    warnings = prescription_thresholds(C0, f0kind, None, fam.delta0, p.eps0.value).violations(h)
    if model is Model.H2:
        warnings.append(OUT_OF_HYPOTHESIS)

    level = level_set(C0, f0kind, h, xi0)
    bodies = [level.localize(b) for b in fam.bodies]
    theta = 0.0 if endpoint is None else level.theta_of(level.localize(endpoint))
    g = level.geodesic(theta)
    first = level.to_global(g)
    steps = [TraceStep(0, None, 0.0, first.xi_plus, first)]
    t_prev: Optional[float] = None
    converged = False
    for k in range(1, max_iter + 1):
        records = _relative_records(g, bodies, c0_index, k)
        nxt = _next_violator(records, fam.delta0, t_prev, horizon, h0p)
        if nxt is None:
            converged = True
            break
        n = nxt[0]
        theta, _ = _walk(level, bodies[n], h0p, level.theta_of(g.xi_plus), model)
        g = level.geodesic(theta)
        t_k = _relative_records(g, bodies, c0_index, k).get(n, (math.inf,))[0]
        glob = level.to_global(g)
        steps.append(TraceStep(k, n, t_k, glob.xi_plus, glob))
        logger.debug("prescribe_step", k=k, body=n, t_entry=t_k, theta=theta)
        t_prev = t_k

    records = _relative_records(g, bodies, c0_index, len(steps))
    report = {
        i: length
        for i, (lo, hi, length) in records.items()
        if hi > fam.delta0 and lo < horizon
    }
    f0 = level.f0(g)
    gaps = _entry_gaps(steps)
    checks = {
        "f0": f0,
        "f0_residual": abs(f0 - h),
        "f0_ok": abs(f0 - h) <= REPORT_TOL,
        "h0_prime": h0p,
        "h1_prime": h1p,
        "h1_dprime": table.h1_dprime(h0p),
        "c6": table.c6,
        "max_length": max(report.values()) if report else 0.0,
        "bound_ok": all(v <= h1p + REPORT_TOL for v in report.values()),
        "entry_gaps": gaps,
        "gaps_ok": all(d >= table.c6 - REPORT_TOL for d in gaps),
        "converged": converged,
        "truncation": fam.note,
    }
    if not converged:
        warnings.append("max_iter reached with violators left")
    ok = converged and checks["f0_ok"] and checks["bound_ok"] and checks["gaps_ok"]
    logger.info("prescribe", steps=len(steps), ok=ok, max_length=checks["max_length"])
    return ConstructionTrace(steps, level.to_global(g), report, checks, ok=ok, warnings=warnings)


def prescribe_line(
    fam: ObstacleFamily,
    f0kind: PenKind,
    h: float,
    p: ParamSet,
    xi0: Boundary,
    horizon: float = DEFAULT_HORIZON,
    max_iter: int = DEFAULT_MAX_ITER,
    h0_prime: Optional[float] = None,
    endpoint: Optional[Boundary] = None,
    model: Model = Model.H3,
) -> ConstructionTrace:
    """Two passes of ``prescribe``: from ``xi0``, then back from the far endpoint.

    The final line is checked against the two-sided bound h1'' on every body it
    meets within ``horizon`` of its entry into C0, in both directions.
    """
    if isinstance(xi0, Point):
        raise DomainError("a geodesic line needs a source at infinity")
    first = prescribe(fam, f0kind, h, p, xi0, horizon, max_iter, h0_prime, endpoint, model)
    g1 = first.final_geodesic
    second = prescribe(
        fam, f0kind, h, p, g1.xi_plus, horizon, max_iter, h0_prime, g1.xi_minus, model
    )
    g = second.final_geodesic
    table = constants.derived_constants(p)
    h0p = table.h0 if h0_prime is None else float(h0_prime)
    h1pp = table.h1_dprime(h0p)
    records = _relative_records(g, fam.bodies, fam.designated_index, len(second.steps))
    report = {
        i: length for i, (lo, hi, length) in records.items() if hi > -horizon and lo < horizon
    }
    checks = dict(second.checks)
    checks.update(
        {
            "h1_dprime": h1pp,
            "passes": [len(first.steps), len(second.steps)],
            "two_sided_max": max(report.values()) if report else 0.0,
            "two_sided_ok": all(v <= h1pp + REPORT_TOL for v in report.values()),
        }
    )
    steps = list(first.steps) + [
        attr.evolve(s, k=s.k + len(first.steps)) for s in second.steps
    ]
    ok = first.ok and second.checks["converged"] and checks["f0_ok"] and checks["two_sided_ok"]
    warnings = tuple(first.warnings) + tuple(w for w in second.warnings if w not in first.warnings)
    logger.info("prescribe_line", ok=ok, h1_dprime=h1pp, two_sided_max=checks["two_sided_max"])
    return ConstructionTrace(steps, g, report, checks, ok=ok, warnings=warnings)


@attr.attrs(frozen=True)
class RecurrenceResult(object):
    max_u: float = attr.attrib()
    min_u: float = attr.attrib()
    x_n: float = attr.attrib()
    upper: float = attr.attrib()
    ok: bool = attr.attrib()

    as_dict = as_json_dict


def x_sequence(cp: float, cpp: float, n: int) -> float:
    """x_n of x_0 = 0, x_{k+1} = x_k + exp(cp x_k - (n - k) cpp + 2 cp)."""
    x = 0.0
    for k in range(n):
        x += math.exp(cp * x - (n - k) * cpp + 2 * cp)
    return x


def u_recurrence(
    c: float,
    cp: float,
    cpp: float,
    h_star: float,
    t_seq: Sequence[float],
    grid: int = 2001,
) -> RecurrenceResult:
    """Simulate u_n(t) = c e^{t - t_n} + sup_{|s - t| <= cp e^{t - t_n}} u_{n-1}(s) for t <= t_n.

    u_0 is constant h_star and u_n = h_star past t_n. The sup over each window is
    taken on WINDOW_SAMPLES interior samples plus its endpoints, which can only
    under-estimate it, so the reported maximum stays below the exact one.
    """
    for name, value in (("c", c), ("cp", cp), ("cpp", cpp), ("h_star", h_star)):
        if value < 0:
            raise PreconditionError(name, value, "{} must be nonnegative".format(name))
    if cpp < 3 * cp + constants.LOG2 - 1e-12:
        raise PreconditionError("cpp", cpp, "cpp must be at least 3 cp + log 2")
    ts = np.asarray(t_seq, dtype=float)
    if ts.size == 0 or ts[0] < 0 or np.any(np.diff(ts) < cpp - 1e-12):
        raise PreconditionError("t_seq", list(t_seq), "times must be nonnegative with gaps >= cpp")
    t = np.union1d(np.linspace(0.0, ts[-1] + cpp, grid), ts)
    offsets = np.linspace(-1.0, 1.0, WINDOW_SAMPLES + 2)
    u = np.full_like(t, h_star)
    max_u, min_u = float(h_star), float(h_star)
    for tn in ts:
        before = t <= tn
        scale = np.exp(t[before] - tn)
        s = np.clip(t[before, None] + cp * scale[:, None] * offsets[None, :], 0.0, None)
        nxt = np.full_like(u, h_star)
        nxt[before] = c * scale + np.interp(s, t, u).max(axis=1)
        u = nxt
        max_u, min_u = max(max_u, float(u.max())), min(min_u, float(u.min()))
    x_n = max(x_sequence(cp, cpp, n) for n in range(ts.size + 1))
    upper = h_star + 2 * c
    ok = max_u <= upper + REPORT_TOL and min_u >= h_star - REPORT_TOL and x_n <= 1.0
    return RecurrenceResult(max_u, min_u, x_n, upper, ok)


@attr.attrs(frozen=True)
class LimsupResult(object):
    cf_digits: Tuple[int, ...] = attr.attrib(converter=tuple)
    achieved_limsup: float = attr.attrib()
    excursion_trace: Tuple[float, ...] = attr.attrib(converter=tuple)
    peaks: Tuple[int, ...] = attr.attrib(converter=tuple)
    target_magnitude: float = attr.attrib()
    non_peak_max: float = attr.attrib()
    cap: float = attr.attrib()

    as_dict = as_json_dict


def limsup_prescribe(h: float, digits_budget: int = 400) -> LimsupResult:
    """Digits of a point whose excursion heights into Horoball(∞, 1) have limsup h.

    The digits alternate in BASE_DIGITS; every PEAK_SPACING-th excursion gets a
    large digit tuned so that α + β is as close as possible to 2 e^{h/2}.
    """
    threshold = constants.hall_and_lagrange_bounds().half_height
    if h < threshold:
        raise PreconditionError("h", h, "h must be at least {:.6g}".format(threshold))
    if digits_budget < MIN_DIGITS_BUDGET:
        raise PreconditionError(
            "digits_budget", digits_budget, "at least {} digits".format(MIN_DIGITS_BUDGET)
        )
    target = 2 * math.exp(h / 2)
    # digits[i] is a_{i+1}
    digits = [BASE_DIGITS[i % len(BASE_DIGITS)] for i in range(digits_budget)]
    peaks = list(range(PEAK_SPACING, digits_budget - PEAK_SPACING + 1, PEAK_SPACING))
    for n in peaks:
        beta = dioph.cf_value(CFExpansion(0, digits[n - 1::-1]))
        alpha_next = dioph.cf_value(CFExpansion(digits[n + 1], digits[n + 2:]))
        digits[n] = max(1, int(round(target - beta - 1.0 / alpha_next)))
    horizon = digits_budget - PEAK_SPACING
    trace = dioph.excursions(CFExpansion(0, digits), horizon)
    peak_set = set(peaks)
    rest = [v for n, v in enumerate(trace, start=1) if n not in peak_set]
    result = LimsupResult(
        cf_digits=digits,
        achieved_limsup=dioph.limsup_estimate(trace),
        excursion_trace=trace,
        peaks=[n for n in peaks if n <= horizon],
        target_magnitude=target,
        non_peak_max=max(rest) if rest else 0.0,
        cap=constants.c2_dprime(INFINITY),
    )
    logger.info("limsup_prescribe", h=h, budget=digits_budget, achieved=result.achieved_limsup)
    return result


@attr.attrs(frozen=True)
class DeskInstance(object):
    """A ready-made input of ``uncloud`` or ``prescribe`` at desk scale."""

    family: ObstacleFamily = attr.attrib()
    source: Source = attr.attrib()
    horizon: float = attr.attrib(default=DEFAULT_HORIZON)
    mu1: Optional[float] = attr.attrib(default=None)
    kind: Optional[PenKind] = attr.attrib(default=None)
    h: Optional[float] = attr.attrib(default=None)
    params: Optional[ParamSet] = attr.attrib(default=None)
    endpoint: Optional[Boundary] = attr.attrib(default=None)


def ford_uncloud_instance(bound: int = 40, mu1: float = 1.042, horizon: float = 20.0) -> DeskInstance:
    fam = dioph.ford_family(bound, Ring.RATIONAL, (complex(-1, 0), complex(2, 0)))
    return DeskInstance(
        family=fam.as_obstacles(), source=Point(0.5, 0.9), horizon=horizon, mu1=mu1
    )


def ford_prescribe_instance(bound: int = 10, h: float = 7.0, horizon: float = DEFAULT_HORIZON) -> DeskInstance:
    """Gaussian Ford spheres over the unit square with C0 = Horoball(∞, 1) and f0 = ph.

    The source sits at distance 2 e^{h/2} from the hinted endpoint, so the line
    between them already has penetration height h in C0.
    """
    fam = dioph.ford_family(bound, Ring.GAUSSIAN, (complex(0, 0), complex(1, 1)))
    xi_plus = complex(0.502, 0.5)
    return DeskInstance(
        family=fam.as_obstacles(),
        source=xi_plus - 2 * math.exp(h / 2),
        horizon=horizon,
        kind=PenKind.PH,
        h=h,
        params=constants.params_for(INFINITY, 0.0, constants.C1_PRIME_INF),
        endpoint=xi_plus,
    )


def ball_prescribe_instance(h: float = 110.0, radius: float = 60.0) -> DeskInstance:
    """A single ball of radius ``radius`` at distance 1 below (0, 1), with f0 = ph."""
    ball = Ball(Point(0, math.exp(-(radius + 1))), radius)
    fam = ObstacleFamily([ball], designated_index=0, note="single ball")
    return DeskInstance(
        family=fam,
        source=ORIGIN,
        kind=PenKind.PH,
        h=h,
        params=constants.params_for(constants.r0_min(), 0.0, constants.C1_PRIME_INF),
    )
