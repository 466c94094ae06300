"""Siegel domain, Heisenberg group and quaternionic ℍ⁵ kernels.

Complex hyperbolic distances are the raw Riemannian ones (holomorphic
curvature -1); ``d_prime`` halves them. The two never mix implicitly.

Boundary points of the Siegel domain other than ∞ are identified with
Heisenberg elements through ``(ζ, v) -> u_{ζ,v}(0, 0) = (|ζ|^2/2 - iv/2, ζ)``.
"""
import math
from typing import Dict, Tuple, Union

import numpy as np
import structlog

from .entities import INFINITY, HeisPoint, Infinity, QMat2, Quaternion, SiegelPoint
from .exceptions import DegenerateGeodesicError, DomainError, FixesInfinityError, NotInUQError
from .utils import arcosh

logger = structlog.get_logger()

UQ_TOL = 1e-9
BOUNDARY_TOL = 1e-12

SiegelLike = Union[SiegelPoint, Infinity]
H5Point = Tuple[Quaternion, float]


def _hdot(zeta, zeta_prime) -> complex:
    """ζ* ζ'."""
    return sum(z.conjugate() * w for z, w in zip(zeta, zeta_prime))


def _norm2(zeta) -> float:
    return sum(abs(z) ** 2 for z in zeta)


def heis_identity(n: int = 2) -> HeisPoint:
    return HeisPoint([0j] * (n - 1), 0.0)


def heis_mul(p: HeisPoint, q: HeisPoint) -> HeisPoint:
    if len(p.zeta) != len(q.zeta):
        raise DomainError("Heisenberg elements of different dimensions")
    zeta = [a + b for a, b in zip(p.zeta, q.zeta)]
    return HeisPoint(zeta, p.v + q.v - 2 * _hdot(p.zeta, q.zeta).imag)


def heis_inv(p: HeisPoint) -> HeisPoint:
    return HeisPoint([-z for z in p.zeta], -p.v)


def _radial(p: HeisPoint) -> Tuple[float, float]:
    z2 = _norm2(p.zeta)
    return z2, math.hypot(z2, p.v)


def cygan_norm(p: HeisPoint) -> float:
    """(|ζ|^4 + v^2)^(1/4)."""
    return math.sqrt(_radial(p)[1])


def cygan_mod_norm(p: HeisPoint) -> float:
    """((|ζ|^4 + v^2)^(1/2) + |ζ|^2)^(1/2)."""
    z2, r = _radial(p)
    return math.sqrt(r + z2)


def cygan(p: HeisPoint, q: HeisPoint) -> float:
    return cygan_norm(heis_mul(heis_inv(p), q))


def cygan_mod(p: HeisPoint, q: HeisPoint) -> float:
    return cygan_mod_norm(heis_mul(heis_inv(p), q))


def heis_to_siegel(p: HeisPoint) -> SiegelPoint:
    w0 = _norm2(p.zeta) / 2 - 0.5j * p.v
    return SiegelPoint(w0, p.zeta)


def siegel_to_heis(x: SiegelPoint) -> HeisPoint:
    if abs(x.level) > BOUNDARY_TOL * (1 + abs(x.w0)):
        raise DomainError("{!r} is not on the boundary".format(x))
    return HeisPoint(x.w, -2 * x.w0.imag)


def siegel_cygan_mod(x: SiegelPoint) -> float:
    """Modified Cygan distance from the boundary point ``x`` to (0, 0), sqrt(2|w0| + |w|^2)."""
    return math.sqrt(2 * abs(x.w0) + _norm2(x.w))


def q_matrix(n: int = 2) -> np.ndarray:
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[0, n] = m[n, 0] = -1
    for i in range(1, n):
        m[i, i] = 1
    return m


def x0_matrix(n: int = 2) -> np.ndarray:
    """The involution exchanging ∞ and (0, 0)."""
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[0, n] = m[n, 0] = 1
    for i in range(1, n):
        m[i, i] = 1
    return m


def diag_matrix(lam: complex, n: int = 2) -> np.ndarray:
    """diag(λ, I, 1/conj(λ)), which fixes ∞ and (0, 0)."""
    m = np.eye(n + 1, dtype=complex)
    m[0, 0] = lam
    m[n, n] = 1 / np.conj(lam)
    return m


def u_matrix(p: HeisPoint) -> np.ndarray:
    k = len(p.zeta)
    n = k + 1
    zeta = np.array(p.zeta, dtype=complex)
    m = np.eye(n + 1, dtype=complex)
    m[0, 1:n] = np.conj(zeta)
    m[0, n] = _norm2(p.zeta) / 2 - 0.5j * p.v
    m[1:n, n] = zeta
    return m


def uq_residual(x: np.ndarray) -> float:
    n = x.shape[0] - 1
    q = q_matrix(n)
    adjoint = np.linalg.inv(q) @ x.conj().T @ q
    return float(np.max(np.abs(x @ adjoint - np.eye(n + 1))))


def uq_check(x: np.ndarray, tol: float = UQ_TOL) -> bool:
    return uq_residual(x) <= tol


def require_uq(x: np.ndarray, tol: float = UQ_TOL) -> np.ndarray:
    residual = uq_residual(x)
    if residual > tol:
        raise NotInUQError(residual, "matrix does not preserve the form q")
    return x


def _homogeneous(x: SiegelLike, n: int) -> np.ndarray:
    if x is INFINITY:
        z = np.zeros(n + 1, dtype=complex)
        z[0] = 1
        return z
    return np.array([x.w0] + list(x.w) + [1], dtype=complex)


def uq_apply(x: np.ndarray, point: SiegelLike) -> SiegelLike:
    """Projective action of a U_Q matrix on the Siegel domain and its boundary."""
    n = x.shape[0] - 1
    z = x @ _homogeneous(point, n)
    if abs(z[n]) <= 1e-14 * np.max(np.abs(z)):
        return INFINITY
    z = z / z[n]
    return SiegelPoint(complex(z[0]), [complex(v) for v in z[1:n]])


def hermitian_form(z: np.ndarray, w: np.ndarray) -> complex:
    n = len(z) - 1
    return complex(-z[0] * np.conj(w[n]) - z[n] * np.conj(w[0]) + np.dot(z[1:n], np.conj(w[1:n])))


def siegel_dist(x: SiegelPoint, y: SiegelPoint) -> float:
    """Riemannian distance, cosh^2(d/2) = q(x, y) q(y, x) / (q(x, x) q(y, y))."""
    if x.level <= 0 or y.level <= 0:
        raise DomainError("both points must lie inside the Siegel domain")
    n = len(x.w) + 1
    zx, zy = _homogeneous(x, n), _homogeneous(y, n)
    ratio = abs(hermitian_form(zx, zy)) ** 2 / (hermitian_form(zx, zx).real * hermitian_form(zy, zy).real)
    return 2 * arcosh(math.sqrt(max(ratio, 1.0)))


def d_prime(x: SiegelPoint, y: SiegelPoint) -> float:
    """Renormalised distance, maximal real sectional curvature -1."""
    return siegel_dist(x, y) / 2


def in_siegel_horoball(x: SiegelPoint, s: float) -> bool:
    """Membership in the horoball 2 Re w0 - |w|^2 >= s centred at ∞."""
    return x.level >= s


def in_x0_horoball(x: SiegelPoint, s: float) -> bool:
    """Membership in X0 of the horoball of level s, centred at (0, 0)."""
    return x.level >= s * abs(x.w0) ** 2


def c0_point(t: float, n: int = 2) -> SiegelPoint:
    """The unit-speed geodesic from ∞ to (0, 0), meeting level 2 at t = 0."""
    return SiegelPoint(math.exp(-t), [0j] * (n - 1))


def tangency_s(p: HeisPoint) -> float:
    """Level s for which X0 H_s is tangent to the geodesic from ∞ to u_p(0, 0)."""
    z2, r = _radial(p)
    if r == 0:
        raise DegenerateGeodesicError("the geodesic from ∞ to (0, 0) passes through the centre")
    return 2 / (r + z2)


def tangency_discriminant(p: HeisPoint, s: float) -> float:
    """Discriminant of s x^2 + (s|ζ|^2 - 2) x + (s/4)(|ζ|^4 + v^2) in x = e^{-t}."""
    z2, r = _radial(p)
    return (s * z2 - 2) ** 2 - s * s * r * r


def lower_left(x: np.ndarray) -> complex:
    return complex(x[-1, 0])


def horoball_dist_complex(x: np.ndarray, s: float, s0: float = None) -> float:
    """Renormalised distance from the level-``s0`` horoball at ∞ to X of the level-``s`` one.

    ``s0`` defaults to ``s``. A negative value means the two overlap.
    """
    c = lower_left(x)
    if c == 0:
        raise FixesInfinityError("the matrix fixes ∞")
    s0 = s if s0 is None else s0
    value = math.log(abs(c)) + 0.5 * math.log(s0 / 2) + 0.5 * math.log(s / 2)
    if value < 0:
        logger.warning("complex_horoballs_overlap", value=value, s=s, s0=s0)
    return value


def horoball_dist_via_cygan(xi: HeisPoint, xi_prime: HeisPoint, s0: float) -> float:
    """Distance from H_{s0} to the horoball at ``xi`` tangent to the line from ∞ to ``xi_prime``."""
    dp = cygan_mod(xi, xi_prime)
    if dp == 0:
        raise DegenerateGeodesicError("xi and xi_prime coincide")
    return -math.log(dp) + 0.5 * math.log(s0 / 2)


def tangent_horoball_matrix(xi: HeisPoint) -> np.ndarray:
    """u_ξ X0, sending horoballs at ∞ to horoballs at ξ."""
    return u_matrix(xi) @ x0_matrix(len(xi.zeta) + 1)


def dieudonne(m: QMat2) -> float:
    if m.a.norm2() > 0:
        return abs(m.a * m.d - m.a * m.c * m.a.inverse() * m.b)
    if m.c.norm2() > 0:
        return abs(m.c * m.b - m.c * m.a * m.c.inverse() * m.d)
    raise DomainError("matrix with vanishing first column is not invertible")


def sl2h_act(m: QMat2, z: Union[Quaternion, Infinity]) -> Union[Quaternion, Infinity]:
    if z is INFINITY:
        if m.c.norm2() == 0:
            return INFINITY
        return m.a * m.c.inverse()
    den = m.c * z + m.d
    if den.norm2() == 0:
        return INFINITY
    return (m.a * z + m.b) * den.inverse()


def qmat_inverse(m: QMat2) -> QMat2:
    """Inverse through block elimination on whichever of a, c is invertible."""
    a, b, c, d = m.a, m.b, m.c, m.d
    if a.norm2() > 0:
        ai = a.inverse()
        schur = d - c * ai * b
        si = schur.inverse()
        return QMat2(ai + ai * b * si * c * ai, -(ai * b * si), -(si * c * ai), si)
    if c.norm2() == 0 or b.norm2() == 0:
        raise DomainError("matrix is not invertible")
    # a = 0: [[0, b], [c, d]]^-1 = [[-c^-1 d b^-1, c^-1], [b^-1, 0]]
    ci, bi = c.inverse(), b.inverse()
    return QMat2(-(ci * d * bi), ci, bi, Quaternion())


def vertical(m: QMat2, z: Quaternion, t: float) -> float:
    """Vertical coordinate of m(z, t) in ℍ⁵, for m of unit Dieudonné determinant."""
    return t / ((m.c * z + m.d).norm2() + m.c.norm2() * t * t)


def poincare_extend(m: QMat2, z: Quaternion, t: float) -> H5Point:
    """m(z, t) computed as a sphere reflection followed by a Euclidean similarity."""
    a, b, c, d = m.a, m.b, m.c, m.d
    if c.norm2() == 0:
        di = d.inverse()
        return a * z * di + b * di, t * abs(a) / abs(d)
    ci = c.inverse()
    centre = -(ci * d)
    w = z - centre
    r2 = 1.0 / c.norm2()
    k = r2 / (w.norm2() + t * t)
    zr, tr = centre + w * k, t * k
    shift = b - a * ci * d
    ratio = abs(shift) * abs(c)
    image = shift * (zr.conj() * c.conj() + d.conj()) + a * ci
    return image, tr * ratio


def horoball_dist_h5(m: QMat2, s: float) -> float:
    """Distance between the horoball t >= s and its image, 2 log|c| + 2 log s."""
    if m.c.norm2() == 0:
        raise FixesInfinityError("the matrix fixes ∞")
    value = math.log(m.c.norm2()) + 2 * math.log(s)
    if value < 0:
        logger.warning("h5_horoballs_overlap", value=value, s=s)
    return value


def horoball_dist_h5_direct(m: QMat2, s: float) -> float:
    """Same distance, following the vertical line through -c^-1 d into the image horoball."""
    if m.c.norm2() == 0:
        raise FixesInfinityError("the matrix fixes ∞")
    foot = -(m.c.inverse() * m.d)
    _, top = poincare_extend(m, foot, s)
    return math.log(s / top)


def eq35_residuals(m: QMat2) -> Dict[int, float]:
    """|N(ad) + N(bc) + σ Tr(a c̄ d b̄) - 1| for σ = +1 and σ = -1."""
    a, b, c, d = m.a, m.b, m.c, m.d
    base = (a * d).norm2() + (b * c).norm2()
    cross = (a * c.conj() * d * b.conj()).trace()
    return {1: abs(base + cross - 1), -1: abs(base - cross - 1)}


def eq35_check(m: QMat2, tol: float = UQ_TOL) -> Dict[str, object]:
    res = eq35_residuals(m)
    passing = sorted(sign for sign, r in res.items() if r <= tol)
    return {"plus": res[1], "minus": res[-1], "passing": passing}


def random_heis(rng: np.random.Generator, n: int = 2, scale: float = 2.0) -> HeisPoint:
    zeta = rng.normal(scale=scale, size=n - 1) + 1j * rng.normal(scale=scale, size=n - 1)
    return HeisPoint(list(zeta), rng.normal(scale=scale))


def random_quaternion(rng: np.random.Generator, scale: float = 1.0) -> Quaternion:
    return Quaternion(*rng.normal(scale=scale, size=4))


def elementary(rng: np.random.Generator) -> QMat2:
    """A random matrix of unit Dieudonné determinant of one of four elementary shapes."""
    one, zero = Quaternion(1), Quaternion()
    kind = rng.integers(4)
    if kind == 0:
        return QMat2(one, random_quaternion(rng, 0.7), zero, one)
    if kind == 1:
        return QMat2(one, zero, random_quaternion(rng, 0.7), one)
    if kind == 2:
        u, w = random_quaternion(rng), random_quaternion(rng)
        lam = math.exp(rng.normal(scale=0.3))
        return QMat2(u * (lam / abs(u)), zero, zero, w * (1.0 / (lam * abs(w))))
    return QMat2(zero, one, -one, zero)


def random_sl2h(rng: np.random.Generator, length: int = 4) -> QMat2:
    m = elementary(rng)
    for _ in range(length - 1):
        m = m @ elementary(rng)
    return m


def eq35_sign(rng: np.random.Generator, samples: int = 1000, tol: float = UQ_TOL) -> Dict[str, object]:
    """Which sign of the trace term holds on every random unit-determinant product."""
    counts = {1: 0, -1: 0}
    for _ in range(samples):
        for sign, r in eq35_residuals(random_sl2h(rng)).items():
            if r <= tol * 100:
                counts[sign] += 1
    uniform = [sign for sign, k in counts.items() if k == samples]
    logger.info("eq35_sign", samples=samples, plus=counts[1], minus=counts[-1], uniform=uniform)
    return {"samples": samples, "plus": counts[1], "minus": counts[-1], "uniform": uniform}
