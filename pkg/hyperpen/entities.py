import math
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import attr
import structlog

from . import enums
from .utils import as_json_dict

logger = structlog.get_logger()


class Infinity(Enum):
    """Singleton written in a way mypy can parse.

    See https://www.python.org/dev/peps/pep-0484/#support-for-singleton-types-in-unions
    for more details.
    """

    token = 0

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = Infinity.token
"""The boundary point at infinity of the upper half-space, and the ε of horoballs."""


class Unbounded(Enum):
    """The two infinite extended reals."""

    NEG = "-inf"
    POS = "inf"


class Empty(Enum):
    token = 0


EMPTY = Empty.token
"""What a ball shrinks to once the shrinking parameter passes its radius."""

ExtReal = Union[float, Unbounded]
Boundary = Union[complex, Infinity]


def _to_boundary(val: Any) -> Boundary:
    if val is INFINITY or val == "inf":
        return INFINITY
    if isinstance(val, (list, tuple)):
        val = complex(val[0], val[1] if len(val) > 1 else 0.0)
    val = complex(val)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise ValueError("boundary coordinate must be finite, got {!r}".format(val))
    return val


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError("{} must be positive, got {!r}".format(attribute.name, value))


def _nonneg(instance, attribute, value):
    if not value >= 0:
        raise ValueError("{} must be nonnegative, got {!r}".format(attribute.name, value))


def _eps_value(val: Any) -> Union[float, Infinity]:
    if val is INFINITY or val == "inf":
        return INFINITY
    return float(val)


@attr.attrs(frozen=True)
class Eps(object):
    """The ε of ε-convex subsets; ``INFINITY`` stands for horoballs."""

    value: Union[float, Infinity] = attr.attrib(converter=_eps_value)

    @value.validator
    def _check(self, attribute, value):
        if value is not INFINITY and not value > 0:
            raise ValueError("eps must be positive or INFINITY, got {!r}".format(value))

    @property
    def is_infinite(self) -> bool:
        return self.value is INFINITY

    @classmethod
    def coerce(cls, val: Any) -> "Eps":
        return val if isinstance(val, cls) else cls(val)

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class ParamSet(object):
    eps0: Eps = attr.attrib(converter=Eps.coerce)
    delta0: float = attr.attrib(converter=float, validator=_nonneg)
    kappa0: float = attr.attrib(converter=float, validator=_nonneg)
    ph_horoball_zero_delta: bool = attr.attrib(default=False)

    @ph_horoball_zero_delta.validator
    def _check_flag(self, attribute, value):
        if value and not (self.eps0.is_infinite and self.delta0 == 0):
            raise ValueError(
                "ph_horoball_zero_delta requires eps0 = INFINITY and delta0 = 0"
            )

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class ConstantTable(object):
    """Derived constants of the prescription construction for one ParamSet."""

    params: ParamSet = attr.attrib()
    c1: float = attr.attrib(validator=_positive)
    c2: float = attr.attrib(validator=_positive)
    c3: float = attr.attrib(validator=_positive)
    c4: float = attr.attrib(validator=_positive)
    c5: float = attr.attrib(validator=_positive)
    c6: float = attr.attrib(validator=_positive)
    h0: float = attr.attrib(validator=_positive)
    c0_eps: float = attr.attrib()
    c1_prime_eps: float = attr.attrib()
    c_dprime_eps: float = attr.attrib()
    c2_prime_eps: float = attr.attrib()
    c3_prime_eps: float = attr.attrib()

    def h1_prime(self, h0_prime: Optional[float] = None) -> float:
        """Forward bound guaranteed once obstacles are reset to ``h0_prime``."""
        if h0_prime is None:
            h0_prime = self.h0
        return h0_prime + 2 * self.c5

    def h1_dprime(self, h0_prime: Optional[float] = None) -> float:
        """Two-sided bound for geodesic lines."""
        return (
            self.h1_prime(h0_prime)
            + self.c3_prime_eps * (self.params.delta0 + self.c1)
            + self.c1_prime_eps
        )

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class Point(object):
    """Interior point of the upper half-space: complex base, positive height.

    The upper half-plane is the slice of real bases.
    """

    base: complex = attr.attrib(converter=complex)
    height: float = attr.attrib(converter=float, validator=_positive)

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class Geodesic(object):
    """Oriented geodesic from ``xi_minus`` to ``xi_plus``, unit speed, ``anchor`` at time 0.

    A ray is the same line restricted to nonnegative times.
    """

    xi_minus: Boundary = attr.attrib(converter=_to_boundary)
    xi_plus: Boundary = attr.attrib(converter=_to_boundary)
    anchor: Point = attr.attrib()
    is_ray: bool = attr.attrib(default=False)

    as_dict = as_json_dict


def _det_ok(instance, attribute, value):
    det = instance.a * instance.d - instance.b * instance.c
    tol = 1e-9 * (1 + abs(instance.a * instance.d) + abs(instance.b * instance.c))
    if abs(det - 1) > tol:
        raise ValueError("Moebius determinant must be 1, got {!r}".format(det))


@attr.attrs(frozen=True)
class Moebius(object):
    a: complex = attr.attrib(converter=complex)
    b: complex = attr.attrib(converter=complex)
    c: complex = attr.attrib(converter=complex)
    d: complex = attr.attrib(converter=complex, validator=_det_ok)

    @classmethod
    def normalized(cls, a: complex, b: complex, c: complex, d: complex) -> "Moebius":
        """Rescale an invertible matrix to determinant 1."""
        det = complex(a * d - b * c)
        if det == 0:
            raise ValueError("singular matrix")
        s = det ** 0.5
        return cls(a / s, b / s, c / s, d / s)

    as_dict = as_json_dict


IDENTITY = Moebius(1, 0, 0, 1)


@attr.attrs(frozen=True)
class Horoball(object):
    """Horoball centred at a boundary point.

    ``size`` is the height of the bounding horosphere when centred at infinity,
    and the euclidean diameter of the bounding sphere otherwise.
    """

    KIND = enums.BodyKind.HOROBALL

    center: Boundary = attr.attrib(converter=_to_boundary)
    size: float = attr.attrib(converter=float, validator=_positive)

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class Ball(object):
    KIND = enums.BodyKind.BALL

    center: Point = attr.attrib()
    radius: float = attr.attrib(converter=float, validator=_positive)

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class Tube(object):
    """Closed ``radius``-neighbourhood of a geodesic line."""

    KIND = enums.BodyKind.TUBE

    core: Geodesic = attr.attrib()
    radius: float = attr.attrib(converter=float, validator=_positive)

    as_dict = as_json_dict


Body = Union[Horoball, Ball, Tube]


@attr.attrs(frozen=True)
class PenRecord(object):
    t_minus: ExtReal = attr.attrib()
    t_plus: ExtReal = attr.attrib()
    value: ExtReal = attr.attrib()

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class ObstacleFamily(object):
    bodies: Tuple[Body, ...] = attr.attrib(converter=tuple)
    delta0: float = attr.attrib(default=0.0, converter=float, validator=_nonneg)
    designated_index: Optional[int] = attr.attrib(default=None)
    note: str = attr.attrib(default="")

    @designated_index.validator
    def _check_index(self, attribute, value):
        if value is not None and not 0 <= value < len(self.bodies):
            raise ValueError("designated index {} out of range".format(value))

    def __len__(self) -> int:
        return len(self.bodies)

    @property
    def designated(self) -> Optional[Body]:
        if self.designated_index is None:
            return None
        return self.bodies[self.designated_index]

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class TraceStep(object):
    k: int = attr.attrib()
    obstacle_index: Optional[int] = attr.attrib()
    t_entry: float = attr.attrib()
    endpoint_at_infinity: Boundary = attr.attrib()
    geodesic: Geodesic = attr.attrib()

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class ConstructionTrace(object):
    steps: Tuple[TraceStep, ...] = attr.attrib(converter=tuple)
    final_geodesic: Geodesic = attr.attrib()
    report: Dict[int, ExtReal] = attr.attrib(factory=dict)
    checks: Dict[str, Any] = attr.attrib(factory=dict)
    ok: bool = attr.attrib(default=True)
    warnings: Tuple[str, ...] = attr.attrib(factory=tuple, converter=tuple)

    as_dict = as_json_dict


def _digits(val: Sequence[int]) -> Tuple[int, ...]:
    return tuple(int(x) for x in val)


@attr.attrs(frozen=True)
class CFExpansion(object):
    """Continued fraction ``[a0; digits..., (period)...]``.

    ``period`` repeats forever after ``digits`` when present.
    """

    a0: int = attr.attrib(converter=int)
    digits: Tuple[int, ...] = attr.attrib(converter=_digits, factory=tuple)
    period: Tuple[int, ...] = attr.attrib(converter=_digits, factory=tuple)

    @digits.validator
    def _check_digits(self, attribute, value):
        if any(x < 1 for x in value):
            raise ValueError("partial quotients must be positive")

    @period.validator
    def _check_period(self, attribute, value):
        if any(x < 1 for x in value):
            raise ValueError("partial quotients must be positive")

    @property
    def is_periodic(self) -> bool:
        return bool(self.period)

    def digit(self, n: int) -> int:
        """Return a_n for n ≥ 1, unfolding the period as needed."""
        if n <= len(self.digits):
            return self.digits[n - 1]
        if not self.period:
            raise IndexError(n)
        return self.period[(n - len(self.digits) - 1) % len(self.period)]

    def unfold(self, n: int) -> List[int]:
        """First ``n`` partial quotients after a0 (fewer if the expansion is finite)."""
        if self.period:
            return [self.digit(i) for i in range(1, n + 1)]
        return list(self.digits[:n])

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class FordFamily(object):
    bound: int = attr.attrib(converter=int, validator=_positive)
    ring: enums.Ring = attr.attrib(converter=enums.Ring)
    bodies: Tuple[Horoball, ...] = attr.attrib(converter=tuple)
    window: Tuple[complex, complex] = attr.attrib()

    @property
    def count(self) -> int:
        return len(self.bodies)

    def as_obstacles(self, delta0: float = 0.0) -> ObstacleFamily:
        note = "Ford {} family, |q| <= {}, window {} .. {}".format(
            self.ring.value, self.bound, self.window[0], self.window[1]
        )
        return ObstacleFamily(
            bodies=self.bodies, delta0=delta0, designated_index=0, note=note
        )

    as_dict = as_json_dict


def _cvec(val: Any) -> Tuple[complex, ...]:
    if isinstance(val, (int, float, complex)):
        return (complex(val),)
    return tuple(complex(x) for x in val)


@attr.attrs(frozen=True)
class HeisPoint(object):
    zeta: Tuple[complex, ...] = attr.attrib(converter=_cvec)
    v: float = attr.attrib(converter=float)

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class SiegelPoint(object):
    w0: complex = attr.attrib(converter=complex)
    w: Tuple[complex, ...] = attr.attrib(converter=_cvec)

    @property
    def level(self) -> float:
        """2 Re w0 - |w|^2, positive inside the domain and zero on its boundary."""
        return 2 * self.w0.real - sum(abs(x) ** 2 for x in self.w)

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class Quaternion(object):
    """Hamilton quaternion x1 + x2 i + x3 j + x4 k."""

    x1: float = attr.attrib(converter=float, default=0.0)
    x2: float = attr.attrib(converter=float, default=0.0)
    x3: float = attr.attrib(converter=float, default=0.0)
    x4: float = attr.attrib(converter=float, default=0.0)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3, self.x4 + other.x4
        )

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.x1, -self.x2, -self.x3, -self.x4)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return self + (-other)

    def __mul__(self, other: Union["Quaternion", float]) -> "Quaternion":
        if not isinstance(other, Quaternion):
            f = float(other)
            return Quaternion(self.x1 * f, self.x2 * f, self.x3 * f, self.x4 * f)
        a1, b1, c1, d1 = self.x1, self.x2, self.x3, self.x4
        a2, b2, c2, d2 = other.x1, other.x2, other.x3, other.x4
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    __rmul__ = __mul__

    def conj(self) -> "Quaternion":
        return Quaternion(self.x1, -self.x2, -self.x3, -self.x4)

    def norm2(self) -> float:
        """Reduced norm N(z) = |z|^2."""
        return self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2 + self.x4 ** 2

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> "Quaternion":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() * (1.0 / n)

    def trace(self) -> float:
        return 2 * self.x1

    as_dict = as_json_dict


def _quat(val: Any) -> Quaternion:
    if isinstance(val, Quaternion):
        return val
    if isinstance(val, (int, float)):
        return Quaternion(val)
    return Quaternion(*val)


@attr.attrs(frozen=True)
class QMat2(object):
    a: Quaternion = attr.attrib(converter=_quat)
    b: Quaternion = attr.attrib(converter=_quat)
    c: Quaternion = attr.attrib(converter=_quat)
    d: Quaternion = attr.attrib(converter=_quat)

    def __matmul__(self, other: "QMat2") -> "QMat2":
        return QMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    as_dict = as_json_dict


@attr.attrs(frozen=True)
class ReportRow(object):
    name: str = attr.attrib()
    computed: Union[float, str] = attr.attrib()
    expected: Optional[float] = attr.attrib(default=None)
    tol: Optional[float] = attr.attrib(default=None)
    passed: Optional[bool] = attr.attrib(default=None)

    def __attrs_post_init__(self):
        if self.expected is not None and self.passed is None:
            ok = abs(float(self.computed) - self.expected) <= (self.tol or 0.0)
            object.__setattr__(self, "passed", ok)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "computed": self.computed,
            "paper": self.expected,
            "tol": self.tol,
            "pass": bool(self.passed) if self.passed is not None else True,
        }


def _parse_point(val: Any) -> Point:
    if isinstance(val, Point):
        return val
    if len(val) == 2:
        return Point(val[0], val[1])
    return Point(complex(val[0], val[1]), val[2])


def _parse_horoball(data: Dict[str, Any]) -> Horoball:
    return Horoball(center=data["center"], size=data["param"])


def _parse_ball(data: Dict[str, Any]) -> Ball:
    return Ball(center=_parse_point(data["center"]), radius=data["param"])


def _parse_tube(data: Dict[str, Any]) -> Tube:
    # imported here, models imports this module
    from .models import geodesic_between

    u, v = data["center"]
    return Tube(core=geodesic_between(_to_boundary(u), _to_boundary(v)), radius=data["param"])


_BODY_PARSERS: Dict[str, Callable[[Dict[str, Any]], Body]] = {
    enums.BodyKind.HOROBALL.value: _parse_horoball,
    enums.BodyKind.BALL.value: _parse_ball,
    enums.BodyKind.TUBE.value: _parse_tube,
}


def body_converter(val: Union[Body, Dict[str, Any]]) -> Body:
    """
    Convert a JSON obstacle record into a convex body.

    Usage:
        body_converter({"kind": "horoball", "center": "inf", "param": 1})

    Args:
        val: a body (returned untouched) or a dictionary with a ``kind`` key
            choosing between ``horoball``, ``ball`` and ``tube``. ``center`` is
            ``"inf"`` or a coordinate list (a pair of endpoints for tubes) and
            ``param`` is the size or radius.

    Returns:
        The body. An unknown ``kind`` raises ``TypeError``.
    """
    if isinstance(val, (Horoball, Ball, Tube)):
        return val
    kind = val.get("kind")
    try:
        parser = _BODY_PARSERS[kind]
    except KeyError:
        raise TypeError("unknown obstacle kind {!r}".format(kind))
    return parser(val)


def body_to_json(body: Body) -> Dict[str, Any]:
    def coord(x: Boundary) -> Any:
        return "inf" if x is INFINITY else [x.real, x.imag]

    if isinstance(body, Horoball):
        return {"kind": "horoball", "center": coord(body.center), "param": body.size}
    if isinstance(body, Ball):
        c = body.center
        return {
            "kind": "ball",
            "center": [c.base.real, c.base.imag, c.height],
            "param": body.radius,
        }
    return {
        "kind": "tube",
        "center": [coord(body.core.xi_minus), coord(body.core.xi_plus)],
        "param": body.radius,
    }
