"""Closed-form constants of the penetration calculus and their audit table.

Every function takes ``Eps`` (or anything ``Eps`` accepts, including
``INFINITY``) and returns a float. The ``INFINITY`` values are fixed constants
and are *not* the limits of the finite formulas.
"""
import math
from typing import Any, List, Tuple

import attr

from .entities import INFINITY, ConstantTable, Eps, ParamSet, ReportRow
from .exceptions import PreconditionError

LOG2 = math.log(2.0)
C1_PRIME_INF = 2 * math.log(1 + math.sqrt(2))
C0_INF = 4.056
C_DPRIME_INF = 1.5
C2_PRIME_INF = 2.5
C3_PRIME_INF = 2.5
C1_PH_ZERO_DELTA = 1.0 / 19
# avoidance radius achieved by unclouding Ford families from mu1 = 1.042
MU0 = 1.534
FREIMAN_RATIO = 491993569 / (2221564096 + 283748 * math.sqrt(462))


def _log_sinh(x: float) -> float:
    # log(sinh x) for x > 0 without overflow
    return x + math.log1p(-math.exp(-2 * x)) - LOG2


def _softplus(x: float) -> float:
    # log(1 + e^x) without overflow
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


def _arcosh_of_two_cosh(x: float) -> float:
    # arcosh(2 cosh x), stable for large x
    if x < 20:
        return math.acosh(2 * math.cosh(x))
    # arcosh(X) = log(2X) up to O(X^-2)
    return LOG2 + x + math.log1p(math.exp(-2 * x))


def c1_prime(eps: Any) -> float:
    """c'_1(ε) = 2 arsinh(coth ε); 2 log(1 + √2) at INFINITY."""
    e = Eps.coerce(eps)
    if e.is_infinite:
        return C1_PRIME_INF
    return 2 * math.asinh(1 / math.tanh(e.value))


def c0(eps: Any) -> float:
    e = Eps.coerce(eps)
    if e.is_infinite:
        return C0_INF
    x = e.value
    return 2 * (LOG2 + _softplus(x / 2) + _log_sinh(x) - math.log(x))


def c_dprime(eps: Any) -> float:
    e = Eps.coerce(eps)
    if e.is_infinite:
        return C_DPRIME_INF
    return (2 / e.value) * _arcosh_of_two_cosh(e.value / 2)


def c2_prime(eps: Any) -> float:
    e = Eps.coerce(eps)
    if e.is_infinite:
        return C2_PRIME_INF
    x = e.value
    k = c1_prime(e)
    ratio = math.cosh(x) / (2 * math.sinh(x / 2) ** 2) if x < 700 else 1.0
    return max(c_dprime(e) + 1, 2 * k / x, math.sqrt(ratio) * math.sinh(k) / k)


def c3_prime(eps: Any) -> float:
    """c'_3(ε) = 3 + 2c'_1(ε)/ε; 5/2 at INFINITY, which is not the limit 3."""
    e = Eps.coerce(eps)
    if e.is_infinite:
        return C3_PRIME_INF
    return 3 + 2 * c1_prime(e) / e.value


def h_prime(eps: Any, eta: float) -> float:
    if eta < 0:
        raise PreconditionError("eta", eta, "eta must be nonnegative")
    e = Eps.coerce(eps)
    if e.is_infinite:
        return 3 * eta + C0_INF + C1_PRIME_INF
    x = e.value
    return max(2 * eta + max(0.0, -2 * math.log(x / 2)), eta + c1_prime(e) + c0(e))


def nu(mu: float) -> float:
    if mu < 0:
        raise PreconditionError("mu", mu, "mu must be nonnegative")
    return 2 * math.exp(-mu) / (1 + math.sqrt(-math.expm1(-2 * mu)))


def mu_chain(mu1: float) -> Tuple[float, float, float, float]:
    """Return (μ2, μ3, μ4, μ5) for the avoidance radius μ1 ≥ log 2."""
    if mu1 < LOG2:
        raise PreconditionError("mu1", mu1, "mu1 must be at least log 2")
    mu2 = nu(mu1)
    mu3 = mu1 + mu2
    mu4 = 2 * mu1 - 2 * mu2
    mu5 = mu3 + mu2 / math.expm1(mu4)
    return mu2, mu3, mu4, mu5


def derived_constants(p: ParamSet) -> ConstantTable:
    eps0, delta0, kappa0 = p.eps0, p.delta0, p.kappa0
    k1 = c1_prime(eps0)
    k3 = c3_prime(eps0)
    c1 = C1_PH_ZERO_DELTA if p.ph_horoball_zero_delta else k1
    c2 = c2_prime(eps0)
    s1 = math.sinh(c1)
    sd = math.sinh(c1 + delta0)
    c3 = 2 * s1 + c2 * math.exp(2 * c1) * s1
    # exponent taken as printed
    c4 = k3 * sd + c2 * math.exp(-3 * k3 * sd - LOG2) * s1
    c5 = 2 * max(c2, k3) * sd
    c6 = 3 * c4 + LOG2
    h0 = max(delta0 + kappa0, c0(eps0) + kappa0, h_prime(eps0, sd))
    return ConstantTable(
        params=p,
        c1=c1,
        c2=c2,
        c3=c3,
        c4=c4,
        c5=c5,
        c6=c6,
        h0=h0,
        c0_eps=c0(eps0),
        c1_prime_eps=k1,
        c_dprime_eps=c_dprime(eps0),
        c2_prime_eps=c2,
        c3_prime_eps=k3,
    )


def params_for(eps: Any, delta: float, kappa: float) -> ParamSet:
    """ParamSet with the 1/19 regime switched on exactly when it is allowed."""
    e = Eps.coerce(eps)
    return ParamSet(
        eps0=e,
        delta0=delta,
        kappa0=kappa,
        ph_horoball_zero_delta=e.is_infinite and delta == 0,
    )


def c1_dprime(eps: Any, delta: float, kappa: float) -> float:
    inner = derived_constants(params_for(eps, delta, C1_PRIME_INF))
    return max(2 * c1_prime(eps) + 2 * delta + kappa, inner.h1_prime())


def c2_dprime(eps: Any) -> float:
    e = Eps.coerce(eps)
    c1 = C1_PH_ZERO_DELTA if e.is_infinite else c1_prime(e)
    return c1_dprime(e, 0.0, 0.0) + C1_PRIME_INF + 2 * c1


def r0_min() -> float:
    """7 sinh c'_1(∞) + 3/2 c'_1(∞), simplified using sinh c'_1(∞) = 2√2."""
    return 14 * math.sqrt(2) + 3 * math.log(1 + math.sqrt(2))


@attr.attrs(frozen=True)
class HallBounds(object):
    height_bound: float = attr.attrib()
    half_height: float = attr.attrib()
    lagrange_cap: float = attr.attrib()
    freiman_height: float = attr.attrib()

    def heis_cap_case1(self, imw: float) -> float:
        if imw <= 0:
            raise PreconditionError("imw", imw, "Im ω must be positive")
        return 2 * self.lagrange_cap / math.sqrt(imw)

    def heis_cap_case2(self, imw: float) -> float:
        if imw <= 0:
            raise PreconditionError("imw", imw, "Im ω must be positive")
        return math.sqrt(2) * self.lagrange_cap / math.sqrt(imw)


def hall_and_lagrange_bounds() -> HallBounds:
    height = c1_dprime(INFINITY, 0.0, 0.0) + 4 * C1_PRIME_INF + 1e-5
    half = height / 2
    return HallBounds(
        height_bound=height,
        half_height=half,
        lagrange_cap=math.exp(-half / 2),
        freiman_height=-2 * math.log(FREIMAN_RATIO),
    )


def audit() -> List[ReportRow]:
    """One row per printed decimal that the constant calculus reproduces."""
    r0 = r0_min()
    hall = hall_and_lagrange_bounds()
    inf_table = derived_constants(params_for(INFINITY, 0.0, C1_PRIME_INF))
    mu2, mu3, mu4, mu5 = mu_chain(1.042)
    rows = [
        ReportRow("c1_prime_inf", c1_prime(INFINITY), 2 * math.log(1 + math.sqrt(2)), 1e-12),
        ReportRow("c0_inf", c0(INFINITY), 4.056, 0.0),
        ReportRow("h_prime_inf_0", h_prime(INFINITY, 0.0), 5.8188, 1e-3),
        ReportRow("h0_inf", inf_table.h0, 5.9767, 1e-3),
        ReportRow("h1_prime_inf", inf_table.h1_prime(), 6.5032, 1e-3),
        ReportRow("c2_dprime_inf", c2_dprime(INFINITY), 8.3712, 1e-3),
        ReportRow("r0_min", r0, 22.4431, 1e-3),
        ReportRow("c1_prime_r0_min", c1_prime(r0), 1.7627, 1e-3),
        ReportRow("c1_dprime_r0_min", c1_dprime(r0, 0.0, 0.0), 101.4169, 1e-1),
        ReportRow("c2_dprime_r0_min", c2_dprime(r0), 106.7051, 1e-1),
        ReportRow("height_bound", hall.height_bound, 13.5542, 1e-3),
        ReportRow("half_height", hall.half_height, 6.7771, 1e-3),
        ReportRow("lagrange_cap", hall.lagrange_cap, 0.0337, 5e-4),
        ReportRow("heis_cap_case1", hall.heis_cap_case1(1.0), 0.0674, 1e-3),
        ReportRow("heis_cap_case2", hall.heis_cap_case2(1.0), 0.0476, 1e-3),
        ReportRow("freiman_height", hall.freiman_height, 3.0205, 1e-3),
        ReportRow("mu5_at_1_042", mu5, passed=mu5 < 1.5332),
        ReportRow("nu_half_h0", nu(inf_table.h0 / 2), passed=nu(inf_table.h0 / 2) <= 1.0 / 19),
        ReportRow(
            "cor5_6_guard",
            c2_dprime(r0),
            passed=c2_dprime(r0) < 108 and 2 * c1_prime(r0) <= 4,
        ),
        ReportRow("c4_inf_verbatim_unverified", inf_table.c4, passed=inf_table.c4 > 0),
    ]
    return rows


def table(p: ParamSet) -> List[ReportRow]:
    """Every derived constant of ``p`` as report rows without expectations."""
    t = derived_constants(p)
    names = ["c1", "c2", "c3", "c4", "c5", "c6", "h0"]
    rows = [ReportRow(n, getattr(t, n)) for n in names]
    rows.append(ReportRow("h1_prime", t.h1_prime()))
    rows.append(ReportRow("h1_dprime", t.h1_dprime()))
    rows.append(ReportRow("c0", t.c0_eps))
    rows.append(ReportRow("c1_prime", t.c1_prime_eps))
    rows.append(ReportRow("c_dprime", t.c_dprime_eps))
    rows.append(ReportRow("c2_prime", t.c2_prime_eps))
    rows.append(ReportRow("c3_prime", t.c3_prime_eps))
    return rows
