import enum
import math
from typing import Any, Callable, Dict, Iterable, List, TypeVar

import attr
import numpy as np

T = TypeVar("T")


def _json_value(v: Any) -> Any:
    # late import, entities depends on this module
    from .entities import INFINITY, Unbounded

    if v is INFINITY:
        return "inf"
    if isinstance(v, Unbounded):
        return v.value
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, (list, tuple, set)):
        return [_json_value(i) for i in v]
    if isinstance(v, dict):
        return as_json_dict(v)
    if attr.has(v.__class__):
        if callable(getattr(v, "as_dict", None)):
            return v.as_dict()
        return as_json_dict(v)
    return v


def as_json_dict(obj: Any) -> Dict:
    """
    Similar to attr.asdict, but will prioritize an `as_dict` instance method
    over ``attr.asdict`` (if present) on nested objects and tries to convert
    numeric types to json-encodable values.

    Ex: enums are converted to their values, complex numbers to ``[re, im]``
    pairs and the boundary point at infinity as well as unbounded extended
    reals to the strings ``"inf"`` / ``"-inf"``.

    Expected Usage::

        @attr.s
        class MyClass(object):
            a = attr.ib()

            as_dict = as_json_dict

    :param obj: attrs object to convert to a dictionary. Optionally can be
        a dictionary, which will recursively serialize keys/values the same
        way.
    :returns: a dict
    """
    if isinstance(obj, dict):
        ret = dict(obj)
    else:
        ret = attr.asdict(obj, recurse=False)  # handling recursing manually

    return {str(_json_value(k)) if not isinstance(k, str) else k: _json_value(v) for k, v in ret.items()}


def rejection_sample(exc=Exception, tries=10 ** 6):
    """
    Retry a sampling function up to [tries] times while it raises [exc].

    Generators signal a rejected draw by raising; once the budget is spent a
    ``SamplingError`` is raised instead.

    Example Usage:
        @rejection_sample(exc=Rejected, tries=1000)
        def draw(rng):
            # ...
        draw(rng)
    """
    from .exceptions import SamplingError

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        def _sample(*args, **kwargs) -> T:
            tries_left = tries
            while True:
                try:
                    return func(*args, **kwargs)
                except exc:
                    tries_left -= 1
                    if tries_left <= 0:
                        raise SamplingError(
                            tries, "no admissible sample after {} attempts".format(tries)
                        )

        _sample.__name__ = getattr(func, "__name__", "_sample")
        _sample.__doc__ = func.__doc__
        return _sample

    return decorator


class Rejected(Exception):
    """Raised by a sampler to discard the current draw."""

    pass


def arcosh(x: float) -> float:
    """Inverse hyperbolic cosine via log1p near 1; arguments below 1 clamp to 0."""
    if x <= 1.0:
        return 0.0
    y = x - 1.0
    return math.log1p(y + math.sqrt(y * (y + 2.0)))


def trial_rngs(seed: int, trials: int) -> List[np.random.Generator]:
    """One independent generator per trial, stable under any evaluation order."""
    children = np.random.SeedSequence(seed).spawn(trials)
    return [np.random.default_rng(s) for s in children]


def ext_float(x: Any) -> float:
    """Map an extended real to a float, infinite members to +-inf."""
    from .entities import Unbounded

    if x is Unbounded.POS:
        return math.inf
    if x is Unbounded.NEG:
        return -math.inf
    return float(x)


def ext_from_float(x: float) -> Any:
    from .entities import Unbounded

    if x == math.inf:
        return Unbounded.POS
    if x == -math.inf:
        return Unbounded.NEG
    return x


def ext_max(values: Iterable[Any]) -> Any:
    return ext_from_float(max(ext_float(v) for v in values))


def ext_sub(a: Any, b: Any) -> Any:
    """a - b on extended reals; the undefined difference of equal infinities is 0."""
    fa, fb = ext_float(a), ext_float(b)
    if math.isinf(fa) and fa == fb:
        return 0.0
    return ext_from_float(fa - fb)
