"""
Extended Real Arithmetic Module
Values in [-inf, +inf] with Moreau lower and upper additions

The lower addition resolves (+inf) + (-inf) to -inf and is the one used
under a sup; the upper addition resolves it to +inf and is used under an
inf. Both agree with ordinary addition everywhere else.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
import numpy.typing as npt

from src.exceptions import NaNValueError

Number = Union[int, float]


@dataclass(frozen=True, order=True)
class XReal:
    """
    Extended real number.

    The payload is an IEEE double; -inf / +inf stand for the two infinite
    elements, anything else is Finite(value). NaN is rejected.
    """

    value: float

    def __post_init__(self):
        value = float(self.value)
        if math.isnan(value):
            raise NaNValueError("XReal cannot hold NaN")
        # -0.0 and 0.0 collapse so equality and hashing agree
        object.__setattr__(self, 'value', value + 0.0)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    def __neg__(self) -> 'XReal':
        return neg(self)

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"XReal({to_json(self)!r})"

    def to_json(self):
        return to_json(self)


POS_INF = XReal(math.inf)
NEG_INF = XReal(-math.inf)
ZERO = XReal(0.0)

XLike = Union[XReal, Number, str]


def xreal(value: XLike) -> XReal:
    """
    Coerce a number, an XReal or a JSON infinity token into an XReal

    Args:
        value: float/int, XReal, or one of "+inf", "-inf", "inf"

    Returns:
        The corresponding XReal
    """
    if isinstance(value, XReal):
        return value
    if isinstance(value, str):
        return from_json(value)
    return XReal(float(value))


def low_add(u: XLike, v: XLike) -> XReal:
    """Moreau lower addition: (+inf) + (-inf) = -inf."""
    a, b = xreal(u).value, xreal(v).value
    if a == -math.inf or b == -math.inf:
        return NEG_INF
    return XReal(a + b)


def upp_add(u: XLike, v: XLike) -> XReal:
    """Moreau upper addition: (+inf) + (-inf) = +inf."""
    a, b = xreal(u).value, xreal(v).value
    if a == math.inf or b == math.inf:
        return POS_INF
    return XReal(a + b)


def neg(u: XLike) -> XReal:
    return XReal(-xreal(u).value)


def sup_fold(values: Iterable[XLike]) -> XReal:
    """Supremum of a finite family, with sup of the empty family = -inf."""
    best = -math.inf
    for item in values:
        best = max(best, xreal(item).value)
    return XReal(best)


def inf_fold(values: Iterable[XLike]) -> XReal:
    """Infimum of a finite family, with inf of the empty family = +inf."""
    best = math.inf
    for item in values:
        best = min(best, xreal(item).value)
    return XReal(best)


def to_json(u: XLike) -> Union[float, str]:
    """Finite values as JSON numbers, infinities as "+inf" / "-inf"."""
    value = xreal(u).value
    if value == math.inf:
        return '+inf'
    if value == -math.inf:
        return '-inf'
    return value


def from_json(token: Union[float, int, str]) -> XReal:
    """Inverse of to_json; also accepts "inf" and "-Infinity"-style spellings."""
    if isinstance(token, str):
        text = token.strip().lower()
        if text in ('+inf', 'inf', '+infinity', 'infinity'):
            return POS_INF
        if text in ('-inf', '-infinity'):
            return NEG_INF
        try:
            return XReal(float(text))
        except ValueError as exc:
            raise NaNValueError(f"Not an extended real: {token!r}") from exc
    return XReal(float(token))


# Vectorized variants, used by the sampled conjugacy engine. Arrays carry
# IEEE infinities; NaN never appears in an output.

def low_add_array(a: npt.ArrayLike, b: npt.ArrayLike) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid='ignore'):
        total = a + b
    return np.where((a == -np.inf) | (b == -np.inf), -np.inf, total)


def upp_add_array(a: npt.ArrayLike, b: npt.ArrayLike) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid='ignore'):
        total = a + b
    return np.where((a == np.inf) | (b == np.inf), np.inf, total)


def check_no_nan(values: npt.ArrayLike, what: str = 'values') -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if np.isnan(array).any():
        raise NaNValueError(f"{what} contain NaN")
    return array
