"""Snapping computed component values to standard E-series values."""
from __future__ import annotations

import math
from enum import Enum


class ESeries(Enum):
    NONE = "none"
    E12 = "E12"
    E24 = "E24"


_E12 = (1.0, 1.2, 1.5, 1.8, 2.2, 2.7, 3.3, 3.9, 4.7, 5.6, 6.8, 8.2)
_E24 = (
    1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0,
    3.3, 3.6, 3.9, 4.3, 4.7, 5.1, 5.6, 6.2, 6.8, 7.5, 8.2, 9.1,
)

_MANTISSAS = {ESeries.E12: _E12, ESeries.E24: _E24}

# tolerance for "already a series value" when decomposing floats
_REL_EPS = 1e-9


def _decompose(value: float) -> tuple[float, int]:
    if value <= 0.0 or not math.isfinite(value):
        raise ValueError(f"cannot snap non-positive value {value!r}")
    exp = math.floor(math.log10(value))
    mant = value / 10.0**exp
    if mant >= 10.0:
        mant /= 10.0
        exp += 1
    elif mant < 1.0:
        mant *= 10.0
        exp -= 1
    return mant, exp


def snap_up(value: float, series: ESeries) -> float:
    """Nearest series value at or above; identity for ESeries.NONE."""
    if series is ESeries.NONE:
        return value
    mant, exp = _decompose(value)
    for s in _MANTISSAS[series]:
        if s >= mant * (1.0 - _REL_EPS):
            return s * 10.0**exp
    return 10.0**(exp + 1)


def snap_down(value: float, series: ESeries) -> float:
    """Nearest series value at or below; identity for ESeries.NONE."""
    if series is ESeries.NONE:
        return value
    mant, exp = _decompose(value)
    table = _MANTISSAS[series]
    best = None
    for s in table:
        if s <= mant * (1.0 + _REL_EPS):
            best = s
        else:
            break
    if best is None:
        return table[-1] * 10.0**(exp - 1)
    return best * 10.0**exp
