"""Engineering-notation formatting for the CLI boundary."""
from __future__ import annotations

import math

_PREFIXES = (
    (1e12, "T"), (1e9, "G"), (1e6, "M"), (1e3, "k"),
    (1.0, ""), (1e-3, "m"), (1e-6, "u"), (1e-9, "n"), (1e-12, "p"),
)


def eng(value: float, unit: str = "", digits: int = 4) -> str:
    """Format with an SI prefix, e.g. eng(2.5e6, 'ohm') == '2.5 Mohm'."""
    if value is None or not math.isfinite(value):
        return f"{value} {unit}".strip()
    if value == 0.0:
        return f"0 {unit}".strip()
    mag = abs(value)
    for scale, prefix in _PREFIXES:
        if mag >= scale:
            return f"{value / scale:.{digits}g} {prefix}{unit}".strip()
    scale, prefix = _PREFIXES[-1]
    return f"{value / scale:.{digits}g} {prefix}{unit}".strip()
