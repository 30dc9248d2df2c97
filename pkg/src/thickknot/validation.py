"""Input validation shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import BadParameter
from .geometry import PolylineKnot, build_knot


def check_vertices(x) -> np.ndarray:
    """Return a finite float ``(n, 3)`` array or raise :class:`BadParameter`."""
    try:
        v = check_array(x, dtype=np.float64, ensure_2d=True, ensure_min_samples=1,
                        ensure_all_finite=True, copy=False)
    except ValueError as exc:
        raise BadParameter(str(exc)) from None
    if v.shape[1] != 3:
        raise BadParameter(f"vertices must have 3 columns, got {v.shape[1]}")
    return v


def check_knot(x, name: str = "knot") -> PolylineKnot:
    """Accept a :class:`PolylineKnot` as is; validate anything else as vertices."""
    if isinstance(x, PolylineKnot):
        return x
    return build_knot(check_vertices(x), name=name)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise BadParameter(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
