"""Closed-form upper bounds on E_O4 in terms of the ropelength ``L``.

All functions take ``L`` for a knot normalised to thickness radius 1.

* ``quadratic_bound``: ``L^2 / 4`` and the sharper ``L^2/4 - pi L/2 + 4``.
* ``detailed_bound``: ``L * I(P) + 4`` where ``I`` bounds the distal inner
  integral through a shell-packing argument and ``P`` is the shell radius at
  which the packing envelope has absorbed all ``L - 2 pi`` distal length.
* ``power_bound``: ``4.57 L^{4/3}``, the coefficient being the maximum of
  ``detailed_bound(L) / L^{4/3}``.

The detailed bound is only defined for ``L >= 104/3 + 2 pi`` (``P >= 2``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from .exceptions import BadParameter, BelowDomain, NoSignChange

L_MIN = 104.0 / 3.0 + 2.0 * math.pi
ELL_STAR_AT_2 = 104.0 / 3.0
POWER_COEF = 4.57
ASYMPTOTIC_COEF = 3.0 ** (1 / 3) * 4.0 ** (2 / 3)


def _check_domain(length, lo, what):
    L = np.asarray(length, dtype=float)
    if np.any(~(L >= lo)):
        raise BelowDomain(f"{what} needs L >= {lo:.12g}, got {np.min(L):.12g}")
    return L


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def p_constant(length):
    """Shell radius ``P = (3L/4 - 3 pi/2 + 1)^{1/3} - 1``.

    Evaluated as ``cbrt(27 + 3 (L - L_MIN) / 4) - 1``, which is the same
    expression rearranged so that ``P`` is exactly 2 at ``L = L_MIN``.
    """
    L = _check_domain(length, L_MIN, "P")
    return _out(np.cbrt(27.0 + 0.75 * (L - L_MIN)) - 1.0)


def ell_star_at2() -> float:
    """Envelope for the length at distance exactly 2: ``4/3 (3^3 - 1)``."""
    return ELL_STAR_AT_2


def ell_star(a, b, length):
    """Packing envelope ``l*(a, b]`` for the length in the shell ``a < r <= b``."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if np.any(~(a >= 2)) or np.any(~(a < b)):
        raise BadParameter("need 2 <= a < b")
    P = p_constant(length)
    return _out(4.0 / 3.0 * ((np.minimum(b, P) + 1) ** 3 - (np.minimum(a, P) + 1) ** 3))


def ell_star_closed(b, length):
    """Cumulative envelope ``l*[2, b] = l*[2] + l*(2, b]`` (``b >= 2``)."""
    b = np.asarray(b, float)
    if np.any(~(b >= 2)):
        raise BadParameter("need b >= 2")
    P = p_constant(length)
    return _out(4.0 / 3.0 * ((np.minimum(b, P) + 1) ** 3 - 1.0))


def distal_inner_bound(length):
    """Bound on the distal inner integral: ``8/3 + 4P - 4/P + 8 ln(P/2)``."""
    P = np.asarray(p_constant(length))
    return _out(8.0 / 3.0 + 4.0 * P - 4.0 / P + 8.0 * np.log(P) - 8.0 * math.log(2.0))


def detailed_bound(length):
    """``L * distal_inner_bound(L) + 4``."""
    L = np.asarray(length, float)
    return _out(L * distal_inner_bound(L) + 4.0)


def quadratic_bound(length) -> tuple[float, float]:
    """``(L^2/4, L^2/4 - pi L/2 + 4)``; needs ``L >= 2 pi``."""
    L = _check_domain(length, 2 * math.pi, "quadratic bound")
    return _out(L * L / 4.0), _out(L * L / 4.0 - math.pi * L / 2.0 + 4.0)


def power_bound(length, coef: float = POWER_COEF):
    """``coef * L^{4/3}``."""
    L = np.asarray(length, float)
    if np.any(~(L > 0)):
        raise BadParameter("L must be positive")
    return _out(coef * L ** (4.0 / 3.0))


# bound id -> (function of L, smallest admissible L)
BOUNDS = {
    "quad": (lambda L: quadratic_bound(L)[0], 2 * math.pi),
    "quad_raw": (lambda L: quadratic_bound(L)[1], 2 * math.pi),
    "detailed": (detailed_bound, L_MIN),
    "power_457": (power_bound, 0.0),
    "power_4": (lambda L: power_bound(L, 4.0), 0.0),
}


def _bound(name):
    try:
        return BOUNDS[name]
    except KeyError:
        raise BadParameter(f"unknown bound {name!r}; choose from {sorted(BOUNDS)}") from None


@dataclass(frozen=True)
class BoundReport:
    length: float
    p_value: float | None
    quad_raw: float | None
    quad: float | None
    detailed: float | None
    power_457: float
    best: float

    def to_dict(self) -> dict:
        return asdict(self)

    def applicable(self) -> dict:
        names = ("quad_raw", "quad", "detailed", "power_457")
        return {k: getattr(self, k) for k in names if getattr(self, k) is not None}


def bound_report(length: float) -> BoundReport:
    """Every bound applicable at ``L``; ``best`` is the smallest of them."""
    L = float(length)
    if not L > 0:
        raise BadParameter("L must be positive")
    quad = quad_raw = p = det = None
    if L >= 2 * math.pi:
        quad, quad_raw = quadratic_bound(L)
    if L >= L_MIN:
        p, det = p_constant(L), detailed_bound(L)
    power = power_bound(L)
    best = min(x for x in (quad, quad_raw, det, power) if x is not None)
    return BoundReport(L, p, quad_raw, quad, det, power, best)


# --------------------------------------------------------------------------
# sweeps and crossovers

@dataclass(frozen=True)
class SweepResult:
    argmax_length: float
    max_ratio: float
    table: np.ndarray  # columns: L, detailed, quad, power_457, ratio

    COLUMNS = ("L", "detailed", "quad", "power_457", "ratio")

    def rows(self):
        return [tuple(float(x) for x in row) for row in self.table]


def ratio(length):
    """``detailed_bound(L) / L^{4/3}``."""
    L = np.asarray(length, float)
    return _out(detailed_bound(L) / L ** (4.0 / 3.0))


def sweep_ratio(l_min: float, l_max: float, steps: int = 2000) -> SweepResult:
    """Scan ``detailed_bound(L) / L^{4/3}`` on a log grid and refine its maximum.

    The grid maximum is polished by golden-section search to a relative
    tolerance of 1e-6 in ``L``.
    """
    if l_min < L_MIN:
        raise BelowDomain(f"sweep needs l_min >= {L_MIN:.12g}")
    if not l_max > l_min:
        raise BadParameter("need l_max > l_min")
    if int(steps) != steps or steps < 2:
        raise BadParameter("steps must be an integer >= 2")
    grid = np.geomspace(l_min, l_max, int(steps))
    r = ratio(grid)
    k = int(np.argmax(r))
    best_L, best_r = float(grid[k]), float(r[k])
    if 0 < k < len(grid) - 1:
        res = optimize.minimize_scalar(lambda L: -ratio(L), bracket=(grid[k - 1], grid[k], grid[k + 1]),
                                       method="golden", tol=1e-6)
        if -res.fun >= best_r:
            best_L, best_r = float(res.x), float(-res.fun)
    table = np.column_stack([grid, detailed_bound(grid), grid**2 / 4, power_bound(grid), r])
    return SweepResult(best_L, best_r, table)


def crossover(bound_a: str, bound_b: str, bracket: tuple[float, float]) -> float:
    """Root of ``a(L) - b(L)`` inside ``bracket`` by bisection (1e-9 relative).

    Raises
    ------
    NoSignChange
        The difference has the same sign (or vanishes) at both ends.
    BelowDomain
        The bracket reaches below a bound's domain.
    """
    fa, _ = _bound(bound_a)
    fb, _ = _bound(bound_b)
    lo, hi = map(float, bracket)
    if not hi > lo:
        raise BadParameter("bracket must satisfy lo < hi")
    f = lambda L: fa(L) - fb(L)
    va, vb = f(lo), f(hi)
    if not va * vb < 0:
        raise NoSignChange(f"{bound_a} - {bound_b} does not change sign on [{lo}, {hi}]")
    return float(optimize.bisect(f, lo, hi, xtol=1e-12, rtol=1e-9))


def advantage_onset(bound_a: str, bound_b: str, bracket: tuple[float, float]) -> tuple[float, str]:
    """Smallest ``L`` in ``bracket`` beyond which bound ``a`` is below bound ``b``.

    A bound counts as unavailable below its domain, so when ``a`` is already
    lower at the left edge of its domain the onset is that edge. Returns
    ``(L, kind)`` with ``kind`` one of ``"root"``, ``"domain-edge"`` or
    ``"bracket-edge"``.

    Raises
    ------
    NoSignChange
        ``a`` is not below ``b`` at the right end of the bracket.
    """
    fa, dom_a = _bound(bound_a)
    fb, dom_b = _bound(bound_b)
    lo, hi = map(float, bracket)
    if not hi > lo:
        raise BadParameter("bracket must satisfy lo < hi")
    start = max(lo, dom_a, dom_b)
    if start >= hi:
        raise BelowDomain("bracket lies outside the bounds' common domain")
    if not fa(hi) < fb(hi):
        raise NoSignChange(f"{bound_a} is not below {bound_b} at L = {hi}")
    if fa(start) < fb(start):
        kind = "bracket-edge" if start == lo else "domain-edge"
        return start, kind
    return crossover(bound_a, bound_b, (start, hi)), "root"


def coefficient_holds(length, coef: float = 4.0):
    """Whether ``detailed_bound(L) <= coef * L^{4/3}`` (elementwise)."""
    return detailed_bound(length) <= power_bound(length, coef)
