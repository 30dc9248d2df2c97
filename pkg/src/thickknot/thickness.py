"""Thickness radius of a polygon: R = min(MinRad, dcsd / 2), and ropelength.

Polygonal analogues
-------------------
MinRad at vertex ``i`` is ``min(l_{i-1}, l_i) / (2 tan(theta_i / 2))`` with
``theta_i`` the turning angle. It equals ``R cos(pi/n)`` on a regular
``n``-gon inscribed in a circle of radius ``R``.

The doubly-critical self-distance is the shortest chord ``pq`` whose length
is stationary (a local minimum or maximum) under moving either endpoint along
the polygon. At an edge interior that means perpendicular to the edge. At a
vertex, where the tangent jumps, it means the distance to the other endpoint
does not increase (or does not decrease) on both sides of the vertex. Chords
joining neighbouring edges are excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ArcPoint, PolylineKnot, nonadjacent_pairs, point_at, scale_knot
from .parallel import block_map
from .validation import check_knot

_PARALLEL_RTOL = 1e-14
_INTERIOR_EPS = 1e-12


@dataclass(frozen=True)
class ThicknessReport:
    min_rad: float
    dcsd: float
    radius: float
    ropelength: float
    minrad_vertex: int
    dcsd_witness: tuple[ArcPoint, ArcPoint] | None

    def to_dict(self) -> dict:
        w = self.dcsd_witness
        return {
            "min_rad": self.min_rad,
            "dcsd": self.dcsd,
            "radius": self.radius,
            "ropelength": self.ropelength,
            "minrad_vertex": self.minrad_vertex,
            "dcsd_witness": None if w is None else [w[0].to_dict(), w[1].to_dict()],
        }


def min_rad(knot) -> tuple[float, int]:
    """Smallest discrete radius of curvature and the vertex attaining it."""
    knot = check_knot(knot)
    t = knot.tangents
    prev = np.roll(t, 1, axis=0)
    sin_ = np.linalg.norm(np.cross(prev, t), axis=1)
    cos_ = np.einsum("ij,ij->i", prev, t)
    tan_half = sin_ / (1.0 + cos_)
    l = knot.edge_lengths
    short = np.minimum(np.roll(l, 1), l)
    with np.errstate(divide="ignore"):
        rad = np.where(tan_half > 0, short / (2.0 * tan_half), math.inf)
    i = int(np.argmin(rad))
    return float(rad[i]), i


def _vertex_critical(knot: PolylineKnot, i, q):
    """Whether distance to ``q`` is locally extremal at vertex ``i``."""
    p = knot.vertices[i]
    e_prev = knot.edges[(i - 1) % knot.n]
    e_next = knot.edges[i]
    r = q - p
    return np.einsum("ij,ij->i", r, e_prev) * np.einsum("ij,ij->i", r, e_next) <= 0


def _best(d, sp, sq):
    if len(d) == 0:
        return (math.inf, math.inf, math.inf)
    lo, hi = np.minimum(sp, sq), np.maximum(sp, sq)
    k = np.lexsort((hi, lo, d))[0]
    return (float(d[k]), float(lo[k]), float(hi[k]))


def _edge_edge(knot: PolylineKnot, r0: int, r1: int):
    i, j = nonadjacent_pairs(knot.n, r0, r1)
    v, e, l = knot.vertices, knot.edges, knot.edge_lengths
    d1, d2 = e[i], e[j]
    r = v[i] - v[j]
    a = l[i] ** 2
    c_ = l[j] ** 2
    b = np.einsum("ij,ij->i", d1, d2)
    c = np.einsum("ij,ij->i", d1, r)
    f = np.einsum("ij,ij->i", d2, r)
    denom = a * c_ - b * b
    par = denom <= _PARALLEL_RTOL * a * c_
    safe = np.where(par, 1.0, denom)
    u = (b * f - c * c_) / safe
    w = (a * f - b * c) / safe
    # parallel edges: the middle of the overlap of their projections
    tq0 = -c / a
    tq1 = tq0 + b / a
    lo = np.maximum(0.0, np.minimum(tq0, tq1))
    hi = np.minimum(1.0, np.maximum(tq0, tq1))
    u = np.where(par, 0.5 * (lo + hi), u)
    w = np.where(par, (b * u + f) / c_, w)
    ok = np.where(par, hi - lo > _INTERIOR_EPS,
                  (u > _INTERIOR_EPS) & (u < 1 - _INTERIOR_EPS)
                  & (w > _INTERIOR_EPS) & (w < 1 - _INTERIOR_EPS))
    i, j, u, w = i[ok], j[ok], u[ok], w[ok]
    diff = v[i] + u[:, None] * d1[ok] - v[j] - w[:, None] * d2[ok]
    d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    sp = knot.arc_prefix[i] + u * l[i]
    sq = knot.arc_prefix[j] + w * l[j]
    return _best(d, sp, sq)


def _vertex_edge(knot: PolylineKnot, r0: int, r1: int):
    n = knot.n
    i, j = np.meshgrid(np.arange(r0, r1), np.arange(n), indexing="ij")
    gap = (j - i) % n
    keep = (gap >= 2) & (gap <= n - 3)
    i, j = i[keep], j[keep]
    v, e, l = knot.vertices, knot.edges, knot.edge_lengths
    p = v[i]
    w = np.einsum("ij,ij->i", p - v[j], e[j]) / l[j] ** 2
    inside = (w > _INTERIOR_EPS) & (w < 1 - _INTERIOR_EPS)
    i, j, w, p = i[inside], j[inside], w[inside], p[inside]
    q = v[j] + w[:, None] * e[j]
    crit = _vertex_critical(knot, i, q)
    i, j, w, p, q = i[crit], j[crit], w[crit], p[crit], q[crit]
    d = np.linalg.norm(q - p, axis=1)
    return _best(d, knot.arc_prefix[i], knot.arc_prefix[j] + w * l[j])


def _vertex_vertex(knot: PolylineKnot, r0: int, r1: int):
    n = knot.n
    i, j = np.meshgrid(np.arange(r0, r1), np.arange(n), indexing="ij")
    keep = (j - i >= 3) & (j - i <= n - 3)
    i, j = i[keep], j[keep]
    v = knot.vertices
    crit = _vertex_critical(knot, i, v[j]) & _vertex_critical(knot, j, v[i])
    i, j = i[crit], j[crit]
    d = np.linalg.norm(v[j] - v[i], axis=1)
    return _best(d, knot.arc_prefix[i], knot.arc_prefix[j])


def dcsd(knot) -> tuple[float, tuple[ArcPoint, ArcPoint] | None]:
    """Doubly-critical self-distance and a witness chord.

    Returns ``(inf, None)`` when no critical chord exists (e.g. a triangle).
    Ties are broken by the smaller arclength parameters of the witness.
    """
    knot = check_knot(knot)
    n = knot.n
    cands = []
    for fn, rows in ((_edge_edge, n - 2), (_vertex_edge, n), (_vertex_vertex, n)):
        cands += block_map(lambda r0, r1: fn(knot, r0, r1), rows, block=64)
    best = min(cands) if cands else (math.inf, math.inf, math.inf)
    if not math.isfinite(best[0]):
        return math.inf, None
    return best[0], (point_at(knot, best[1]), point_at(knot, best[2]))


def thickness(knot) -> ThicknessReport:
    """Thickness radius ``R = min(MinRad, dcsd / 2)`` and ropelength ``L / R``."""
    knot = check_knot(knot)
    mr, vertex = min_rad(knot)
    dc, witness = dcsd(knot)
    radius = min(mr, dc / 2.0)
    return ThicknessReport(mr, dc, radius, knot.total_length / radius, vertex, witness)


def normalize(knot) -> PolylineKnot:
    """Rescale so the thickness radius is 1; the new length is the ropelength."""
    knot = check_knot(knot)
    return scale_knot(knot, 1.0 / thickness(knot).radius)
