"""Closed polygonal knots addressed by arclength, plus test-family generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (BadParameter, DegenerateEdge, SelfIntersecting,
                         TooFewVertices)
from .parallel import block_map

DEGENERATE_EDGE_RTOL = 1e-12
SIMPLICITY_RTOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PolylineKnot:
    """Closed polygon in R^3; edge ``i`` joins vertex ``i`` to ``(i+1) % n``.

    Instances are immutable. Use :func:`build_knot` to construct a validated
    knot; the constructor itself only computes the arclength tables.
    """

    vertices: np.ndarray
    name: str = "knot"
    edges: np.ndarray = field(init=False, repr=False)
    edge_lengths: np.ndarray = field(init=False, repr=False)
    arc_prefix: np.ndarray = field(init=False, repr=False)
    total_length: float = field(init=False)
    diameter: float = field(init=False, repr=False)

    def __post_init__(self):
        v = _frozen(self.vertices)
        if v.ndim != 2 or v.shape[1] != 3:
            raise BadParameter(f"vertices must have shape (n, 3), got {v.shape}")
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.sqrt(np.einsum("ij,ij->i", edges, edges))
        prefix = np.concatenate([[0.0], np.cumsum(lengths)])
        span = v.max(axis=0) - v.min(axis=0) if len(v) else np.zeros(3)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "edges", _frozen(edges))
        object.__setattr__(self, "edge_lengths", _frozen(lengths))
        object.__setattr__(self, "arc_prefix", _frozen(prefix))
        object.__setattr__(self, "total_length", float(prefix[-1]))
        object.__setattr__(self, "diameter", float(np.linalg.norm(span)))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def tangents(self) -> np.ndarray:
        return self.edges / self.edge_lengths[:, None]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class ArcPoint:
    s: float
    position: np.ndarray
    edge_index: int

    def to_dict(self) -> dict:
        return {"s": float(self.s), "edge_index": int(self.edge_index),
                "position": [float(x) for x in self.position]}


def segment_closest_points(p0, p1, q0, q1):
    """Closest points between segments ``p0p1`` and ``q0q1`` (broadcasting).

    Returns ``(u, v, dist)`` with the closest points at ``p0 + u (p1 - p0)``
    and ``q0 + v (q1 - q0)``. For parallel segments one closest pair is
    returned.
    """
    d1 = np.asarray(p1, float) - p0
    d2 = np.asarray(q1, float) - q0
    r = np.asarray(p0, float) - q0
    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    b = np.einsum("...i,...i->...", d1, d2)
    c = np.einsum("...i,...i->...", d1, r)
    f = np.einsum("...i,...i->...", d2, r)
    denom = a * e - b * b
    parallel = denom <= 1e-14 * a * e
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(parallel, 0.0, np.clip((b * f - c * e) / denom, 0.0, 1.0))
        v = (b * u + f) / e
        u = np.where(v < 0, np.clip(-c / a, 0.0, 1.0), u)
        u = np.where(v > 1, np.clip((b - c) / a, 0.0, 1.0), u)
    v = np.clip(v, 0.0, 1.0)
    diff = (np.asarray(p0, float) + u[..., None] * d1) - (np.asarray(q0, float) + v[..., None] * d2)
    return u, v, np.sqrt(np.einsum("...i,...i->...", diff, diff))


def nonadjacent_pairs(n: int, r0: int = 0, r1: int | None = None):
    """Index arrays ``(i, j)`` with ``i < j`` for edges sharing no vertex."""
    r1 = n if r1 is None else r1
    i, j = np.meshgrid(np.arange(r0, r1), np.arange(n), indexing="ij")
    keep = (j >= i + 2) & ~((i == 0) & (j == n - 1))
    return i[keep], j[keep]


def min_nonadjacent_distance(vertices: np.ndarray) -> tuple[float, int, int]:
    """Smallest distance between two edges that share no vertex."""
    v = np.asarray(vertices, float)
    n = len(v)
    if n < 4:
        return math.inf, -1, -1
    w = np.roll(v, -1, axis=0)

    def block(r0, r1):
        i, j = nonadjacent_pairs(n, r0, r1)
        if len(i) == 0:
            return math.inf, -1, -1
        _, _, d = segment_closest_points(v[i], w[i], v[j], w[j])
        k = int(np.argmin(d))
        return float(d[k]), int(i[k]), int(j[k])

    return min(block_map(block, n - 2, block=64), key=lambda t: t[0])


def build_knot(vertices, name: str = "knot") -> PolylineKnot:
    """Validate a vertex list and return an immutable closed knot.

    Raises
    ------
    TooFewVertices
        Fewer than 3 vertices.
    DegenerateEdge
        An edge shorter than ``1e-12`` times the knot diameter.
    SelfIntersecting
        Two edges without a common vertex closer than ``1e-9`` times the
        diameter, or two consecutive edges folding back onto each other.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3:
        raise BadParameter(f"vertices must have shape (n, 3), got {v.shape}")
    if len(v) < 3:
        raise TooFewVertices(f"a closed polygon needs at least 3 vertices, got {len(v)}")
    if not np.all(np.isfinite(v)):
        raise BadParameter("vertex coordinates must be finite")
    knot = PolylineKnot(v, name=name)
    if knot.diameter == 0 or np.any(knot.edge_lengths <= DEGENERATE_EDGE_RTOL * knot.diameter):
        k = int(np.argmin(knot.edge_lengths))
        raise DegenerateEdge(f"edge {k} has length {knot.edge_lengths[k]:.3g}")
    t = knot.tangents
    cos_turn = np.einsum("ij,ij->i", np.roll(t, 1, axis=0), t)
    if np.any(cos_turn < -1 + 1e-12):
        k = int(np.argmin(cos_turn))
        raise SelfIntersecting(f"edges {(k - 1) % knot.n} and {k} fold back")
    d, i, j = min_nonadjacent_distance(v)
    if d <= SIMPLICITY_RTOL * knot.diameter:
        raise SelfIntersecting(f"edges {i} and {j} are {d:.3g} apart")
    return knot


def as_vertices(knot_or_vertices) -> np.ndarray:
    if isinstance(knot_or_vertices, PolylineKnot):
        return knot_or_vertices.vertices
    return np.asarray(knot_or_vertices, dtype=float)


def locate(knot: PolylineKnot, s):
    """Vectorised arclength lookup: returns ``(s mod L, positions, edge)``."""
    s = np.mod(np.asarray(s, dtype=float), knot.total_length)
    edge = np.searchsorted(knot.arc_prefix, s, side="right") - 1
    edge = np.clip(edge, 0, knot.n - 1)
    frac = (s - knot.arc_prefix[edge]) / knot.edge_lengths[edge]
    pos = knot.vertices[edge] + frac[..., None] * knot.edges[edge]
    return s, pos, edge


def point_at(knot: PolylineKnot, s: float) -> ArcPoint:
    """Point at arclength ``s`` (taken modulo the total length)."""
    s, pos, edge = locate(knot, s)
    return ArcPoint(float(s), pos, int(edge))


def arc_distance(knot_or_length, s, t):
    """Shorter way round the knot between parameters ``s`` and ``t``."""
    L = (knot_or_length.total_length if isinstance(knot_or_length, PolylineKnot)
         else float(knot_or_length))
    d = np.mod(np.abs(np.asarray(s, float) - np.asarray(t, float)), L)
    out = np.minimum(d, L - d)
    return float(out) if np.ndim(out) == 0 else out


def scale_knot(knot: PolylineKnot, factor: float, name: str | None = None) -> PolylineKnot:
    if not factor > 0:
        raise BadParameter("scale factor must be positive")
    return PolylineKnot(knot.vertices * factor, name=name or knot.name)


def mirror(knot: PolylineKnot) -> PolylineKnot:
    """Reflect through the xy-plane."""
    return PolylineKnot(knot.vertices * np.array([1.0, 1.0, -1.0]), name=knot.name + "-mirror")


def unit_circle_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``cos`` and ``sin`` of ``2 pi k / n`` with exact octant reduction.

    Reducing the index with integer arithmetic keeps every libm argument in
    ``[0, pi/4]``, so the points are close to correctly rounded and the
    polygon's turning angles stay accurate at large ``n``.
    """
    k8 = 8 * np.arange(n)
    octant = k8 // n
    rem = (k8 - octant * n).astype(float) / n  # in [0, 1)
    # angle within the quadrant, measured from the nearer axis
    odd = octant % 2 == 1
    small = np.where(odd, 1.0 - rem, rem) * (np.pi / 4)
    c, s = np.cos(small), np.sin(small)
    c, s = np.where(odd, s, c), np.where(odd, c, s)
    quad = octant // 2
    cos_ = np.select([quad == 0, quad == 1, quad == 2], [c, -s, -c], s)
    sin_ = np.select([quad == 0, quad == 1, quad == 2], [s, c, -s], -c)
    return cos_, sin_


def make_circle(radius: float, n: int, name: str | None = None) -> PolylineKnot:
    """Regular ``n``-gon inscribed in a circle of the given radius (xy-plane)."""
    if not radius > 0:
        raise BadParameter("radius must be positive")
    if int(n) != n or n < 3:
        raise BadParameter("n must be an integer >= 3")
    c, s = unit_circle_points(int(n))
    v = np.column_stack([radius * c, radius * s, np.zeros(int(n))])
    return build_knot(v, name=name or f"circle-{n}")


def make_torus_knot(p: int, q: int, major: float = 2.0, minor: float = 1.0,
                    n: int = 512, name: str | None = None) -> PolylineKnot:
    """(p, q) torus knot sampled uniformly in the curve parameter.

    The curve winds ``p`` times around the torus axis and ``q`` times through
    the hole.
    """
    if int(p) != p or int(q) != q or p < 2 or q < 2:
        raise BadParameter("p and q must be integers >= 2")
    if math.gcd(int(p), int(q)) != 1:
        raise BadParameter(f"gcd({p}, {q}) != 1 gives a link, not a knot")
    if not major > minor > 0:
        raise BadParameter("need major > minor > 0")
    if int(n) != n or n < 3:
        raise BadParameter("n must be an integer >= 3")
    phi = 2 * np.pi * np.arange(n) / n
    rho = major + minor * np.cos(q * phi)
    v = np.column_stack([rho * np.cos(p * phi), rho * np.sin(p * phi), minor * np.sin(q * phi)])
    return build_knot(v, name=name or f"T({p},{q})-{n}")


def perturb(knot: PolylineKnot, amplitude: float, seed: int, modes: int = 4) -> PolylineKnot:
    """Displace vertices by a smooth pseudo-random field of max norm ``amplitude``.

    The field is a random combination of the lowest ``modes`` Fourier modes
    in the vertex index, so neighbouring vertices move together and the
    knot's length changes by O(amplitude^2) rather than O(amplitude).
    """
    if not amplitude >= 0:
        raise BadParameter("amplitude must be >= 0")
    if amplitude == 0:
        return PolylineKnot(knot.vertices, name=knot.name)
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((modes, 2, 3))
    phase = 2 * np.pi * np.arange(knot.n) / knot.n
    k = np.arange(1, modes + 1)[:, None]
    field_ = np.cos(k * phase).T @ coef[:, 0] + np.sin(k * phase).T @ coef[:, 1]
    field_ *= amplitude / np.sqrt(np.einsum("ij,ij->i", field_, field_)).max()
    return build_knot(knot.vertices + field_, name=f"{knot.name}-perturbed-{seed}")
