"""Falsification harness: check the lemma- and theorem-level inequalities on a knot.

Every check samples finitely many points or pairs, so a pass is evidence,
not proof. Geometric checks on a polygon get slack proportional to the mesh
size because polygon chords undercut the chords of the smooth curve they
approximate. Bound checks get a relative tolerance of 1e-9.

All per-knot checks expect a knot normalised to thickness radius 1 (see
:func:`thickknot.thickness.normalize`); :func:`verify_knot` normalises first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from .energy import (EnergyBreakdown, QuadratureConfig, mobius_energy,
                     total_curvature, writhe)
from .exceptions import BelowDomain
from .geometry import ArcPoint, PolylineKnot, locate
from .thickness import ThicknessReport, normalize, thickness
from .validation import check_knot, check_positive_int

BOUND_RTOL = 1e-9
GEOM_ATOL = 1e-6
PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality check.

    ``margin`` is ``bound + tol - value`` for upper bounds (and the mirror
    image for lower bounds), so a check passes iff ``margin >= 0``.
    """

    check_id: str
    status: str
    margin: float
    value: float
    bound: float
    tol: float
    witness: dict | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> dict:
        return {"check_id": self.check_id, "status": self.status, "passed": self.passed,
                "margin": self.margin, "value": self.value, "bound": self.bound,
                "tol": self.tol, "witness": self.witness, "note": self.note}


def _upper(check_id, value, bound, tol, witness=None, note=""):
    margin = bound + tol - value
    return CheckResult(check_id, PASS if margin >= 0 else FAIL, float(margin), float(value),
                       float(bound), float(tol), witness, note)


def _lower(check_id, value, bound, tol, witness=None, note=""):
    margin = value - (bound - tol)
    return CheckResult(check_id, PASS if margin >= 0 else FAIL, float(margin), float(value),
                       float(bound), float(tol), witness, note)


def _skip(check_id, note):
    return CheckResult(check_id, SKIP, math.inf, math.nan, math.nan, 0.0, None, note)


def mesh_size(knot: PolylineKnot) -> float:
    return float(knot.edge_lengths.max())


def _pair_grid(knot, samples, lo, hi):
    """Basepoints ``s`` and partners ``s + a`` with offsets ``a`` in ``(lo, hi)``."""
    k = max(1, math.ceil(math.sqrt(samples)))
    L = knot.total_length
    s = (np.arange(k) + 0.5) * L / k
    a = lo + (np.arange(k) + 0.5) * (hi - lo) / k
    S, A = np.meshgrid(s, a, indexing="ij")
    _, x, _ = locate(knot, S.ravel())
    _, y, _ = locate(knot, (S + A).ravel())
    return S.ravel(), A.ravel(), np.linalg.norm(x - y, axis=1)


def check_lemma3(knot, samples: int = 4096) -> CheckResult:
    """Pairs at arc distance at least pi are at least 2 apart.

    ``samples`` pairs are laid out as a grid of basepoints times arc offsets
    in ``[pi, L - pi]``.
    """
    knot = check_knot(knot)
    samples = check_positive_int(samples, "samples")
    L = knot.total_length
    tol = GEOM_ATOL + 2 * mesh_size(knot)
    if L <= 2 * math.pi:
        return _skip("lemma3", "no pair has arc distance >= pi")
    s, a, chord = _pair_grid(knot, samples, math.pi, L - math.pi)
    k = int(np.argmin(chord))
    w = {"s": float(s[k]), "t": float((s[k] + a[k]) % L), "chord": float(chord[k])}
    return _lower("lemma3", chord[k], 2.0, tol, w)


def check_schur(knot, samples: int = 4096) -> CheckResult:
    """Chords at arc ``a <= pi`` are at least the unit-circle chord ``2 sin(a/2)``."""
    knot = check_knot(knot)
    samples = check_positive_int(samples, "samples")
    L = knot.total_length
    tol = GEOM_ATOL + 2 * mesh_size(knot)
    s, a, chord = _pair_grid(knot, samples, 0.0, min(math.pi, L / 2))
    excess = chord - 2 * np.sin(a / 2)
    k = int(np.argmin(excess))
    w = {"s": float(s[k]), "t": float((s[k] + a[k]) % L), "arc": float(a[k]),
         "chord": float(chord[k])}
    return _lower("lemma1_schur", excess[k], 0.0, tol, w)


def proximal_tolerance(knot: PolylineKnot) -> float:
    """Discretisation slack for energy estimates on a unit-thickness polygon.

    The midpoint rule overestimates by at most about ``(pi^2/18) h L`` when
    curvature is bounded by 1.
    """
    return math.pi**2 / 18 * mesh_size(knot) * knot.total_length


def check_proximal_bound(knot, energy: EnergyBreakdown | None = None,
                         cfg: QuadratureConfig | None = None) -> CheckResult:
    """``E_prox <= (2/pi) L`` with the split at arc distance pi."""
    knot = check_knot(knot)
    if energy is None:
        energy = mobius_energy(knot, cfg, threshold_arc=math.pi)
    bound = 2 / math.pi * knot.total_length
    tol = proximal_tolerance(knot) + BOUND_RTOL * bound
    return _upper("lemma5_proximal", energy.e_prox, bound, tol,
                  {"e_prox": energy.e_prox, "threshold_arc": energy.threshold_arc})


@dataclass(frozen=True)
class OccupancyCurve:
    """Distal length within each radius of a basepoint, against the envelope."""

    basepoint: float
    radii: np.ndarray
    occupancy: np.ndarray
    envelope: np.ndarray | None
    tol: np.ndarray
    check: CheckResult

    def to_dict(self) -> dict:
        return {"basepoint": self.basepoint, "radii": self.radii.tolist(),
                "occupancy": self.occupancy.tolist(),
                "envelope": None if self.envelope is None else self.envelope.tolist(),
                "tol": self.tol.tolist(), "check": self.check.to_dict()}


def _distal_samples(knot, s, samples):
    """Midpoints of ``samples`` equal cells covering the distal arc of ``s``."""
    L = knot.total_length
    span = L - 2 * math.pi
    ds = span / samples
    t = s + math.pi + (np.arange(samples) + 0.5) * ds
    _, x, _ = locate(knot, s)
    _, y, _ = locate(knot, t)
    return t, np.linalg.norm(y - x, axis=-1), ds


def _as_s(basepoint) -> float:
    return float(basepoint.s if isinstance(basepoint, ArcPoint) else basepoint)


def shell_occupancy(knot, basepoint, radii, samples: int = 8192) -> OccupancyCurve:
    """Arclength of ``{y : arc(x, y) >= pi, |x - y| <= r}`` for each radius ``r``.

    The length is a Riemann sum over ``samples`` equal cells, so its error is
    at most one cell per boundary crossing of the ball; that (plus two cells)
    is the tolerance against the envelope ``l*[2, r]``. Radii below 2 are
    reported but not checked. Below the envelope's domain the curve is still
    returned and the check is skipped.
    """
    knot = check_knot(knot)
    samples = check_positive_int(samples, "samples")
    s = _as_s(basepoint)
    radii = np.asarray(radii, float)
    L = knot.total_length
    if L <= 2 * math.pi:
        zero = np.zeros_like(radii)
        return OccupancyCurve(s, radii, zero, None, zero, _skip("shell_occupancy", "no distal arc"))
    _, d, ds = _distal_samples(knot, s, samples)
    inside = d[None, :] <= radii[:, None]
    occ = ds * inside.sum(axis=1)
    crossings = np.count_nonzero(np.diff(inside.astype(np.int8), axis=1), axis=1)
    tol = ds * (crossings + 2)
    try:
        env = np.asarray(B.ell_star_closed(np.maximum(radii, 2.0), L), float)
    except BelowDomain:
        return OccupancyCurve(s, radii, occ, None, tol,
                              _skip("shell_occupancy", "L below the envelope domain"))
    checked = radii >= 2
    if not np.any(checked):
        return OccupancyCurve(s, radii, occ, env, tol, _skip("shell_occupancy", "no radius >= 2"))
    margin = np.where(checked, env + tol - occ, np.inf)
    k = int(np.argmin(margin))
    chk = _upper("shell_occupancy", occ[k], env[k], tol[k], {"s": s, "r": float(radii[k])})
    return OccupancyCurve(s, radii, occ, env, tol, chk)


def ix_dist_tolerance(knot: PolylineKnot) -> float:
    """Slack from distal chords being at most ``2 h`` shorter than 2."""
    delta = 2 * mesh_size(knot)
    if delta >= 2:
        return math.inf
    return (knot.total_length - 2 * math.pi) * (1 / (2 - delta) ** 2 - 0.25)


def check_ix_dist(knot, basepoint, samples: int = 8192) -> CheckResult:
    """Distal inner integral at ``x`` is at most ``distal_inner_bound(L)``.

    Raises
    ------
    BelowDomain
        ``L < 104/3 + 2 pi``.
    """
    knot = check_knot(knot)
    samples = check_positive_int(samples, "samples")
    bound = B.distal_inner_bound(knot.total_length)
    s = _as_s(basepoint)
    _, d, ds = _distal_samples(knot, s, samples)
    value = ds * float(np.sum(1.0 / d**2))
    tol = ix_dist_tolerance(knot) + BOUND_RTOL * bound
    return _upper("ix_dist", value, bound, tol, {"s": s, "min_distance": float(d.min())})


def _worst(check_id, results):
    """Fold per-basepoint results into one, keeping the smallest margin."""
    live = [r for r in results if r.status != SKIP]
    if not live:
        return results[0] if results else _skip(check_id, "no basepoints")
    r = min(live, key=lambda c: c.margin)
    return CheckResult(check_id, r.status, r.margin, r.value, r.bound, r.tol, r.witness,
                       f"worst of {len(live)} basepoints")


@dataclass(frozen=True)
class VerificationReport:
    knot_name: str
    ropelength: float
    energy: EnergyBreakdown
    thickness: ThicknessReport
    writhe: float
    total_curvature: float
    bounds: B.BoundReport
    checks: tuple[CheckResult, ...]
    config: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {"knot_name": self.knot_name, "ropelength": self.ropelength,
                "energy": self.energy.to_dict(), "thickness": self.thickness.to_dict(),
                "writhe": self.writhe, "total_curvature": self.total_curvature,
                "bounds": self.bounds.to_dict(), "checks": [c.to_dict() for c in self.checks],
                "overall": self.overall, "config": self.config}

    def table(self) -> str:
        lines = [f"knot {self.knot_name}: ropelength {self.ropelength:.6g}, "
                 f"E_O4 {self.energy.total:.6g}",
                 f"{'check':<18} {'status':<6} {'value':>14} {'bound':>14} {'margin':>12}"]
        for c in self.checks:
            lines.append(f"{c.check_id:<18} {c.status:<6} {c.value:>14.6g} {c.bound:>14.6g} "
                         f"{c.margin:>12.4g}")
        lines.append("overall: " + ("PASS" if self.overall else "FAIL"))
        return "\n".join(lines)


THEOREM_CHECKS = ("thm2_quadratic", "thm1_power", "detailed_bound")
LEMMA_CHECKS = ("lemma1_schur", "lemma3", "lemma5_proximal", "shell_occupancy", "ix_dist")


def verify_knot(knot, cfg: QuadratureConfig | None = None, basepoints: int = 16,
                samples: int = 4096, shell_samples: int = 8192, radii: int = 64) -> VerificationReport:
    """Normalise ``knot`` to unit thickness and run every check.

    Checks, in order: Schur chord comparison, distal chord >= 2, proximal
    energy bound, shell occupancy and distal inner integral at ``basepoints``
    equally spaced points, quadratic / power / detailed energy bounds,
    writhe bound, and Fenchel's total-curvature bound. Checks whose
    hypotheses fail (a length outside a bound's domain) are skipped.
    """
    knot = check_knot(knot)
    cfg = cfg or QuadratureConfig()
    basepoints = check_positive_int(basepoints, "basepoints")
    radii = check_positive_int(radii, "radii", 2)
    th = thickness(knot)
    kn = normalize(knot)
    L = kn.total_length
    energy = mobius_energy(kn, cfg, threshold_arc=math.pi)
    wr = writhe(kn)
    tc = total_curvature(kn)
    rep = B.bound_report(L)

    checks = [check_schur(kn, samples), check_lemma3(kn, samples),
              check_proximal_bound(kn, energy)]
    base = np.arange(basepoints) * L / basepoints
    rgrid = np.linspace(2.0, max(L / 2, 2.0 + 1e-9), radii)
    checks.append(_worst("shell_occupancy",
                         [shell_occupancy(kn, s, rgrid, shell_samples).check for s in base]))
    if L >= B.L_MIN:
        checks.append(_worst("ix_dist", [check_ix_dist(kn, s, shell_samples) for s in base]))
    else:
        checks.append(_skip("ix_dist", "L below 104/3 + 2 pi"))

    total = energy.total
    if rep.quad is not None:
        checks.append(_upper("thm2_quadratic", total, rep.quad, BOUND_RTOL * rep.quad))
    else:
        checks.append(_skip("thm2_quadratic", "L below 2 pi"))
    checks.append(_upper("thm1_power", total, rep.power_457, BOUND_RTOL * rep.power_457))
    if rep.detailed is not None:
        checks.append(_upper("detailed_bound", total, rep.detailed, BOUND_RTOL * rep.detailed))
    else:
        checks.append(_skip("detailed_bound", "L below 104/3 + 2 pi"))
    wb = 0.25 * L ** (4 / 3)
    checks.append(_upper("writhe_bound", abs(wr), wb, BOUND_RTOL * wb, {"writhe": wr}))
    checks.append(_lower("fenchel", tc, 2 * math.pi, 1e-9))

    config = {"quadrature": cfg.to_dict(), "basepoints": basepoints, "samples": samples,
              "shell_samples": shell_samples, "radii": radii}
    return VerificationReport(knot.name, L, energy, th, wr, tc, rep, tuple(checks), config)


def audit_consistency(report: VerificationReport) -> tuple[bool, str]:
    """Check the tolerance model against a report.

    A failed theorem-level check should be explained either by a failed
    lemma-level check or by a margin smaller than the energy discretisation
    slack. Returns ``(consistent, explanation)``.
    """
    failed = [c for c in report.checks if c.check_id in THEOREM_CHECKS and c.status == FAIL]
    if not failed:
        return True, "no theorem-level failure"
    lemma_fail = [c.check_id for c in report.checks
                  if c.check_id in LEMMA_CHECKS and c.status == FAIL]
    if lemma_fail:
        return True, "lemma-level failures: " + ", ".join(lemma_fail)
    slack = report.check("lemma5_proximal").tol
    unexplained = [c.check_id for c in failed if -c.margin > slack]
    if unexplained:
        return False, "unexplained theorem failures: " + ", ".join(unexplained)
    return True, "theorem failures within discretisation slack"
