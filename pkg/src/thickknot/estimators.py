"""scikit-learn style wrappers.

A knot is the "dataset": ``X`` is its ``(n, 3)`` vertex array (or a
:class:`~thickknot.geometry.PolylineKnot`). Estimators store their results in
trailing-underscore attributes after ``fit``; transformers return new vertex
arrays.

>>> from thickknot import make_circle, MobiusEnergy
>>> est = MobiusEnergy().fit(make_circle(1.0, 256).vertices)
>>> round(est.energy_, 2)
4.07
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .energy import QuadratureConfig, mobius_energy
from .geometry import scale_knot
from .relax import relax
from .thickness import thickness
from .validation import check_knot
from .verify import verify_knot


def _cfg(est) -> QuadratureConfig:
    return QuadratureConfig(subdivisions_per_edge=est.subdivisions_per_edge, rule=est.rule)


class MobiusEnergy(BaseEstimator):
    """Quadrature estimate of E_O4.

    Parameters
    ----------
    subdivisions_per_edge : int
    rule : {"midpoint", "vertex", "blended"}
    threshold_arc : float or None
        Arc cutoff for the proximal/distal split; ``None`` uses ``pi R(K)``.
    """

    def __init__(self, subdivisions_per_edge=1, rule="midpoint", threshold_arc=None):
        self.subdivisions_per_edge = subdivisions_per_edge
        self.rule = rule
        self.threshold_arc = threshold_arc

    def fit(self, X, y=None):
        knot = check_knot(X)
        self.breakdown_ = mobius_energy(knot, _cfg(self), self.threshold_arc)
        self.energy_ = self.breakdown_.total
        self.n_vertices_ = knot.n
        return self

    def score(self, X=None, y=None):
        """Negative energy, so that larger is better."""
        if X is not None:
            self.fit(X)
        check_is_fitted(self, "energy_")
        return -self.energy_


class KnotThickness(BaseEstimator):
    """Thickness radius, ropelength and their witnesses."""

    def fit(self, X, y=None):
        knot = check_knot(X)
        self.report_ = thickness(knot)
        self.radius_ = self.report_.radius
        self.ropelength_ = self.report_.ropelength
        return self


class ThicknessNormalizer(TransformerMixin, BaseEstimator):
    """Rescale vertices so the fitted knot has thickness radius 1.

    The scale learned in ``fit`` is applied by ``transform``, so a transformed
    copy of a different knot is scaled by the same factor.
    """

    def fit(self, X, y=None):
        knot = check_knot(X)
        self.scale_ = 1.0 / thickness(knot).radius
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        return scale_knot(check_knot(X), self.scale_).vertices.copy()

    def inverse_transform(self, X):
        check_is_fitted(self, "scale_")
        return scale_knot(check_knot(X), 1.0 / self.scale_).vertices.copy()


class EnergyRelaxer(TransformerMixin, BaseEstimator):
    """Relax a knot towards lower discrete Moebius energy.

    ``fit`` is a no-op; ``transform`` runs the descent and records the trace.
    """

    def __init__(self, max_steps=500, subdivisions_per_edge=1, rule="midpoint",
                 precondition=True):
        self.max_steps = max_steps
        self.subdivisions_per_edge = subdivisions_per_edge
        self.rule = rule
        self.precondition = precondition

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        self.trace_ = relax(check_knot(X), self.max_steps, _cfg(self), self.precondition)
        return self.trace_.final.vertices.copy()


class KnotVerifier(BaseEstimator):
    """Run the full inequality audit; ``passed_`` is the overall verdict."""

    def __init__(self, subdivisions_per_edge=1, rule="midpoint", basepoints=16, samples=4096):
        self.subdivisions_per_edge = subdivisions_per_edge
        self.rule = rule
        self.basepoints = basepoints
        self.samples = samples

    def fit(self, X, y=None):
        self.report_ = verify_knot(check_knot(X), _cfg(self), self.basepoints, self.samples)
        self.passed_ = self.report_.overall
        return self

    def predict(self, X):
        """``[True]`` or ``[False]`` for the verdict on ``X``."""
        return np.array([self.fit(X).passed_])
