import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from thickknot import (BadParameter, EnergyRelaxer, KnotThickness, KnotVerifier, MobiusEnergy,
                       ThicknessNormalizer, make_circle, make_torus_knot, perturb, thickness)
from thickknot.validation import check_knot, check_vertices


def test_get_params_and_clone():
    est = MobiusEnergy(subdivisions_per_edge=2, rule="blended")
    assert est.get_params() == {"subdivisions_per_edge": 2, "rule": "blended", "threshold_arc": None}
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est


def test_mobius_energy_fit(circle512):
    est = MobiusEnergy(threshold_arc=math.pi).fit(circle512.vertices)
    assert est.energy_ == pytest.approx(4.0, abs=0.05)
    assert est.n_vertices_ == 512
    assert est.score() == -est.energy_


def test_thickness_estimator(square):
    est = KnotThickness().fit(square)
    assert est.radius_ == 0.5 and est.ropelength_ == pytest.approx(8.0)


def test_normalizer_round_trip(trefoil):
    norm = ThicknessNormalizer().fit(trefoil.vertices)
    out = norm.transform(trefoil.vertices)
    assert thickness(out).radius == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(norm.inverse_transform(out), trefoil.vertices, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(norm.fit_transform(trefoil.vertices), out)


def test_pipeline_normalise_then_relax():
    k = perturb(make_circle(1.0, 64), 0.05, 7)
    pipe = make_pipeline(ThicknessNormalizer(), EnergyRelaxer(max_steps=3))
    out = pipe.fit_transform(k.vertices)
    assert out.shape == (64, 3)
    trace = pipe[-1].trace_
    assert trace.energies[-1] < trace.energies[0]


def test_verifier_predict():
    v = KnotVerifier(basepoints=4)
    assert v.predict(make_torus_knot(2, 5, n=256).vertices).tolist() == [True]
    assert v.report_.overall


def test_unfitted_transform_raises():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        ThicknessNormalizer().transform(make_circle(1, 8).vertices)


def test_input_validation():
    with pytest.raises(BadParameter):
        check_vertices([[0, 0], [1, 1]])
    with pytest.raises(BadParameter):
        check_vertices([[0, 0, np.inf], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(BadParameter):
        MobiusEnergy().fit([1.0, 2.0, 3.0])
    k = check_knot([[0, 0, 0], [1, 0, 0], [0, 1, 0]], name="tri")
    assert k.name == "tri"
