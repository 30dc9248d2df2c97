import math

import numpy as np
import pytest

from conftest import stadium
from thickknot import (BelowDomain, QuadratureConfig, audit_consistency, build_knot,
                       check_ix_dist, check_lemma3, check_proximal_bound, check_schur,
                       make_circle, make_torus_knot, normalize, point_at, shell_occupancy,
                       verify_knot)
from thickknot.geometry import PolylineKnot
from thickknot.verify import CheckResult, VerificationReport


@pytest.fixture(scope="module")
def circle_unit():
    return normalize(make_circle(1.0, 512))


@pytest.fixture(scope="module")
def long_unknot():
    k = normalize(stadium(21.86, n_arc=128, n_straight=256))
    assert k.total_length == pytest.approx(50, abs=0.1)
    return k


def test_lemma3_circle(circle_unit):
    r = check_lemma3(circle_unit, 4096)
    assert r.passed
    assert r.value == pytest.approx(2.0, abs=1e-3)


def test_lemma3_trefoil(trefoil_unit):
    assert check_lemma3(trefoil_unit, 10_000).passed


def test_lemma3_squashed_curve_fails(trefoil_unit):
    squashed = PolylineKnot(trefoil_unit.vertices * [1.0, 0.1, 1.0])
    r = check_lemma3(squashed, 4096)
    assert r.status == "fail"
    w = r.witness
    chord = np.linalg.norm(point_at(squashed, w["s"]).position - point_at(squashed, w["t"]).position)
    assert chord == pytest.approx(w["chord"])
    assert chord < 2


def test_schur(circle_unit, trefoil_unit):
    r = check_schur(circle_unit)
    assert r.passed
    assert abs(r.value) < 1e-3  # equality on the reference curve
    assert check_schur(trefoil_unit).passed


def test_proximal_bound(circle_unit, trefoil_unit, square):
    r = check_proximal_bound(circle_unit)
    assert r.passed
    assert r.value == pytest.approx(4.0, abs=0.05)
    assert r.bound == pytest.approx(4.0, abs=1e-3)
    t = check_proximal_bound(trefoil_unit)
    assert t.passed and t.value < t.bound
    assert check_proximal_bound(normalize(square)).passed


def test_shell_occupancy_limits(long_unknot):
    L = long_unknot.total_length
    radii = np.array([0.5, 1.9, L / 2])
    curve = shell_occupancy(long_unknot, 0.0, radii)
    assert curve.occupancy[0] == 0 and curve.occupancy[1] == 0
    assert curve.occupancy[2] == pytest.approx(L - 2 * math.pi, rel=1e-12)
    assert curve.check.passed


def test_shell_occupancy_below_domain(trefoil_unit):
    curve = shell_occupancy(trefoil_unit, 1.0, np.linspace(2, 10, 8))
    assert curve.check.status == "skip"
    assert curve.envelope is None
    assert np.all(np.diff(curve.occupancy) >= 0)


def test_shell_occupancy_envelope_t25():
    k = normalize(make_torus_knot(2, 5, n=512))
    L = k.total_length
    radii = np.linspace(2, L / 2, 64)
    for s in np.arange(16) * L / 16:
        c = shell_occupancy(k, s, radii)
        assert c.check.passed
        assert np.all(c.occupancy <= c.envelope + c.tol)


def test_ix_dist(long_unknot):
    for s in np.arange(16) * long_unknot.total_length / 16:
        r = check_ix_dist(long_unknot, point_at(long_unknot, s))
        assert r.passed
        assert r.value < r.bound  # holds without the slack too


def test_ix_dist_below_domain():
    c = normalize(make_circle(1.0, 256))
    with pytest.raises(BelowDomain):
        check_ix_dist(c, 0.0)


def test_verify_circle():
    rep = verify_knot(make_circle(1.0, 512))
    assert rep.overall
    assert rep.energy.total == pytest.approx(4.0, abs=0.05)
    assert rep.bounds.quad == pytest.approx(math.pi**2, rel=1e-3)
    assert rep.check("detailed_bound").status == "skip"


def test_verify_square(square):
    rep = verify_knot(square)
    assert rep.overall
    assert rep.ropelength == pytest.approx(8.0)
    assert rep.check("thm2_quadratic").status == "pass"
    assert rep.check("detailed_bound").status == "skip"


@pytest.mark.parametrize("q", [3, 5, 7])
def test_verify_torus_family(q):
    rep = verify_knot(make_torus_knot(2, q, n=512))
    assert rep.overall, rep.table()
    assert audit_consistency(rep)[0]


def test_verify_is_deterministic(trefoil):
    a = verify_knot(trefoil).to_dict()
    b = verify_knot(trefoil).to_dict()
    assert a == b


def test_verify_passes_at_double_resolution():
    for n in (256, 512):
        assert verify_knot(make_torus_knot(2, 5, n=n)).overall


def test_report_serialisation(trefoil):
    rep = verify_knot(trefoil, QuadratureConfig(rule="blended"), basepoints=4)
    d = rep.to_dict()
    assert d["overall"] is True
    assert [c["check_id"] for c in d["checks"]][:3] == ["lemma1_schur", "lemma3", "lemma5_proximal"]
    assert d["config"]["quadrature"]["rule"] == "blended"
    assert "overall: PASS" in rep.table()


def _with_checks(rep, checks):
    return VerificationReport(rep.knot_name, rep.ropelength, rep.energy, rep.thickness,
                              rep.writhe, rep.total_curvature, rep.bounds, tuple(checks))


def test_audit_consistency(trefoil):
    rep = verify_knot(trefoil, basepoints=2)
    ok, why = audit_consistency(rep)
    assert ok and why == "no theorem-level failure"
    slack = rep.check("lemma5_proximal").tol
    near = CheckResult("thm1_power", "fail", -0.5 * slack, 1.0, 0.0, 0.0)
    far = CheckResult("thm1_power", "fail", -2 * slack - 1, 1.0, 0.0, 0.0)
    rest = [c for c in rep.checks if c.check_id != "thm1_power"]
    assert audit_consistency(_with_checks(rep, rest + [near]))[0]
    bad = _with_checks(rep, rest + [far])
    assert not bad.overall
    assert audit_consistency(bad) == (False, "unexplained theorem failures: thm1_power")
    lemma = CheckResult("lemma3", "fail", -1.0, 0.0, 2.0, 0.0)
    rest2 = [c for c in rest if c.check_id != "lemma3"]
    assert audit_consistency(_with_checks(rep, rest2 + [far, lemma]))[0]
