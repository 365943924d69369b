import math

import numpy as np
import pytest

from ypl.errors import InvalidParams, SamplingExhausted
from ypl.fields import Field
from ypl.phasespace import (ModelParams, PhasePoint, SampleSpec, invariants, minkowski_dot,
                            sample_points)
from ypl.realizations import GenParams


@pytest.mark.parametrize("a, b, want", [
    ((1, 0, 0, 0), (1, 0, 0, 0), -1.0),
    ((0, 1, 0, 0), (0, 1, 0, 0), 1.0),
    ((1, 1, 0, 0), (1, 1, 0, 0), 0.0),
])
def test_minkowski_dot(a, b, want):
    assert minkowski_dot(a, b) == want


def test_minkowski_dot_dimension_mismatch():
    with pytest.raises(ValueError):
        minkowski_dot([1, 0, 0], [1, 0, 0, 0])


def _pt(x, p):
    return PhasePoint(np.array(x, float), np.array(p, float))


def test_invariants_origin():
    t = invariants(_pt([0] * 4, [0] * 4), ModelParams())
    assert (t.u, t.v, t.z) == (0.0, 0.0, 0.0)


def test_invariants_unit_spacelike():
    t = invariants(_pt([0, 1, 0, 0], [0, 1, 0, 0]), ModelParams(alpha=1.0, beta=1.0))
    assert (t.u, t.v, t.z) == (1.0, 1.0, 1.0)


def test_invariants_hand_arithmetic():
    t = invariants(_pt([0, 2, 0, 0], [0, 3, 0, 0]), ModelParams(alpha=0.1, beta=0.1))
    # u = 0.01*9, v = 0.01*4, z = 0.01*6
    assert t.u == pytest.approx(0.09, abs=1e-15)
    assert t.v == pytest.approx(0.04, abs=1e-15)
    assert t.z == pytest.approx(0.06, abs=1e-15)


def test_invariants_generalized_identity_params_match_yang():
    pt = _pt([0.3, -0.2, 0.5, 0.1], [0.4, 0.1, -0.3, 0.2])
    p = ModelParams()
    a = invariants(pt, p)
    b = invariants(pt, p, "generalized", GenParams())
    assert np.allclose([a.u, a.v, a.z], [b.u, b.v, b.z], atol=1e-15)
    with pytest.raises(InvalidParams):
        invariants(pt, p, "generalized")


def test_model_params_validation():
    with pytest.raises(InvalidParams):
        ModelParams(alpha=-0.1)
    with pytest.raises(InvalidParams):
        ModelParams(eps1=0)
    assert ModelParams(eps1=-1, eps2=1).case == "mp"
    assert ModelParams(eps1=-1, eps2=-1).sigma == 1


def test_phase_point_roundtrip():
    rng = np.random.default_rng(1)
    z = rng.normal(size=(5, 8))
    pt = PhasePoint.from_stacked(z)
    assert np.array_equal(pt.stacked(), z)
    assert len(pt) == 5 and pt.n == 4
    with pytest.raises(ValueError):
        PhasePoint(np.zeros(4), np.zeros(3))
    with pytest.raises(ValueError):
        PhasePoint(np.array([np.nan, 0, 0, 0]), np.zeros(4))


def test_sample_points_box_only():
    pts = sample_points(SampleSpec(count=3))
    assert len(pts) == 3
    assert np.all(np.abs(pts.stacked()) <= 1.0)


def test_sample_points_guard_always_satisfied():
    beta = 0.1
    guard = Field(lambda ph: 1.0 - beta**2 * ph.p2, "rad")
    spec = SampleSpec(count=500, margin=0.5)
    pts = sample_points(spec, [guard])
    assert len(pts) == 500
    assert np.all(1.0 - beta**2 * minkowski_dot(pts.p, pts.p) > 0.5)


def test_sampling_exhausted_surfaces_cleanly():
    # with the indefinite x^2 half the box would pass; the Euclidean norm makes
    # 1 - 4|x|^2 > 0.99 a ball of radius 0.05, about 2e-6 of the box
    guard = Field(lambda ph: 1.0 - 4.0 * sum(c * c for c in ph.x), "rad")
    spec = SampleSpec(count=10, margin=0.99, max_attempts=5000)
    with pytest.raises(SamplingExhausted, match="consecutive rejections"):
        sample_points(spec, [guard])


def test_sampling_is_deterministic_and_thread_independent(monkeypatch):
    spec = SampleSpec(count=600, seed=7)
    monkeypatch.setenv("YPL_THREADS", "1")
    a = sample_points(spec).stacked()
    monkeypatch.setenv("YPL_THREADS", "3")
    b = sample_points(spec).stacked()
    assert np.array_equal(a, b)
    c = sample_points(spec.replace(seed=8)).stacked()
    assert not np.array_equal(a, c)


def test_sample_spec_validation():
    with pytest.raises(InvalidParams):
        SampleSpec(radius=0)
    with pytest.raises(InvalidParams):
        SampleSpec(margin=1.5)
    assert math.isclose(SampleSpec().replace(radius=2).radius, 2)
