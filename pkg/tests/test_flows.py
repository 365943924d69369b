import math

import numpy as np
import pytest

from ypl.algebra import check_relations, relation_set
from ypl.brackets import FlowSpec, bracket_field, hamiltonian_flow
from ypl.errors import InvalidParams
from ypl.fields import Field
from ypl.flows import (angle_additivity, automorphism_pushforward, bch_compose, bch_order_test,
                       g_closed, g_closed_complex, g_field, g_series, g_series_term, og_check,
                       rotation_check, rotation_generator, taylor_coefficients, lorentz_invariant)
from ypl.jet import Jet
from ypl.phasespace import ModelParams, SampleSpec, sample_points
from ypl.realizations import yang_special

P = ModelParams()
SMALL = SampleSpec(count=60, seed=9)


def test_g_vanishes_at_zero():
    assert g_closed(np.array(0.0), 0.1, 0.1) == 0.0
    assert g_series(0.0, 0.1, 0.1, 8) == 0.0


def test_g_series_leading_terms():
    assert g_series_term(1, 1.0, 1.0, 1.0) == pytest.approx(-1 / 6)
    assert g_series_term(2, 1.0, 1.0, 1.0) == pytest.approx(1 / 20)


def test_g_series_remainder_bound():
    z = np.linspace(-0.5, 0.5, 41)
    for N in (2, 4, 8):
        err = np.abs(g_closed(z, 1.0, 1.0) - g_series(z, 1.0, 1.0, N))
        bound = np.abs(g_series_term(N + 1, z, 1.0, 1.0))
        assert np.all(err <= bound * (1 + 1e-9) + 1e-16)


def test_g_needs_nonzero_product():
    with pytest.raises(InvalidParams):
        g_closed(0.1, 0.0, 1.0)


def test_taylor_by_contour_integral():
    c = taylor_coefficients(g_closed_complex, [1, 2, 3, 5, 7])
    assert abs(c[3] + 1 / 6) < 1e-12 and abs(c[5] - 1 / 20) < 1e-12 and abs(c[7] + 1 / 42) < 1e-12
    assert abs(c[1]) < 1e-14 and abs(c[2]) < 1e-14


def test_g_jet_derivative():
    # dG/dz = -ln(1 + z^2) / (2 alpha beta)
    z = np.linspace(-0.4, 0.4, 9)
    d = g_closed(Jet.variable(z, 0, 1, 1), 0.1, 0.1).partial(0)
    h = 1e-6
    fd = (g_closed(z + h, 0.1, 0.1) - g_closed(z - h, 0.1, 0.1)) / (2 * h)
    assert np.allclose(d, fd, rtol=1e-7, atol=1e-8)
    assert np.allclose(d, -np.log(1 + z * z) / 0.02, atol=1e-12)


def test_rotation_generator_needs_plus_plus():
    with pytest.raises(InvalidParams):
        rotation_generator(ModelParams(eps1=-1, eps2=-1))
    with pytest.raises(InvalidParams):
        rotation_generator(ModelParams(alpha=0.0))


def test_zero_angle_rotation_is_exact():
    reps = rotation_check(P, 0.0, SMALL)
    assert all(r.max_abs == 0.0 for r in reps)


@pytest.mark.parametrize("angle", [0.3, math.pi / 2])
def test_rotation_flows(angle):
    reps = rotation_check(P, angle, SMALL, tol=1e-6, flow=FlowSpec(abs_tol=1e-10, rel_tol=1e-10))
    assert all(r.passed for r in reps), [r.max_abs for r in reps]


def test_quarter_turn_swaps_x_and_p():
    gs, K = rotation_generator(P)
    pts = sample_points(SMALL, gs.guards)
    moved = hamiltonian_flow(K, pts, FlowSpec(t=math.pi / 2, abs_tol=1e-11, rel_tol=1e-11))
    for k in range(4):
        got = gs[f"xhat.{k}"].values(moved)
        want = (P.beta / P.alpha) * gs[f"phat.{k}"].values(pts)
        assert np.max(np.abs(got - want)) < 1e-6


def test_angle_additivity():
    assert angle_additivity(P, 0.2, 0.3, SMALL).passed


def test_og_check_small_sample():
    reps = og_check(P, SampleSpec(count=20, seed=1))
    assert [r.passed for r in reps] == [True, True, True]


def test_og_generator_degenerates_for_tiny_deformation():
    # G = O(z^3 / alpha beta) = O(alpha^2 beta^2 (xp)^3), so its flow is nearly the identity
    p = ModelParams(alpha=1e-4, beta=1e-4)
    pts = sample_points(SMALL)
    moved = hamiltonian_flow(g_field(p), pts, FlowSpec(t=1.0))
    assert np.max(np.abs(moved.stacked() - pts.stacked())) < 1e-7


def test_bch_with_zero_second_generator():
    A = Field(lambda ph: ph.x[1] * ph.p[2] * 0.3)
    B = Field.const(0.0)
    pts = sample_points(SMALL)
    assert np.allclose(bch_compose(A, B).values(pts), A.values(pts), atol=0)


def test_bch_of_functions_of_xp_only():
    A = Field(lambda ph: ph.xp * 0.2)
    B = Field(lambda ph: ph.xp * ph.xp * 0.1)
    pts = sample_points(SMALL)
    assert np.max(np.abs(bracket_field(A, B).values(pts))) < 1e-12
    C = bch_compose(A, B).values(pts)
    assert np.max(np.abs(C - A.values(pts) - B.values(pts))) < 1e-12


def test_bch_order_ratios():
    errs, ratios, rep = bch_order_test(count=8)
    assert len(ratios) == 3 and all(r >= 8 for r in ratios)
    assert errs[0] > errs[1] > errs[2] > errs[3]
    assert rep.passed


def test_bch_second_order_truncation_is_worse():
    _, ratios, _ = bch_order_test(order=2, count=8, min_ratio=4.0)
    assert all(4 < r < 12 for r in ratios)


def test_automorphism_identity():
    gs = yang_special(P)
    pushed = automorphism_pushforward(Field.const(0.0), gs)
    pts = sample_points(SMALL, gs.guards)
    for key in ("xhat.1", "phat.3", "h"):
        assert np.array_equal(pushed[key].values(pts), gs[key].values(pts))


def test_automorphism_keeps_lorentz_generators():
    gs = yang_special(P)
    F = lorentz_invariant(P, 0.1)
    pushed = automorphism_pushforward(F, gs)
    pts = sample_points(SMALL, gs.guards)
    assert np.max(np.abs(pushed["M.0.1"].values(pts) - gs["M.0.1"].values(pts))) < 1e-8


def test_automorphism_preserves_the_algebra():
    gs = yang_special(P)
    pushed = automorphism_pushforward(lorentz_invariant(P, 0.1), gs)
    rels = [r for r in relation_set("yang", P) if r.eq in ("xhat-xhat", "xhat-phat", "h-xhat")]
    reps = check_relations(pushed, rels, SampleSpec(count=30, seed=5), tol=1e-5)
    assert all(r.passed for r in reps)
    assert all(r.note == "finite-difference jets" for r in reps)
