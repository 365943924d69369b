import math

import numpy as np
import pytest

from ypl.algebra import domain_points
from ypl.errors import DegenerateFrame, InvalidParams, SingularProfile
from ypl.phasespace import ModelParams, PhasePoint, SampleSpec, sample_points
from ypl.realizations import (PRESETS, SNYDER_PROFILES, GenParams, ProfilePair, born_dual,
                              canonical_set, derive_constants, generalized_generators,
                              htilde_closed_form, htilde_printed_form, inverse_transform,
                              profile_preset, random_gen_params, snyder_phi2,
                              snyder_realization, solve_phi2, universal_h, yang_special)

SPEC = SampleSpec(count=300, seed=11)


def _vals(gs, role, pts):
    return np.stack([f.values(pts) for f in gs.vector(role)], axis=-1)


def _M(gs, pts):
    n = gs.n
    out = np.zeros((len(pts), n, n))
    for m in range(n):
        for v in range(n):
            if m != v:
                out[:, m, v] = gs.M(m, v).values(pts)
    return out


# profiles ---------------------------------------------------------------

def test_phi2_forced_to_zero():
    z = np.linspace(-0.5, 0.5, 11)
    assert np.allclose(solve_phi2(lambda z: z * z)(z), 0.0, atol=1e-16)


def test_phi1_zero_gives_phi2_square():
    z = np.linspace(-0.5, 0.5, 11)
    assert np.allclose(solve_phi2(lambda z: z * 0.0)(z), z * z, atol=1e-16)


def test_singular_profile():
    with pytest.raises(SingularProfile):
        solve_phi2(lambda z: z * 0.0 - 1.0)(np.array([0.1]))


@pytest.mark.parametrize("name", [*PRESETS, "custom:quarter", "custom:linear", "custom:tanh"])
@pytest.mark.parametrize("sigma", [1, -1])
def test_profile_constraint_on_grid(name, sigma):
    z = np.linspace(-0.5, 0.5, 101)
    assert np.max(profile_preset(name, sigma).constraint_residual(z)) < 1e-10


def test_unknown_presets():
    with pytest.raises(InvalidParams):
        profile_preset("nope")
    with pytest.raises(InvalidParams):
        profile_preset("custom:nope")


# Yang special ------------------------------------------------------------

def test_undeformed_limit():
    p = ModelParams(alpha=0.0, beta=0.0)
    gs = yang_special(p, ProfilePair(lambda z: z * 0.0, lambda z: z * 0.0))
    pts = sample_points(SPEC)
    assert np.array_equal(_vals(gs, "xhat", pts), pts.x)
    assert np.array_equal(_vals(gs, "phat", pts), pts.p)
    assert np.all(gs["h"].values(pts) == 1.0)


def test_minus_minus_radicand():
    p = ModelParams(eps1=-1, eps2=-1)
    gs = yang_special(p, profile_preset("phi2_zero", 1))
    pts = sample_points(SPEC)
    xp = np.einsum("...i,i,...i->...", pts.x, [-1, 1, 1, 1], pts.p)
    p2 = np.einsum("...i,i,...i->...", pts.p, [-1, 1, 1, 1], pts.p)
    z = 0.01 * xp
    want = pts.x[:, 2] * np.sqrt(1 + 0.01 * p2 + z * z)
    assert np.allclose(gs["xhat.2"].values(pts), want, atol=1e-15)


def test_profile_sign_must_match_case():
    with pytest.raises(InvalidParams):
        yang_special(ModelParams(eps1=1, eps2=-1), profile_preset("phi2_zero", 1))


@pytest.mark.parametrize("case", [(1, 1), (-1, -1), (1, -1), (-1, 1)])
@pytest.mark.parametrize("preset", ["phi2_zero", "phi1_zero", "custom:tanh"])
def test_universal_h(case, preset):
    p = ModelParams(eps1=case[0], eps2=case[1])
    gs = yang_special(p, profile_preset(preset, p.sigma))
    hu = universal_h(p, gs)
    pts, _ = domain_points(gs, [hu], SPEC)
    assert np.max(np.abs(hu.values(pts) - gs["h"].values(pts))) < 1e-9


def test_universal_h_trivial_values():
    gs = yang_special(ModelParams(alpha=0.0, beta=0.0))
    pts = sample_points(SPEC)
    assert np.allclose(universal_h(gs.params, gs).values(pts), 1.0)
    gs = yang_special(ModelParams())
    origin = PhasePoint(np.zeros(4), np.zeros(4))
    assert universal_h(gs.params, gs).values(origin) == 1.0


# generalized ------------------------------------------------------------

def test_identity_parameters():
    p = ModelParams()
    base = yang_special(p)
    gg = generalized_generators(p, GenParams(), base)
    pts = sample_points(SPEC)
    assert np.allclose(_vals(gg, "Xtilde", pts), _vals(base, "xhat", pts), atol=1e-16)
    assert np.allclose(_vals(gg, "Ptilde", pts), _vals(base, "phat", pts), atol=1e-16)
    assert np.allclose(gg["htilde"].values(pts), base["h"].values(pts), atol=1e-16)
    dc = derive_constants(p, GenParams())
    assert (dc.rho, dc.A_t, dc.B_t) == (0.0, 1.0, 1.0)


@pytest.mark.parametrize("A, B, phi, psi", [(1.0, 1.0, 0.2, 0.1), (1.1, 0.9, -0.25, 0.15),
                                            (0.85, 1.2, 0.3, 0.3)])
def test_htilde_closed_form(A, B, phi, psi):
    p = ModelParams()
    gen = GenParams(A=A, B=B, phi=phi, psi=psi)
    gg = generalized_generators(p, gen)
    closed = htilde_closed_form(p, gen, gg)
    pts, _ = domain_points(gg, [closed], SPEC)
    assert np.max(np.abs(closed.values(pts) - gg["htilde"].values(pts))) < 1e-8


def test_htilde_printed_form_only_on_unit_locus():
    p = ModelParams()
    gen = GenParams(A=1.1, B=0.9, phi=0.2, psi=0.1)
    gg = generalized_generators(p, gen)
    printed = htilde_printed_form(p, gen, gg)
    pts, _ = domain_points(gg, [printed], SPEC)
    off = np.max(np.abs(printed.values(pts) - gg["htilde"].values(pts)))
    assert off > 1e-3
    # choose B so that AB cos(phi + psi) = 1
    A, phi, psi = 1.1, 0.2, 0.1
    gen = GenParams(A=A, B=1.0 / (A * math.cos(phi + psi)), phi=phi, psi=psi)
    gg = generalized_generators(p, gen)
    printed = htilde_printed_form(p, gen, gg)
    pts, _ = domain_points(gg, [printed], SPEC)
    assert np.max(np.abs(printed.values(pts) - gg["htilde"].values(pts))) < 1e-8


def test_right_angle_degeneracy():
    p = ModelParams()
    gen = GenParams(phi=0.5, psi=math.pi / 2 - 0.5)
    gg = generalized_generators(p, gen)
    dc = derive_constants(p, gen)
    assert dc.rho == pytest.approx(1.0, abs=1e-15)
    pts = sample_points(SPEC)
    assert np.max(np.abs(gg["htilde"].values(pts))) < 1e-9
    ratio = dc.beta_t / dc.alpha_t
    gap = _vals(gg, "Xtilde", pts) - ratio * _vals(gg, "Ptilde", pts)
    assert np.max(np.abs(gap)) < 1e-9
    with pytest.raises(DegenerateFrame):
        inverse_transform(p, gen, np.zeros(4), np.zeros(4), np.zeros((4, 4)))


@pytest.mark.parametrize("case", ["pp", "mm", "pm", "mp"])
def test_inverse_round_trip(case):
    e = {"pp": (1, 1), "mm": (-1, -1), "pm": (1, -1), "mp": (-1, 1)}[case]
    p = ModelParams(eps1=e[0], eps2=e[1])
    rng = np.random.default_rng(5)
    for _ in range(3):
        gen = random_gen_params(rng)
        gg = generalized_generators(p, gen, yang_special(p, profile_preset("phi2_zero", p.sigma)))
        pts, _ = domain_points(gg, [gg["htilde"]], SPEC)
        xh, ph = inverse_transform(p, gen, _vals(gg, "Xtilde", pts), _vals(gg, "Ptilde", pts),
                                   _M(gg, pts))
        assert np.max(np.abs(xh - _vals(gg, "xhat", pts))) < 1e-10
        assert np.max(np.abs(ph - _vals(gg, "phat", pts))) < 1e-10


def test_inverse_identity():
    p = ModelParams()
    pts = sample_points(SPEC)
    x, q = inverse_transform(p, GenParams(), pts.x, pts.p, np.zeros((len(pts), 4, 4)))
    assert np.allclose(x, pts.x) and np.allclose(q, pts.p)


def test_gen_params_validation():
    with pytest.raises(InvalidParams):
        GenParams(A=0.0)
    with pytest.raises(InvalidParams):
        GenParams(a=(1.0, 2.0))


# Born duality -----------------------------------------------------------

def test_born_twice_negates_generators():
    p = ModelParams(alpha=0.1, beta=0.2)
    gen = random_gen_params(np.random.default_rng(2))
    gg = generalized_generators(p, gen)
    p1, g1, s1 = born_dual(p, gen, gg)
    p2, g2, s2 = born_dual(p1, g1, s1)
    assert p2 == p
    assert (g2.A, g2.B, g2.phi, g2.psi) == (gen.A, gen.B, gen.phi, gen.psi)
    assert np.array_equal(g2.a_vec, -gen.a_vec) and np.array_equal(g2.b_vec, -gen.b_vec)
    pts = sample_points(SPEC)
    assert np.allclose(_vals(s2, "Xtilde", pts), -_vals(gg, "Xtilde", pts), atol=0)
    assert np.allclose(_vals(s2, "Ptilde", pts), -_vals(gg, "Ptilde", pts), atol=0)
    # constants are even in (a, b), so they are restored
    assert derive_constants(p2, g2) == derive_constants(p, gen)


def test_born_flips_rho_and_swaps_scales():
    p = ModelParams(alpha=0.1, beta=0.2)
    gen = random_gen_params(np.random.default_rng(3))
    dp, dg, _ = born_dual(p, gen)
    c, d = derive_constants(p, gen), derive_constants(dp, dg)
    assert d.rho == pytest.approx(-c.rho, abs=1e-15)
    assert (d.A_t, d.B_t) == pytest.approx((c.B_t, c.A_t), abs=1e-15)
    assert (d.alpha_t, d.beta_t) == pytest.approx((c.beta_t, c.alpha_t), abs=1e-15)


def test_born_needs_plus_plus():
    with pytest.raises(InvalidParams):
        born_dual(ModelParams(eps1=-1, eps2=-1), GenParams())


# Snyder -----------------------------------------------------------------

def test_snyder_constant_profile():
    p = ModelParams(alpha=0.0, beta=0.2)
    u = np.linspace(0, 0.5, 5)
    assert np.allclose(snyder_phi2(SNYDER_PROFILES["one"], u), 1.0)
    gs = snyder_realization(p, "one")
    pts = sample_points(SPEC)
    xp = np.einsum("...i,i,...i->...", pts.x, [-1, 1, 1, 1], pts.p)
    want = pts.x + 0.04 * xp[:, None] * pts.p
    assert np.allclose(_vals(gs, "xhat", pts), want, atol=1e-15)
    assert np.array_equal(_vals(gs, "phat", pts), pts.p)


def test_snyder_sqrt_profile_closed_form():
    # with phi1 = sqrt(1 - u) the numerator 1 + 2 phi1' phi1 vanishes identically
    u = np.linspace(0.0, 0.5, 11)
    assert np.allclose(snyder_phi2(SNYDER_PROFILES["sqrt"], u), 0.0, atol=1e-15)
    # the single-factor numerator gives (1/2) / (1/sqrt(1 - u)) instead
    printed = snyder_phi2(SNYDER_PROFILES["sqrt"], u, printed=True)
    assert np.allclose(printed, 0.5 * np.sqrt(1 - u), atol=1e-15)


def test_snyder_zero_beta_is_canonical():
    gs = snyder_realization(ModelParams(alpha=0.0, beta=0.0), "sqrt")
    pts = sample_points(SPEC)
    assert np.array_equal(_vals(gs, "xhat", pts), pts.x)
    assert np.array_equal(_vals(gs, "phat", pts), pts.p)


def test_snyder_needs_alpha_zero():
    with pytest.raises(InvalidParams):
        snyder_realization(ModelParams(), "one")


def test_canonical_set():
    gs = canonical_set()
    assert len(gs.ids()) == 4 + 4 + 6 + 1
    assert gs["canonical.xhat.2"] is gs["xhat.2"]
