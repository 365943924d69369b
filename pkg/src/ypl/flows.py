"""Rotation flows, the generating function G, Poisson BCH and automorphisms."""

import math

import numpy as np

from . import jet
from .algebra import DEFAULT_SPEC, ResidualReport, _params_echo, domain_points
from .brackets import FlowSpec, PullbackField, bracket_field, bracket_jets, hamiltonian_flow
from .errors import InvalidParams
from .fields import Field, Phase, linear_combination
from .phasespace import ModelParams, SampleSpec, sample_points
from .realizations import GeneratorSet, profile_preset, yang_special

TIGHT = FlowSpec(abs_tol=1e-12, rel_tol=1e-12)


# --------------------------------------------------------------------------
# G and its series


def _check_ab(alpha, beta):
    if alpha * beta == 0.0:
        raise InvalidParams("G needs alpha * beta != 0")


def g_closed(z, alpha, beta):
    """(1/(alpha beta)) (z (1 - ln(1 + z^2)/2) - arctan z); accepts jets."""
    _check_ab(alpha, beta)
    return (z * (1.0 - jet.log(1.0 + z * z) * 0.5) - jet.arctan(z)) * (1.0 / (alpha * beta))


def g_series_term(k, z, alpha, beta):
    """k-th term (k >= 1) of the series in z."""
    _check_ab(alpha, beta)
    return (-1.0) ** k * np.asarray(z, dtype=float) ** (2 * k + 1) / (2 * k * (2 * k + 1)) / (alpha * beta)


def g_series(z, alpha, beta, N):
    z = np.asarray(z, dtype=float)
    return sum(g_series_term(k, z, alpha, beta) for k in range(1, N + 1))


def g_field(params):
    """G as a phase-space field, z = alpha beta (x.p)."""
    al, be = params.alpha, params.beta
    _check_ab(al, be)
    return Field(lambda ph: g_closed(ph.xp * (al * be), al, be), "G")


def taylor_coefficients(fn, orders, radius=0.5, nodes=128):
    """Taylor coefficients at 0 from the Cauchy integral on a circle.

    ``fn`` must accept complex arrays.  Trapezoidal quadrature on the circle
    converges geometrically for functions analytic on a larger disc.
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * theta)
    vals = fn(w)
    return {k: float(np.real(np.mean(vals * w ** (-k)))) for k in orders}


def g_closed_complex(w):
    """alpha beta G as an analytic function of complex z."""
    return w * (1.0 - 0.5 * np.log(1.0 + w * w)) - np.arctan(w)


# --------------------------------------------------------------------------
# rotation flows


def rotation_generator(params, gs=None):
    """K = h / (alpha beta) for a (1,1) Yang generator set."""
    if params.case != "pp":
        raise InvalidParams("rotation flows are stated for the (+,+) case")
    if params.alpha <= 0 or params.beta <= 0:
        raise InvalidParams("rotation flows need alpha, beta > 0")
    gs = gs or yang_special(params)
    return gs, (gs["h"] * (1.0 / (params.alpha * params.beta))).renamed("h/(alpha beta)")


def _report(name, gs, pts, res, tol, model="flows", rejects=0):
    res = np.asarray(res)
    mx = float(np.max(res)) if res.size else 0.0
    return ResidualReport(model=model, case=gs.params.case, relation=name, samples=len(pts),
                          max_abs=mx, mean_abs=float(np.mean(res)) if res.size else 0.0,
                          tol=tol, passed=mx < tol, rejects=rejects, params=_params_echo(gs))


def rotation_check(params, angle, spec=DEFAULT_SPEC, tol=1e-6, flow=FlowSpec(), gs=None):
    """e^{angle L} x^ against the rotated combination, and the p^ analogue.

    Returns two reports: the x^ rotation at +angle and the p^ rotation at
    -angle.
    """
    gs, K = rotation_generator(params, gs)
    n = params.n
    pts, rej = domain_points(gs, [gs["h"]], spec)
    al, be = params.alpha, params.beta
    c, s = math.cos(angle), math.sin(angle)
    xh = np.stack([gs[f"xhat.{k}"].values(pts) for k in range(n)], -1)
    ph = np.stack([gs[f"phat.{k}"].values(pts) for k in range(n)], -1)
    out = []
    for name, t, fields, want in (
        (f"rotation x^ angle={angle:g}", angle, "xhat", c * xh + (be / al) * s * ph),
        (f"rotation p^ angle={-angle:g}", -angle, "phat", c * ph + (al / be) * s * xh),
    ):
        moved = hamiltonian_flow(K, pts, flow.replace(t=t)) if t else pts
        got = np.stack([gs[f"{fields}.{k}"].values(moved) for k in range(n)], -1)
        out.append(_report(name, gs, pts, np.max(np.abs(got - want), axis=-1), tol, rejects=rej))
    return out


def angle_additivity(params, a1, a2, spec=DEFAULT_SPEC, tol=1e-6, flow=FlowSpec()):
    """Flow by a1 then a2 against a single flow by a1 + a2, compared through x^ and p^."""
    gs, K = rotation_generator(params)
    n = params.n
    pts, rej = domain_points(gs, [gs["h"]], spec)
    two = hamiltonian_flow(K, hamiltonian_flow(K, pts, flow.replace(t=a1)), flow.replace(t=a2))
    one = hamiltonian_flow(K, pts, flow.replace(t=a1 + a2))
    res = np.zeros(len(pts))
    for k in range(n):
        for role in ("xhat", "phat"):
            f = gs[f"{role}.{k}"]
            res = np.maximum(res, np.abs(f.values(two) - f.values(one)))
    return _report(f"angle additivity {a1:g}+{a2:g}", gs, pts, res, tol, rejects=rej)


def induction_check(params, max_order=4, spec=SampleSpec(count=50), tol=1e-6):
    """n-fold brackets {h, ..., {h, x^}} against the closed forms, n = 1..max_order.

    Nested brackets use jets of jets, so no finite differences enter.
    """
    gs = yang_special(params)
    al, be = params.alpha, params.beta
    h = gs["h"]
    pts, rej = domain_points(gs, [h], spec)
    reports = []
    for mu in range(params.n):
        F = gs[f"xhat.{mu}"]
        ph0 = Phase(pts, 0)
        for order in range(1, max_order + 1):
            F = bracket_field(h, F)
            k = order // 2
            if order % 2 == 0:
                want = gs[f"xhat.{mu}"] * ((-1) ** k * al ** (2 * k) * be ** (2 * k))
            else:
                want = gs[f"phat.{mu}"] * ((-1) ** k * al ** (2 * k) * be ** (2 * k + 2))
            res = np.abs(F(ph0).real - want(ph0).real)
            reports.append(_report(f"induction n={order} mu={mu}", gs, pts, res, tol, rejects=rej))
    return reports


# --------------------------------------------------------------------------
# the O / G construction


def zero_fields(params):
    """x^(0) = sqrt(1 - b^2 p^2) x and p^(0) = sqrt(1 - a^2 x^2) p."""
    al, be = params.alpha, params.beta
    r1 = Field(lambda ph: jet.sqrt(1.0 - ph.p2 * (be * be)), "sqrt(1-b2p2)")
    r2 = Field(lambda ph: jet.sqrt(1.0 - ph.x2 * (al * al)), "sqrt(1-a2x2)")
    x0 = [Field(lambda ph, k=k: ph.x[k] * r1(ph), f"x0.{k}") for k in range(params.n)]
    p0 = [Field(lambda ph, k=k: ph.p[k] * r2(ph), f"p0.{k}") for k in range(params.n)]
    return x0, p0


def og_check(params, spec=SampleSpec(count=200), tol=1e-5, A=1.0, angle=0.2, flow=TIGHT):
    """Three checks of the e^{L_G} construction.

    (i)   e^{L_G} x^(0) against sqrt(1 - b^2 p^2 + z^2) x,
    (ii)  {e^{L_G} x^(0)_mu, p^(0)_nu} against eta h,
    (iii) {X~(1)_mu, P~(0)_nu} against eta A cos(angle) h + A sin(angle) alpha beta M.
    """
    if params.case != "pp":
        raise InvalidParams("the O construction is stated for the (+,+) case")
    n = params.n
    al, be = params.alpha, params.beta
    s = np.asarray(params.metric.signs, dtype=float)
    G = g_field(params)
    x0, p0 = zero_fields(params)
    ref = yang_special(params, profile_preset("phi2_zero"))
    h = ref["h"]
    K = (h * (1.0 / (al * be))).renamed("h/(alpha beta)")
    pts, rej = domain_points(ref, [h], spec)
    x1 = [PullbackField(G, 1.0, f, flow) for f in x0]
    X1 = [PullbackField(K, angle, f, flow) * A for f in x1]
    reports = []

    ph0 = Phase(pts, 0)
    res = np.max(np.stack([np.abs(x1[k](ph0).real - ref[f"xhat.{k}"](ph0).real)
                           for k in range(n)], -1), axis=-1)
    reports.append(_report("og (i) e^{L_G} x^(0)", ref, pts, res, tol, rejects=rej))

    ph1 = Phase(pts, 1)
    hv = h(ph0).real
    r2 = np.zeros(len(pts))
    r3 = np.zeros(len(pts))
    for mu in range(n):
        for nu in range(n):
            b2 = bracket_jets(x1[mu](ph1), p0[nu](ph1), s).real
            eta = s[mu] if mu == nu else 0.0
            r2 = np.maximum(r2, np.abs(b2 - eta * hv))
            b3 = bracket_jets(X1[mu](ph1), p0[nu](ph1), s).real
            want = eta * A * math.cos(angle) * hv + A * math.sin(angle) * al * be * ph0.M(mu, nu).real
            r3 = np.maximum(r3, np.abs(b3 - want))
    reports.append(_report("og (ii) {e^{L_G} x^(0), p^(0)} = eta h", ref, pts, r2, tol, rejects=rej))
    reports.append(_report(f"og (iii) {{X~(1), P~(0)}} A={A:g} angle={angle:g}", ref, pts, r3, tol,
                           rejects=rej))
    return reports


# --------------------------------------------------------------------------
# Poisson BCH


def bch_compose(A, B, order=3):
    """Truncated C with e^{L_A} o e^{L_B} = e^{L_C}: A + B + {A,B}/2 + ({A,{A,B}} - {B,{A,B}})/12."""
    if order < 1 or order > 3:
        raise ValueError("order must be 1, 2 or 3")
    terms = [(1.0, A), (1.0, B)]
    if order >= 2:
        ab = bracket_field(A, B)
        terms.append((0.5, ab))
        if order >= 3:
            terms += [(1 / 12, bracket_field(A, ab)), (-1 / 12, bracket_field(B, ab))]
    return linear_combination(terms, f"C[{A.name},{B.name}]")


def composed_flow(A, B, pt, flow=TIGHT):
    """Points whose f-values give (e^{L_A} o e^{L_B}) f: flow A first, then B."""
    return hamiltonian_flow(B, hamiltonian_flow(A, pt, flow), flow)


def bch_error(eps, delta, f, pts, order=3, flow=TIGHT):
    A = Field(lambda ph: ph.x[1] * ph.x[1] * eps, "eps x1^2")
    B = Field(lambda ph: ph.p[1] * ph.p[1] * delta, "delta p1^2")
    C = bch_compose(A, B, order)
    lhs = f.values(composed_flow(A, B, pts, flow))
    rhs = f.values(hamiltonian_flow(C, pts, flow))
    return float(np.max(np.abs(lhs - rhs)))


def bch_order_test(eps=0.2, delta=0.15, halvings=3, order=3, count=20, seed=0, flow=TIGHT,
                   min_ratio=8.0):
    """Truncation error under repeated halving of (eps, delta).

    Returns (errors, ratios, report); the report passes when every ratio is
    at least ``min_ratio``.
    """
    pts = sample_points(SampleSpec(count=count, seed=seed))
    f = Field(lambda ph: ph.x[1] + ph.p[1] * 0.5 + ph.x[2], "x1 + p1/2 + x2")
    errs = [bch_error(eps / 2**k, delta / 2**k, f, pts, order, flow) for k in range(halvings + 1)]
    ratios = [errs[k] / errs[k + 1] for k in range(halvings)]
    worst = min(ratios)
    rep = ResidualReport(model="flows", case="pp", relation=f"bch order {order} halving ratio",
                         samples=count, max_abs=float(errs[-1]), mean_abs=float(np.mean(errs)),
                         tol=min_ratio, passed=worst >= min_ratio,
                         params={"eps": eps, "delta": delta, "ratios": ratios, "errors": errs})
    return errs, ratios, rep


# --------------------------------------------------------------------------
# automorphisms


def automorphism_pushforward(F, gs, flow=FlowSpec()):
    """Every generator pushed through e^{L_F}; the result keeps the prefix with '+F'."""
    fields = {k: PullbackField(F, 1.0, f, flow, name=f"O_F({f.name})") for k, f in gs.fields.items()}
    return GeneratorSet(gs.prefix + "+F", gs.params, fields, gs.guards, gs.gen, gs.constants,
                        gs.profiles, dict(gs.meta, automorphism=F.name))


def lorentz_invariant(params, coeff=0.1):
    """F = coeff z beta^2 p^2, a function of the invariants only."""
    al, be = params.alpha, params.beta
    return Field(lambda ph: ph.xp * ph.p2 * (coeff * al * be * be * be), f"{coeff:g} z b2p2")


def flows_suite(params, angle=0.3, spec=DEFAULT_SPEC, tol=1e-6):
    reports = []
    for a in sorted({0.1, angle, math.pi / 2}):
        reports += rotation_check(params, a, spec, tol)
    reports.append(angle_additivity(params, 0.2, angle, spec, tol))
    reports += og_check(params, spec.replace(count=min(spec.count, 200)), tol=1e-5, angle=angle)
    reports.append(bch_order_test()[2])
    reports += induction_check(params, 4, spec.replace(count=min(spec.count, 50)))
    return reports
