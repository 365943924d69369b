"""Realizations of the deformed generators on canonical phase space.

Every generator is a :class:`~ypl.fields.Field`.  Generator sets are
immutable dictionaries keyed by short role names (``xhat.0``, ``phat.3``,
``M.0.1``, ``h``, ``Xtilde.2``, ``Ptilde.0``, ``htilde``); the public id of a
generator is ``<prefix>.<key>``, e.g. ``yang.xhat.0`` or ``gen.htilde``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet
from .errors import DegenerateFrame, DomainError, InvalidParams, MissingGenerator, SingularProfile
from .fields import Field, linear_combination
from .phasespace import Metric, ModelParams, minkowski_dot

SINGULAR_TOL = 1e-12


# --------------------------------------------------------------------------
# profile functions phi1, phi2 of z


def solve_phi2(phi1, sigma=1):
    """phi2 solving phi1 phi2 + phi1 + phi2 = sigma z^2."""

    def phi2(z):
        f1 = phi1(z)
        den = 1.0 + f1
        bad = np.abs(jet.real(den)) < SINGULAR_TOL
        if np.any(bad):
            raise SingularProfile("1 + phi1(z) vanishes")
        return (z * z * float(sigma) - f1) / den

    return phi2


def _zero(z):
    return z * 0.0


@dataclass(frozen=True)
class ProfilePair:
    phi1: Callable
    phi2: Callable
    sigma: int = 1
    name: str = "custom"

    def constraint_residual(self, z):
        z = np.asarray(z, dtype=float)
        f1 = jet.real(self.phi1(z))
        f2 = jet.real(self.phi2(z))
        return np.abs(f1 * f2 + f1 + f2 - self.sigma * z * z)


# phi1 expressions selectable as "custom:<id>"; phi2 is solved from the constraint
CUSTOM_PHI1 = {
    "quarter": lambda s: (lambda z: z * z * (0.25 * s)),
    "linear": lambda s: (lambda z: z * 0.3),
    "tanh": lambda s: (lambda z: jet.tanh(z) * jet.tanh(z) * (0.5 * s)),
}

PRESETS = ("phi2_zero", "phi1_zero", "half")


def profile_preset(name, sigma=1):
    """Named profile pair for constraint sign ``sigma``."""
    s = float(sigma)
    if name == "phi2_zero":
        return ProfilePair(lambda z: z * z * s, _zero, sigma, name)
    if name == "phi1_zero":
        return ProfilePair(_zero, lambda z: z * z * s, sigma, name)
    if name == "half":
        phi1 = lambda z: z * z * (0.5 * s)  # noqa: E731
        return ProfilePair(phi1, solve_phi2(phi1, sigma), sigma, name)
    if name.startswith("custom:"):
        key = name.split(":", 1)[1]
        if key not in CUSTOM_PHI1:
            raise InvalidParams(f"unknown custom profile {key!r}; known: {sorted(CUSTOM_PHI1)}")
        phi1 = CUSTOM_PHI1[key](s)
        return ProfilePair(phi1, solve_phi2(phi1, sigma), sigma, name)
    raise InvalidParams(f"unknown profile preset {name!r}")


# --------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class GenParams:
    A: float = 1.0
    B: float = 1.0
    phi: float = 0.0
    psi: float = 0.0
    a: tuple = None
    b: tuple = None
    n: int = 4

    def __post_init__(self):
        if self.A * self.B == 0.0:
            raise InvalidParams("AB must be nonzero")
        for name in ("a", "b"):
            v = getattr(self, name)
            v = np.zeros(self.n) if v is None else np.asarray(v, dtype=float)
            if v.shape != (self.n,):
                raise InvalidParams(f"{name} must have {self.n} components")
            object.__setattr__(self, name, tuple(float(c) for c in v))

    @property
    def a_vec(self):
        return np.array(self.a)

    @property
    def b_vec(self):
        return np.array(self.b)

    def replace(self, **kw):
        d = dict(A=self.A, B=self.B, phi=self.phi, psi=self.psi, a=self.a, b=self.b, n=self.n)
        d.update(kw)
        return GenParams(**d)


@dataclass(frozen=True)
class DerivedConstants:
    rho: float
    A_t: float
    B_t: float
    alpha_t: float
    beta_t: float
    hyperbolic: bool


def derive_constants(params, gen):
    """rho~, A~, B~ and the tilde scales for the model's sign case."""
    m = Metric(gen.n)
    ab = float(minkowski_dot(gen.a_vec, gen.b_vec, m))
    a2 = float(minkowski_dot(gen.a_vec, gen.a_vec, m))
    b2 = float(minkowski_dot(gen.b_vec, gen.b_vec, m))
    A, B = gen.A, gen.B
    case = params.case
    if case == "pp":
        rho, At, Bt = math.sin(gen.phi + gen.psi), A * A + a2, B * B + b2
    elif case == "mm":
        rho, At, Bt = -math.sin(gen.phi + gen.psi), -A * A + a2, -B * B + b2
    elif case == "pm":
        rho, At, Bt = math.sinh(gen.psi - gen.phi), A * A + a2, -B * B + b2
    else:
        rho, At, Bt = -math.sinh(gen.psi - gen.phi), -A * A + a2, B * B + b2
    rho += ab / (A * B)
    return DerivedConstants(
        rho=rho, A_t=At, B_t=Bt,
        alpha_t=params.alpha * math.sqrt(abs(Bt)),
        beta_t=params.beta * math.sqrt(abs(At)),
        hyperbolic=params.eps1 * params.eps2 < 0,
    )


# --------------------------------------------------------------------------
# generator sets


@dataclass(frozen=True)
class GeneratorSet:
    prefix: str
    params: ModelParams
    fields: dict
    guards: tuple = ()
    gen: GenParams = None
    constants: DerivedConstants = None
    profiles: ProfilePair = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, key):
        if key.startswith(self.prefix + "."):
            key = key[len(self.prefix) + 1:]
        try:
            return self.fields[key]
        except KeyError:
            raise MissingGenerator(f"{self.prefix}.{key}") from None

    def __contains__(self, key):
        return key in self.fields

    def ids(self):
        return [f"{self.prefix}.{k}" for k in self.fields]

    @property
    def n(self):
        return self.params.n

    def M(self, mu, nu):
        """Lorentz generator for any index order (antisymmetric, zero diagonal)."""
        if mu == nu:
            return Field.const(0.0, "0")
        if mu < nu:
            return self[f"M.{mu}.{nu}"]
        return -self[f"M.{nu}.{mu}"]

    def vector(self, role):
        return [self[f"{role}.{k}"] for k in range(self.n)]

    def with_fields(self, prefix=None, **updates):
        fields = dict(self.fields)
        fields.update(updates)
        return GeneratorSet(prefix or self.prefix, self.params, fields, self.guards, self.gen,
                            self.constants, self.profiles, dict(self.meta))


def lorentz_fields(n):
    out = {}
    for mu in range(n):
        for nu in range(mu + 1, n):
            out[f"M.{mu}.{nu}"] = Field(lambda ph, mu=mu, nu=nu: ph.M(mu, nu), f"M.{mu}.{nu}")
    return out


def canonical_set(n=4):
    """Undeformed coordinates x, p with h = 1."""
    fields = {f"xhat.{k}": Field.coord_x(k) for k in range(n)}
    fields.update({f"phat.{k}": Field.coord_p(k) for k in range(n)})
    fields.update(lorentz_fields(n))
    fields["h"] = Field.const(1.0, "1")
    return GeneratorSet("canonical", ModelParams(alpha=0.0, beta=0.0, n=n), fields)


def yang_special(params, profiles=None):
    """x^ = x sqrt(1 - eps1 b^2 p^2 + phi1), p^ = p sqrt(1 - eps2 a^2 x^2 + phi2)."""
    profiles = profiles or profile_preset("phi2_zero", params.sigma)
    if profiles.sigma != params.sigma:
        raise InvalidParams(
            f"profile constraint sign {profiles.sigma} does not match eps1*eps2={params.sigma}"
        )
    al, be, e1, e2 = params.alpha, params.beta, params.eps1, params.eps2
    z = Field(lambda ph: ph.xp * (al * be), "z")
    rad1 = Field(lambda ph: 1.0 - ph.p2 * (e1 * be * be) + profiles.phi1(z(ph)), "rad1")
    rad2 = Field(lambda ph: 1.0 - ph.x2 * (e2 * al * al) + profiles.phi2(z(ph)), "rad2")
    guards = (rad1, rad2)
    r1 = Field(lambda ph: jet.sqrt(rad1(ph)), "sqrt(rad1)", guards)
    r2 = Field(lambda ph: jet.sqrt(rad2(ph)), "sqrt(rad2)", guards)
    fields = {}
    for k in range(params.n):
        fields[f"xhat.{k}"] = Field(lambda ph, k=k: ph.x[k] * r1(ph), f"xhat.{k}", guards)
        fields[f"phat.{k}"] = Field(lambda ph, k=k: ph.p[k] * r2(ph), f"phat.{k}", guards)
    fields.update(lorentz_fields(params.n))
    fields["h"] = Field(lambda ph: r1(ph) * r2(ph), "h", guards)
    return GeneratorSet("yang", params, fields, guards, profiles=profiles,
                        meta={"profile": profiles.name})


def _msq(ph):
    """Full double contraction M_{mu nu} M^{mu nu} = 2 (x^2 p^2 - (x.p)^2)."""
    return (ph.x2 * ph.p2 - ph.xp * ph.xp) * 2.0


def universal_h(params, gs):
    """h from the hatted generators and M alone.

    sqrt(1 - eps2 a^2 x^^2 - eps1 b^2 p^^2 - eps1 eps2 (a^2 b^2 / 2) M^2); the
    eps factors are all +1 for the Yang case.
    """
    al2, be2 = params.alpha**2, params.beta**2
    e1, e2 = params.eps1, params.eps2
    xh, ph_ = gs.vector("xhat"), gs.vector("phat")
    Ms = {(m, v): gs.M(m, v) for m in range(params.n) for v in range(params.n) if m != v}

    def radicand(ph):
        xx = ph.dot([f(ph) for f in xh], [f(ph) for f in xh])
        pp = ph.dot([f(ph) for f in ph_], [f(ph) for f in ph_])
        s = ph.metric.signs
        msq = None
        for (m, v), f in Ms.items():
            t = f(ph) * f(ph) * float(s[m] * s[v])
            msq = t if msq is None else msq + t
        if msq is None:
            msq = 0.0
        return 1.0 - xx * (e2 * al2) - pp * (e1 * be2) - msq * (e1 * e2 * al2 * be2 / 2.0)

    rad = Field(radicand, "rad(h_universal)")
    return Field(lambda ph: jet.sqrt(rad(ph)), "h_universal", gs.guards + (rad,))


def _mix(hyperbolic):
    return (math.cosh, math.sinh) if hyperbolic else (math.cos, math.sin)


def generalized_generators(params, gen, base=None):
    """X~, P~ and h~ built linearly from x^, p^ and M.

    Trigonometric mixing for eps1 eps2 = +1, hyperbolic for the mixed cases.
    """
    base = base or yang_special(params)
    if base.params != params:
        raise InvalidParams("base generator set was built for different model parameters")
    if gen.n != params.n:
        raise InvalidParams("GenParams dimension does not match the model")
    dc = derive_constants(params, gen)
    C, S = _mix(dc.hyperbolic)
    al, be = params.alpha, params.beta
    A, B = gen.A, gen.B
    sphi, spsi = S(gen.phi), S(gen.psi)
    if sphi != 0.0 and al == 0.0:
        raise DomainError("beta/alpha mixing with alpha = 0")
    if spsi != 0.0 and be == 0.0:
        raise DomainError("alpha/beta mixing with beta = 0")
    cx = A * C(gen.phi)
    cxp = A * (be / al) * sphi if sphi != 0.0 else 0.0
    cp = B * C(gen.psi)
    cpx = B * (al / be) * spsi if spsi != 0.0 else 0.0
    s = Metric(params.n).signs
    a, b = gen.a_vec, gen.b_vec
    n = params.n
    fields = dict(base.fields)
    Xt, Pt = [], []
    for mu in range(n):
        tx = [(cx, base[f"xhat.{mu}"]), (cxp, base[f"phat.{mu}"])]
        tp = [(cp, base[f"phat.{mu}"]), (cpx, base[f"xhat.{mu}"])]
        for nu in range(n):
            if nu != mu:
                tx.append((be * s[nu] * a[nu], base.M(mu, nu)))
                tp.append((al * s[nu] * b[nu], base.M(mu, nu)))
        Xt.append(linear_combination(tx, f"Xtilde.{mu}"))
        Pt.append(linear_combination(tp, f"Ptilde.{mu}"))
        fields[f"Xtilde.{mu}"] = Xt[-1]
        fields[f"Ptilde.{mu}"] = Pt[-1]
    cfac = math.cosh(gen.psi - gen.phi) if dc.hyperbolic else math.cos(gen.phi + gen.psi)
    th = [(A * B * cfac, base["h"])]
    th += [(be * s[mu] * a[mu], Pt[mu]) for mu in range(n)]
    th += [(-al * s[mu] * b[mu], Xt[mu]) for mu in range(n)]
    for mu in range(n):
        for nu in range(n):
            if mu != nu:
                th.append((-al * be * s[mu] * s[nu] * a[mu] * b[nu], base.M(mu, nu)))
    fields["htilde"] = linear_combination(th, "htilde")
    return GeneratorSet("gen", params, fields, base.guards, gen, dc, base.profiles,
                        dict(base.meta))


def htilde_closed_form(params, gen, gs):
    """h~ for a = b = 0 written through X~, P~ and M only.

    AB cos(phi+psi) h expressed in the new generators; equals the linear
    construction of h~ for the (+,+) case with a = b = 0.
    """
    if params.case != "pp" or any(gen.a) or any(gen.b):
        raise InvalidParams("closed-form h~ is for the (+,+) case with a = b = 0")
    dc = derive_constants(params, gen)
    al_t, be_t, rho = dc.alpha_t, dc.beta_t, dc.rho
    c = math.cos(gen.phi + gen.psi)
    AB = gen.A * gen.B
    X, P = gs.vector("Xtilde"), gs.vector("Ptilde")

    def radicand(ph):
        Xv = [f(ph) for f in X]
        Pv = [f(ph) for f in P]
        XX, PP, XP = ph.dot(Xv, Xv), ph.dot(Pv, Pv), ph.dot(Xv, Pv)
        return (AB * AB * c * c - XX * al_t**2 - PP * be_t**2 + XP * (2 * rho * al_t * be_t)
                - _msq(ph) * (c * c * al_t**2 * be_t**2 / 2.0))

    rad = Field(radicand, "rad(htilde_closed)")
    sign = math.copysign(1.0, AB * c)
    return Field(lambda ph: jet.sqrt(rad(ph)) * sign, "htilde_closed", gs.guards + (rad,))


def htilde_printed_form(params, gen, gs):
    """The closed form as printed, without the AB cos prefactor.

    Agrees with the generator construction on the locus AB cos(phi+psi) = 1.
    """
    dc = derive_constants(params, gen)
    al_t, be_t, rho = dc.alpha_t, dc.beta_t, dc.rho
    AB = gen.A * gen.B
    X, P = gs.vector("Xtilde"), gs.vector("Ptilde")

    def radicand(ph):
        Xv = [f(ph) for f in X]
        Pv = [f(ph) for f in P]
        XX, PP, XP = ph.dot(Xv, Xv), ph.dot(Pv, Pv), ph.dot(Xv, Pv)
        return (1.0 - XX * al_t**2 - PP * be_t**2 + XP * (2 * rho * al_t * be_t)
                - _msq(ph) * (al_t**2 * be_t**2 / (2.0 * AB * AB)))

    rad = Field(radicand, "rad(htilde_printed)")
    return Field(lambda ph: jet.sqrt(rad(ph)), "htilde_printed", gs.guards + (rad,))


def inverse_transform(params, gen, Xt, Pt, M):
    """Recover x^, p^ from X~, P~ and M.

    ``Xt`` and ``Pt`` have shape batch + (n,), ``M`` batch + (n, n).
    """
    hyperbolic = params.eps1 * params.eps2 < 0
    C, S = _mix(hyperbolic)
    den = math.cosh(gen.psi - gen.phi) if hyperbolic else math.cos(gen.phi + gen.psi)
    if abs(den) < SINGULAR_TOL:
        raise DegenerateFrame("cos(phi + psi) = 0: X~ and P~ are parallel")
    al, be = params.alpha, params.beta
    if al == 0.0 or be == 0.0:
        raise DomainError("inverse transform needs alpha, beta nonzero")
    s = Metric(params.n).signs
    Xt = np.asarray(Xt, dtype=float)
    Pt = np.asarray(Pt, dtype=float)
    M = np.asarray(M, dtype=float)
    aM = np.einsum("...mn,n->...m", M, s * gen.a_vec)
    bM = np.einsum("...mn,n->...m", M, s * gen.b_vec)
    Xr = (Xt - be * aM) / gen.A
    Pr = (Pt - al * bM) / gen.B
    xh = (al * C(gen.psi) * Xr - be * S(gen.phi) * Pr) / (al * den)
    ph = (be * C(gen.phi) * Pr - al * S(gen.psi) * Xr) / (be * den)
    return xh, ph


def born_dual(params, gen, gs=None, spatial_only=False):
    """Born-dual configuration: alpha <-> beta, a -> -b, b -> a, X~ -> -P~, P~ -> X~.

    Returns (dual params, dual GenParams, relabelled generator set or None).
    The dual angles are phi' = -psi, psi' = -phi with A' = B, B' = A, which
    reproduces A~ <-> B~ and rho~ -> -rho~.  With ``spatial_only`` the time
    components of a and b are left untouched.
    """
    if params.case != "pp":
        raise InvalidParams("Born duality is defined for the (+,+) case")
    a, b = gen.a_vec, gen.b_vec
    a_new, b_new = -b, a.copy()
    if spatial_only:
        a_new[0], b_new[0] = a[0], b[0]
    dparams = params.replace(alpha=params.beta, beta=params.alpha)
    dgen = gen.replace(A=gen.B, B=gen.A, phi=-gen.psi, psi=-gen.phi,
                       a=tuple(a_new), b=tuple(b_new))
    dgs = None
    if gs is not None:
        fields = dict(gs.fields)
        for k in range(params.n):
            fields[f"Xtilde.{k}"] = -gs[f"Ptilde.{k}"]
            fields[f"Ptilde.{k}"] = gs[f"Xtilde.{k}"]
        dgs = GeneratorSet("born", dparams, fields, gs.guards, dgen,
                           derive_constants(dparams, dgen), gs.profiles,
                           dict(gs.meta, dual=True, spatial_only=spatial_only))
    return dparams, dgen, dgs


# --------------------------------------------------------------------------
# Snyder limit


@dataclass(frozen=True)
class SnyderProfile:
    """phi1(u) together with its derivative, both jet-liftable."""

    f: Callable
    df: Callable
    name: str = "custom"


SNYDER_PROFILES = {
    "one": SnyderProfile(lambda u: u * 0.0 + 1.0, lambda u: u * 0.0, "one"),
    "sqrt": SnyderProfile(lambda u: jet.sqrt(1.0 - u), lambda u: -0.5 / jet.sqrt(1.0 - u), "sqrt"),
    "linear": SnyderProfile(lambda u: 1.0 + u * 0.5, lambda u: u * 0.0 + 0.5, "linear"),
}


def snyder_phi2(profile, u, printed=False):
    """(1 + 2 phi1' phi1) / (phi1 - 2u phi1').

    The factor 2 in the numerator is what {x^, x^} = beta^2 M requires;
    ``printed=True`` drops it (that variant fails unless phi1' phi1 = 0).
    """
    f1 = profile.f(u)
    d1 = profile.df(u)
    den = f1 - u * d1 * 2.0
    if np.any(np.abs(jet.real(den)) < SINGULAR_TOL):
        raise SingularProfile("phi1 - 2u phi1' vanishes")
    return (1.0 + d1 * f1 * (1.0 if printed else 2.0)) / den


def snyder_realization(params, profile, printed=False):
    """Snyder-limit realization (alpha = 0) for a profile phi1(u), u = beta^2 p^2."""
    if isinstance(profile, str):
        profile = SNYDER_PROFILES[profile]
    if params.alpha != 0.0:
        raise InvalidParams("the Snyder realization needs alpha = 0")
    be2 = params.beta**2
    u = Field(lambda ph: ph.p2 * be2, "u")

    def f1(ph):
        v = profile.f(u(ph))
        if np.any(jet.real(v) == 0.0):
            raise SingularProfile("phi1(u) vanishes")
        return v

    F1 = Field(f1, "phi1(u)")
    F2 = Field(lambda ph: snyder_phi2(profile, u(ph), printed), "phi2(u)")
    fields = {}
    for k in range(params.n):
        fields[f"xhat.{k}"] = Field(
            lambda ph, k=k: ph.x[k] * F1(ph) + ph.p[k] * ph.xp * F2(ph) * be2, f"xhat.{k}")
        fields[f"phat.{k}"] = Field(lambda ph, k=k: ph.p[k] / F1(ph), f"phat.{k}")
    fields.update(lorentz_fields(params.n))
    return GeneratorSet("snyder", params, fields,
                        meta={"profile": profile.name, "printed_phi2": printed})


def random_gen_params(rng, n=4, angle=0.3, shift=0.2, scale=(0.8, 1.25)):
    """A draw with |phi|, |psi| <= angle, |a_mu|, |b_mu| <= shift and A, B in ``scale``."""
    A, B = rng.uniform(*scale, size=2)
    phi, psi = rng.uniform(-angle, angle, size=2)
    a = rng.uniform(-shift, shift, size=n)
    b = rng.uniform(-shift, shift, size=n)
    return GenParams(A=float(A), B=float(B), phi=float(phi), psi=float(psi), a=a, b=b, n=n)
