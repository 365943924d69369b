"""Ansatz quadruples (f, g, f~, g~) over (u, v, z) and the seven PDE residuals.

The quadruple functions receive three jets (or plain arrays) u, v, z and
return the same kind of object, so one definition serves both the PDE
residuals (three-variable jets) and the phase-space fields.
"""

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jet
from .errors import InvalidParams
from .fields import Field
from .jet import Jet
from .phasespace import ModelParams
from .realizations import GenParams, GeneratorSet, derive_constants, lorentz_fields, profile_preset

TriJet = Jet  # depth-1 jet over (u, v, z)

PDE_NAMES = ("e1", "e2", "e3", "e4", "e5", "e6", "e7")


def tri_variables(u, v, z):
    return tuple(Jet.variable(np.asarray(c, dtype=float), k, 1, 3) for k, c in enumerate((u, v, z)))


@dataclass(frozen=True)
class AnsatzQuadruple:
    f: Callable
    g: Callable
    ft: Callable
    gt: Callable
    rho: float
    htilde: Callable
    name: str = "quadruple"


def pde_residuals(q, u, v, z, ab=1.0):
    """LHS - RHS of the seven equations; returns an array of shape batch + (7,).

    With ``ab=1`` the equations are the printed ones.  For other values of
    AB the {u, v} bracket scales by AB and the brackets with z by 1/AB;
    ``ab`` applies those factors.
    """
    U, V, Z = tri_variables(u, v, z)
    uu, vv, zz = U.real, V.real, Z.real

    def parts(fn):
        out = fn(U, V, Z)
        if not isinstance(out, Jet):
            out = Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), uu.shape), 1, 3)
        return out.real, out.partial(0), out.partial(1), out.partial(2)

    f, fu, fv, fz = parts(q.f)
    g, gu, gv, gz = parts(q.g)
    F, Fu, Fv, Fz = parts(q.ft)
    G, Gu, Gv, Gz = parts(q.gt)
    h = np.asarray(jet.real(q.htilde(uu, vv, zz)), dtype=float)
    rho = q.rho

    def E(a, b):
        (_, au, av, az), (_, bu, bv, bz) = a, b
        return (4 * ab * zz * (av * bu - au * bv)
                + (2 * vv * (av * bz - az * bv) + 2 * uu * (az * bu - au * bz)) / ab)

    pf, pg, pF, pG = (f, fu, fv, fz), (g, gu, gv, gz), (F, Fu, Fv, Fz), (G, Gu, Gv, Gz)
    k = 1.0 / ab
    e1 = -2 * f * fu - 2 * g * gv + E(pf, pg) + k * (f * gz + g * fz) - 1.0
    e2 = -2 * F * Fv - 2 * G * Gu - E(pF, pG) + k * (F * Gz + G * Fz) - 1.0
    e3 = f * F - g * G - h
    e4 = 2 * F * fv - 2 * g * Gv + E(pf, pG) + k * (f * Gz - G * fz)
    e5 = -2 * f * Fu - 2 * G * gu - E(pF, pg) + k * (F * gz - g * Fz)
    e6 = -2 * G * fu - 2 * g * Fv + E(pf, pF) + k * (f * Fz + F * fz) - rho
    e7 = 2 * f * Gu + 2 * F * gv + E(pg, pG) - k * (g * Gz + G * gz) + rho
    return np.stack(np.broadcast_arrays(e1, e2, e3, e4, e5, e6, e7), axis=-1)


def default_grid(nu=9, nv=9, nz=21):
    u = np.linspace(0.0, 0.5, nu)
    v = np.linspace(0.0, 0.5, nv)
    z = np.linspace(-0.5, 0.5, nz)
    U, V, Z = np.meshgrid(u, v, z, indexing="ij")
    return U.ravel(), V.ravel(), Z.ravel()


def grid_residuals(q, grid=None, ab=1.0):
    u, v, z = grid if grid is not None else default_grid()
    return u, v, z, pde_residuals(q, u, v, z, ab)


def write_csv(path, u, v, z, res):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v", "z", *PDE_NAMES])
        for row in zip(u, v, z, *res.T):
            w.writerow([repr(float(c)) for c in row])


# --------------------------------------------------------------------------
# shipped quadruples


def special_quadruple(profiles=None):
    """f = sqrt(1 - u + phi1), f~ = sqrt(1 - v + phi2), g = g~ = 0."""
    pr = profiles or profile_preset("phi2_zero")
    f = lambda u, v, z: jet.sqrt(1.0 - u + pr.phi1(z))  # noqa: E731
    ft = lambda u, v, z: jet.sqrt(1.0 - v + pr.phi2(z))  # noqa: E731
    zero = lambda u, v, z: u * 0.0  # noqa: E731
    return AnsatzQuadruple(f, zero, ft, zero, 0.0,
                           lambda u, v, z: f(u, v, z) * ft(u, v, z), f"special[{pr.name}]")


def composed_quadruple(gen, profiles=None, printed=False):
    """Quadruple obtained by composing the tilde generators with the special realization.

    g~ carries sin(psi); ``printed=True`` swaps in sin(phi) instead.
    """
    pr = profiles or profile_preset("phi2_zero")
    A, B = gen.A, gen.B
    sg = math.sin(gen.phi) if printed else math.sin(gen.psi)
    r1 = lambda u, z: jet.sqrt(1.0 - u * (1.0 / (A * A)) + pr.phi1(z))  # noqa: E731
    r2 = lambda v, z: jet.sqrt(1.0 - v * (1.0 / (B * B)) + pr.phi2(z))  # noqa: E731
    f = lambda u, v, z: r1(u, z) * (A * math.cos(gen.phi))  # noqa: E731
    g = lambda u, v, z: r2(v, z) * (B * math.sin(gen.phi))  # noqa: E731
    ft = lambda u, v, z: r2(v, z) * (B * math.cos(gen.psi))  # noqa: E731
    gt = lambda u, v, z: r1(u, z) * (A * sg)  # noqa: E731
    c = A * B * math.cos(gen.phi + gen.psi)
    return AnsatzQuadruple(f, g, ft, gt, math.sin(gen.phi + gen.psi),
                           lambda u, v, z: r1(u, z) * r2(v, z) * c,
                           "composed[printed]" if printed else "composed")


def particular_quadruple(rho=0.3):
    """f~ = sqrt(1 - v), g~ = 0, g = rho sqrt(1 - v)."""
    k = 1.0 - rho * rho
    f = lambda u, v, z: jet.sqrt((1.0 - u + z * z) * k)  # noqa: E731
    g = lambda u, v, z: jet.sqrt(1.0 - v) * rho  # noqa: E731
    ft = lambda u, v, z: jet.sqrt(1.0 - v)  # noqa: E731
    gt = lambda u, v, z: u * 0.0  # noqa: E731
    ht = lambda u, v, z: jet.sqrt((1.0 - u - v + u * v + z * z - v * z * z) * k)  # noqa: E731
    return AnsatzQuadruple(f, g, ft, gt, rho, ht, f"particular[rho={rho:g}]")


def trivial_quadruple():
    one = lambda u, v, z: u * 0.0 + 1.0  # noqa: E731
    zero = lambda u, v, z: u * 0.0  # noqa: E731
    return AnsatzQuadruple(one, zero, one, zero, 0.0, one, "trivial")


def shipped_quadruples():
    gen = GenParams(A=1.0, B=1.0, phi=0.2, psi=0.1)
    return {
        "special": special_quadruple(),
        "composed": composed_quadruple(gen),
        "particular": particular_quadruple(0.3),
    }


# --------------------------------------------------------------------------
# phase-space fields


def ansatz_to_fields(q, gen, params=None):
    """X~_mu = x_mu f + (b~/a~) p_mu g and P~_mu = p_mu f~ + (a~/b~) x_mu g~.

    Returns a GeneratorSet with Xtilde, Ptilde, htilde (the declared target)
    and the Lorentz generators.
    """
    params = params or ModelParams(n=gen.n)
    dc = derive_constants(params, gen)
    at, bt = dc.alpha_t, dc.beta_t
    if at == 0.0 or bt == 0.0:
        raise InvalidParams("ansatz fields need nonzero alpha~ and beta~")
    c = at * bt / (gen.A * gen.B)
    key = ("uvz", at, bt, c)

    def uvz(ph):
        return ph._memo(key, lambda: (ph.p2 * (bt * bt), ph.x2 * (at * at), ph.xp * c))

    def fn_field(fn, name):
        return Field(lambda ph: fn(*uvz(ph)), name)

    F = {k: fn_field(getattr(q, k), k) for k in ("f", "g", "ft", "gt")}
    H = fn_field(q.htilde, "htilde")
    fields = {}
    for mu in range(params.n):
        fields[f"Xtilde.{mu}"] = Field(
            lambda ph, mu=mu: ph.x[mu] * F["f"](ph) + ph.p[mu] * F["g"](ph) * (bt / at),
            f"Xtilde.{mu}")
        fields[f"Ptilde.{mu}"] = Field(
            lambda ph, mu=mu: ph.p[mu] * F["ft"](ph) + ph.x[mu] * F["gt"](ph) * (at / bt),
            f"Ptilde.{mu}")
    fields.update(lorentz_fields(params.n))
    fields["htilde"] = H
    return GeneratorSet("ansatz", params, fields, gen=gen, constants=dc,
                        meta={"quadruple": q.name})
