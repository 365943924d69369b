"""Poisson brackets, Jacobi residuals and Hamiltonian flow maps.

Sign convention: {F, G} = sum_mu eta^{mu mu} (dF/dx_mu dG/dp_mu - dF/dp_mu dG/dx_mu),
so {x_mu, p_nu} = eta_{mu nu}.  The operator L_K f = {K, f} generates the
flow dz/dt = {K, z}, and e^{t L_K} f = f o Phi_t.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams
from .fields import Field, Phase
from .integrate import StepStats, dopri5
from .jet import Jet, _mul, _split
from .phasespace import Metric, PhasePoint


def bracket_jets(F, G, signs):
    """Bracket of two depth-(d+1) jets as a depth-d jet."""
    if F.depth != G.depth or F.depth < 1:
        raise ValueError("bracket needs two jets of equal positive depth")
    d = F.depth
    n = len(signs)
    tail = (slice(None),) * (d - 1)
    _, Fg = _split(F.data, d)
    _, Gg = _split(G.data, d)
    xs = (Ellipsis, slice(0, n)) + tail
    ps = (Ellipsis, slice(n, 2 * n)) + tail
    prod = _mul(Fg[xs], Gg[ps], d - 1) - _mul(Fg[ps], Gg[xs], d - 1)
    s = np.asarray(signs, dtype=float).reshape((n,) + (1,) * (d - 1))
    return Jet(np.sum(prod * s, axis=-d), d - 1)


def bracket_field(F, G, name=None):
    """{F, G} as a field; each evaluation lifts the phase by one jet level."""

    def fn(ph):
        up = ph.lifted()
        return bracket_jets(F(up), G(up), ph.metric.signs)

    from .fields import _merge_guards

    return Field(fn, name or f"{{{F.name},{G.name}}}", _merge_guards(F.guards, G.guards))


def poisson_bracket(F, G, pt):
    """Values of {F, G} at the phase point(s) ``pt``."""
    return bracket_field(F, G).values(pt)


def jacobi_field(A, B, C):
    ab = bracket_field(A, B)
    bc = bracket_field(B, C)
    ca = bracket_field(C, A)
    return bracket_field(A, bc) + bracket_field(B, ca) + bracket_field(C, ab)


def jacobi_residual(A, B, C, pt):
    """|{A,{B,C}} + {B,{C,A}} + {C,{A,B}}| at ``pt`` (exact nested jets)."""
    return np.abs(jacobi_field(A, B, C).values(pt))


@dataclass(frozen=True)
class FlowSpec:
    t: float = 1.0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_steps: int = 100_000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not 0 < v <= 1e-2:
                raise InvalidParams(f"{name} must lie in (0, 1e-2], got {v}")
        if self.max_steps < 1:
            raise InvalidParams("max_steps must be at least 1")

    def replace(self, **kw):
        d = dict(t=self.t, abs_tol=self.abs_tol, rel_tol=self.rel_tol, max_steps=self.max_steps)
        d.update(kw)
        return FlowSpec(**d)


def hamiltonian_vector_field(K, n):
    """Right-hand side z -> ({K, x_mu}, {K, p_mu}) on stacked states."""
    signs = Metric(n).signs

    def rhs(z):
        g = K.evaluate(PhasePoint.from_stacked(z), 1).grad
        gx, gp = g[..., :n], g[..., n:]
        return np.concatenate([-signs * gp, signs * gx], axis=-1)

    return rhs


def hamiltonian_flow(K, pt, spec=FlowSpec(), stats=None):
    """Image of ``pt`` under the time-``spec.t`` flow of {K, .}."""
    n = pt.n
    z, _ = dopri5(hamiltonian_vector_field(K, n), pt.stacked(), 0.0, spec.t,
                  rtol=spec.rel_tol, atol=spec.abs_tol, max_steps=spec.max_steps, stats=stats)
    return PhasePoint.from_stacked(z)


FD_STEP = 1e-5


class PullbackField(Field):
    """pt -> f(Phi^K_t(pt)), i.e. e^{t L_K} f.

    Values come from one batched flow.  Gradients (depth-1 jets) are central
    differences of the flow with step ``fd_step``; all perturbed copies ride
    in the same batch so they share one step sequence.  Higher jets are not
    available.
    """

    finite_difference = True

    def __init__(self, K, t, f, spec=None, fd_step=FD_STEP, name=None):
        self.K, self.t, self.f = K, float(t), f
        self.spec = (spec or FlowSpec()).replace(t=float(t))
        self.fd_step = fd_step
        self.stats = StepStats()
        super().__init__(self._evaluate, name or f"e^({t:g}L[{K.name}])({f.name})", f.guards)

    def _flow(self, z):
        pt = PhasePoint.from_stacked(z)
        if self.t != 0.0:
            pt = hamiltonian_flow(self.K, pt, self.spec, self.stats)
        return pt

    def _flowed_points(self, ph):
        # pullbacks along the same flow on the same phase share one integration
        key = ("flow", self.K, self.t, self.spec, self.fd_step, ph.depth)
        z = ph.point.stacked()
        if ph.depth == 0:
            return ph._memo(key, lambda: self._flow(z))
        m = z.shape[-1]
        h = self.fd_step
        steps = np.concatenate([np.zeros((1, m)), h * np.eye(m), -h * np.eye(m)])
        stacked = z[None, ...] + steps.reshape((2 * m + 1,) + (1,) * (z.ndim - 1) + (m,))
        return ph._memo(key, lambda: self._flow(stacked))

    def _evaluate(self, ph):
        if ph.depth > 1:
            raise ValueError("pullback fields carry first derivatives only")
        vals = self.f.values(self._flowed_points(ph))
        if ph.depth == 0:
            return Jet(vals, 0)
        m = 2 * ph.n
        h = self.fd_step
        grad = (vals[1 : m + 1] - vals[m + 1 :]) / (2 * h)
        data = np.concatenate([vals[:1], grad], axis=0)
        return Jet(np.moveaxis(data, 0, -1), 1)


def pullback(K, t, f, spec=None, fd_step=FD_STEP):
    """The field e^{t L_K} f."""
    return PullbackField(K, t, f, spec, fd_step)


def uses_finite_differences(*fields):
    return any(getattr(f, "finite_difference", False) for f in fields)
