"""Declarative relation sets and randomized residual sweeps."""

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .brackets import bracket_field, bracket_jets, uses_finite_differences
from .errors import DomainError
from .fields import Field, Phase, linear_combination
from .phasespace import Metric, SampleSpec, sample_points
from .realizations import derive_constants

DEFAULT_SPEC = SampleSpec()
REJECT_LIMIT = 0.10


@dataclass(frozen=True)
class Relation:
    """{lhs[0], lhs[1]} = rhs(gs); ``eq`` names the bracket family."""

    eq: str
    lhs: tuple
    rhs: Callable

    @property
    def id(self):
        return f"({self.eq}) {{{self.lhs[0]},{self.lhs[1]}}}"


@dataclass
class ResidualReport:
    model: str
    case: str
    relation: str
    samples: int
    max_abs: float
    mean_abs: float
    tol: float
    passed: bool
    rejects: int = 0
    params: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self):
        d = {
            "model": self.model, "case": self.case, "relation": self.relation,
            "samples": self.samples, "max_abs": self.max_abs, "mean_abs": self.mean_abs,
            "tol": self.tol, "pass": self.passed, "rejects": self.rejects,
        }
        if self.params:
            d["params"] = self.params
        if self.note:
            d["note"] = self.note
        return d


def _eta(mu, nu, s):
    return float(s[mu]) if mu == nu else 0.0


def _pairs(n):
    return [(m, v) for m in range(n) for v in range(m + 1, n)]


def lorentz_relations(n, vectors=("xhat", "phat")):
    """Lorentz algebra and its vector action on the named generators."""
    s = Metric(n).signs
    rels = []
    for (mu, nu), (rho, sg) in itertools.product(_pairs(n), _pairs(n)):
        def rhs(gs, mu=mu, nu=nu, rho=rho, sg=sg):
            return linear_combination([
                (_eta(mu, rho, s), gs.M(nu, sg)), (-_eta(mu, sg, s), gs.M(nu, rho)),
                (-_eta(nu, rho, s), gs.M(mu, sg)), (_eta(nu, sg, s), gs.M(mu, rho))])
        rels.append(Relation("lorentz", (f"M.{mu}.{nu}", f"M.{rho}.{sg}"), rhs))
    for tag, role in zip(("M-xhat", "M-phat"), vectors):
        for (mu, nu), lam in itertools.product(_pairs(n), range(n)):
            def rhs(gs, mu=mu, nu=nu, lam=lam, role=role):
                return linear_combination([(_eta(mu, lam, s), gs[f"{role}.{nu}"]),
                                           (-_eta(nu, lam, s), gs[f"{role}.{mu}"])])
            rels.append(Relation(tag, (f"M.{mu}.{nu}", f"{role}.{lam}"), rhs))
    return rels


def yang_relations(params):
    """All components of the (eps1, eps2) Yang Poisson algebra."""
    n = params.n
    s = Metric(n).signs
    al2, be2 = params.alpha**2, params.beta**2
    e1, e2 = params.eps1, params.eps2
    rels = lorentz_relations(n)
    for mu, nu in _pairs(n):
        rels.append(Relation("xhat-xhat", (f"xhat.{mu}", f"xhat.{nu}"),
                             lambda gs, mu=mu, nu=nu: gs.M(mu, nu) * (e1 * be2)))
        rels.append(Relation("phat-phat", (f"phat.{mu}", f"phat.{nu}"),
                             lambda gs, mu=mu, nu=nu: gs.M(mu, nu) * (e2 * al2)))
    for mu, nu in itertools.product(range(n), range(n)):
        rels.append(Relation("xhat-phat", (f"xhat.{mu}", f"phat.{nu}"),
                             lambda gs, mu=mu, nu=nu: gs["h"] * _eta(mu, nu, s)))
    for mu in range(n):
        rels.append(Relation("h-xhat", ("h", f"xhat.{mu}"),
                             lambda gs, mu=mu: gs[f"phat.{mu}"] * (e1 * be2)))
        rels.append(Relation("h-phat", ("h", f"phat.{mu}"),
                             lambda gs, mu=mu: gs[f"xhat.{mu}"] * (-e2 * al2)))
    for mu, nu in _pairs(n):
        rels.append(Relation("M-h", (f"M.{mu}.{nu}", "h"), lambda gs: Field.const(0.0)))
    return rels


def generalized_relations(params, gen, printed=False):
    """All components of the generalized algebra with the case constants.

    {h~, P~} carries -alpha b h~, the Born image of the beta a h~ term in
    {h~, X~}.  ``printed=True`` flips it to +alpha b h~, which only closes
    for b = 0.
    """
    hb = 1.0 if printed else -1.0
    n = params.n
    s = Metric(n).signs
    al, be = params.alpha, params.beta
    dc = derive_constants(params, gen)
    At, Bt = dc.A_t, dc.B_t
    kappa = al * be * gen.A * gen.B * dc.rho
    a, b = gen.a_vec, gen.b_vec
    X = lambda gs, k: gs[f"Xtilde.{k}"]  # noqa: E731
    P = lambda gs, k: gs[f"Ptilde.{k}"]  # noqa: E731
    rels = []
    for mu, nu in _pairs(n):
        rels.append(Relation("X-X", (f"Xtilde.{mu}", f"Xtilde.{nu}"), lambda gs, mu=mu, nu=nu:
                             linear_combination([(be * be * At, gs.M(mu, nu)),
                                                 (be * a[mu], X(gs, nu)), (-be * a[nu], X(gs, mu))])))
        rels.append(Relation("P-P", (f"Ptilde.{mu}", f"Ptilde.{nu}"), lambda gs, mu=mu, nu=nu:
                             linear_combination([(al * al * Bt, gs.M(mu, nu)),
                                                 (al * b[mu], P(gs, nu)), (-al * b[nu], P(gs, mu))])))
    for mu, nu in itertools.product(range(n), range(n)):
        rels.append(Relation("X-P", (f"Xtilde.{mu}", f"Ptilde.{nu}"), lambda gs, mu=mu, nu=nu:
                             linear_combination([(_eta(mu, nu, s), gs["htilde"]),
                                                 (al * b[mu], X(gs, nu)), (-be * a[nu], P(gs, mu)),
                                                 (kappa, gs.M(mu, nu))])))
    for (mu, nu), lam in itertools.product(_pairs(n), range(n)):
        rels.append(Relation("M-X", (f"M.{mu}.{nu}", f"Xtilde.{lam}"),
                             lambda gs, mu=mu, nu=nu, lam=lam: linear_combination([
                                 (_eta(mu, lam, s), X(gs, nu)), (-_eta(nu, lam, s), X(gs, mu)),
                                 (be * a[mu], gs.M(lam, nu)), (-be * a[nu], gs.M(lam, mu))])))
    for (mu, nu), lam in itertools.product(_pairs(n), range(n)):
        rels.append(Relation("M-P", (f"M.{mu}.{nu}", f"Ptilde.{lam}"),
                             lambda gs, mu=mu, nu=nu, lam=lam: linear_combination([
                                 (_eta(mu, lam, s), P(gs, nu)), (-_eta(nu, lam, s), P(gs, mu)),
                                 (al * b[mu], gs.M(lam, nu)), (-al * b[nu], gs.M(lam, mu))])))
    for mu, nu in _pairs(n):
        rels.append(Relation("M-htilde", (f"M.{mu}.{nu}", "htilde"), lambda gs, mu=mu, nu=nu:
                             linear_combination([(al * b[nu], X(gs, mu)), (-al * b[mu], X(gs, nu)),
                                                 (-be * a[nu], P(gs, mu)), (be * a[mu], P(gs, nu))])))
    for mu in range(n):
        rels.append(Relation("htilde-X", ("htilde", f"Xtilde.{mu}"), lambda gs, mu=mu:
                             linear_combination([(be * be * At, P(gs, mu)), (-kappa, X(gs, mu)),
                                                 (-be * a[mu], gs["htilde"])])))
        rels.append(Relation("htilde-P", ("htilde", f"Ptilde.{mu}"), lambda gs, mu=mu:
                             linear_combination([(-al * al * Bt, X(gs, mu)), (kappa, P(gs, mu)),
                                                 (hb * al * b[mu], gs["htilde"])])))
    return rels


def snyder_relations(params):
    n = params.n
    be2 = params.beta**2
    rels = lorentz_relations(n)
    for mu, nu in _pairs(n):
        rels.append(Relation("snyder.x", (f"xhat.{mu}", f"xhat.{nu}"),
                             lambda gs, mu=mu, nu=nu: gs.M(mu, nu) * be2))
        rels.append(Relation("snyder.p", (f"phat.{mu}", f"phat.{nu}"),
                             lambda gs: Field.const(0.0)))
    return rels


def relation_set(model, params, gen=None, printed=False):
    """Relations for ``model`` in {'yang', 'generalized', 'snyder'}."""
    if model == "yang":
        return yang_relations(params)
    if model == "generalized":
        if gen is None:
            raise ValueError("the generalized relation set needs GenParams")
        return generalized_relations(params, gen, printed)
    if model == "snyder":
        return snyder_relations(params)
    raise ValueError(f"unknown model {model!r}")


# --------------------------------------------------------------------------
# sweeps


def _params_echo(gs):
    p = gs.params
    d = {"alpha": p.alpha, "beta": p.beta, "eps1": p.eps1, "eps2": p.eps2, "n": p.n}
    if gs.gen is not None:
        g = gs.gen
        d.update(A=g.A, B=g.B, phi=g.phi, psi=g.psi, a=list(g.a), b=list(g.b))
    if "profile" in gs.meta:
        d["profile"] = gs.meta["profile"]
    return d


def domain_points(gs, fields, spec, max_rounds=50):
    """Sample ``spec.count`` points where every field evaluates.

    Points whose evaluation raises a DomainError are dropped and replaced
    from fresh seed streams.  Returns (points, number of rejected draws).
    """
    n = gs.params.n
    pts = sample_points(spec, gs.guards, n)
    rejects = 0
    for round_ in range(max_rounds):
        ok = np.ones(len(pts), dtype=bool)
        ph = Phase(pts, 0)
        for f in fields:
            try:
                f(ph)
            except DomainError as err:
                if err.mask is None or err.mask.shape != ok.shape:
                    raise
                ok &= ~err.mask
                ph = None
                break
        if ph is not None:
            return pts, rejects
        bad = int((~ok).sum())
        rejects += bad
        fresh = sample_points(spec.replace(count=bad, seed=spec.seed + 7919 * (round_ + 1)),
                              gs.guards, n)
        pts = type(pts)(np.concatenate([pts.x[ok], fresh.x]), np.concatenate([pts.p[ok], fresh.p]))
    raise DomainError(f"could not find {spec.count} points inside the domain")


def check_relations(gs, rels, spec=DEFAULT_SPEC, tol=1e-8, model=None):
    """Residual |{lhs} - rhs| of each relation over a seeded sample."""
    model = model or gs.prefix
    keys = sorted({k for r in rels for k in r.lhs})
    lhs_fields = {k: gs[k] for k in keys}
    rhs_fields = [r.rhs(gs) for r in rels]
    pts, rejects = domain_points(gs, list(lhs_fields.values()) + rhs_fields, spec)
    ph = Phase(pts, 1)
    s = ph.metric.signs
    fd = uses_finite_differences(*lhs_fields.values())
    echo = _params_echo(gs)
    failed_domain = rejects > REJECT_LIMIT * (spec.count + rejects)
    reports = []
    for rel, rhs in zip(rels, rhs_fields):
        br = bracket_jets(lhs_fields[rel.lhs[0]](ph), lhs_fields[rel.lhs[1]](ph), s).real
        res = np.abs(br - rhs(ph).real)
        mx = float(np.max(res))
        reports.append(ResidualReport(
            model=model, case=gs.params.case, relation=rel.id, samples=len(pts),
            max_abs=mx, mean_abs=float(np.mean(res)), tol=tol,
            passed=bool(mx < tol) and not failed_domain, rejects=rejects, params=echo,
            note="finite-difference jets" if fd else ""))
    return reports


def default_jacobi_keys(gs):
    n = gs.params.n
    if "Xtilde.0" in gs:
        return [f"Xtilde.{k}" for k in range(n)] + [f"Ptilde.{k}" for k in range(n)] + ["htilde"]
    keys = [f"xhat.{k}" for k in range(n)] + [f"phat.{k}" for k in range(n)]
    if "h" in gs:
        keys.append("h")
    return keys


def jacobi_suite(gs, spec=DEFAULT_SPEC, tol=1e-7, keys=None, model=None):
    """Max Jacobi residual over all distinct triples of generators."""
    keys = keys or default_jacobi_keys(gs)
    F = {k: gs[k] for k in keys}
    br = {}
    for a, b in itertools.combinations(keys, 2):
        br[a, b] = bracket_field(F[a], F[b])
        br[b, a] = -br[a, b]
    pts, rejects = domain_points(gs, list(F.values()), spec)
    ph = Phase(pts, 0)
    worst = np.zeros(len(pts))
    total = 0.0
    count = 0
    for a, b, c in itertools.combinations(keys, 3):
        j = (bracket_field(F[a], br[b, c])(ph).real + bracket_field(F[b], br[c, a])(ph).real
             + bracket_field(F[c], br[a, b])(ph).real)
        r = np.abs(j)
        worst = np.maximum(worst, r)
        total += float(r.sum())
        count += r.size
    mx = float(worst.max()) if count else 0.0
    return ResidualReport(
        model=model or gs.prefix, case=gs.params.case, relation=f"jacobi[{len(keys)} generators]",
        samples=len(pts), max_abs=mx, mean_abs=total / max(count, 1), tol=tol,
        passed=mx < tol, rejects=rejects, params=_params_echo(gs))


def all_passed(reports):
    return all(r.passed for r in reports)


def worst(reports):
    return max(reports, key=lambda r: r.max_abs)
