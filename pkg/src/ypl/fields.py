"""Scalar fields on phase space, evaluated on batches of jets."""

import numpy as np

from .jet import Jet
from .phasespace import Metric, PhasePoint


class Phase:
    """Coordinate jets of a common depth for a batch of phase points.

    Field results are memoized per phase, so generators sharing a radical
    (or a bracket needing both its arguments on the same lifted phase)
    are evaluated once.
    """

    def __init__(self, point, depth=0):
        self.point = point
        self.depth = depth
        n = point.n
        self.n = n
        self.metric = Metric(n)
        nv = 2 * n if depth else 0
        self.x = [Jet.variable(point.x[..., k], k, depth, nv) for k in range(n)]
        self.p = [Jet.variable(point.p[..., k], n + k, depth, nv) for k in range(n)]
        self.cache = {}
        self._lifted = None

    def lifted(self):
        if self._lifted is None:
            self._lifted = Phase(self.point, self.depth + 1)
        return self._lifted

    def dot(self, a, b):
        s = [float(v) for v in self.metric.signs]
        out = a[0] * b[0] * s[0]
        for k in range(1, self.n):
            out = out + a[k] * b[k] * s[k]
        return out

    def _memo(self, key, make):
        if key not in self.cache:
            self.cache[key] = make()
        return self.cache[key]

    @property
    def x2(self):
        return self._memo("x2", lambda: self.dot(self.x, self.x))

    @property
    def p2(self):
        return self._memo("p2", lambda: self.dot(self.p, self.p))

    @property
    def xp(self):
        return self._memo("xp", lambda: self.dot(self.x, self.p))

    def M(self, mu, nu):
        return self._memo(("M", mu, nu), lambda: self.x[mu] * self.p[nu] - self.x[nu] * self.p[mu])

    def constant(self, c):
        c = np.broadcast_to(np.asarray(c, dtype=float), self.point.x.shape[:-1])
        return Jet.constant(c, self.depth, 2 * self.n if self.depth else 0)


def _as_field(obj):
    if isinstance(obj, Field):
        return obj
    return Field.const(obj)


class Field:
    """A pure map from phase points to jets.

    ``fn`` receives a :class:`Phase` and returns a jet of the phase's depth
    (or a plain number, which is promoted to a constant).  ``guards`` are
    radicand fields whose positivity defines the field's domain.
    """

    def __init__(self, fn, name="field", guards=()):
        self.fn = fn
        self.name = name
        self.guards = tuple(guards)

    def __repr__(self):
        return f"Field({self.name!r})"

    def __call__(self, phase):
        try:
            return phase.cache[self]
        except KeyError:
            pass
        out = self.fn(phase)
        if not isinstance(out, Jet):
            out = phase.constant(out)
        phase.cache[self] = out
        return out

    def evaluate(self, pt, depth=0):
        return self(Phase(pt, depth))

    def values(self, pt):
        return self.evaluate(pt, 0).real

    def jet(self, pt):
        """Value and gradient (depth-1 jet)."""
        return self.evaluate(pt, 1)

    # construction helpers -------------------------------------------------

    @classmethod
    def const(cls, c, name=None):
        return cls(lambda ph: ph.constant(c), name or repr(c))

    @classmethod
    def coord_x(cls, mu):
        return cls(lambda ph: ph.x[mu], f"x.{mu}")

    @classmethod
    def coord_p(cls, mu):
        return cls(lambda ph: ph.p[mu], f"p.{mu}")

    def renamed(self, name):
        return Field(self.fn, name, self.guards)

    def _combine(self, other, op, sym):
        other = _as_field(other)
        a, b = self, other
        return Field(lambda ph: op(a(ph), b(ph)), f"({a.name}{sym}{b.name})",
                     _merge_guards(a.guards, b.guards))

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v, "+")

    def __radd__(self, other):
        return _as_field(other) + self

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v, "-")

    def __rsub__(self, other):
        return _as_field(other) - self

    def __mul__(self, other):
        if not isinstance(other, Field):
            c = float(other)
            a = self
            return Field(lambda ph: a(ph) * c, f"{c!r}*{a.name}", a.guards)
        return self._combine(other, lambda u, v: u * v, "*")

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if not isinstance(other, Field):
            return self * (1.0 / float(other))
        return self._combine(other, lambda u, v: u / v, "/")

    def __neg__(self):
        a = self
        return Field(lambda ph: -a(ph), f"-{a.name}", a.guards)


def _merge_guards(g1, g2):
    out = list(g1)
    for g in g2:
        if not any(g is h for h in out):
            out.append(g)
    return tuple(out)


def linear_combination(terms, name="lincomb"):
    """Field sum_k c_k F_k; zero coefficients are dropped."""
    terms = [(float(c), f) for c, f in terms if c != 0.0]
    if not terms:
        return Field.const(0.0, name)
    guards = ()
    for _, f in terms:
        guards = _merge_guards(guards, f.guards)

    def fn(ph):
        out = None
        for c, f in terms:
            t = f(ph) * c
            out = t if out is None else out + t
        return out

    return Field(fn, name, guards)


def as_point(x, p):
    return PhasePoint(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
