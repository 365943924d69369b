"""Nested forward-mode jets over a batch of evaluation points.

A jet of depth ``d`` over ``m - 1`` variables is stored as one dense array of
shape ``batch + (m,) * d``.  Along each jet axis slot 0 holds the value and
slots ``1..m-1`` the partial derivatives, so depth 1 is an ordinary
value-plus-gradient pair and depth ``d`` carries every mixed partial up to
order ``d`` (hyper-dual numbers, one infinitesimal per level).  The first
jet axis (position ``-d``) is the outermost level.

Differentiating a depth-``d`` jet once yields a depth ``d - 1`` jet whose
batch has grown by one axis (the variable index).  This is what makes
nested Poisson brackets exact: a bracket of two depth-``d + 1`` jets is a
depth-``d`` jet that can be bracketed again.
"""

import numpy as np

from .errors import DomainError

# --------------------------------------------------------------------------
# raw recursive kernels; ``d`` is the number of trailing jet axes


def _split(a, d):
    tail = (slice(None),) * (d - 1)
    return a[(Ellipsis, 0) + tail], a[(Ellipsis, slice(1, None)) + tail]


def _join(v, g, d):
    v = np.expand_dims(v, -d)
    shape = np.broadcast_shapes(v.shape[:-d], g.shape[:-d])
    v = np.broadcast_to(v, shape + v.shape[-d:])
    g = np.broadcast_to(g, shape + g.shape[-d:])
    return np.concatenate([v, g], axis=-d)


def _mul(a, b, d):
    if d == 0:
        return a * b
    a0, ag = _split(a, d)
    b0, bg = _split(b, d)
    v = _mul(a0, b0, d - 1)
    g = _mul(np.expand_dims(a0, -d), bg, d - 1) + _mul(ag, np.expand_dims(b0, -d), d - 1)
    return _join(v, g, d)


def _add_const(a, c, d):
    c = np.asarray(c, dtype=float)
    shape = np.broadcast_shapes(a.shape[: a.ndim - d], c.shape) + a.shape[a.ndim - d:]
    out = np.array(np.broadcast_to(a, shape), dtype=float)
    out[(Ellipsis,) + (0,) * d] += c
    return out


def _scale(a, c, d):
    c = np.asarray(c, dtype=float)
    return a * c.reshape(c.shape + (1,) * d)


def _chain(v, dv, ag, d):
    return _join(v, _mul(np.expand_dims(dv, -d), ag, d - 1), d)


def _recip(a, d):
    if d == 0:
        return 1.0 / a
    a0, ag = _split(a, d)
    v = _recip(a0, d - 1)
    return _chain(v, -_mul(v, v, d - 1), ag, d)


def _sqrt(a, d):
    if d == 0:
        return np.sqrt(a)
    a0, ag = _split(a, d)
    v = _sqrt(a0, d - 1)
    return _chain(v, 0.5 * _recip(v, d - 1), ag, d)


def _exp(a, d):
    if d == 0:
        return np.exp(a)
    a0, ag = _split(a, d)
    v = _exp(a0, d - 1)
    return _chain(v, v, ag, d)


def _log(a, d):
    if d == 0:
        return np.log(a)
    a0, ag = _split(a, d)
    return _chain(_log(a0, d - 1), _recip(a0, d - 1), ag, d)


def _sin(a, d):
    if d == 0:
        return np.sin(a)
    a0, ag = _split(a, d)
    return _chain(_sin(a0, d - 1), _cos(a0, d - 1), ag, d)


def _cos(a, d):
    if d == 0:
        return np.cos(a)
    a0, ag = _split(a, d)
    return _chain(_cos(a0, d - 1), -_sin(a0, d - 1), ag, d)


def _sinh(a, d):
    if d == 0:
        return np.sinh(a)
    a0, ag = _split(a, d)
    return _chain(_sinh(a0, d - 1), _cosh(a0, d - 1), ag, d)


def _cosh(a, d):
    if d == 0:
        return np.cosh(a)
    a0, ag = _split(a, d)
    return _chain(_cosh(a0, d - 1), _sinh(a0, d - 1), ag, d)


def _tanh(a, d):
    if d == 0:
        return np.tanh(a)
    a0, ag = _split(a, d)
    v = _tanh(a0, d - 1)
    return _chain(v, _add_const(-_mul(v, v, d - 1), 1.0, d - 1), ag, d)


def _arctan(a, d):
    if d == 0:
        return np.arctan(a)
    a0, ag = _split(a, d)
    dv = _recip(_add_const(_mul(a0, a0, d - 1), 1.0, d - 1), d - 1)
    return _chain(_arctan(a0, d - 1), dv, ag, d)


def _pow(a, c, d):
    if d == 0:
        return a**c
    a0, ag = _split(a, d)
    return _chain(_pow(a0, c, d - 1), c * _pow(a0, c - 1.0, d - 1), ag, d)


# --------------------------------------------------------------------------


class Jet:
    """Value with exact partial derivatives up to order ``depth``.

    ``data`` has shape ``batch + (nvars + 1,) * depth``.  Depth 0 is a plain
    batch of values and still supports every operation.
    """

    __slots__ = ("data", "depth")
    __array_ufunc__ = None

    def __init__(self, data, depth=0):
        self.data = np.asarray(data, dtype=float)
        self.depth = int(depth)
        if self.data.ndim < self.depth:
            raise ValueError("jet data has fewer axes than its depth")

    @classmethod
    def constant(cls, value, depth=0, nvars=0):
        value = np.asarray(value, dtype=float)
        data = np.zeros(value.shape + (nvars + 1,) * depth)
        data[(Ellipsis,) + (0,) * depth] = value
        return cls(data, depth)

    @classmethod
    def variable(cls, value, index, depth, nvars):
        """Independent variable ``index`` seeded at every level."""
        value = np.asarray(value, dtype=float)
        data = np.zeros(value.shape + (nvars + 1,) * depth)
        data[(Ellipsis,) + (0,) * depth] = value
        for level in range(depth):
            idx = [0] * depth
            idx[level] = index + 1
            data[(Ellipsis,) + tuple(idx)] = 1.0
        return cls(data, depth)

    @property
    def nvars(self):
        return self.data.shape[-1] - 1 if self.depth else 0

    @property
    def batch_shape(self):
        return self.data.shape[: self.data.ndim - self.depth]

    @property
    def real(self):
        """Plain values (batch-shaped array)."""
        return self.data[(Ellipsis,) + (0,) * self.depth]

    def _lower(self, data):
        return data if self.depth == 1 else Jet(data, self.depth - 1)

    @property
    def value(self):
        """The jet with its outermost derivative level dropped."""
        if self.depth == 0:
            return self.data
        return self._lower(_split(self.data, self.depth)[0])

    @property
    def grad(self):
        """Outermost gradient; the variable index is the last batch axis."""
        if self.depth == 0:
            raise ValueError("depth-0 jet has no gradient")
        return self._lower(_split(self.data, self.depth)[1])

    def partial(self, k):
        """Outermost partial derivative with respect to variable ``k``."""
        if self.depth == 0:
            raise ValueError("depth-0 jet has no gradient")
        tail = (slice(None),) * (self.depth - 1)
        return self._lower(self.data[(Ellipsis, k + 1) + tail])

    def __getitem__(self, idx):
        """Index the batch axes."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.data[idx + (Ellipsis,) + (slice(None),) * self.depth], self.depth)

    def __repr__(self):
        return f"Jet(depth={self.depth}, batch={self.batch_shape}, real={self.real!r})"

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.depth != self.depth:
                raise ValueError(f"jet depth mismatch: {self.depth} vs {other.depth}")
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return Jet(_add_const(self.data, other, self.depth), self.depth)
        return Jet(self.data + o.data, self.depth)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.data, self.depth)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return Jet(_scale(self.data, other, self.depth), self.depth)
        return Jet(_mul(self.data, o.data, self.depth), self.depth)

    __rmul__ = __mul__

    def reciprocal(self):
        bad = self.real == 0.0
        if np.any(bad):
            raise DomainError("division by zero", mask=bad)
        return Jet(_recip(self.data, self.depth), self.depth)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * self._coerce(other).reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0.0):
            raise DomainError("division by zero", mask=np.broadcast_to(other == 0.0, self.batch_shape))
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, c):
        if isinstance(c, Jet):
            raise TypeError("jet exponents are not supported")
        c = float(c)
        if c == int(c) and c >= 0:
            out = Jet.constant(np.ones(self.batch_shape), self.depth, self.nvars)
            for _ in range(int(c)):
                out = out * self
            return out
        bad = self.real <= 0.0
        if np.any(bad):
            raise DomainError(f"non-integer power {c} of non-positive base", mask=bad)
        return Jet(_pow(self.data, c, self.depth), self.depth)


# --------------------------------------------------------------------------
# elementary functions accepting jets or plain numbers


def _lift(kernel, x, check=None, what=""):
    if isinstance(x, Jet):
        if check is not None:
            bad = check(x.real)
            if np.any(bad):
                raise DomainError(what, mask=bad)
        return Jet(kernel(x.data, x.depth), x.depth)
    x = np.asarray(x, dtype=float)
    if check is not None:
        bad = check(x)
        if np.any(bad):
            raise DomainError(what, mask=bad)
    return kernel(x, 0)


def sqrt(x):
    return _lift(_sqrt, x, lambda r: ~(r > 0.0), "square root of non-positive radicand")


def log(x):
    return _lift(_log, x, lambda r: ~(r > 0.0), "logarithm of non-positive argument")


def exp(x):
    return _lift(_exp, x)


def sin(x):
    return _lift(_sin, x)


def cos(x):
    return _lift(_cos, x)


def sinh(x):
    return _lift(_sinh, x)


def cosh(x):
    return _lift(_cosh, x)


def tanh(x):
    return _lift(_tanh, x)


def arctan(x):
    return _lift(_arctan, x)


def power(x, c):
    if isinstance(x, Jet):
        return x**c
    return np.asarray(x, dtype=float) ** c


def real(x):
    """Plain values of a jet or number."""
    return x.real if isinstance(x, Jet) else np.asarray(x, dtype=float)
