"""Canonical phase space: metric, points, parameters and guarded sampling."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParams, SamplingExhausted


@dataclass(frozen=True)
class Metric:
    """Diagonal Minkowski metric diag(-1, 1, ..., 1)."""

    n: int = 4

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParams("metric dimension must be positive")

    @property
    def signs(self):
        s = np.ones(self.n)
        s[0] = -1.0
        return s

    def eta(self, mu, nu):
        return float(self.signs[mu]) if mu == nu else 0.0

    def raise_index(self, v):
        return self.signs * np.asarray(v, dtype=float)


def minkowski_dot(a, b, metric=None):
    """sum_mu eta^{mu mu} a_mu b_mu over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    metric = metric or Metric(a.shape[-1])
    if metric.n != a.shape[-1]:
        raise ValueError(f"vectors have dimension {a.shape[-1]}, metric has {metric.n}")
    return np.sum(metric.signs * a * b, axis=-1)


@dataclass(frozen=True)
class PhasePoint:
    """Lowered-index positions and momenta; ``x`` and ``p`` may carry a batch axis."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if x.shape != p.shape:
            raise ValueError(f"x and p shapes differ: {x.shape} vs {p.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise ValueError("phase point has non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    @property
    def n(self):
        return self.x.shape[-1]

    def __len__(self):
        return 1 if self.x.ndim == 1 else self.x.shape[0]

    def stacked(self):
        """Concatenate to shape batch + (2n,)."""
        return np.concatenate([self.x, self.p], axis=-1)

    @classmethod
    def from_stacked(cls, z):
        z = np.asarray(z, dtype=float)
        n = z.shape[-1] // 2
        return cls(z[..., :n], z[..., n:])

    def take(self, idx):
        return PhasePoint(self.x[idx], self.p[idx])


@dataclass(frozen=True)
class ModelParams:
    alpha: float = 0.1
    beta: float = 0.1
    eps1: int = 1
    eps2: int = 1
    n: int = 4

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise InvalidParams("alpha and beta must be non-negative")
        if self.eps1 not in (1, -1) or self.eps2 not in (1, -1):
            raise InvalidParams("eps1 and eps2 must be +1 or -1")
        if self.n < 1:
            raise InvalidParams("n must be positive")

    @property
    def metric(self):
        return Metric(self.n)

    @property
    def case(self):
        """Short case label: 'pp', 'mm', 'pm' or 'mp'."""
        return ("p" if self.eps1 > 0 else "m") + ("p" if self.eps2 > 0 else "m")

    @property
    def sigma(self):
        """Sign on the right-hand side of the profile constraint."""
        return self.eps1 * self.eps2

    def replace(self, **kw):
        d = dict(alpha=self.alpha, beta=self.beta, eps1=self.eps1, eps2=self.eps2, n=self.n)
        d.update(kw)
        return ModelParams(**d)


CASES = {"pp": (1, 1), "mm": (-1, -1), "pm": (1, -1), "mp": (-1, 1)}


@dataclass(frozen=True)
class ScalarTriple:
    """Lorentz invariants (u, v, z).

    In the Yang context u = beta^2 p^2, v = alpha^2 x^2, z = alpha beta (x.p).
    In the generalized context the tilde scales are used instead and
    z = (alpha~ beta~ / AB)(x.p).
    """

    u: np.ndarray
    v: np.ndarray
    z: np.ndarray


def invariants(pt, params, scaling="yang", gen=None):
    """Scalar invariants of a phase point; ``scaling`` is 'yang' or 'generalized'."""
    m = Metric(pt.n)
    x2 = minkowski_dot(pt.x, pt.x, m)
    p2 = minkowski_dot(pt.p, pt.p, m)
    xp = minkowski_dot(pt.x, pt.p, m)
    if scaling == "yang":
        a, b, zc = params.alpha, params.beta, params.alpha * params.beta
    elif scaling == "generalized":
        if gen is None:
            raise InvalidParams("generalized invariants need GenParams")
        from .realizations import derive_constants

        dc = derive_constants(params, gen)
        a, b = dc.alpha_t, dc.beta_t
        zc = a * b / (gen.A * gen.B)
    else:
        raise ValueError(f"unknown scaling {scaling!r}")
    return ScalarTriple(u=b * b * p2, v=a * a * x2, z=zc * xp)


@dataclass(frozen=True)
class SampleSpec:
    radius: float = 1.0
    margin: float = 1e-6
    count: int = 1000
    seed: int = 0
    max_attempts: int = 1_000_000

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidParams("sample radius must be positive")
        if not 0 < self.margin < 1:
            raise InvalidParams("sample margin must lie in (0, 1)")
        if self.count < 1:
            raise InvalidParams("sample count must be positive")

    def replace(self, **kw):
        d = dict(radius=self.radius, margin=self.margin, count=self.count,
                 seed=self.seed, max_attempts=self.max_attempts)
        d.update(kw)
        return SampleSpec(**d)


def worker_count():
    """Worker cap from YPL_THREADS, else the CPU count."""
    env = os.environ.get("YPL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


_CHUNK = 250
_BLOCK = 2048


def _accept_mask(pt, guards, margin):
    ok = np.ones(len(pt), dtype=bool)
    for g in guards:
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            break
        sub = pt.take(idx)
        while True:
            try:
                vals = g.values(sub)
                break
            except DomainError as err:
                if err.mask is None or err.mask.shape != (len(sub),):
                    raise
                ok[idx[err.mask]] = False
                idx = idx[~err.mask]
                if idx.size == 0:
                    break
                sub = pt.take(idx)
        if idx.size:
            ok[idx] &= vals >= margin
    return ok


def _sample_chunk(spec, guards, n, chunk, size):
    rng = np.random.default_rng([spec.seed & 0xFFFFFFFFFFFFFFFF, chunk])
    out = []
    have = 0
    consecutive = 0
    while have < size:
        z = rng.uniform(-spec.radius, spec.radius, size=(_BLOCK, 2 * n))
        ok = _accept_mask(PhasePoint.from_stacked(z), guards, spec.margin)
        hits = np.flatnonzero(ok)
        if hits.size and consecutive + hits[0] < spec.max_attempts:
            take = hits[: size - have]
            out.append(z[take])
            have += take.size
            consecutive = _BLOCK - 1 - hits[-1]
        else:
            consecutive += _BLOCK if hits.size == 0 else int(hits[0])
        if consecutive >= spec.max_attempts:
            raise SamplingExhausted(
                f"{consecutive} consecutive rejections in chunk {chunk} (seed {spec.seed})"
            )
    return np.concatenate(out, axis=0)


def sample_points(spec, guards=(), n=4):
    """Seeded rejection sampling from the box [-R, R]^(2n).

    Every returned point has each guard value >= ``spec.margin``.  Points
    are drawn in fixed-size chunks, chunk ``i`` from the stream
    ``(seed, i)``, so the result does not depend on how many workers run.
    """
    sizes = [_CHUNK] * (spec.count // _CHUNK)
    if spec.count % _CHUNK:
        sizes.append(spec.count % _CHUNK)
    jobs = list(enumerate(sizes))
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda j: _sample_chunk(spec, guards, n, *j), jobs))
    else:
        parts = [_sample_chunk(spec, guards, n, *j) for j in jobs]
    return PhasePoint.from_stacked(np.concatenate(parts, axis=0))
