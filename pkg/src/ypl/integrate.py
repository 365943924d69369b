"""Adaptive Dormand-Prince 5(4) integration of batched autonomous ODEs.

The whole batch shares one step sequence (the error norm is a max over
every component), which keeps the numerical flow map a smooth function of
the initial data.  Finite differences taken across a batch therefore see
the derivative of the discrete map rather than step-selection noise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StepLimitExceeded

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_MAX_DOMAIN_RETRIES = 40


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    domain_rejected: int = 0


def _initial_step(f, y, f0, direction, rtol, atol, span):
    scale = atol + rtol * np.abs(y)
    d0 = np.max(np.abs(y) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return direction * min(h, abs(span))


def dopri5(f, y0, t0, t1, rtol=1e-10, atol=1e-10, max_steps=100_000, h0=None, stats=None,
           record=None):
    """Integrate dy/dt = f(y) from t0 to t1; returns (y(t1), last step size).

    If ``record`` is a list, (t, y, dy/dt) is appended at the start and after
    every accepted step.
    """
    y = np.array(y0, dtype=float)
    stats = stats if stats is not None else StepStats()
    span = t1 - t0
    if span == 0.0:
        return y, h0
    direction = 1.0 if span > 0 else -1.0
    k0 = f(y)
    if record is not None:
        record.append((t0, y.copy(), k0))
    h = h0 if h0 else _initial_step(f, y, k0, direction, rtol, atol, span)
    h = direction * abs(h)
    t = t0
    steps = 0
    domain_tries = 0
    while direction * (t1 - t) > 0:
        if steps >= max_steps:
            raise StepLimitExceeded(f"more than {max_steps} steps before t={t1}")
        steps += 1
        last = direction * (t + h - t1) >= 0
        if last:
            h = t1 - t
        try:
            ks = [k0]
            for i in range(1, 7):
                yi = y + h * sum(a * k for a, k in zip(_A[i], ks) if a != 0.0)
                ks.append(f(yi))
        except DomainError:
            stats.domain_rejected += 1
            domain_tries += 1
            if domain_tries > _MAX_DOMAIN_RETRIES:
                raise
            h *= 0.25
            continue
        domain_tries = 0
        y_new = yi
        err = h * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        enorm = float(np.max(np.abs(err) / scale)) if err.size else 0.0
        if enorm <= 1.0:
            t = t1 if last else t + h
            y = y_new
            k0 = ks[6]
            stats.accepted += 1
            if record is not None:
                record.append((t, y.copy(), k0))
            fac = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
            if not last:
                h *= fac
        else:
            stats.rejected += 1
            h *= max(0.2, 0.9 * enorm ** -0.2)
    return y, h


def solve_at(f, y0, times, rtol=1e-10, atol=1e-10, max_steps=1_000_000, stats=None):
    """States at each of ``times`` (first entry is the initial time)."""
    times = np.asarray(times, dtype=float)
    out = np.empty((len(times),) + np.shape(y0))
    out[0] = y0
    y = np.array(y0, dtype=float)
    h = None
    stats = stats if stats is not None else StepStats()
    for i in range(1, len(times)):
        budget = max_steps - stats.accepted - stats.rejected
        y, h = dopri5(f, y, times[i - 1], times[i], rtol, atol, budget, h, stats)
        out[i] = y
    return out


def hermite(record, times):
    """Cubic Hermite interpolation of recorded steps at ``times``."""
    ts = np.array([r[0] for r in record])
    ys = np.stack([r[1] for r in record])
    fs = np.stack([r[2] for r in record])
    times = np.asarray(times, dtype=float)
    i = np.clip(np.searchsorted(ts, times, side="right") - 1, 0, len(ts) - 2)
    h = ts[i + 1] - ts[i]
    s = ((times - ts[i]) / h)[:, None]
    h = h[:, None]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * ys[i] + h10 * h * fs[i] + h01 * ys[i + 1] + h11 * h * fs[i + 1]
