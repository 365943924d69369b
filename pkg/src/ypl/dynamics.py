"""Deformed harmonic oscillator H = (p^2 + omega^2 x^2)/2 in the hatted generators."""

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoPeriodDetected
from .fields import Field
from .integrate import StepStats, dopri5, hermite
from .phasespace import CASES, ModelParams, PhasePoint, worker_count
from .realizations import profile_preset, yang_special

CSV_COLUMNS = ("case", "alpha", "beta", "omega", "amplitude", "energy", "period", "period_err")


@dataclass(frozen=True)
class OscillatorSpec:
    omega: float = 1.0
    amplitude: float = 0.2
    params: ModelParams = field(default_factory=ModelParams)
    profile: str = "phi2_zero"
    t_end: float = None
    dt_out: float = 0.01
    rtol: float = 1e-11
    atol: float = 1e-11

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.dt_out <= 0:
            raise ValueError("dt_out must be positive")

    @property
    def horizon(self):
        return self.t_end if self.t_end is not None else 3.25 * 2 * np.pi / self.omega

    def replace(self, **kw):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(kw)
        return OscillatorSpec(**d)


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    energy: np.ndarray
    spec: OscillatorSpec
    stats: StepStats
    rhs: object = None
    steps: list = None
    step_energy: np.ndarray = None

    @property
    def drift(self):
        """Relative energy change over the accepted integrator steps."""
        e = self.step_energy if self.step_energy is not None else self.energy
        e0 = e[0]
        return float(np.max(np.abs(e - e0)) / abs(e0)) if e0 else float(np.max(np.abs(e)))

    @property
    def off_subspace(self):
        return float(max(np.max(np.abs(self.x[:, 0])), np.max(np.abs(self.p[:, 0]))))


def hamiltonian(spec):
    """H on the realization chosen by ``spec`` (spatial components only are excited)."""
    params = spec.params
    gs = yang_special(params, profile_preset(spec.profile, params.sigma))
    xs = gs.vector("xhat")
    ps = gs.vector("phat")
    w2 = spec.omega**2

    def H(ph):
        xv = [f(ph) for f in xs]
        pv = [f(ph) for f in ps]
        return (ph.dot(pv, pv) + ph.dot(xv, xv) * w2) * 0.5

    return Field(H, "H_osc", gs.guards)


def equations(H, n):
    """dx/dt = s dH/dp, dp/dt = -s dH/dx (time evolution f' = {f, H})."""
    signs = np.ones(n)
    signs[0] = -1.0

    def rhs(y):
        g = H.evaluate(PhasePoint.from_stacked(y), 1).grad
        return np.concatenate([signs * g[..., n:], -signs * g[..., :n]], axis=-1)

    return rhs


def initial_state(spec):
    n = spec.params.n
    y = np.zeros(2 * n)
    y[1] = spec.amplitude
    return y


def simulate(spec):
    """Integrate from x_1 = amplitude, everything else zero."""
    return simulate_batch([spec])[0]


def simulate_batch(specs):
    """Integrate several amplitudes of one model in a single batch.

    The members share a step sequence.  Output samples every ``dt_out`` are
    cubic Hermite interpolants of the accepted steps, so the sampling rate
    does not constrain the step size.
    """
    head = specs[0]
    for s in specs[1:]:
        if s.replace(amplitude=head.amplitude) != head:
            raise ValueError("batched specs may differ in amplitude only")
    n = head.params.n
    H = hamiltonian(head)
    rhs = equations(H, n)
    times = np.arange(0.0, head.horizon + 0.5 * head.dt_out, head.dt_out)
    stats = StepStats()
    y0 = np.stack([initial_state(s) for s in specs])
    steps = []
    try:
        dopri5(rhs, y0, 0.0, times[-1], head.rtol, head.atol, max_steps=1_000_000,
               stats=stats, record=steps)
    except DomainError as err:
        t_exit = steps[-1][0] if steps else 0.0
        raise DomainError(f"orbit left the radicand domain near t={t_exit:.6g}: {err}") from err
    out = []
    for j, spec in enumerate(specs):
        own = [(t, y[j], f[j]) for t, y, f in steps]
        pts = PhasePoint.from_stacked(hermite(own, times))
        step_pts = PhasePoint.from_stacked(np.stack([r[1] for r in own]))
        out.append(Trajectory(times, pts.x, pts.p, H.values(pts), spec, stats, rhs, own,
                              H.values(step_pts)))
    return out


def _refine(traj, i, level):
    """Crossing time between samples i and i+1, polished by Newton steps on the integrator."""
    t0, t1 = traj.t[i], traj.t[i + 1]
    x0, x1 = traj.x[i, 1] - level, traj.x[i + 1, 1] - level
    tc = t0 + (t1 - t0) * x0 / (x0 - x1)
    lin = tc
    # restart from the last accepted step before the crossing
    k = max(j for j, r in enumerate(traj.steps) if r[0] <= tc)
    t0, y0 = traj.steps[k][0], traj.steps[k][1]
    for _ in range(6):
        y, _ = dopri5(traj.rhs, y0, t0, tc, traj.spec.rtol, traj.spec.atol)
        if tc == t0:
            y = y0
        f = y[1] - level
        v = traj.rhs(y)[1]
        if v == 0.0:
            break
        step = f / v
        tc -= step
        if abs(step) < 1e-14:
            break
    return tc, abs(tc - lin)


def measure_period(traj, refine=True):
    """Period from upward crossings of the mid-level of x_1.

    Crossing times come from linear interpolation between output samples,
    optionally polished with Newton steps on the integrator.  Returns
    (period, uncertainty).
    """
    x = traj.x[:, 1]
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi - lo < 1e-12:
        raise NoPeriodDetected("trajectory does not oscillate")
    level = 0.5 * (lo + hi)
    d = x - level
    idx = np.flatnonzero((d[:-1] < 0) & (d[1:] >= 0))
    if len(idx) < 2:
        raise NoPeriodDetected("fewer than two same-direction section crossings")
    times = []
    interp = []
    for i in idx:
        if refine and traj.steps is not None:
            tc, moved = _refine(traj, i, level)
        else:
            tc = traj.t[i] + (traj.t[i + 1] - traj.t[i]) * d[i] / (d[i] - d[i + 1])
            moved = (traj.t[i + 1] - traj.t[i]) ** 2
        times.append(tc)
        interp.append(moved)
    periods = np.diff(times)
    spread = float(np.max(periods) - np.min(periods)) if len(periods) > 1 else 0.0
    err = max(spread, 2 * max(interp) / max(len(periods), 1) if not refine else spread)
    return float(np.mean(periods)), float(err)


def energy_of(spec):
    H = hamiltonian(spec)
    y0 = initial_state(spec)
    return float(H.values(PhasePoint.from_stacked(y0)))


def _row(spec):
    return {"case": spec.params.case, "alpha": spec.params.alpha, "beta": spec.params.beta,
            "omega": spec.omega, "amplitude": spec.amplitude, "energy": float("nan"),
            "period": float("nan"), "period_err": float("nan"), "drift": float("nan"), "error": ""}


def _fill(row, traj):
    try:
        row["period"], row["period_err"] = measure_period(traj)
    except NoPeriodDetected as err:
        row["error"] = str(err)
    row["drift"] = traj.drift


def _scan_group(specs):
    rows = [_row(s) for s in specs]
    for r, s in zip(rows, specs):
        try:
            r["energy"] = energy_of(s)
        except DomainError as err:
            r["error"] = str(err)
    live = [(r, s) for r, s in zip(rows, specs) if not r["error"]]
    try:
        trajs = simulate_batch([s for _, s in live]) if live else []
        pairs = zip([r for r, _ in live], trajs)
    except DomainError:
        # isolate the failing amplitudes
        pairs = []
        for r, s in live:
            try:
                pairs.append((r, simulate(s)))
            except DomainError as err:
                r["error"] = str(err)
    for r, traj in pairs:
        _fill(r, traj)
    return rows


def period_energy_scan(amplitudes, omega=1.0, alpha=0.1, beta=0.1, cases=("pp",), n=4, **kw):
    """One row per (case, amplitude); failures are recorded and the scan continues.

    Each case is one batched integration; cases run on separate workers.
    """
    groups = []
    for case in cases:
        e1, e2 = CASES[case]
        params = ModelParams(alpha=alpha, beta=beta, eps1=e1, eps2=e2, n=n)
        groups.append([OscillatorSpec(omega=omega, amplitude=a, params=params, **kw)
                       for a in amplitudes])
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return [r for rows in pool.map(_scan_group, groups) for r in rows]


def trend(rows):
    """+1 / -1 if periods strictly increase / decrease with energy, else 0."""
    ok = [r for r in rows if np.isfinite(r["period"])]
    ok.sort(key=lambda r: r["energy"])
    d = np.diff([r["period"] for r in ok])
    if len(d) and np.all(d > 0):
        return 1
    if len(d) and np.all(d < 0):
        return -1
    return 0


def write_scan_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r["case"]] + [format(float(r[c]), ".17g") for c in CSV_COLUMNS[1:]])
